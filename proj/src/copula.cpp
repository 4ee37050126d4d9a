#include "risfas/copula.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>

#include "risfas/diag.hpp"

namespace risfas {

namespace {

// log det R and 1'R^{-1}1 from one Cholesky pass.
void copula_factors(const CorrelationMatrix& corr, double& log_det, double& ones_rinv_ones) {
    const int n = corr.dim();
    Eigen::LLT<Eigen::MatrixXd> llt(corr.matrix());
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("copula: matrix not positive definite (regularize upstream)");
    log_det = 0.0;
    const Eigen::MatrixXd l = llt.matrixL();
    for (int i = 0; i < n; ++i) log_det += 2.0 * std::log(l(i, i));
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    ones_rinv_ones = ones.dot(llt.solve(ones));
}

} // namespace

MvnResult copula_diag_cdf_from_z(double z, const CorrelationMatrix& corr,
                                 const MvnAccuracy& acc) {
    const int n = corr.dim();
    if (z < -8.0) return {0.0, std_normal_cdf(z), true};
    if (z > 8.0) return {1.0, n * std_normal_cdf(-z), true};
    if (n == 1) return {std_normal_cdf(z), 0.0, true};
    const std::vector<double> upper(static_cast<std::size_t>(n), z);
    return mvn_cdf(upper, corr, acc);
}

MvnResult copula_diag_cdf(double u, const CorrelationMatrix& corr, const MvnAccuracy& acc) {
    if (u < 0.0 || u > 1.0)
        throw std::domain_error("copula_diag_cdf: u must lie in [0,1]");
    if (u == 0.0) return {0.0, 0.0, true};
    if (u == 1.0) return {1.0, 0.0, true};
    return copula_diag_cdf_from_z(std_normal_quantile(u), corr, acc);
}

MvnResult copula_diag_cdf_increment(double z_lo, double z_hi, const CorrelationMatrix& corr,
                                    const MvnAccuracy& acc) {
    if (!(z_lo <= z_hi))
        throw std::invalid_argument("copula_diag_cdf_increment: z_lo must not exceed z_hi");
    const int n = corr.dim();
    // fall back to endpoint evaluations when a shortcut region is touched
    if (z_lo < -8.0 || z_hi > 8.0 || n == 1) {
        const MvnResult a = copula_diag_cdf_from_z(z_lo, corr, acc);
        const MvnResult b = copula_diag_cdf_from_z(z_hi, corr, acc);
        return {std::max(b.value - a.value, 0.0), a.error + b.error,
                a.accuracy_met && b.accuracy_met};
    }
    const std::vector<double> lo(static_cast<std::size_t>(n), z_lo);
    const std::vector<double> hi(static_cast<std::size_t>(n), z_hi);
    return mvn_cdf_diff(lo, hi, corr.matrix(), acc);
}

double copula_diag_quadform_coeff(const CorrelationMatrix& corr) {
    double log_det, ones_rinv_ones;
    copula_factors(corr, log_det, ones_rinv_ones);
    return ones_rinv_ones - corr.dim();
}

double copula_diag_log_density_from_z(double z, const CorrelationMatrix& corr) {
    if (corr.dim() == 1) return 0.0;
    double log_det, ones_rinv_ones;
    copula_factors(corr, log_det, ones_rinv_ones);
    return -0.5 * z * z * (ones_rinv_ones - corr.dim()) - 0.5 * log_det;
}

double copula_diag_log_density(double u, const CorrelationMatrix& corr) {
    if (!(u > 0.0) || !(u < 1.0))
        throw std::domain_error("copula_diag_density: u must lie strictly in (0,1)");
    if (corr.dim() == 1) return 0.0;
    return copula_diag_log_density_from_z(std_normal_quantile(u), corr);
}

double copula_diag_density(double u, const CorrelationMatrix& corr) {
    return std::exp(copula_diag_log_density(u, corr));
}

} // namespace risfas
