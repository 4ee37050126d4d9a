#include "risfas/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace risfas {

namespace {

double sinc(double t) {
    if (t == 0.0) return 1.0;
    const double pt = M_PI * t;
    return std::sin(pt) / pt;
}

// Normalized displacement of a port pair along one axis; a single-port axis
// pins the antenna and contributes nothing.
double axis_displacement(int idx_a, int idx_b, int n_ports, double width) {
    if (n_ports <= 1) return 0.0;
    return std::abs(idx_a - idx_b) / static_cast<double>(n_ports - 1) * width;
}

} // namespace

void PortGrid::validate() const {
    if (n1 < 1 || n2 < 1)
        throw std::invalid_argument("PortGrid: port counts must be at least 1");
    if (w1 < 0.0 || w2 < 0.0)
        throw std::invalid_argument("PortGrid: apertures must be nonnegative");
    if ((n1 > 1 && w1 <= 0.0) || (n2 > 1 && w2 <= 0.0))
        throw std::invalid_argument("PortGrid: a multi-port axis needs positive aperture");
}

PortIndex2d port_index_to_2d(const PortGrid& grid, int n) {
    grid.validate();
    if (n < 1 || n > grid.total())
        throw std::domain_error("port_index_to_2d: port index out of range");
    const int zero_based = n - 1;
    return {zero_based / grid.n2 + 1, zero_based % grid.n2 + 1};
}

double spatial_correlation(const PortGrid& grid, int n, int m) {
    const PortIndex2d a = port_index_to_2d(grid, n);
    const PortIndex2d b = port_index_to_2d(grid, m);
    const double d1 = axis_displacement(a.i1, b.i1, grid.n1, grid.w1);
    const double d2 = axis_displacement(a.i2, b.i2, grid.n2, grid.w2);
    return sinc(2.0 * std::sqrt(d1 * d1 + d2 * d2));
}

CorrelationMatrix CorrelationMatrix::from_matrix(Eigen::MatrixXd r, double eps_floor) {
    const auto n = r.rows();
    if (n < 1 || r.cols() != n)
        throw std::invalid_argument("CorrelationMatrix: matrix must be square");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(r(i, i) - 1.0) > 1e-12)
            throw std::invalid_argument("CorrelationMatrix: diagonal must be 1");
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (r(i, j) != r(j, i))
                throw std::invalid_argument("CorrelationMatrix: matrix must be symmetric");
            if (std::abs(r(i, j)) > 1.0)
                throw std::invalid_argument("CorrelationMatrix: entries must lie in [-1,1]");
        }
    }

    CorrelationMatrix out;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r, Eigen::EigenvaluesOnly);
    out.min_eig_before_ = es.eigenvalues().minCoeff();
    if (out.min_eig_before_ < eps_floor && eps_floor > 0.0) {
        // smallest delta with (lambda_min + delta)/(1 + delta) >= eps_floor
        out.delta_ = (eps_floor - out.min_eig_before_) / (1.0 - eps_floor);
        r = (r + out.delta_ * Eigen::MatrixXd::Identity(n, n)) / (1.0 + out.delta_);
        r.diagonal().setOnes();
    }
    out.mat_ = std::move(r);
    return out;
}

CorrelationMatrix correlation_matrix(const PortGrid& grid, double eps_floor) {
    grid.validate();
    const int n = grid.total();
    Eigen::MatrixXd r(n, n);
    for (int i = 1; i <= n; ++i) {
        r(i - 1, i - 1) = 1.0;
        for (int j = i + 1; j <= n; ++j) {
            const double v = spatial_correlation(grid, i, j);
            r(i - 1, j - 1) = v;
            r(j - 1, i - 1) = v; // bitwise symmetric by construction
        }
    }
    return CorrelationMatrix::from_matrix(std::move(r), eps_floor);
}

} // namespace risfas
