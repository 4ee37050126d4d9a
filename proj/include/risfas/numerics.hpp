#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace risfas {

class CorrelationMatrix; // geometry.hpp

// Gauss-Laguerre rule for \int_0^\infty e^{-x} f(x) dx ~ sum w_k f(x_k).
struct QuadratureRule {
    int order = 0;
    std::vector<double> nodes;   // strictly increasing, all > 0
    std::vector<double> weights; // all > 0, sum to 1
};

// Accuracy contract for the multivariate normal CDF estimator.
struct MvnAccuracy {
    double target_abs_error = 1e-6;
    std::uint64_t max_samples = 8'000'000; // total integrand evaluations
    std::uint64_t seed = 0x853c49e6748fea9bULL;

    void validate() const; // throws std::invalid_argument
};

struct MvnResult {
    double value = 0.0;      // clamped to [0,1]
    double error = 0.0;      // ~99% error estimate from randomizations
    bool accuracy_met = true;
};

// erf^{-1} on (-1,1). Rational initial guess polished by Newton on std::erf;
// round-trips erf to ~1e-15 away from the extreme tails.
double inv_erf(double p);

// Standard normal quantile, u in (0,1). Accurate into the far tails
// (u down to ~1e-300) via the erfc-based refinement.
double std_normal_quantile(double u);

// Standard normal CDF via erfc (accurate lower tail).
double std_normal_cdf(double x);

// Marcum Q-function of order 1/2:
//   Q_{1/2}(a,b) = 1/2 [erfc((b-a)/sqrt2) + erfc((b+a)/sqrt2)].
double marcum_q_half(double a, double b);

// Modified Bessel function I_{-1/2}(z) = sqrt(2/(pi z)) cosh(z), z > 0.
double bessel_i_neg_half(double z);

// Gauss-Laguerre rule of the given order (1..64), Golub-Welsch nodes/weights.
QuadratureRule gauss_laguerre(int order);

// P(Z <= upper) for Z ~ N(0, R) with R a correlation matrix, estimated by the
// separation-of-variables transform integrated with randomized quasi-Monte
// Carlo (Richtmyer sequence, independent shifts). Deterministic for a fixed
// acc.seed. d == 1 falls through to std_normal_cdf.
MvnResult mvn_cdf(std::span<const double> upper, const Eigen::MatrixXd& corr,
                  const MvnAccuracy& acc);
MvnResult mvn_cdf(std::span<const double> upper, const CorrelationMatrix& corr,
                  const MvnAccuracy& acc);

// P(Z <= hi) - P(Z <= lo) for componentwise lo <= hi, with both transforms
// evaluated on the same QMC points so the difference error cancels instead of
// adding. Stops at max(acc.target, 1e-3 |estimate|); the Stieltjes SOP path
// leans on this to keep per-interval CDF-increment errors proportional to the
// increments themselves.
MvnResult mvn_cdf_diff(std::span<const double> lo, std::span<const double> hi,
                       const Eigen::MatrixXd& corr, const MvnAccuracy& acc);

} // namespace risfas
