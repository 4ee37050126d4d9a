#include "risfas/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "risfas/diag.hpp"
#include "risfas/geometry.hpp"
#include "risfas/rng.hpp"

namespace risfas {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// Acklam's rational approximation of the standard normal quantile,
// |relative error| < 1.15e-9 over (0,1). Used raw inside the QMC loop and as
// the seed for the refined public functions.
double normal_quantile_acklam(double u) {
    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    if (u < p_low) {
        const double q = std::sqrt(-2.0 * std::log(u));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (u > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - u));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = u - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// One Halley step against the erfc-based CDF pushes Acklam to full double
// precision; skipped where exp(x^2/2) would overflow (|x| > 37.5, i.e. u
// outside the representable range anyway).
double normal_quantile_refined(double u) {
    double x = normal_quantile_acklam(u);
    if (std::abs(x) < 37.5) {
        const double err = 0.5 * std::erfc(-x / kSqrt2) - u;
        const double q = err * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
        x -= q / (1.0 + 0.5 * x * q);
    }
    return x;
}

// ---- Gauss-Laguerre -------------------------------------------------------

// L_K and L_{K-1} at x by the three-term recurrence.
void laguerre_pair(int order, double x, double& lk, double& lkm1) {
    double lm = 1.0;     // L_0
    double l = 1.0 - x;  // L_1
    for (int k = 1; k < order; ++k) {
        const double lp = ((2.0 * k + 1.0 - x) * l - k * lm) / (k + 1.0);
        lm = l;
        l = lp;
    }
    lk = l;
    lkm1 = lm;
}

// ---- MVN integration ------------------------------------------------------

constexpr int kMaxDim = 64;
const double kSqrtPrimes[kMaxDim] = {
    1.4142135623730951, 1.7320508075688772, 2.23606797749979,  2.6457513110645907,
    3.3166247903554,    3.605551275463989,  4.123105625617661, 4.358898943540674,
    4.795831523312719,  5.385164807134504,  5.5677643628300215, 6.082762530298219,
    6.4031242374328485, 6.557438524302,     6.855654600401044, 7.280109889280518,
    7.681145747868608,  7.810249675906654,  8.18535277187245,  8.426149773176359,
    8.544003745317531,  8.888194417315589,  9.1104335791443,   9.433981132056603,
    9.848857801796104,  10.04987562112089,  10.14889156509222, 10.344080432788601,
    10.44030650891055,  10.63014581273465,  11.269427669584644, 11.445523142259598,
    11.704699910719626, 11.789826122551595, 12.206555615733702, 12.288205727444508,
    12.529964086141668, 12.767145334803704, 12.922847983320086, 13.152946437965905,
    13.379088160259652, 13.45362404707371,  13.820274961085254, 13.892443989449804,
    14.035668847618199, 14.106735979665885, 14.52583904633395,  14.933184523068078,
    15.066519173319364, 15.132745950421556, 15.264337522473747, 15.459624833740307,
    15.524174696260024, 16.0312195418814,   16.217274740226856, 16.40121947066906,
    16.583123951777,    16.703293088490067, 16.881943016134134, 16.940781049086115,
    17.08800749063506,  17.26267650163207,  17.549928774784245, 17.663521732655695};

// Integrand of the separation-of-variables transform at one QMC point.
double genz_sample(const Eigen::MatrixXd& L, std::span<const double> b,
                   std::span<const double> w, std::vector<double>& y) {
    const int d = static_cast<int>(b.size());
    double e = 0.5 * std::erfc(-(b[0] / L(0, 0)) / kSqrt2);
    double prod = e;
    for (int i = 1; i < d; ++i) {
        const double u = std::clamp(e * w[i - 1], 1e-300, 1.0 - 1e-16);
        y[i - 1] = normal_quantile_acklam(u);
        double s = 0.0;
        for (int j = 0; j < i; ++j) s += L(i, j) * y[j];
        e = 0.5 * std::erfc(-((b[i] - s) / L(i, i)) / kSqrt2);
        prod *= e;
        if (prod < 1e-300) return 0.0;
    }
    return prod;
}

// Shared randomized-QMC driver: integrate `eval(w)` over [0,1)^{d-1} with 8
// Richtmyer shifts, doubling rounds until the spread meets `stop(mean, err)`.
template <typename Eval, typename Stop>
MvnResult genz_integrate(int dim, const MvnAccuracy& acc, Eval&& eval, Stop&& stop) {
    constexpr int kShifts = 8;
    double shift[kShifts][kMaxDim];
    for (int s = 0; s < kShifts; ++s) {
        CounterRng rng(acc.seed, static_cast<std::uint64_t>(s) + 1);
        for (int j = 0; j < dim - 1; ++j) shift[s][j] = rng.next_uniform();
    }

    double sum[kShifts] = {0.0};
    std::uint64_t count = 0; // points per shift so far
    std::vector<double> w(static_cast<std::size_t>(dim - 1));

    std::uint64_t round_size = 512;
    const std::uint64_t budget_per_shift =
        std::max<std::uint64_t>(acc.max_samples / kShifts, 128);
    MvnResult res;
    while (true) {
        const std::uint64_t n_new = std::min(round_size, budget_per_shift - count);
        for (int s = 0; s < kShifts; ++s) {
            double acc_sum = 0.0;
            for (std::uint64_t k = count + 1; k <= count + n_new; ++k) {
                for (int j = 0; j < dim - 1; ++j) {
                    const double v =
                        std::fmod(static_cast<double>(k) * kSqrtPrimes[j] + shift[s][j], 1.0);
                    w[j] = std::abs(2.0 * v - 1.0); // baker transform
                }
                acc_sum += eval(std::span<const double>(w));
            }
            sum[s] += acc_sum;
        }
        count += n_new;

        double mean = 0.0;
        for (int s = 0; s < kShifts; ++s) mean += sum[s] / static_cast<double>(count);
        mean /= kShifts;
        double var = 0.0;
        for (int s = 0; s < kShifts; ++s) {
            const double dsh = sum[s] / static_cast<double>(count) - mean;
            var += dsh * dsh;
        }
        var /= (kShifts - 1);
        res.value = mean;
        res.error = 3.0 * std::sqrt(var / kShifts);

        if (stop(res.value, res.error)) {
            res.accuracy_met = true;
            break;
        }
        if (count >= budget_per_shift) {
            res.accuracy_met = false;
            diag::counters().mvn_budget_exhausted.fetch_add(1, std::memory_order_relaxed);
            break;
        }
        round_size *= 2;
    }
    return res;
}

Eigen::MatrixXd cholesky_or_throw(const Eigen::MatrixXd& corr) {
    Eigen::LLT<Eigen::MatrixXd> llt(corr);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument(
            "mvn_cdf: matrix not positive definite (regularize upstream)");
    return llt.matrixL();
}

} // namespace

void MvnAccuracy::validate() const {
    if (!(target_abs_error > 0.0) || target_abs_error > 0.1)
        throw std::invalid_argument("MvnAccuracy: target_abs_error must lie in (0, 0.1]");
    if (max_samples < 1000)
        throw std::invalid_argument("MvnAccuracy: max_samples must be at least 1e3");
}

double std_normal_cdf(double x) {
    return 0.5 * std::erfc(-x / kSqrt2);
}

double std_normal_quantile(double u) {
    if (!(u > 0.0) || !(u < 1.0))
        throw std::domain_error("std_normal_quantile: u must lie strictly in (0,1)");
    return normal_quantile_refined(u);
}

double inv_erf(double p) {
    if (!(std::abs(p) < 1.0))
        throw std::domain_error("inv_erf: argument must lie strictly in (-1,1)");
    if (p == 0.0) return 0.0;
    // erfinv(p) = -Phi^{-1}((1-p)/2)/sqrt(2); evaluate on the negative tail so
    // 1-|p| is exact for |p| >= 0.5.
    const double mag = -normal_quantile_refined(0.5 * (1.0 - std::abs(p))) / kSqrt2;
    return p > 0.0 ? mag : -mag;
}

double marcum_q_half(double a, double b) {
    if (a < 0.0 || b < 0.0)
        throw std::domain_error("marcum_q_half: arguments must be nonnegative");
    const double q = 0.5 * (std::erfc((b - a) / kSqrt2) + std::erfc((b + a) / kSqrt2));
    return diag::clamp_probability(q);
}

double bessel_i_neg_half(double z) {
    if (!(z > 0.0))
        throw std::domain_error("bessel_i_neg_half: argument must be positive");
    return std::sqrt(2.0 / (M_PI * z)) * std::cosh(z);
}

QuadratureRule gauss_laguerre(int order) {
    if (order < 1 || order > 64)
        throw std::domain_error("gauss_laguerre: order must lie in [1, 64]");

    // Golub-Welsch: eigenvalues of the symmetric tridiagonal Jacobi matrix.
    Eigen::VectorXd diag(order), subdiag(std::max(order - 1, 1));
    for (int k = 0; k < order; ++k) diag[k] = 2.0 * k + 1.0;
    for (int k = 1; k < order; ++k) subdiag[k - 1] = static_cast<double>(k);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, subdiag.head(std::max(order - 1, 0)),
                                  Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("gauss_laguerre: tridiagonal eigensolve failed");

    QuadratureRule rule;
    rule.order = order;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (int k = 0; k < order; ++k) {
        double x = solver.eigenvalues()[k];
        // Two Newton polish steps on the recurrence-evaluated polynomial; the
        // eigenvalues are already ~1e-14 so this is a cleanup, not a search.
        for (int it = 0; it < 2; ++it) {
            double lk, lkm1;
            laguerre_pair(order, x, lk, lkm1);
            const double deriv = order * (lk - lkm1) / x;
            x -= lk / deriv;
        }
        // Weight from the derivative identity: w = x / ((K+1) L_{K+1}(x))^2.
        // Unlike the squared first eigenvector component, this keeps full
        // relative accuracy for the exponentially small tail weights.
        double lkp1, lk;
        laguerre_pair(order + 1, x, lkp1, lk);
        const double denom = (order + 1.0) * lkp1;
        rule.nodes[k] = x;
        rule.weights[k] = x / (denom * denom);
    }

    for (int k = 0; k < order; ++k) {
        if (!(rule.nodes[k] > 0.0) || !(rule.weights[k] > 0.0) ||
            (k > 0 && !(rule.nodes[k] > rule.nodes[k - 1])))
            throw std::runtime_error("gauss_laguerre: invalid rule produced");
    }
    return rule;
}

MvnResult mvn_cdf(std::span<const double> upper, const Eigen::MatrixXd& corr,
                  const MvnAccuracy& acc) {
    acc.validate();
    const int d = static_cast<int>(upper.size());
    if (d < 1) throw std::invalid_argument("mvn_cdf: empty upper limit vector");
    if (corr.rows() != d || corr.cols() != d)
        throw std::invalid_argument("mvn_cdf: dimension mismatch between limits and matrix");
    if (d > kMaxDim) throw std::invalid_argument("mvn_cdf: dimension exceeds 64");

    if (d == 1) return {diag::clamp_probability(std_normal_cdf(upper[0])), 0.0, true};

    // Degenerate tails that need no integration.
    double tail_hi = 0.0;
    bool all_high = true;
    for (int i = 0; i < d; ++i) {
        if (upper[i] < -37.0) return {0.0, 1e-300, true};
        if (upper[i] < 8.3) all_high = false;
        else tail_hi += std_normal_cdf(-upper[i]);
    }
    if (all_high) return {1.0, tail_hi, true};

    const Eigen::MatrixXd L = cholesky_or_throw(corr);
    std::vector<double> y(static_cast<std::size_t>(d));
    MvnResult res = genz_integrate(
        d, acc, [&](std::span<const double> w) { return genz_sample(L, upper, w, y); },
        [&](double, double err) { return err <= acc.target_abs_error; });
    res.value = diag::clamp_probability(res.value);
    return res;
}

MvnResult mvn_cdf_diff(std::span<const double> lo, std::span<const double> hi,
                       const Eigen::MatrixXd& corr, const MvnAccuracy& acc) {
    acc.validate();
    const int d = static_cast<int>(lo.size());
    if (d < 1 || hi.size() != lo.size())
        throw std::invalid_argument("mvn_cdf_diff: limit vectors must match");
    if (corr.rows() != d || corr.cols() != d)
        throw std::invalid_argument("mvn_cdf_diff: dimension mismatch");
    if (d > kMaxDim) throw std::invalid_argument("mvn_cdf_diff: dimension exceeds 64");
    for (int i = 0; i < d; ++i)
        if (!(lo[i] <= hi[i]))
            throw std::invalid_argument("mvn_cdf_diff: lower limits must not exceed upper");

    if (d == 1)
        return {std::max(std_normal_cdf(hi[0]) - std_normal_cdf(lo[0]), 0.0), 0.0, true};

    const Eigen::MatrixXd L = cholesky_or_throw(corr);
    std::vector<double> y(static_cast<std::size_t>(d));
    MvnResult res = genz_integrate(
        d, acc,
        [&](std::span<const double> w) {
            return genz_sample(L, hi, w, y) - genz_sample(L, lo, w, y);
        },
        [&](double value, double err) {
            return err <= std::max(acc.target_abs_error, 1e-3 * std::abs(value));
        });
    res.value = std::max(res.value, 0.0);
    return res;
}

MvnResult mvn_cdf(std::span<const double> upper, const CorrelationMatrix& corr,
                  const MvnAccuracy& acc) {
    return mvn_cdf(upper, corr.matrix(), acc);
}

} // namespace risfas
