#include "risfas/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <Eigen/Cholesky>

#include "risfas/numerics.hpp"

namespace risfas::mc {

namespace {

constexpr double kRayleighScale = 0.7071067811865476; // unit second moment

// Lower Cholesky factor of the (regularized) port correlation matrix,
// computed once per run.
Eigen::MatrixXd port_factor(const NodeModel& node) {
    Eigen::LLT<Eigen::MatrixXd> llt(node.corr.matrix());
    if (llt.info() != Eigen::Success)
        throw std::runtime_error(
            "mc: correlation factorization failed; rebuild the matrix with a positive "
            "eigenvalue floor");
    return llt.matrixL();
}

// Correlated standard normal port vector z = L w.
void correlated_normals(const Eigen::MatrixXd& l, CounterRng& rng, std::vector<double>& w,
                        std::vector<double>& z) {
    const int n = static_cast<int>(l.rows());
    for (int i = 0; i < n; ++i) w[i] = rng.next_normal();
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j <= i; ++j) acc += l(i, j) * w[j];
        z[i] = acc;
    }
}

struct FullDraw {
    std::vector<double> re, im, w1, w2, gains;
};

void sample_full_into(const NodeModel& node, int ris_elements, const Eigen::MatrixXd& l,
                      CounterRng& rng, std::span<const double> psi_offset, FullDraw& d) {
    const int n = node.grid.total();
    d.gains.assign(n, 0.0);
    d.re.assign(n, 0.0);
    d.im.assign(n, 0.0);
    d.w1.resize(n);
    d.w2.resize(n);

    const bool legit = node.kind == NodeKind::legitimate;
    std::vector<double>& acc_re = d.re;
    std::vector<double>& acc_im = d.im;

    for (int m = 0; m < ris_elements; ++m) {
        // Alice -> RIS amplitude, Rayleigh with E[g^2] = 1
        const double u = rng.next_uniform();
        const double g = kRayleighScale * std::sqrt(-2.0 * std::log1p(-u));

        // RIS -> ports: correlated circularly-symmetric complex Gaussian
        for (int i = 0; i < n; ++i) d.w1[i] = rng.next_normal();
        for (int i = 0; i < n; ++i) d.w2[i] = rng.next_normal();

        double residual = 0.0;
        if (!legit) {
            // psi_m - theta_m residual rotation seen by the eavesdropper
            residual = psi_offset.empty() ? 2.0 * M_PI * rng.next_uniform()
                                          : psi_offset[static_cast<std::size_t>(m)];
        }
        const double cr = std::cos(residual), sr = std::sin(residual);

        for (int i = 0; i < n; ++i) {
            double hre = 0.0, him = 0.0;
            for (int j = 0; j <= i; ++j) {
                hre += l(i, j) * d.w1[j];
                him += l(i, j) * d.w2[j];
            }
            hre *= M_SQRT1_2; // CN(0,1) marginals
            him *= M_SQRT1_2;
            if (legit) {
                // ideal per-port phase alignment: amplitudes add coherently
                d.gains[i] += g * std::hypot(hre, him);
            } else {
                acc_re[i] += g * (hre * cr - him * sr);
                acc_im[i] += g * (hre * sr + him * cr);
            }
        }
    }

    if (legit) {
        for (int i = 0; i < n; ++i) d.gains[i] *= d.gains[i];
    } else {
        for (int i = 0; i < n; ++i)
            d.gains[i] = acc_re[i] * acc_re[i] + acc_im[i] * acc_im[i];
    }
}

double wilson_low(double phat, double n, double z) {
    const double z2 = z * z;
    const double center = phat + z2 / (2.0 * n);
    const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
    return std::max((center - half) / (1.0 + z2 / n), 0.0);
}

double wilson_high(double phat, double n, double z) {
    const double z2 = z * z;
    const double center = phat + z2 / (2.0 * n);
    const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
    return std::min((center + half) / (1.0 + z2 / n), 1.0);
}

// Run fn(trial_index) over [0, trials) on `workers` threads in batches.
// Results must be written to per-trial slots, so partitioning cannot matter.
void parallel_trials(std::uint64_t trials, int workers, std::uint64_t batch,
                     const std::function<void(std::uint64_t)>& fn) {
    if (workers <= 1 || trials <= batch) {
        for (std::uint64_t t = 0; t < trials; ++t) fn(t);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    const std::uint64_t chunk = batch;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::uint64_t start = next.fetch_add(chunk);
                if (start >= trials) break;
                const std::uint64_t stop = std::min(start + chunk, trials);
                for (std::uint64_t t = start; t < stop; ++t) fn(t);
            }
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace

void McConfig::validate() const {
    if (trials < 1000)
        throw std::invalid_argument("McConfig: trials must be at least 1e3");
    if (batch_size < 1) throw std::invalid_argument("McConfig: batch_size must be positive");
    if (workers < 1) throw std::invalid_argument("McConfig: workers must be positive");
}

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> samples, NodeKind kind)
    : samples_(std::move(samples)), kind_(kind) {
    std::sort(samples_.begin(), samples_.end());
}

double EmpiricalDistribution::cdf(double x) const {
    const auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
    return static_cast<double>(it - samples_.begin()) / static_cast<double>(samples_.size());
}

double EmpiricalDistribution::quantile(double u) const {
    if (samples_.empty()) throw std::logic_error("EmpiricalDistribution: no samples");
    const double pos = std::clamp(u, 0.0, 1.0) * static_cast<double>(samples_.size() - 1);
    return samples_[static_cast<std::size_t>(pos)];
}

double EmpiricalDistribution::mean() const {
    return std::accumulate(samples_.begin(), samples_.end(), 0.0) /
           static_cast<double>(samples_.size());
}

std::vector<double> sample_port_gains_full(const NodeModel& node, int ris_elements,
                                           CounterRng& rng,
                                           std::span<const double> psi_offset) {
    if (ris_elements < 1)
        throw std::invalid_argument("sample_port_gains_full: ris_elements must be >= 1");
    if (!psi_offset.empty() && static_cast<int>(psi_offset.size()) != ris_elements)
        throw std::invalid_argument("sample_port_gains_full: psi_offset size must equal M");
    node.validate();
    const Eigen::MatrixXd l = port_factor(node);
    FullDraw d;
    sample_full_into(node, ris_elements, l, rng, psi_offset, d);
    return d.gains;
}

std::vector<double> sample_port_gains_surrogate(const NodeModel& node, CounterRng& rng) {
    node.validate();
    const Eigen::MatrixXd l = port_factor(node);
    const int n = node.grid.total();
    std::vector<double> w(n), z(n), gains(n);
    correlated_normals(l, rng, w, z);
    if (node.kind == NodeKind::legitimate) {
        const double sigma = std::sqrt(node.clt.variance);
        for (int i = 0; i < n; ++i) {
            const double a = node.clt.mean + sigma * z[i];
            gains[i] = a * a;
        }
    } else {
        const double m = node.clt.variance; // sigma_B^2 = M
        for (int i = 0; i < n; ++i) {
            // exponential marginal through the Gaussian copula map; the upper
            // tail 1-Phi(z) is evaluated directly to keep precision
            gains[i] = -m * std::log(std_normal_cdf(-z[i]));
        }
    }
    return gains;
}

EmpiricalDistribution empirical_snr_cdf(const NodeModel& node, int ris_elements,
                                        const McConfig& cfg) {
    cfg.validate();
    node.validate();
    const Eigen::MatrixXd l = port_factor(node);
    std::vector<double> out(cfg.trials);

    const bool surrogate = cfg.fidelity == Fidelity::surrogate;
    parallel_trials(cfg.trials, cfg.workers, cfg.batch_size, [&](std::uint64_t t) {
        CounterRng rng(cfg.seed, t);
        thread_local FullDraw d;
        double best = 0.0;
        if (surrogate) {
            d.w1.resize(node.grid.total());
            d.w2.resize(node.grid.total());
            correlated_normals(l, rng, d.w1, d.w2);
            if (node.kind == NodeKind::legitimate) {
                const double sigma = std::sqrt(node.clt.variance);
                for (double z : d.w2) {
                    const double a = node.clt.mean + sigma * z;
                    best = std::max(best, a * a);
                }
            } else {
                for (double z : d.w2)
                    best = std::max(best, -node.clt.variance * std::log(std_normal_cdf(-z)));
            }
        } else {
            sample_full_into(node, ris_elements, l, rng, {}, d);
            for (double g : d.gains) best = std::max(best, g);
        }
        out[t] = node.avg_snr * best;
    });
    return EmpiricalDistribution(std::move(out), node.kind);
}

SopEstimate empirical_sop(const SecrecyScenario& s, const McConfig& cfg) {
    cfg.validate();
    s.validate();
    const Eigen::MatrixXd lb = port_factor(s.bob);
    const Eigen::MatrixXd le = port_factor(s.eve);
    const double ro = s.rate_ratio();
    const double rt = s.rate_offset();

    std::vector<std::uint8_t> outage(cfg.trials);
    const bool surrogate = cfg.fidelity == Fidelity::surrogate;

    const auto max_gain = [&](const NodeModel& node, const Eigen::MatrixXd& l,
                              CounterRng& rng, FullDraw& d) {
        double best = 0.0;
        if (surrogate) {
            d.w1.resize(node.grid.total());
            d.w2.resize(node.grid.total());
            correlated_normals(l, rng, d.w1, d.w2);
            if (node.kind == NodeKind::legitimate) {
                const double sigma = std::sqrt(node.clt.variance);
                for (double z : d.w2) {
                    const double a = node.clt.mean + sigma * z;
                    best = std::max(best, a * a);
                }
            } else {
                for (double z : d.w2)
                    best = std::max(best, -node.clt.variance * std::log(std_normal_cdf(-z)));
            }
        } else {
            sample_full_into(node, s.ris_elements, l, rng, {}, d);
            for (double g : d.gains) best = std::max(best, g);
        }
        return node.avg_snr * best;
    };

    parallel_trials(cfg.trials, cfg.workers, cfg.batch_size, [&](std::uint64_t t) {
        thread_local FullDraw d;
        CounterRng rng_b(cfg.seed, 2 * t);
        CounterRng rng_e(cfg.seed, 2 * t + 1);
        const double gb = max_gain(s.bob, lb, rng_b, d);
        const double ge = max_gain(s.eve, le, rng_e, d);
        outage[t] = (gb <= ro * ge + rt) ? 1 : 0;
    });

    SopEstimate est;
    est.trials = cfg.trials;
    est.outages = std::accumulate(outage.begin(), outage.end(), std::uint64_t{0});
    const double n = static_cast<double>(cfg.trials);
    est.estimate = static_cast<double>(est.outages) / n;
    if (est.outages == 0) {
        est.rule_of_three = true;
        est.ci_lo = 0.0;
        est.ci_hi = 3.0 / n;
    } else {
        constexpr double z95 = 1.959963984540054;
        est.ci_lo = wilson_low(est.estimate, n, z95);
        est.ci_hi = wilson_high(est.estimate, n, z95);
    }
    return est;
}

double ks_distance(const EmpiricalDistribution& emp,
                   const std::function<double(double)>& analytic_cdf, int points) {
    const auto samples = emp.samples();
    const std::uint64_t n = emp.trials();
    if (n == 0) throw std::logic_error("ks_distance: empty distribution");
    double best = 0.0;
    double prev_x = std::numeric_limits<double>::quiet_NaN();
    for (int j = 0; j < points; ++j) {
        const double x = emp.quantile((j + 0.5) / points);
        if (x == prev_x) continue;
        prev_x = x;
        const double f = analytic_cdf(x);
        // compare against the step function on both sides of the jump
        const auto hi = std::upper_bound(samples.begin(), samples.end(), x) - samples.begin();
        const auto lo = std::lower_bound(samples.begin(), samples.end(), x) - samples.begin();
        best = std::max(best, std::abs(f - static_cast<double>(hi) / static_cast<double>(n)));
        best = std::max(best, std::abs(f - static_cast<double>(lo) / static_cast<double>(n)));
    }
    return best;
}

} // namespace risfas::mc
