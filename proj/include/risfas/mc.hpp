#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "risfas/rng.hpp"
#include "risfas/secrecy.hpp"

namespace risfas::mc {

enum class Fidelity {
    full,     // Rayleigh channels + RIS phase model
    surrogate // correlated Gaussian CLT surrogate (the analytic model itself)
};

struct McConfig {
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 1;
    Fidelity fidelity = Fidelity::surrogate;
    std::uint64_t batch_size = 65536; // scheduling granularity only
    int workers = 1;

    void validate() const; // throws std::invalid_argument
};

// Sorted sample set with step-function CDF access.
class EmpiricalDistribution {
public:
    EmpiricalDistribution(std::vector<double> samples, NodeKind kind);

    std::uint64_t trials() const { return samples_.size(); }
    NodeKind kind() const { return kind_; }
    std::span<const double> samples() const { return samples_; }

    double cdf(double x) const; // right-continuous
    double quantile(double u) const;
    double mean() const;

private:
    std::vector<double> samples_;
    NodeKind kind_;
};

// One trial of per-port equivalent channel gains |h_eq|^2.
//
// full fidelity: per RIS element, a correlated complex Gaussian port vector
// (Cholesky of R) and an i.i.d. Rayleigh Alice-RIS amplitude with unit second
// moment. The legitimate node sees the coherent amplitude sum squared; the
// eavesdropper the squared modulus of the phase-misaligned complex sum.
// `psi_offset`, when non-empty (size M), fixes the per-element residual
// rotation psi_m - theta_m instead of drawing it.
std::vector<double> sample_port_gains_full(const NodeModel& node, int ris_elements,
                                           CounterRng& rng,
                                           std::span<const double> psi_offset = {});

// surrogate fidelity: a zero-mean Gaussian port vector z with covariance R;
// legitimate gain (mu + sigma z_n)^2, eavesdropper gain -M ln(1 - Phi(z_n)).
std::vector<double> sample_port_gains_surrogate(const NodeModel& node, CounterRng& rng);

// Empirical distribution of gamma = avg_snr * max_n gain_n. Bitwise
// deterministic for fixed (seed, trials, fidelity) whatever the worker count
// or batch size.
EmpiricalDistribution empirical_snr_cdf(const NodeModel& node, int ris_elements,
                                        const McConfig& cfg);

struct SopEstimate {
    double estimate = 0.0;
    double ci_lo = 0.0; // Wilson 95% interval
    double ci_hi = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t outages = 0;
    bool rule_of_three = false; // zero outages: ci_hi = 3/n one-sided bound
};

// Direct outage frequency of gamma_b <= Ro*gamma_e + Rt with independent
// draws for the two nodes.
SopEstimate empirical_sop(const SecrecyScenario& s, const McConfig& cfg);

// Kolmogorov-Smirnov distance between an analytic CDF and an empirical one,
// evaluated on `points` quantile-spaced sample points (the analytic CDF is
// expensive, so the sup is taken over a grid rather than every sample).
double ks_distance(const EmpiricalDistribution& emp,
                   const std::function<double(double)>& analytic_cdf,
                   int points = 512);

} // namespace risfas::mc
