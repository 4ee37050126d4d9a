#pragma once

#include <atomic>
#include <cstdint>

namespace risfas::diag {

// Process-wide diagnostic counters. Numerical code clamps out-of-range
// probabilities silently when the excursion is rounding-level and bumps
// these counters when it is not, so callers (CLI, tests) can surface
// suspicious behaviour without threading a logger through every call.
struct Counters {
    std::atomic<std::uint64_t> probability_clamps{0};   // excursion beyond 1e-9
    std::atomic<std::uint64_t> clt_small_m_warnings{0}; // CLT params requested with M < 4
    std::atomic<std::uint64_t> mvn_budget_exhausted{0}; // accuracy target missed at budget
};

Counters& counters();

// Clamp a computed probability to [0,1]; excursions beyond `tol` are counted.
double clamp_probability(double p, double tol = 1e-9);

} // namespace risfas::diag
