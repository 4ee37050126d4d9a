#include "risfas/diag.hpp"

#include <algorithm>

namespace risfas::diag {

Counters& counters() {
    static Counters c;
    return c;
}

double clamp_probability(double p, double tol) {
    if (p < 0.0) {
        if (p < -tol) counters().probability_clamps.fetch_add(1, std::memory_order_relaxed);
        return 0.0;
    }
    if (p > 1.0) {
        if (p > 1.0 + tol) counters().probability_clamps.fetch_add(1, std::memory_order_relaxed);
        return 1.0;
    }
    return p;
}

} // namespace risfas::diag
