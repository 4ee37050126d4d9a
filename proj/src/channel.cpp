#include "risfas/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "risfas/diag.hpp"
#include "risfas/numerics.hpp"

namespace risfas {

namespace {

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

} // namespace

void LinkBudget::validate() const {
    if (!(dist_ar_m > 0.0) || !(dist_rn_m > 0.0))
        throw std::invalid_argument("LinkBudget: distances must be positive");
    if (!(pathloss_exp > 2.0))
        throw std::invalid_argument("LinkBudget: pathloss_exp must exceed 2");
    if (!std::isfinite(power_dbm) || !std::isfinite(noise_dbm))
        throw std::invalid_argument("LinkBudget: powers must be finite");
}

double avg_snr(const LinkBudget& lb) {
    lb.validate();
    const double p = dbm_to_watts(lb.power_dbm);
    const double noise = dbm_to_watts(lb.noise_dbm);
    return p / (noise * std::pow(lb.dist_ar_m * lb.dist_rn_m, lb.pathloss_exp));
}

CltParams bob_clt_params(int ris_elements) {
    if (ris_elements < 1)
        throw std::invalid_argument("bob_clt_params: ris_elements must be >= 1");
    if (ris_elements < 4)
        diag::counters().clt_small_m_warnings.fetch_add(1, std::memory_order_relaxed);
    const double mean = ris_elements * M_PI / 4.0;
    const double variance = ris_elements * (1.0 - M_PI * M_PI / 16.0);
    return {mean, variance, mean * mean};
}

CltParams eve_clt_params(int ris_elements) {
    if (ris_elements < 1)
        throw std::invalid_argument("eve_clt_params: ris_elements must be >= 1");
    return {0.0, static_cast<double>(ris_elements), 0.0};
}

double cdf_A2(double a, const CltParams& p) {
    if (a < 0.0) throw std::domain_error("cdf_A2: argument must be nonnegative");
    if (a == 0.0) return 0.0;
    const double q = marcum_q_half(std::sqrt(p.noncentrality / p.variance),
                                   std::sqrt(a / p.variance));
    return diag::clamp_probability(1.0 - q);
}

double pdf_A2(double a, const CltParams& p) {
    if (!(a > 0.0))
        throw std::domain_error("pdf_A2: density evaluation requires a > 0");
    const double s2 = p.variance;
    const double tau = p.noncentrality;
    if (tau == 0.0) {
        // central chi-square, 1 dof, scaled
        return std::exp(-0.5 * a / s2) / std::sqrt(2.0 * M_PI * a * s2);
    }
    // 1/(2 s2) (a/tau)^{-1/4} exp(-(a+tau)/(2 s2)) I_{-1/2}(sqrt(a tau)/s2),
    // assembled in log space: the Bessel factor grows like e^z.
    const double z = std::sqrt(a * tau) / s2;
    const double log_bessel =
        0.5 * std::log(2.0 / (M_PI * z)) + z + std::log1p(std::exp(-2.0 * z)) - M_LN2;
    const double log_pdf = -std::log(2.0 * s2) - 0.25 * std::log(a / tau) -
                           (a + tau) / (2.0 * s2) + log_bessel;
    return std::exp(log_pdf);
}

double cdf_B2(double b, int ris_elements) {
    if (b < 0.0) throw std::domain_error("cdf_B2: argument must be nonnegative");
    if (ris_elements < 1) throw std::invalid_argument("cdf_B2: ris_elements must be >= 1");
    return -std::expm1(-b / ris_elements);
}

double pdf_B2(double b, int ris_elements) {
    if (b < 0.0) throw std::domain_error("pdf_B2: argument must be nonnegative");
    if (ris_elements < 1) throw std::invalid_argument("pdf_B2: ris_elements must be >= 1");
    return std::exp(-b / ris_elements) / ris_elements;
}

} // namespace risfas
