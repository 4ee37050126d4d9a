#include "risfas/secrecy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "risfas/diag.hpp"

namespace risfas {

namespace {

// Marginal value carried as (u, survival) so both tails keep full precision.
struct Marginal {
    double u;        // F(gamma/snr)
    double survival; // 1 - u, computed directly
};

Marginal bob_marginal(double gamma, const SecrecyScenario& s) {
    const double a = gamma / s.bob.avg_snr;
    if (a <= 0.0) return {0.0, 1.0};
    const double q = marcum_q_half(std::sqrt(s.bob.clt.noncentrality / s.bob.clt.variance),
                                   std::sqrt(a / s.bob.clt.variance));
    return {1.0 - q, q};
}

Marginal eve_marginal(double gamma, const SecrecyScenario& s) {
    const double b = gamma / s.eve.avg_snr;
    if (b <= 0.0) return {0.0, 1.0};
    const double e = -b / s.ris_elements;
    return {-std::expm1(e), std::exp(e)};
}

// Phi^{-1}(u) evaluated from whichever side is well conditioned.
double quantile_two_sided(const Marginal& m) {
    if (m.u <= 0.0) return -std::numeric_limits<double>::infinity();
    if (m.survival <= 0.0) return std::numeric_limits<double>::infinity();
    if (m.u <= 0.5) return std_normal_quantile(m.u);
    return -std_normal_quantile(m.survival);
}

ProbResult copula_cdf_at(const Marginal& m, const CorrelationMatrix& corr,
                         const MvnAccuracy& acc) {
    if (m.u <= 0.0) return {0.0, 0.0, true};
    if (m.survival <= 0.0) return {1.0, 0.0, true};
    const MvnResult r = copula_diag_cdf_from_z(quantile_two_sided(m), corr, acc);
    return {r.value, r.error, r.accuracy_met};
}

double finite_difference_step(double gamma, const MvnAccuracy& acc) {
    // noise ~ target/h vs truncation ~ h^2: cube-root balance, floored so the
    // two evaluation points stay distinct.
    return gamma * std::max(0.1 * std::cbrt(acc.target_abs_error), 1e-7);
}

} // namespace

NodeModel NodeModel::legitimate(const PortGrid& grid, int ris_elements, double avg_snr_linear) {
    NodeModel n{grid, correlation_matrix(grid), bob_clt_params(ris_elements), avg_snr_linear,
                NodeKind::legitimate};
    n.validate();
    return n;
}

NodeModel NodeModel::eavesdropper(const PortGrid& grid, int ris_elements, double avg_snr_linear) {
    NodeModel n{grid, correlation_matrix(grid), eve_clt_params(ris_elements), avg_snr_linear,
                NodeKind::eavesdropper};
    n.validate();
    return n;
}

void NodeModel::validate() const {
    grid.validate();
    if (corr.dim() != grid.total())
        throw std::invalid_argument("NodeModel: correlation dimension does not match grid");
    if (!(avg_snr > 0.0)) throw std::invalid_argument("NodeModel: avg_snr must be positive");
    if (!(clt.variance > 0.0)) throw std::invalid_argument("NodeModel: variance must be positive");
    if (clt.noncentrality < 0.0)
        throw std::invalid_argument("NodeModel: noncentrality must be nonnegative");
}

double SecrecyScenario::rate_ratio() const { return std::exp2(rate_bits); }
double SecrecyScenario::rate_offset() const { return rate_ratio() - 1.0; }

void SecrecyScenario::validate() const {
    if (ris_elements < 1)
        throw std::invalid_argument("SecrecyScenario: ris_elements must be >= 1");
    if (rate_bits < 0.0)
        throw std::invalid_argument("SecrecyScenario: rate_bits must be nonnegative");
    if (glq_order < 1 || glq_order > 64)
        throw std::invalid_argument("SecrecyScenario: glq_order must lie in [1, 64]");
    mvn_acc.validate();
    bob.validate();
    eve.validate();
    if (bob.kind != NodeKind::legitimate || eve.kind != NodeKind::eavesdropper)
        throw std::invalid_argument("SecrecyScenario: node kinds are swapped");
}

ProbResult cdf_gamma_b(double gamma, const SecrecyScenario& s) {
    if (gamma < 0.0) throw std::domain_error("cdf_gamma_b: gamma must be nonnegative");
    return copula_cdf_at(bob_marginal(gamma, s), s.bob.corr, s.mvn_acc);
}

ProbResult cdf_gamma_e(double gamma, const SecrecyScenario& s) {
    if (gamma < 0.0) throw std::domain_error("cdf_gamma_e: gamma must be nonnegative");
    return copula_cdf_at(eve_marginal(gamma, s), s.eve.corr, s.mvn_acc);
}

double pdf_gamma_b(double gamma, const SecrecyScenario& s, PdfMode mode) {
    if (!(gamma > 0.0)) throw std::domain_error("pdf_gamma_b: gamma must be positive");
    if (mode == PdfMode::derivative) {
        const double h = finite_difference_step(gamma, s.mvn_acc);
        const double lo = cdf_gamma_b(gamma - h, s).value;
        const double hi = cdf_gamma_b(gamma + h, s).value;
        return std::max((hi - lo) / (2.0 * h), 0.0);
    }
    const Marginal m = bob_marginal(gamma, s);
    if (m.u <= 0.0 || m.survival <= 0.0) return 0.0;
    const int nb = s.bob.grid.total();
    const double log_marginal = std::log(pdf_A2(gamma / s.bob.avg_snr, s.bob.clt));
    const double log_c = copula_diag_log_density_from_z(quantile_two_sided(m), s.bob.corr);
    return std::exp(nb * log_marginal + log_c - std::log(s.bob.avg_snr));
}

double pdf_gamma_e(double gamma, const SecrecyScenario& s, PdfMode mode) {
    if (mode == PdfMode::derivative) {
        if (!(gamma > 0.0))
            throw std::domain_error("pdf_gamma_e: derivative mode requires gamma > 0");
        const double h = finite_difference_step(gamma, s.mvn_acc);
        const double lo = cdf_gamma_e(gamma - h, s).value;
        const double hi = cdf_gamma_e(gamma + h, s).value;
        return std::max((hi - lo) / (2.0 * h), 0.0);
    }
    if (gamma < 0.0) throw std::domain_error("pdf_gamma_e: gamma must be nonnegative");
    const int ne = s.eve.grid.total();
    const double snr = s.eve.avg_snr;
    const int m_ris = s.ris_elements;
    if (gamma == 0.0) {
        // boundary limit of the closed form: sign of the quadratic-form
        // coefficient decides between 0, finite and divergent
        if (ne == 1) return 1.0 / (m_ris * snr);
        const double coeff = copula_diag_quadform_coeff(s.eve.corr);
        if (std::abs(coeff) < 1e-12) {
            const double log_inv_sqrt_det = copula_diag_log_density_from_z(0.0, s.eve.corr);
            return std::exp(-ne * std::log(static_cast<double>(m_ris)) + log_inv_sqrt_det) / snr;
        }
        return coeff > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    const Marginal m = eve_marginal(gamma, s);
    if (m.survival <= 0.0) return 0.0;
    const double log_marginal = -gamma / (snr * m_ris) - std::log(static_cast<double>(m_ris));
    const double log_c = copula_diag_log_density_from_z(quantile_two_sided(m), s.eve.corr);
    return std::exp(ne * log_marginal + log_c - std::log(snr));
}

double secrecy_capacity(double gamma_b, double gamma_e) {
    if (gamma_b < 0.0 || gamma_e < 0.0)
        throw std::domain_error("secrecy_capacity: SNRs must be nonnegative");
    return std::max(std::log2(1.0 + gamma_b) - std::log2(1.0 + gamma_e), 0.0);
}

namespace {

SopResult sop_glq(const SecrecyScenario& s) {
    const QuadratureRule rule = gauss_laguerre(s.glq_order);
    const double ro = s.rate_ratio();
    const double rt = s.rate_offset();
    const double snr_e = s.eve.avg_snr;
    const int ne = s.eve.grid.total();
    const int m_ris = s.ris_elements;

    SopResult out;
    double sum = 0.0, err = 0.0;
    for (int k = 0; k < rule.order; ++k) {
        const double eps = rule.nodes[k];
        const Marginal me = eve_marginal(eps, s);
        if (me.survival <= 0.0) continue; // density underflows with it
        const double log_marginal =
            -eps / (snr_e * m_ris) - std::log(static_cast<double>(m_ris));
        const double log_c =
            copula_diag_log_density_from_z(quantile_two_sided(me), s.eve.corr);
        const double log_weight =
            std::log(rule.weights[k]) + eps + ne * log_marginal + log_c - std::log(snr_e);
        const double weight = std::exp(log_weight);
        if (weight == 0.0) continue;

        const ProbResult fb = cdf_gamma_b(ro * eps + rt, s);
        ++out.cdf_evaluations;
        sum += weight * fb.value;
        err += weight * fb.error;
        out.accuracy_met = out.accuracy_met && fb.accuracy_met;
    }
    out.value = diag::clamp_probability(sum);
    out.error = err;
    out.below_numerical_floor = out.value < out.error;
    return out;
}

struct StieltjesInterval {
    double a = 0, b = 0;
    double dfe = 0, dfe_err = 0;   // eavesdropper CDF increment over [a,b]
    double dfe1 = 0, dfe1_err = 0; // increments of the two halves
    double dfe2 = 0, dfe2_err = 0;
    double coarse = 0, refined = 0;
    double discrepancy = 0;
    double err_contrib = 0; // propagated MVN errors, increment-weighted
};

SopResult sop_reference(const SecrecyScenario& s) {
    constexpr double kTailQ = 1e-12;
    constexpr double kRelTol = 1e-3;
    constexpr double kAbsTol = 1e-12;
    constexpr int kInitIntervals = 16;
    constexpr int kMaxIntervals = 4000;

    const double ro = s.rate_ratio();
    const double rt = s.rate_offset();
    const double scale = s.eve.avg_snr * s.ris_elements; // per-port mean of gamma_e

    SopResult out;
    std::map<double, ProbResult> fb_memo; // refinement re-hits midpoints bitwise

    const auto z_of = [&](double x) { return quantile_two_sided(eve_marginal(x, s)); };
    const auto increment = [&](double xa, double xb) {
        const MvnResult r = copula_diag_cdf_increment(z_of(xa), z_of(xb), s.eve.corr, s.mvn_acc);
        out.accuracy_met = out.accuracy_met && r.accuracy_met;
        return r;
    };
    const auto fb = [&](double x) {
        if (const auto it = fb_memo.find(x); it != fb_memo.end()) return it->second;
        const ProbResult r = cdf_gamma_b(ro * x + rt, s);
        out.accuracy_met = out.accuracy_met && r.accuracy_met;
        ++out.cdf_evaluations;
        fb_memo.emplace(x, r);
        return r;
    };

    const auto make_interval = [&](double a, double b, double dfe, double dfe_err) {
        StieltjesInterval iv;
        iv.a = a;
        iv.b = b;
        iv.dfe = dfe;
        iv.dfe_err = dfe_err;
        const double m = 0.5 * (a + b);
        const MvnResult i1 = increment(a, m);
        const MvnResult i2 = increment(m, b);
        iv.dfe1 = i1.value;
        iv.dfe1_err = i1.error;
        iv.dfe2 = i2.value;
        iv.dfe2_err = i2.error;
        const ProbResult fb_m = fb(m);
        const ProbResult fb_1 = fb(0.5 * (a + m));
        const ProbResult fb_2 = fb(0.5 * (m + b));
        iv.coarse = fb_m.value * dfe;
        iv.refined = fb_1.value * iv.dfe1 + fb_2.value * iv.dfe2;
        iv.discrepancy = std::abs(iv.refined - iv.coarse) +
                         std::abs(iv.dfe1 + iv.dfe2 - dfe) * fb_m.value;
        iv.err_contrib = iv.dfe1 * fb_1.error + iv.dfe2 * fb_2.error +
                         fb_1.value * iv.dfe1_err + fb_2.value * iv.dfe2_err;
        return iv;
    };

    // quantile-spaced initial grid on the eavesdropper marginal; beyond x_hi
    // at most N_e * kTailQ of eavesdropper mass remains (union bound)
    const double x_hi = scale * -std::log(kTailQ);
    std::vector<double> xs(kInitIntervals + 1);
    xs[0] = 0.0;
    for (int j = 1; j <= kInitIntervals; ++j) {
        const double uj = static_cast<double>(j) / kInitIntervals * (1.0 - kTailQ);
        xs[j] = std::min(-scale * std::log1p(-uj), x_hi);
    }
    xs.back() = x_hi;

    const auto worse = [](const StieltjesInterval& l, const StieltjesInterval& r) {
        return l.discrepancy < r.discrepancy;
    };
    std::multiset<StieltjesInterval, decltype(worse)> leaves(worse);
    for (std::size_t j = 0; j + 1 < xs.size(); ++j) {
        const MvnResult whole = increment(xs[j], xs[j + 1]);
        leaves.insert(make_interval(xs[j], xs[j + 1], whole.value, whole.error));
    }

    const auto totals = [&leaves]() {
        double v = 0.0, d = 0.0;
        for (const auto& iv : leaves) {
            v += iv.refined;
            d += iv.discrepancy;
        }
        return std::pair{v, d};
    };

    auto [value, disc] = totals();
    while (disc > std::max(kRelTol * std::abs(value), kAbsTol)) {
        if (static_cast<int>(leaves.size()) >= kMaxIntervals) {
            std::ostringstream msg;
            msg << "sop(reference): adaptive Stieltjes integration failed to converge: "
                << leaves.size() << " intervals, estimate " << value << ", residual " << disc
                << ", tolerance " << std::max(kRelTol * std::abs(value), kAbsTol);
            throw NumericalError(msg.str());
        }
        const auto worst = std::prev(leaves.end());
        const StieltjesInterval iv = *worst;
        leaves.erase(worst);
        const double m = 0.5 * (iv.a + iv.b);
        leaves.insert(make_interval(iv.a, m, iv.dfe1, iv.dfe1_err));
        leaves.insert(make_interval(m, iv.b, iv.dfe2, iv.dfe2_err));
        std::tie(value, disc) = totals();
    }

    double err_mvn = 0.0;
    for (const auto& iv : leaves) err_mvn += iv.err_contrib;

    out.value = diag::clamp_probability(value);
    out.error = disc + err_mvn + s.eve.grid.total() * kTailQ;
    out.below_numerical_floor = out.value < out.error;
    return out;
}

} // namespace

SopResult sop(const SecrecyScenario& s, SopPath path) {
    s.validate();
    return path == SopPath::glq ? sop_glq(s) : sop_reference(s);
}

} // namespace risfas
