#pragma once

#include <stdexcept>
#include <string>

#include "risfas/channel.hpp"
#include "risfas/copula.hpp"
#include "risfas/geometry.hpp"
#include "risfas/numerics.hpp"

namespace risfas {

// One receiver (Bob or Eve): port grid, its correlation structure, the CLT
// surrogate of the per-port gain, and the average SNR of the link.
struct NodeModel {
    PortGrid grid;
    CorrelationMatrix corr;
    CltParams clt;
    double avg_snr = 1.0; // linear
    NodeKind kind = NodeKind::legitimate;

    static NodeModel legitimate(const PortGrid& grid, int ris_elements, double avg_snr_linear);
    static NodeModel eavesdropper(const PortGrid& grid, int ris_elements, double avg_snr_linear);

    void validate() const;
};

// Full wiretap scenario.
struct SecrecyScenario {
    int ris_elements = 6;
    NodeModel bob;
    NodeModel eve;
    double rate_bits = 3.0; // target secrecy rate R_s
    int glq_order = 2;
    MvnAccuracy mvn_acc{};

    double rate_ratio() const;  // R_o = 2^{R_s}
    double rate_offset() const; // R_t = R_o - 1
    void validate() const;
};

enum class PdfMode { paper, derivative };
enum class SopPath { glq, reference };

struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Probability with its numerical-error estimate.
struct ProbResult {
    double value = 0.0;
    double error = 0.0;
    bool accuracy_met = true;
};

struct SopResult {
    double value = 0.0;
    double error = 0.0;
    bool accuracy_met = true;
    // Set when the value is smaller than the attached error estimate, i.e.
    // the point sits below the resolvable numerical floor.
    bool below_numerical_floor = false;
    int cdf_evaluations = 0; // bob-side MVN calls (diagnostic)
};

// F_{gamma_b}: diagonal copula of the noncentral chi-square marginal.
ProbResult cdf_gamma_b(double gamma, const SecrecyScenario& s);

// F_{gamma_e}: diagonal copula of the exponential marginal.
ProbResult cdf_gamma_e(double gamma, const SecrecyScenario& s);

// Density of gamma_b. `paper` evaluates the closed form
// [f_{A^2}(g/snr)]^{N_b}/snr * c(u,...,u;R); `derivative` central-differences
// cdf_gamma_b with a step adapted to the MVN accuracy. The two modes embody
// different readings of the max-distribution density and are not expected to
// coincide for N > 1.
double pdf_gamma_b(double gamma, const SecrecyScenario& s, PdfMode mode);
double pdf_gamma_e(double gamma, const SecrecyScenario& s, PdfMode mode);

// max{log2(1+gb) - log2(1+ge), 0} in bits per channel use.
double secrecy_capacity(double gamma_b, double gamma_e);

// Secrecy outage probability P(Cs <= Rs).
//  - SopPath::glq: Gauss-Laguerre expansion of the outage integral with the
//    closed-form eavesdropper density (order = scenario glq_order).
//  - SopPath::reference: adaptive Riemann-Stieltjes integration of
//    F_{gamma_b}(Ro x + Rt) against dF_{gamma_e}(x); the self-consistent path
//    used for Monte Carlo cross-validation.
// Throws NumericalError when the adaptive refinement fails to converge.
SopResult sop(const SecrecyScenario& s, SopPath path);

} // namespace risfas
