#pragma once

namespace risfas {

// Transmit power, noise and geometry of one RIS-relayed link.
// Powers are in dBm, distances in meters.
struct LinkBudget {
    double power_dbm = 0.0;
    double noise_dbm = -70.0;
    double dist_ar_m = 100.0;  // Alice -> RIS
    double dist_rn_m = 500.0;  // RIS -> node
    double pathloss_exp = 2.1; // must exceed 2

    void validate() const; // throws std::invalid_argument
};

// Average SNR: P / (sigma^2 (d_ar * d_rn)^alpha), dBm converted to watts.
double avg_snr(const LinkBudget& lb);

enum class NodeKind { legitimate, eavesdropper };

// Gaussian surrogate of the combined RIS channel sum at one port.
struct CltParams {
    double mean = 0.0;
    double variance = 1.0;
    double noncentrality = 0.0; // mean^2 for the aligned link, 0 otherwise
};

// Aligned (Bob) link: mean M*pi/4, variance M*(1 - pi^2/16).
// Counts a diagnostic warning for M < 4 where the CLT is a stretch.
CltParams bob_clt_params(int ris_elements);

// Misaligned (Eve) link: zero mean, variance M.
CltParams eve_clt_params(int ris_elements);

// CDF/PDF of the squared aligned gain A^2 (noncentral chi-square, 1 dof,
// scaled by the surrogate variance).
double cdf_A2(double a, const CltParams& p);
double pdf_A2(double a, const CltParams& p); // a > 0; integrable singularity at 0

// CDF/PDF of the squared misaligned gain B^2 (exponential with mean M).
double cdf_B2(double b, int ris_elements);
double pdf_B2(double b, int ris_elements);

} // namespace risfas
