#pragma once

#include "risfas/geometry.hpp"
#include "risfas/numerics.hpp"

namespace risfas {

// Gaussian copula evaluated on the diagonal (all marginals at the same u),
// which is exactly the CDF of the max over correlated port gains.
//
// C(u,...,u; R) = Phi_R(z,...,z) with z = std_normal_quantile(u).
// u = 0 and u = 1 short-circuit to 0 / 1; |z| > 8 short-circuits with a
// first-order union bound so deep SOP tails are not drowned in QMC noise.
MvnResult copula_diag_cdf(double u, const CorrelationMatrix& corr,
                          const MvnAccuracy& acc);

// Same evaluation parameterized by z = Phi^{-1}(u) directly; the secrecy
// module computes z from tail survivals to keep precision where u would
// round to 0 or 1.
MvnResult copula_diag_cdf_from_z(double z, const CorrelationMatrix& corr,
                                 const MvnAccuracy& acc);

// Increment C(z_hi,...) - C(z_lo,...) evaluated with common random numbers,
// so its error scales with the increment rather than the endpoint values.
MvnResult copula_diag_cdf_increment(double z_lo, double z_hi, const CorrelationMatrix& corr,
                                    const MvnAccuracy& acc);

// Gaussian copula density at the diagonal point,
//   c(u,...,u; R) = exp(-z^2 (1'R^{-1}1 - N)/2) / sqrt(det R),
// in log form (the GLQ path combines it with other exponentials).
// Requires 0 < u < 1 and positive-definite R.
double copula_diag_log_density(double u, const CorrelationMatrix& corr);
double copula_diag_log_density_from_z(double z, const CorrelationMatrix& corr);
double copula_diag_density(double u, const CorrelationMatrix& corr);

// 1'R^{-1}1 - N, the diagonal quadratic-form coefficient of the copula
// density (0 for R = I, negative for net-positive correlation).
double copula_diag_quadform_coeff(const CorrelationMatrix& corr);

} // namespace risfas
