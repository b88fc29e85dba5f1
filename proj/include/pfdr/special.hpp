#pragma once

#include "pfdr/log_prob.hpp"

namespace pfdr {

// ------------------------------------------------------------------
// Log-space special functions backing every tail formula in the library.
// All three are pure and reentrant.
// ------------------------------------------------------------------

// log of the standard normal upper tail, ln P(Z >= t).
// Relative error of the probability: < 1e-12 for |t| <= 8, < 1e-8 up to
// t = 1e4 (continued-fraction regime; the t^2/2 rounding dominates there).
LogProb norm_sf_log(double t);

// log of the regularized upper incomplete gamma Q(shape, x)
//   = (1/Gamma(shape)) int_x^inf s^{shape-1} e^{-s} ds.
// Throws std::domain_error for shape <= 0 or x < 0.
LogProb gamma_upper_log(double shape, double x);

// psi(t) = t - t^2/2 - ln(1+t), t > -1.  Series near 0 avoids the
// catastrophic cancellation in the direct form (psi(t) ~ -t^3/3).
// Throws std::domain_error for t <= -1.
double psi(double t);

// phi(t) = t - ln(1+t), t > -1 (series near 0).  psi = phi - t^2/2.
double phi_ln1p(double t);

// ln(a^a e^{-a} / Gamma(a)), evaluated without the large-argument
// cancellation of the naive form (Stirling tail for big a).
double log_gamma_norm(double a);

}  // namespace pfdr
