#pragma once

#include <span>
#include <vector>

#include "pfdr/exact.hpp"
#include "pfdr/model.hpp"
#include "pfdr/volume.hpp"

namespace pfdr {

// Closed-form leading terms of p_{k,delta}(alpha) in the small-effect
// regime.  Every function here drops the (1+o(1)) factor, so callers must
// treat results as approximations; the converge diagnostics compare them
// against the exact layer as log ratios.  All of them refuse Q_alpha <= 1
// (q_alpha_regime_error); softer regime hypotheses only produce warnings.

// General univariate parametric family with Fisher information I(theta0):
//   sqrt((1-a)a / (2 pi (1-alpha) alpha)) * sqrt(k I) delta / ln Q
//     * exp{ -(ln Q)^2 / (2 k I delta^2) }
LogProb asym_p_univariate(const ModelParams& params, double fisher_info);

// Multivariate corollary via the quadratic form q = delta^T I delta.
LogProb asym_p_multivariate(const ModelParams& params,
                            const GenericMultivariateFamily& family,
                            std::span<const double> delta_vec);

// Normal location family: the univariate form with I = 1/sigma^2
// (depends on delta and sigma only through delta/sigma).
LogProb asym_p_normal(const ModelParams& params, const NormalMeanFamily& family);

// Gamma scale family, as displayed:
//   sqrt((1-a)a/(2 pi (1-alpha) alpha)) * sqrt(k nu) delta / sqrt(ln Q)
//     * exp{ -(ln Q)^2/(2 k nu delta^2) - k nu psi(ln Q/(k nu delta)) }
LogProb asym_p_gamma(const ModelParams& params, const GammaScaleFamily& family);

// Same exponent with a ln Q denominator instead of sqrt(ln Q) — the
// prefactor that actually follows from combining the two gamma tail
// expansions with the mixture weights.  Emitted by the converge command so
// the exact oracle can adjudicate between the two displays; the diagnostic
// is reported, never silently swapped in for asym_p_gamma.
LogProb asym_p_gamma_lnq(const ModelParams& params, const GammaScaleFamily& family);

// Minimum nulls / volume from an event probability:
//   N* = ln(1/(1-p)) / p_event,  V* = k N*.
// Computed by reciprocal directly from p_event so that
// v_star * p_event / (k ln(1/(1-p))) == 1 holds exactly.
VolumeResult asym_v_generic(LogProb p_event, const ModelParams& params,
                            Provenance provenance);

// Corollary volume for the normal family (asym_v_generic over asym_p_normal).
VolumeResult asym_v_normal(const ModelParams& params, const NormalMeanFamily& family);

// Soft regime diagnostics (never errors): k delta^2 should be small, and
// for the gamma expansion k delta should also be large.
std::vector<std::string> regime_warnings(const ModelParams& params,
                                         const FamilySpec& family);

// Real-valued-k formula evaluators (log scale).  The schedules produce
// non-integer k; simulation needs the rounded value but the closed forms do
// not, so plotting and diagnostics evaluate these directly.  The integer-k
// operations above delegate to them.
double asym_log_p_univariate_k(const ModelParams& params, double fisher_info,
                               double k_real);
double asym_log_p_gamma_k(const ModelParams& params, const GammaScaleFamily& family,
                          double k_real, bool lnq_prefactor);
double asym_log_v_normal_k(const ModelParams& params, const NormalMeanFamily& family,
                           double k_real);

}  // namespace pfdr
