#pragma once

#include "pfdr/log_prob.hpp"
#include "pfdr/model.hpp"
#include "pfdr/volume.hpp"

namespace pfdr {

// Exact (non-asymptotic) tail of the rejection event under the mixture:
// p_mix = (1-a) p_null + a p_alt, assembled in log space.
struct TailSplit {
    LogProb p_null;  // P_0(E_k)
    LogProb p_alt;   // P_a(E_k)
    LogProb p_mix;   // p_{k,delta}(alpha)
};

// Normal location family: the event { sum X >= threshold } has normal tails
// with standardized arguments ln Q / (sqrt(k) d) +- sqrt(k) d / 2, d = delta/sigma.
TailSplit exact_p_normal(const ModelParams& params, const NormalMeanFamily& family);

// Gamma scale family: sum X is Gamma(k nu, 1) under the null and
// Gamma(k nu, 1+delta) under the alternative, so
//   p_null = Q(k nu, c_k),  p_alt = Q(k nu, c_k/(1+delta))
// using the gamma scaling identity rather than a second quadrature.
TailSplit exact_p_gamma(const ModelParams& params, const GammaScaleFamily& family);

TailSplit exact_p(const ModelParams& params, const FamilySpec& family);

// Smallest N with 1 - (1 - p_event)^N >= detect_prob.  Stable for event
// probabilities all the way down to log-scale inputs like ln p = -10^6;
// the result is exact as an integer whenever it fits.
ExtendedCount min_nulls_exact(LogProb p_event, double detect_prob);

VolumeResult min_volume_exact(const ModelParams& params, const FamilySpec& family);

// Shared with the asymptotic layer.
ExtendedReal real_from_log(double log_v);

}  // namespace pfdr
