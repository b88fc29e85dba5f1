#pragma once

#include <functional>

#include "pfdr/exact.hpp"
#include "pfdr/model.hpp"

namespace pfdr {

// Thresholding procedures reject exactly the nulls whose posterior null
// probability is <= a cutoff: the baseline uses the fixed level alpha, the
// shifted variant uses alpha + c k delta^2 at each (delta, k).
struct ThresholdProcedure {
    enum class Kind { fixed, shifted };
    Kind kind = Kind::fixed;
    double alpha = 0.4;
    double c = 0.0;  // shifted only

    double effective_cutoff(double delta, std::int64_t k) const;
    static ThresholdProcedure fixed(double alpha) { return {Kind::fixed, alpha, 0.0}; }
    static ThresholdProcedure shifted(double alpha, double c) {
        return {Kind::shifted, alpha, c};
    }
};

// Large-N limits of power E[R_a/N_a] and conditional pFDR E[R_0/R | R>0]
// for a thresholding procedure.  For thresholding these limits are exact
// tail functionals of the model, so they are computed from the exact layer
// (the simulator provides finite-N convergence checks separately):
//   power_inf = P_a(E_k(cutoff)),
//   pfdr_inf  = (1-a) P_0(E_k(cutoff)) / p_{k,delta}(cutoff).
struct PowerReport {
    LogProb power_inf;
    double pfdr_inf;
    double effective_cutoff;
    double delta;
    std::int64_t k;
};

PowerReport power_pfdr_threshold(const ThresholdProcedure& proc,
                                 const ModelParams& params, const FamilySpec& family);

// a * P_a(E_k(alpha)) / ((1-alpha) p_{k,delta}(alpha)); tends to 1 in the
// small-effect regime.
double power_identity_check(const ModelParams& params, const FamilySpec& family);

// Shift constant c = (1-alpha) alpha I(theta0) ln M / ln Q_alpha that buys
// an asymptotic power factor M over the fixed-cutoff baseline.
double shifted_cutoff_for_gain(const ModelParams& params, double fisher_info,
                               double gain_M);

// Exact power ratio of the shifted procedure over the baseline, as a
// function of (delta, k), plus the two printed closed-form limit candidates
// (they differ in whether the denominator carries the extra alpha).  The
// adjudicated_limit field is the closed form the exact ratios actually
// approach, exp{ c ln Q / ((1-alpha) alpha) }; with c from
// shifted_cutoff_for_gain this equals the gain M.  Both candidates are kept
// so reports can show all three side by side.
struct PowerRatioLimit {
    std::function<double(double delta, std::int64_t k)> exact_ratio;
    double candidate_denom_one_minus_alpha;        // exp{2c ln Q/(1-alpha)}
    double candidate_denom_one_minus_alpha_alpha;  // exp{2c ln Q/((1-alpha) alpha)}
    double adjudicated_limit;                      // exp{ c ln Q/((1-alpha) alpha)}
};

PowerRatioLimit power_ratio_limit(const ModelParams& params, double c,
                                  const NormalMeanFamily& family);

// Dominating bound p_{k,delta}(alpha2)/a on the power of any compliant
// procedure, for alpha2 > alpha.  May exceed 1 in linear space (it is a
// bound, not a probability).
LogProb power_upper_bound(const ModelParams& params, const FamilySpec& family,
                          double alpha2);

}  // namespace pfdr
