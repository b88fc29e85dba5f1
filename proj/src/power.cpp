#include "pfdr/power.hpp"

#include <cmath>

namespace pfdr {

double ThresholdProcedure::effective_cutoff(double delta, std::int64_t k) const {
    double cut = alpha;
    if (kind == Kind::shifted) cut += c * static_cast<double>(k) * delta * delta;
    if (!(cut > 0.0 && cut < 1.0))
        throw std::domain_error("effective cutoff " + std::to_string(cut) +
                                " leaves (0,1) at this (delta, k)");
    return cut;
}

namespace {

TailSplit tails_at_cutoff(const ModelParams& params, const FamilySpec& family,
                          double cutoff) {
    ModelParams at = params;
    at.alpha = cutoff;
    return exact_p(at, family);
}

}  // namespace

PowerReport power_pfdr_threshold(const ThresholdProcedure& proc,
                                 const ModelParams& params, const FamilySpec& family) {
    params.validate();
    double cutoff = proc.effective_cutoff(params.delta, params.k);
    TailSplit t = tails_at_cutoff(params, family, cutoff);
    PowerReport out;
    out.power_inf = t.p_alt;
    out.pfdr_inf = std::exp(std::log1p(-params.frac_false) + t.p_null.log_value -
                            t.p_mix.log_value);
    out.effective_cutoff = cutoff;
    out.delta = params.delta;
    out.k = params.k;
    return out;
}

double power_identity_check(const ModelParams& params, const FamilySpec& family) {
    params.validate();
    TailSplit t = exact_p(params, family);
    return std::exp(std::log(params.frac_false) + t.p_alt.log_value -
                    std::log1p(-params.alpha) - t.p_mix.log_value);
}

double shifted_cutoff_for_gain(const ModelParams& params, double fisher_info,
                               double gain_M) {
    params.validate();
    if (!(fisher_info > 0.0)) throw std::domain_error("fisher_info must be > 0");
    if (!(gain_M > 1.0)) throw std::domain_error("gain M (--gain-M) must be > 1");
    double lq = log_q_alpha(params.frac_false, params.alpha);
    if (!(lq > 0.0))
        throw q_alpha_regime_error("shifted_cutoff_for_gain requires Q_alpha > 1");
    return (1.0 - params.alpha) * params.alpha * fisher_info * std::log(gain_M) / lq;
}

PowerRatioLimit power_ratio_limit(const ModelParams& params, double c,
                                  const NormalMeanFamily& family) {
    params.validate();
    double lq = log_q_alpha(params.frac_false, params.alpha);
    if (!(lq > 0.0)) throw q_alpha_regime_error("power_ratio_limit requires Q_alpha > 1");

    ModelParams base = params;
    NormalMeanFamily fam = family;
    PowerRatioLimit out;
    out.exact_ratio = [base, fam, c](double delta, std::int64_t k) {
        ModelParams at = base;
        at.delta = delta;
        at.k = k;
        ThresholdProcedure shifted = ThresholdProcedure::shifted(base.alpha, c);
        double cutoff = shifted.effective_cutoff(delta, k);
        TailSplit num = tails_at_cutoff(at, fam, cutoff);
        TailSplit den = tails_at_cutoff(at, fam, base.alpha);
        return std::exp(num.p_alt.log_value - den.p_alt.log_value);
    };
    double denom = (1.0 - params.alpha);
    out.candidate_denom_one_minus_alpha = std::exp(2.0 * c * lq / denom);
    out.candidate_denom_one_minus_alpha_alpha =
        std::exp(2.0 * c * lq / (denom * params.alpha));
    out.adjudicated_limit = std::exp(c * lq / (denom * params.alpha));
    return out;
}

LogProb power_upper_bound(const ModelParams& params, const FamilySpec& family,
                          double alpha2) {
    params.validate();
    if (!(alpha2 > params.alpha && alpha2 < 1.0))
        throw std::domain_error("alpha2 (--alpha2) must lie in (alpha, 1)");
    TailSplit t = tails_at_cutoff(params, family, alpha2);
    return LogProb::from_log(t.p_mix.log_value - std::log(params.frac_false));
}

}  // namespace pfdr
