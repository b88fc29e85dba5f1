#include "pfdr/exact.hpp"

#include <cmath>

#include "pfdr/special.hpp"

namespace pfdr {

std::string provenance_name(Provenance p) {
    switch (p) {
        case Provenance::exact: return "exact";
        case Provenance::asymptotic_thm1: return "asymptotic_thm1";
        case Provenance::asymptotic_cor1: return "asymptotic_cor1";
        case Provenance::asymptotic_normal: return "asymptotic_normal";
        case Provenance::asymptotic_gamma: return "asymptotic_gamma";
    }
    return "?";
}

namespace {

TailSplit mix(double frac_false, LogProb p_null, LogProb p_alt) {
    double lmix = log_sum_exp(std::log1p(-frac_false) + p_null.log_value,
                              std::log(frac_false) + p_alt.log_value);
    return {p_null, p_alt, LogProb::from_log(lmix)};
}

}  // namespace

TailSplit exact_p_normal(const ModelParams& params, const NormalMeanFamily& family) {
    params.validate();
    if (!(family.sigma > 0.0)) throw std::domain_error("sigma must be > 0");
    double lq = log_q_alpha(params.frac_false, params.alpha);
    double d = params.delta / family.sigma;
    double snd = std::sqrt(static_cast<double>(params.k)) * d;
    LogProb p_null = norm_sf_log(lq / snd + snd / 2.0);
    LogProb p_alt = norm_sf_log(lq / snd - snd / 2.0);
    return mix(params.frac_false, p_null, p_alt);
}

TailSplit exact_p_gamma(const ModelParams& params, const GammaScaleFamily& family) {
    GammaThresholds th = gamma_lr_thresholds(params, family);
    double shape = static_cast<double>(params.k) * family.nu;
    LogProb p_null = gamma_upper_log(shape, th.c_k);
    LogProb p_alt = gamma_upper_log(shape, th.d_k);
    return mix(params.frac_false, p_null, p_alt);
}

TailSplit exact_p(const ModelParams& params, const FamilySpec& family) {
    if (const auto* nf = std::get_if<NormalMeanFamily>(&family))
        return exact_p_normal(params, *nf);
    if (const auto* gf = std::get_if<GammaScaleFamily>(&family))
        return exact_p_gamma(params, *gf);
    throw std::domain_error("exact tails exist only for the normal and gamma families");
}

ExtendedReal real_from_log(double log_v) {
    ExtendedReal out;
    out.log_value = log_v;
    if (log_v < 709.0) out.value = std::exp(log_v);
    return out;
}

ExtendedCount min_nulls_exact(LogProb p_event, double detect_prob) {
    if (!(detect_prob > 0.0 && detect_prob < 1.0))
        throw std::domain_error("detect_prob (--p) must lie in (0,1)");
    if (p_event.is_zero())
        throw std::domain_error("event probability is zero: criterion unattainable");
    double lp = p_event.log_value;
    if (lp > 0.0) throw std::domain_error("event probability exceeds 1");
    double log_rate = std::log(-std::log1p(-detect_prob));  // ln ln(1/(1-p))
    if (lp > -690.0) {
        // linear-space path; log1p keeps ln(1 - p_event) accurate for tiny p
        double pe = std::exp(lp);
        if (pe >= 1.0) return ExtendedCount{1, 0.0};
        double n_real = std::log1p(-detect_prob) / std::log1p(-pe);
        double n = std::ceil(n_real - 1e-12);
        if (n < 1.0) n = 1.0;
        ExtendedCount out;
        out.log_value = std::log(n);
        if (n < 9.2e18) out.exact = static_cast<std::uint64_t>(n);
        return out;
    }
    // deep log-space limit: N = ln(1/(1-p)) / p_event, ceiling immaterial
    ExtendedCount out;
    out.log_value = log_rate - lp;
    return out;
}

VolumeResult min_volume_exact(const ModelParams& params, const FamilySpec& family) {
    TailSplit t = exact_p(params, family);
    ExtendedCount n = min_nulls_exact(t.p_mix, params.detect_prob);
    VolumeResult out;
    out.p_event = t.p_mix;
    if (n.exact)
        out.n_star = ExtendedReal{static_cast<double>(*n.exact), n.log_value};
    else
        out.n_star = real_from_log(n.log_value);
    out.n_star_int = n.exact;
    out.k = params.k;
    out.provenance = Provenance::exact;
    double log_k = std::log(static_cast<double>(params.k));
    if (n.exact) {
        double v = static_cast<double>(params.k) * static_cast<double>(*n.exact);
        out.v_star = ExtendedReal{v, std::log(v)};
    } else {
        out.v_star = real_from_log(n.log_value + log_k);
    }
    return out;
}

}  // namespace pfdr
