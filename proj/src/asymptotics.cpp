#include "pfdr/asymptotics.hpp"

#include <cmath>

#include "pfdr/special.hpp"

namespace pfdr {

namespace {

double checked_log_q(const ModelParams& params) {
    double lq = log_q_alpha(params.frac_false, params.alpha);
    if (!(lq > 0.0))
        throw q_alpha_regime_error(
            "asymptotic formulas require Q_alpha > 1 (got ln Q_alpha <= 0)");
    return lq;
}

// ln sqrt((1-a) a / (2 pi (1-alpha) alpha))
double log_prefactor_const(const ModelParams& p) {
    return 0.5 * (std::log1p(-p.frac_false) + std::log(p.frac_false) -
                  std::log(2.0 * M_PI) - std::log1p(-p.alpha) - std::log(p.alpha));
}

}  // namespace

double asym_log_p_univariate_k(const ModelParams& params, double fisher_info,
                               double k_real) {
    if (!(fisher_info > 0.0)) throw std::domain_error("fisher_info must be > 0");
    if (!(k_real > 0.0)) throw std::domain_error("k must be > 0");
    double lq = checked_log_q(params);
    double kid2 = k_real * fisher_info * params.delta * params.delta;
    return log_prefactor_const(params) + 0.5 * std::log(k_real * fisher_info) +
           std::log(params.delta) - std::log(lq) - lq * lq / (2.0 * kid2);
}

double asym_log_p_gamma_k(const ModelParams& params, const GammaScaleFamily& family,
                          double k_real, bool lnq_prefactor) {
    if (!(family.nu > 0.0)) throw std::domain_error("nu must be > 0");
    if (!(k_real > 0.0)) throw std::domain_error("k must be > 0");
    double lq = checked_log_q(params);
    double knu = k_real * family.nu;
    double arg = lq / (knu * params.delta);
    double denom = lnq_prefactor ? std::log(lq) : 0.5 * std::log(lq);
    return log_prefactor_const(params) + 0.5 * std::log(knu) + std::log(params.delta) -
           denom - lq * lq / (2.0 * knu * params.delta * params.delta) -
           knu * psi(arg);
}

double asym_log_v_normal_k(const ModelParams& params, const NormalMeanFamily& family,
                           double k_real) {
    if (!(family.sigma > 0.0)) throw std::domain_error("sigma must be > 0");
    if (!(params.detect_prob > 0.0 && params.detect_prob < 1.0))
        throw std::domain_error("detect_prob (--p) must lie in (0,1)");
    double log_rate = std::log(-std::log1p(-params.detect_prob));
    return log_rate + std::log(k_real) -
           asym_log_p_univariate_k(params, 1.0 / (family.sigma * family.sigma), k_real);
}

LogProb asym_p_univariate(const ModelParams& params, double fisher_info) {
    params.validate();
    return LogProb::from_log(
        asym_log_p_univariate_k(params, fisher_info, static_cast<double>(params.k)));
}

LogProb asym_p_multivariate(const ModelParams& params,
                            const GenericMultivariateFamily& family,
                            std::span<const double> delta_vec) {
    params.validate();
    double q = spd_quadratic_form(family, delta_vec);
    if (!(q > 0.0)) throw std::domain_error("delta vector must be nonzero");
    double lq = checked_log_q(params);
    double k = static_cast<double>(params.k);
    double lv = log_prefactor_const(params) + 0.5 * std::log(k * q) - std::log(lq) -
                lq * lq / (2.0 * k * q);
    return LogProb::from_log(lv);
}

LogProb asym_p_normal(const ModelParams& params, const NormalMeanFamily& family) {
    params.validate();
    if (!(family.sigma > 0.0)) throw std::domain_error("sigma must be > 0");
    return asym_p_univariate(params, 1.0 / (family.sigma * family.sigma));
}

LogProb asym_p_gamma(const ModelParams& params, const GammaScaleFamily& family) {
    params.validate();
    return LogProb::from_log(
        asym_log_p_gamma_k(params, family, static_cast<double>(params.k), false));
}

LogProb asym_p_gamma_lnq(const ModelParams& params, const GammaScaleFamily& family) {
    params.validate();
    return LogProb::from_log(
        asym_log_p_gamma_k(params, family, static_cast<double>(params.k), true));
}

VolumeResult asym_v_generic(LogProb p_event, const ModelParams& params,
                            Provenance provenance) {
    if (p_event.is_zero())
        throw std::domain_error("event probability is zero: criterion unattainable");
    if (!(params.detect_prob > 0.0 && params.detect_prob < 1.0))
        throw std::domain_error("detect_prob (--p) must lie in (0,1)");
    double log_rate = std::log(-std::log1p(-params.detect_prob));
    double log_n = log_rate - p_event.log_value;
    VolumeResult out;
    out.p_event = p_event;
    out.n_star = real_from_log(log_n);
    out.n_star_int = std::nullopt;
    out.k = params.k;
    out.provenance = provenance;
    out.v_star = real_from_log(log_n + std::log(static_cast<double>(params.k)));
    return out;
}

VolumeResult asym_v_normal(const ModelParams& params, const NormalMeanFamily& family) {
    return asym_v_generic(asym_p_normal(params, family), params,
                          Provenance::asymptotic_normal);
}

std::vector<std::string> regime_warnings(const ModelParams& params,
                                         const FamilySpec& family) {
    std::vector<std::string> notes;
    double k = static_cast<double>(params.k);
    double kd2 = k * params.delta * params.delta;
    if (kd2 > 0.5)
        notes.push_back("k*delta^2 = " + std::to_string(kd2) +
                        " is not small; the leading term may be inaccurate");
    if (std::holds_alternative<GammaScaleFamily>(family)) {
        double kd = k * params.delta;
        if (kd < 10.0)
            notes.push_back("k*delta = " + std::to_string(kd) +
                            " is not large; the gamma expansion may be inaccurate");
    }
    return notes;
}

}  // namespace pfdr
