#include "pfdr/model.hpp"

#include <cmath>

namespace pfdr {

namespace {

void require_open_unit(double v, const char* name) {
    if (!(v > 0.0 && v < 1.0))
        throw std::domain_error(std::string(name) + " must lie in (0,1)");
}

}  // namespace

void ModelParams::validate() const {
    require_open_unit(frac_false, "frac_false (--a)");
    require_open_unit(alpha, "alpha (--alpha)");
    require_open_unit(detect_prob, "detect_prob (--p)");
    if (!(delta > 0.0)) throw std::domain_error("delta (--delta) must be > 0");
    if (k < 1) throw std::domain_error("k (--k) must be >= 1");
}

double q_alpha(double frac_false, double alpha) {
    require_open_unit(frac_false, "frac_false (--a)");
    require_open_unit(alpha, "alpha (--alpha)");
    return (1.0 / frac_false - 1.0) * (1.0 / alpha - 1.0);
}

double log_q_alpha(double frac_false, double alpha) {
    return std::log(q_alpha(frac_false, alpha));
}

double posterior_null_prob(double log_lr_sum, double frac_false) {
    require_open_unit(frac_false, "frac_false");
    if (std::isinf(log_lr_sum))
        return log_lr_sum < 0 ? 1.0 : 0.0;
    // posterior = 1 / (1 + (a/(1-a)) e^{log_lr_sum}), as a stable logistic
    double w = log_lr_sum + std::log(frac_false) - std::log1p(-frac_false);
    if (w > 0) {
        double e = std::exp(-w);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(w));
}

double normal_lr_threshold(const ModelParams& params, const NormalMeanFamily& family) {
    params.validate();
    if (!(family.sigma > 0.0)) throw std::domain_error("sigma must be > 0");
    double lq = log_q_alpha(params.frac_false, params.alpha);
    double k = static_cast<double>(params.k);
    return k * family.theta0 + family.sigma * family.sigma * lq / params.delta +
           k * params.delta / 2.0;
}

GammaThresholds gamma_lr_thresholds(const ModelParams& params,
                                    const GammaScaleFamily& family) {
    params.validate();
    if (!(family.nu > 0.0)) throw std::domain_error("nu must be > 0");
    double lq = log_q_alpha(params.frac_false, params.alpha);
    double knu = static_cast<double>(params.k) * family.nu;
    double c_k = (knu * std::log1p(params.delta) + lq) * (1.0 + params.delta) / params.delta;
    return {c_k, c_k / (1.0 + params.delta)};
}

double spd_quadratic_form(const GenericMultivariateFamily& family,
                          std::span<const double> delta_vec) {
    const std::size_t d = family.dim;
    if (d == 0 || family.fisher.size() != d * d)
        throw std::domain_error("fisher matrix must be d x d with d >= 1");
    if (delta_vec.size() != d)
        throw std::domain_error("delta vector dimension mismatch");
    // symmetry check, then Cholesky; failure of either rejects the matrix
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) {
            double a = family.fisher[i * d + j], b = family.fisher[j * d + i];
            if (std::fabs(a - b) > 1e-12 * std::max(1.0, std::max(std::fabs(a), std::fabs(b))))
                throw std::domain_error("fisher matrix is not symmetric");
        }
    std::vector<double> chol(family.fisher);
    for (std::size_t j = 0; j < d; ++j) {
        double diag = chol[j * d + j];
        for (std::size_t p = 0; p < j; ++p) diag -= chol[j * d + p] * chol[j * d + p];
        if (!(diag > 0.0))
            throw std::domain_error("fisher matrix is not positive definite");
        diag = std::sqrt(diag);
        chol[j * d + j] = diag;
        for (std::size_t i = j + 1; i < d; ++i) {
            double v = chol[i * d + j];
            for (std::size_t p = 0; p < j; ++p) v -= chol[i * d + p] * chol[j * d + p];
            chol[i * d + j] = v / diag;
        }
    }
    double q = 0.0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            q += delta_vec[i] * family.fisher[i * d + j] * delta_vec[j];
    return q;
}

double RegimeSpec::s_value(double delta) const {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::domain_error("schedule needs delta in (0,1)");
    switch (s_fn) {
        case Schedule::sqrt_log: return std::sqrt(std::log(1.0 / delta));
        case Schedule::log_log: return std::log(std::log(1.0 / delta) + M_E);
        case Schedule::power_t: return std::pow(delta, t - 2.0);  // 1/(k delta^2)
    }
    throw std::logic_error("unreachable");
}

double RegimeSpec::k_real(double delta) const {
    if (s_fn == Schedule::power_t) {
        if (!(t > 0.0 && t < 2.0))
            throw std::domain_error("power_t schedule needs t in (0,2)");
        return std::pow(delta, -t);
    }
    return 1.0 / (delta * delta * s_value(delta));
}

std::int64_t RegimeSpec::k_rounded(double delta) const {
    double k = std::nearbyint(k_real(delta));
    if (k < 1.0) return 1;
    return static_cast<std::int64_t>(k);
}

Schedule schedule_from_name(const std::string& name) {
    if (name == "sqrt-log") return Schedule::sqrt_log;
    if (name == "log-log") return Schedule::log_log;
    if (name == "power-t") return Schedule::power_t;
    throw std::domain_error("unknown schedule '" + name +
                            "' (expected sqrt-log, log-log or power-t)");
}

std::string schedule_name(Schedule s) {
    switch (s) {
        case Schedule::sqrt_log: return "sqrt-log";
        case Schedule::log_log: return "log-log";
        case Schedule::power_t: return "power-t";
    }
    return "?";
}

}  // namespace pfdr
