#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace pfdr {

// Thrown by asymptotic operations when the odds threshold Q_alpha is <= 1;
// the closed forms put ln Q_alpha squared in exponents and in denominators,
// so this is a hard structural error rather than a regime warning.
struct q_alpha_regime_error : std::domain_error {
    using std::domain_error::domain_error;
};

// ------------------------------------------------------------- families

struct NormalMeanFamily {
    double theta0 = 0.0;
    double sigma = 1.0;
};

struct GammaScaleFamily {
    // null scale 1, alternative scale 1 + delta
    double nu = 1.0;
};

struct GenericFamily {
    double fisher_info = 1.0;  // univariate I(theta0)
};

struct GenericMultivariateFamily {
    std::size_t dim = 0;
    std::vector<double> fisher;  // row-major d x d, symmetric positive definite
};

using FamilySpec = std::variant<NormalMeanFamily, GammaScaleFamily, GenericFamily,
                                GenericMultivariateFamily>;

// ---------------------------------------------------------------- params

struct ModelParams {
    double frac_false = 0.05;  // population fraction of false nulls
    double alpha = 0.4;        // pFDR level
    double detect_prob = 0.9;  // required probability of >= 1 trustworthy rejection
    double delta = 0.1;        // effect size
    std::int64_t k = 1;        // replications per null

    void validate() const;     // open-interval checks, k >= 1
};

// Odds threshold Q_alpha = (1/frac_false - 1)(1/alpha - 1).
double q_alpha(double frac_false, double alpha);
double log_q_alpha(double frac_false, double alpha);

// Posterior probability that a null is true given its log likelihood-ratio
// sum (Bayes rule through the mixture weights), computed as a stable
// logistic.  log_lr_sum = -inf is the infinitely-strong-null limit -> 1.
double posterior_null_prob(double log_lr_sum, double frac_false);

// Rejection threshold for sum_j X_ij in original units.  Internally the
// family is standardized to theta0 = 0, sigma = 1 (the log likelihood ratio
// is invariant under that shift/scale with delta measured in sigma units);
// the returned cutoff is mapped back:
//   k*theta0 + sigma^2 ln Q_alpha / delta + k delta / 2.
double normal_lr_threshold(const ModelParams& params, const NormalMeanFamily& family);

struct GammaThresholds {
    double c_k;  // cutoff for sum X under the null scale
    double d_k;  // same event rescaled to the alternative, c_k / (1 + delta)
};

// c_k = [k nu ln(1+delta) + ln Q_alpha] (1+delta)/delta
GammaThresholds gamma_lr_thresholds(const ModelParams& params,
                                    const GammaScaleFamily& family);

// Quadratic form q = delta^T I delta; verifies SPD via a Cholesky
// factorization and throws std::domain_error when it fails.
double spd_quadratic_form(const GenericMultivariateFamily& family,
                          std::span<const double> delta_vec);

// ------------------------------------------------------------- schedules

// k(delta) schedules for the small-effect regime, k = 1/(delta^2 s(delta)):
//   sqrt_log: s = sqrt(ln(1/delta))     log_log: s = ln(ln(1/delta) + e)
//   power_t:  k = delta^{-t} directly, t in (0,2)
enum class Schedule { sqrt_log, log_log, power_t };

struct RegimeSpec {
    Schedule s_fn = Schedule::sqrt_log;
    double t = 1.5;  // only for power_t

    double s_value(double delta) const;
    double k_real(double delta) const;
    std::int64_t k_rounded(double delta) const;  // nearest integer, >= 1
};

Schedule schedule_from_name(const std::string& name);
std::string schedule_name(Schedule s);

}  // namespace pfdr
