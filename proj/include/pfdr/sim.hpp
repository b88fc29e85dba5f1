#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pfdr/model.hpp"
#include "pfdr/power.hpp"

namespace pfdr {

struct budget_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct estimation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr std::uint64_t kDefaultDrawBudget = 1'000'000'000;  // n_nulls * k * n_reps

// One full experiment: n_reps independent repetitions of the random-effects
// model with n_nulls units each.  Deterministic given (seed, n_nulls,
// n_reps): every unit owns a counter-derived substream, so neither the
// thread count nor the scheduling can change a single draw.
struct SimConfig {
    ModelParams params;
    FamilySpec family = NormalMeanFamily{};
    std::uint64_t n_nulls = 1000;
    std::uint32_t n_reps = 100;
    std::uint64_t seed = 0;
    ThresholdProcedure procedure = ThresholdProcedure::fixed(0.4);
    int threads = 1;
    // Sample each unit's k observations individually instead of its
    // sufficient statistic (both exact in distribution; raw mode is kept
    // for the per-observation likelihood-ratio equivalence checks).
    bool raw_observations = false;
    // Generation-side fraction of false nulls, when it should differ from
    // the fraction the procedure assumes (degenerate values like 0 are
    // legal here and only here).
    std::optional<double> gen_frac_false;
    std::uint64_t budget = kDefaultDrawBudget;
};

struct RepRecord {
    std::uint32_t rep_index = 0;
    std::uint64_t r = 0;           // rejections
    double r0_expected = 0.0;      // sum of posterior null probs over rejected
    std::uint64_t ra = 0;          // rejected false nulls (truth labels)
    std::uint64_t r0_truth = 0;    // rejected true nulls (truth labels)
    std::uint64_t na = 0;          // false nulls present
    bool criterion_hit = false;    // >= 1 rejection
    double min_posterior = 1.0;    // over all units
};

struct SimAggregates {
    std::uint64_t events_total = 0;
    double p_hat = 0.0, p_se = 0.0;                  // pooled event frequency
    double criterion_hat = 0.0, criterion_se = 0.0;  // P(>= 1 event per rep)
    // mean R_a/N_a over reps with N_a > 0
    std::optional<double> power_hat;
    double power_se = 0.0;
    // conditional pFDR over reps with R > 0: posterior form (primary) and
    // truth-label form (cross-validation)
    std::optional<double> pfdr_hat;
    double pfdr_se = 0.0;
    std::optional<double> pfdr_truth_hat;
    double pfdr_truth_se = 0.0;
    std::uint32_t reps_with_rejection = 0;
    std::uint32_t reps_with_alternative = 0;
    // per-unit rates for the law-of-large-numbers checks
    double r_rate = 0.0, r0_rate = 0.0, ra_rate = 0.0, na_rate = 0.0;
};

struct SimReport {
    SimConfig config;
    std::string rng = "";  // algorithm name, recorded in every report
    double effective_cutoff = 0.0;
    double log_q_cutoff = 0.0;
    std::vector<RepRecord> reps;
    SimAggregates agg;
};

SimReport simulate(const SimConfig& config);

// Pooled frequency of the rejection event with its binomial standard error.
std::pair<double, double> estimate_event_prob(const SimConfig& config);

// Fraction of reps in which at least one unit is rejected.
std::pair<double, double> estimate_criterion_prob(const SimConfig& config);

struct PowerPfdrEstimate {
    double power_hat, power_se;
    double pfdr_hat, pfdr_se;              // posterior form
    double pfdr_truth_hat, pfdr_truth_se;  // truth-label form
};

// Throws estimation_error when no rep produced a rejection (or no rep held
// a false null).
PowerPfdrEstimate estimate_power_pfdr(const SimConfig& config);

}  // namespace pfdr
