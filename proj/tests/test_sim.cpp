#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>

#include "mpfr_oracle.hpp"
#include "pfdr/exact.hpp"
#include "pfdr/kernels.hpp"
#include "pfdr/philox.hpp"
#include "pfdr/power.hpp"
#include "pfdr/sim.hpp"

using namespace pfdr;

namespace {

SimConfig base_config() {
    SimConfig cfg;
    cfg.params = {0.05, 0.4, 0.9, 0.4, 25};
    cfg.family = NormalMeanFamily{};
    cfg.procedure = ThresholdProcedure::fixed(0.4);
    cfg.n_nulls = 10000;
    cfg.n_reps = 100;
    cfg.seed = 42;
    return cfg;
}

bool reports_equal(const SimReport& a, const SimReport& b) {
    if (a.reps.size() != b.reps.size()) return false;
    for (std::size_t i = 0; i < a.reps.size(); ++i) {
        const RepRecord &x = a.reps[i], &y = b.reps[i];
        if (x.r != y.r || x.ra != y.ra || x.na != y.na || x.r0_truth != y.r0_truth ||
            x.criterion_hit != y.criterion_hit ||
            std::memcmp(&x.r0_expected, &y.r0_expected, sizeof(double)) != 0 ||
            std::memcmp(&x.min_posterior, &y.min_posterior, sizeof(double)) != 0)
            return false;
    }
    return std::memcmp(&a.agg.p_hat, &b.agg.p_hat, sizeof(double)) == 0 &&
           a.agg.events_total == b.agg.events_total;
}

}  // namespace

TEST_CASE("simulate is deterministic and thread-count independent") {
    SimConfig cfg = base_config();
    cfg.n_nulls = 4000;
    cfg.n_reps = 40;
    SimReport r1 = simulate(cfg);
    SimReport r2 = simulate(cfg);
    CHECK(reports_equal(r1, r2));
    cfg.threads = 4;
    SimReport r4 = simulate(cfg);
    CHECK(reports_equal(r1, r4));
}

TEST_CASE("simulate is identical under the scalar kernel fallback") {
    struct Guard {
        kernels::Isa saved = kernels::active_isa();
        ~Guard() { kernels::force_isa(saved); }
    } guard;
    SimConfig cfg = base_config();
    cfg.n_nulls = 2000;
    cfg.n_reps = 10;
    SimReport ra = simulate(cfg);
    kernels::force_isa(kernels::Isa::scalar);
    SimReport rs = simulate(cfg);
    CHECK(reports_equal(ra, rs));
}

TEST_CASE("oracle agreement at the reference cell (normal)") {
    SimConfig cfg = base_config();  // delta=0.4, k=25, 1e4 nulls x 100 reps
    SimReport rep = simulate(cfg);
    double exact = exact_p(cfg.params, cfg.family).p_mix.linear();
    CHECK(exact == doctest::Approx(0.016042803017196527).epsilon(1e-12));
    CHECK(std::fabs(rep.agg.p_hat - exact) <= 3.0 * rep.agg.p_se);
}

TEST_CASE("oracle agreement at the reference cell (gamma)") {
    SimConfig cfg = base_config();
    cfg.params = {0.05, 0.4, 0.9, 0.5, 10};
    cfg.family = GammaScaleFamily{1.0};
    cfg.n_nulls = 20000;
    cfg.n_reps = 50;
    SimReport rep = simulate(cfg);
    double exact = exact_p(cfg.params, cfg.family).p_mix.linear();
    CHECK(std::fabs(rep.agg.p_hat - exact) <= 3.0 * rep.agg.p_se);
}

TEST_CASE("raw-observation mode matches the sufficient-statistic mode in law") {
    SimConfig cfg = base_config();
    cfg.params.k = 6;
    cfg.n_nulls = 30000;
    cfg.n_reps = 20;
    SimReport s1 = simulate(cfg);
    cfg.raw_observations = true;
    cfg.seed = 43;  // independent draws, same distribution
    SimReport s2 = simulate(cfg);
    double se = std::hypot(s1.agg.p_se, s2.agg.p_se);
    CHECK(std::fabs(s1.agg.p_hat - s2.agg.p_hat) <= 4.0 * se);

    cfg.family = GammaScaleFamily{0.7};  // exercises the shape<1 boost too
    cfg.raw_observations = false;
    SimReport g1 = simulate(cfg);
    cfg.raw_observations = true;
    cfg.seed = 44;
    SimReport g2 = simulate(cfg);
    se = std::hypot(g1.agg.p_se, g2.agg.p_se);
    CHECK(std::fabs(g1.agg.p_hat - g2.agg.p_hat) <= 4.0 * se);
}

TEST_CASE("per-unit rejection decisions follow the documented stream contract") {
    // replay the streams: draw 0 is the label uniform, draws >= 1 feed the
    // sufficient statistic; the rejection predicate is logLR >= ln Q —
    // equivalently posterior <= cutoff (checked outside the 1e-12 tie band)
    SimConfig cfg = base_config();
    cfg.n_nulls = 5000;
    cfg.n_reps = 2;
    SimReport rep = simulate(cfg);
    double lq = rep.log_q_cutoff;
    double d = cfg.params.delta;
    double k = static_cast<double>(cfg.params.k);
    for (std::uint32_t r = 0; r < cfg.n_reps; ++r) {
        std::uint64_t rejections = 0;
        for (std::uint64_t u = 0; u < cfg.n_nulls; ++u) {
            UnitStream label(cfg.seed, r, u, 0);
            bool alt = label.next_uniform() < cfg.params.frac_false;
            UnitStream s(cfg.seed, r, u, 1);
            double sum = std::sqrt(k) * s.next_normal() + (alt ? k * d : 0.0);
            double loglr = std::fma(sum, d, -k * d * d / 2.0);
            bool by_loglr = loglr >= lq;
            rejections += by_loglr;
            if (std::fabs(loglr - lq) > 1e-12 * std::max(1.0, std::fabs(lq))) {
                bool by_posterior =
                    posterior_null_prob(loglr, cfg.params.frac_false) <=
                    rep.effective_cutoff;
                CHECK(by_posterior == by_loglr);
            }
        }
        CHECK(rejections == rep.reps[r].r);
    }
}

TEST_CASE("law-of-large-numbers rates") {
    SimConfig cfg = base_config();
    cfg.params = {0.2, 0.4, 0.9, 0.2, 16};
    cfg.n_nulls = 50000;
    cfg.n_reps = 20;
    SimReport rep = simulate(cfg);
    // per-rep bookkeeping: rejected = rejected-true + rejected-false, and
    // the posterior mass over rejections is bounded by the rejection count
    for (const RepRecord& r : rep.reps) {
        CHECK(r.r == r.r0_truth + r.ra);
        CHECK(r.r0_expected >= 0.0);
        CHECK(r.r0_expected <= static_cast<double>(r.r));
    }
    TailSplit t = exact_p(cfg.params, cfg.family);
    double n = static_cast<double>(cfg.n_nulls) * cfg.n_reps;
    auto se_of = [n](double p) { return std::sqrt(p * (1 - p) / n); };
    double a = cfg.params.frac_false;
    CHECK(std::fabs(rep.agg.r_rate - t.p_mix.linear()) <= 4 * se_of(t.p_mix.linear()));
    double r0_expect = (1 - a) * t.p_null.linear();
    CHECK(std::fabs(rep.agg.r0_rate - r0_expect) <= 4 * se_of(r0_expect));
    double ra_expect = a * t.p_alt.linear();
    CHECK(std::fabs(rep.agg.ra_rate - ra_expect) <= 4 * se_of(ra_expect));
    CHECK(std::fabs(rep.agg.na_rate - a) <= 4 * se_of(a));
}

TEST_CASE("criterion probability composition with the exact minimum N") {
    // N* = 58 at this cell; q(N*) >= p - 3 SE and q(N*-1) < p + 3 SE
    ModelParams params{0.05, 0.4, 0.9, 0.4, 64};
    LogProb pmix = exact_p(params, NormalMeanFamily{}).p_mix;
    ExtendedCount n = min_nulls_exact(pmix, params.detect_prob);
    REQUIRE(n.exact.has_value());
    CHECK(*n.exact == 58);

    SimConfig cfg;
    cfg.params = params;
    cfg.family = NormalMeanFamily{};
    cfg.procedure = ThresholdProcedure::fixed(params.alpha);
    cfg.n_reps = 3000;
    cfg.seed = 7;
    cfg.n_nulls = *n.exact;
    auto [q_at_n, se_n] = estimate_criterion_prob(cfg);
    CHECK(q_at_n >= params.detect_prob - 3.0 * se_n);
    cfg.n_nulls = *n.exact - 1;
    auto [q_below, se_b] = estimate_criterion_prob(cfg);
    CHECK(q_below < params.detect_prob + 3.0 * se_b);

    // independence structure: q matches 1 - (1-p)^N within the plug-in error
    cfg.n_nulls = *n.exact;
    SimReport rep = simulate(cfg);
    double p_hat = rep.agg.p_hat;
    double plug_in = 1.0 - std::pow(1.0 - p_hat, static_cast<double>(cfg.n_nulls));
    double dq_dp = cfg.n_nulls * std::pow(1.0 - p_hat, cfg.n_nulls - 1.0);
    double se = std::hypot(rep.agg.criterion_se, dq_dp * rep.agg.p_se);
    CHECK(std::fabs(rep.agg.criterion_hat - plug_in) <= 3.0 * se);
}

TEST_CASE("estimate_criterion_prob with one null equals the event frequency") {
    SimConfig cfg = base_config();
    cfg.n_nulls = 1;
    cfg.n_reps = 5000;
    SimReport rep = simulate(cfg);
    CHECK(rep.agg.criterion_hat == rep.agg.p_hat);
}

TEST_CASE("cutoff near 1 absorbs nearly everything") {
    // Q_alpha -> 0 as alpha -> 1-: the rejection threshold collapses and
    // the pooled event frequency approaches 1
    SimConfig cfg = base_config();
    cfg.params.alpha = 1.0 - 1e-6;
    cfg.procedure = ThresholdProcedure::fixed(1.0 - 1e-6);
    cfg.n_nulls = 5000;
    cfg.n_reps = 10;
    auto [p_hat, se] = estimate_event_prob(cfg);
    (void)se;
    CHECK(p_hat > 0.99);
}

TEST_CASE("shifted-cutoff procedure runs through the simulator") {
    SimConfig cfg = base_config();  // delta=0.4, k=25
    cfg.procedure = ThresholdProcedure::shifted(0.4, 0.1);
    cfg.n_nulls = 20000;
    cfg.n_reps = 40;
    SimReport rep = simulate(cfg);
    double cutoff = 0.4 + 0.1 * 25 * 0.4 * 0.4;
    CHECK(rep.effective_cutoff == doctest::Approx(cutoff).epsilon(1e-15));
    // the simulated event rate tracks the exact tail at the shifted cutoff
    ModelParams at = cfg.params;
    at.alpha = cutoff;
    double exact = exact_p(at, cfg.family).p_mix.linear();
    CHECK(std::fabs(rep.agg.p_hat - exact) <= 3.0 * rep.agg.p_se);
    // and the posterior-based pFDR stays below the shifted cutoff on average
    REQUIRE(rep.agg.pfdr_hat.has_value());
    CHECK(*rep.agg.pfdr_hat <= cutoff + 3.0 * rep.agg.pfdr_se);
}

TEST_CASE("doubling the repetitions shrinks the standard error as sqrt(2)") {
    SimConfig cfg = base_config();
    cfg.n_nulls = 200;
    cfg.n_reps = 4000;
    auto [p1, se1] = estimate_event_prob(cfg);
    cfg.n_reps = 8000;
    auto [p2, se2] = estimate_event_prob(cfg);
    CHECK(se2 / se1 > 0.6);
    CHECK(se2 / se1 < 0.85);
    CHECK(p1 == doctest::Approx(p2).epsilon(0.2));
}

TEST_CASE("power and pFDR estimators agree with the exact functionals") {
    SimConfig cfg;
    cfg.params = {0.05, 0.4, 0.9, 0.1, 100};
    cfg.family = NormalMeanFamily{};
    cfg.procedure = ThresholdProcedure::fixed(0.4);
    cfg.n_nulls = 40000;
    cfg.n_reps = 60;
    cfg.seed = 11;
    cfg.threads = 2;
    PowerPfdrEstimate est = estimate_power_pfdr(cfg);
    PowerReport exact =
        power_pfdr_threshold(cfg.procedure, cfg.params, cfg.family);
    CHECK(std::fabs(est.power_hat - exact.power_inf.linear()) <=
          3.0 * est.power_se);
    CHECK(std::fabs(est.pfdr_hat - exact.pfdr_inf) <= 3.0 * est.pfdr_se);
    // posterior-based and truth-label estimators agree (the first is the
    // conditional expectation of the second)
    double se = std::hypot(est.pfdr_se, est.pfdr_truth_se);
    CHECK(std::fabs(est.pfdr_hat - est.pfdr_truth_hat) <= 3.0 * se);
}

TEST_CASE("no rejections -> estimation error") {
    SimConfig cfg = base_config();
    cfg.params = {0.05, 0.0001, 0.9, 0.1, 1};  // tiny cutoff, hopeless threshold
    cfg.procedure = ThresholdProcedure::fixed(0.0001);
    cfg.n_nulls = 200;
    cfg.n_reps = 5;
    CHECK_THROWS_AS(estimate_power_pfdr(cfg), estimation_error);
}

TEST_CASE("degenerate generation-side fraction a = 0") {
    SimConfig cfg = base_config();
    cfg.gen_frac_false = 0.0;  // no false nulls generated
    cfg.n_nulls = 20000;
    cfg.n_reps = 30;
    SimReport rep = simulate(cfg);
    for (const RepRecord& r : rep.reps) {
        CHECK(r.na == 0);
        CHECK(r.ra == 0);
    }
    // p_hat estimates the (1-a) P0 part alone (with 1-a = 1 here)
    TailSplit t = exact_p(cfg.params, cfg.family);
    double n = static_cast<double>(cfg.n_nulls) * cfg.n_reps;
    CHECK(std::fabs(rep.agg.p_hat - t.p_null.linear()) <=
          4.0 * std::sqrt(t.p_null.linear() / n));
}

TEST_CASE("simulator input guards") {
    SimConfig cfg = base_config();
    cfg.params.delta = 0.0;  // degenerate likelihood ratio
    CHECK_THROWS_AS(simulate(cfg), std::domain_error);

    cfg = base_config();
    cfg.family = GenericFamily{1.0};  // no exact sampler
    CHECK_THROWS_AS(simulate(cfg), std::domain_error);

    cfg = base_config();
    cfg.n_nulls = 1000000;
    cfg.n_reps = 1000000;  // blows the 1e9 draw budget
    CHECK_THROWS_AS(simulate(cfg), budget_error);
}

TEST_CASE("seed stability smoke check") {
    SimConfig cfg = base_config();
    cfg.n_nulls = 20000;
    cfg.n_reps = 25;
    cfg.seed = 1001;
    SimReport a = simulate(cfg);
    cfg.seed = 2002;
    SimReport b = simulate(cfg);
    double se = std::hypot(a.agg.p_se, b.agg.p_se);
    CHECK(std::fabs(a.agg.p_hat - b.agg.p_hat) <= 6.0 * se);
}

TEST_CASE("report carries the generator name and seed") {
    SimConfig cfg = base_config();
    cfg.n_nulls = 10;
    cfg.n_reps = 2;
    SimReport rep = simulate(cfg);
    CHECK(rep.rng == std::string("philox4x32-10"));
    CHECK(rep.config.seed == 42);
}
