#include "pfdr/sim.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "pfdr/kernels.hpp"
#include "pfdr/philox.hpp"

namespace pfdr {

namespace {

constexpr std::size_t kBlock = 8192;

struct LrAffine {
    double scale, shift;  // log LR = scale * sum_x + shift
};

// Everything a worker needs, resolved once up front.
struct SimPlan {
    double a_threshold;   // fraction the posterior/threshold machinery uses
    double a_gen;         // fraction used to draw the labels
    double cutoff;        // effective posterior cutoff
    double log_q;         // rejection threshold for the log LR sum
    LrAffine lr;
    bool is_normal;
    double d_std;         // normal: delta/sigma
    double nu;            // gamma shape per observation
    double scale_alt;     // gamma alternative scale
    std::int64_t k;
    bool raw;
};

SimPlan make_plan(const SimConfig& cfg) {
    cfg.params.validate();
    SimPlan plan;
    plan.a_threshold = cfg.params.frac_false;
    plan.a_gen = cfg.gen_frac_false.value_or(cfg.params.frac_false);
    if (!(plan.a_gen >= 0.0 && plan.a_gen < 1.0))
        throw std::domain_error("generation-side frac_false must lie in [0,1)");
    plan.cutoff = cfg.procedure.effective_cutoff(cfg.params.delta, cfg.params.k);
    plan.log_q = log_q_alpha(plan.a_threshold, plan.cutoff);
    plan.k = cfg.params.k;
    plan.raw = cfg.raw_observations;
    double k = static_cast<double>(cfg.params.k);
    if (const auto* nf = std::get_if<NormalMeanFamily>(&cfg.family)) {
        if (!(nf->sigma > 0.0)) throw std::domain_error("sigma must be > 0");
        plan.is_normal = true;
        plan.d_std = cfg.params.delta / nf->sigma;
        plan.lr = {plan.d_std, -k * plan.d_std * plan.d_std / 2.0};
        plan.nu = 0.0;
        plan.scale_alt = 0.0;
    } else if (const auto* gf = std::get_if<GammaScaleFamily>(&cfg.family)) {
        if (!(gf->nu > 0.0)) throw std::domain_error("nu must be > 0");
        plan.is_normal = false;
        plan.d_std = 0.0;
        plan.nu = gf->nu;
        plan.scale_alt = 1.0 + cfg.params.delta;
        plan.lr = {cfg.params.delta / (1.0 + cfg.params.delta),
                   -k * gf->nu * std::log1p(cfg.params.delta)};
    } else {
        throw std::domain_error(
            "simulation requires the normal or gamma family (exact-capable)");
    }
    return plan;
}

// Sufficient statistic of one unit, standardized units; consumes the unit's
// stream from draw 1 (draw 0 is the label uniform).
double sample_sum(const SimPlan& plan, UnitStream& stream, bool alt) {
    double k = static_cast<double>(plan.k);
    if (plan.is_normal) {
        double mean_shift = alt ? k * plan.d_std : 0.0;
        if (!plan.raw) return std::sqrt(k) * stream.next_normal() + mean_shift;
        double s = 0.0;
        for (std::int64_t j = 0; j < plan.k; ++j) s += stream.next_normal();
        return s + mean_shift;
    }
    double scale = alt ? plan.scale_alt : 1.0;
    if (!plan.raw) return scale * stream.next_gamma(k * plan.nu);
    double s = 0.0;
    for (std::int64_t j = 0; j < plan.k; ++j) s += scale * stream.next_gamma(plan.nu);
    return s;
}

RepRecord run_rep(const SimConfig& cfg, const SimPlan& plan, std::uint32_t rep) {
    RepRecord rec;
    rec.rep_index = rep;
    double max_loglr = -std::numeric_limits<double>::infinity();

    std::vector<double> label_u(kBlock), sums(kBlock), loglr(kBlock);
    std::vector<unsigned char> alt_flag(kBlock);

    for (std::uint64_t base = 0; base < cfg.n_nulls; base += kBlock) {
        std::size_t n = static_cast<std::size_t>(
            std::min<std::uint64_t>(kBlock, cfg.n_nulls - base));
        kernels::uniform_batch(cfg.seed, rep, base, /*draw=*/0, n, label_u.data());
        for (std::size_t i = 0; i < n; ++i) {
            bool alt = label_u[i] < plan.a_gen;
            alt_flag[i] = alt;
            rec.na += alt;
            UnitStream stream(cfg.seed, rep, base + i, /*first_draw=*/1);
            sums[i] = sample_sum(plan, stream, alt);
        }
        kernels::affine_batch(sums.data(), n, plan.lr.scale, plan.lr.shift, loglr.data());
        kernels::EventStats st = kernels::count_and_max(loglr.data(), n, plan.log_q);
        rec.r += st.count;
        if (st.max_value > max_loglr) max_loglr = st.max_value;
        if (st.count > 0) {
            for (std::size_t i = 0; i < n; ++i) {
                if (loglr[i] >= plan.log_q) {
                    rec.r0_expected += posterior_null_prob(loglr[i], plan.a_threshold);
                    if (alt_flag[i])
                        ++rec.ra;
                    else
                        ++rec.r0_truth;
                }
            }
        }
    }
    rec.criterion_hit = rec.r > 0;
    rec.min_posterior = posterior_null_prob(max_loglr, plan.a_threshold);
    return rec;
}

double sample_se(double sum, double sumsq, std::uint32_t m) {
    if (m < 2) return 0.0;
    double mean = sum / m;
    double var = std::max(0.0, (sumsq - m * mean * mean) / (m - 1.0));
    return std::sqrt(var / m);
}

}  // namespace

SimReport simulate(const SimConfig& cfg) {
    SimPlan plan = make_plan(cfg);
    if (cfg.n_nulls < 1 || cfg.n_reps < 1)
        throw std::domain_error("n_nulls and n_reps must be >= 1");
    long double draws = static_cast<long double>(cfg.n_nulls) *
                        static_cast<long double>(cfg.params.k) *
                        static_cast<long double>(cfg.n_reps);
    if (draws > static_cast<long double>(cfg.budget))
        throw budget_error("n_nulls * k * n_reps = " + std::to_string((double)draws) +
                           " exceeds the draw budget " + std::to_string(cfg.budget) +
                           " (override with PFDR_BUDGET)");

    SimReport report;
    report.config = cfg;
    report.rng = kRngName;
    report.effective_cutoff = plan.cutoff;
    report.log_q_cutoff = plan.log_q;
    report.reps.resize(cfg.n_reps);

    int threads = std::max(1, cfg.threads);
    if (threads == 1) {
        for (std::uint32_t rep = 0; rep < cfg.n_reps; ++rep)
            report.reps[rep] = run_rep(cfg, plan, rep);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::uint32_t> next{0};
        for (int tid = 0; tid < threads; ++tid) {
            pool.emplace_back([&] {
                for (;;) {
                    std::uint32_t rep = next.fetch_add(1);
                    if (rep >= cfg.n_reps) return;
                    report.reps[rep] = run_rep(cfg, plan, rep);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    // rep-ordered reduction; identical for every thread count
    SimAggregates& agg = report.agg;
    double pw_sum = 0, pw_sq = 0, pf_sum = 0, pf_sq = 0, pt_sum = 0, pt_sq = 0;
    std::uint64_t r_tot = 0, r0_tot = 0, ra_tot = 0, na_tot = 0;
    std::uint32_t hits = 0;
    for (const RepRecord& rec : report.reps) {
        agg.events_total += rec.r;
        hits += rec.criterion_hit;
        r_tot += rec.r;
        r0_tot += rec.r0_truth;
        ra_tot += rec.ra;
        na_tot += rec.na;
        if (rec.na > 0) {
            double v = static_cast<double>(rec.ra) / static_cast<double>(rec.na);
            pw_sum += v;
            pw_sq += v * v;
            ++agg.reps_with_alternative;
        }
        if (rec.r > 0) {
            double v = rec.r0_expected / static_cast<double>(rec.r);
            pf_sum += v;
            pf_sq += v * v;
            double w = static_cast<double>(rec.r0_truth) / static_cast<double>(rec.r);
            pt_sum += w;
            pt_sq += w * w;
            ++agg.reps_with_rejection;
        }
    }
    double total_units = static_cast<double>(cfg.n_nulls) * cfg.n_reps;
    agg.p_hat = static_cast<double>(agg.events_total) / total_units;
    agg.p_se = std::sqrt(std::max(0.0, agg.p_hat * (1.0 - agg.p_hat) / total_units));
    agg.criterion_hat = static_cast<double>(hits) / cfg.n_reps;
    agg.criterion_se = std::sqrt(
        std::max(0.0, agg.criterion_hat * (1.0 - agg.criterion_hat) / cfg.n_reps));
    if (agg.reps_with_alternative > 0) {
        agg.power_hat = pw_sum / agg.reps_with_alternative;
        agg.power_se = sample_se(pw_sum, pw_sq, agg.reps_with_alternative);
    }
    if (agg.reps_with_rejection > 0) {
        agg.pfdr_hat = pf_sum / agg.reps_with_rejection;
        agg.pfdr_se = sample_se(pf_sum, pf_sq, agg.reps_with_rejection);
        agg.pfdr_truth_hat = pt_sum / agg.reps_with_rejection;
        agg.pfdr_truth_se = sample_se(pt_sum, pt_sq, agg.reps_with_rejection);
    }
    agg.r_rate = r_tot / total_units;
    agg.r0_rate = r0_tot / total_units;
    agg.ra_rate = ra_tot / total_units;
    agg.na_rate = na_tot / total_units;
    return report;
}

std::pair<double, double> estimate_event_prob(const SimConfig& cfg) {
    SimReport rep = simulate(cfg);
    return {rep.agg.p_hat, rep.agg.p_se};
}

std::pair<double, double> estimate_criterion_prob(const SimConfig& cfg) {
    SimReport rep = simulate(cfg);
    return {rep.agg.criterion_hat, rep.agg.criterion_se};
}

PowerPfdrEstimate estimate_power_pfdr(const SimConfig& cfg) {
    SimReport rep = simulate(cfg);
    const SimAggregates& a = rep.agg;
    if (!a.pfdr_hat)
        throw estimation_error("no repetition produced a rejection; "
                               "increase n_nulls or the cutoff");
    if (!a.power_hat)
        throw estimation_error("no repetition contained a false null");
    return {*a.power_hat, a.power_se, *a.pfdr_hat,
            a.pfdr_se,    *a.pfdr_truth_hat, a.pfdr_truth_se};
}

}  // namespace pfdr
