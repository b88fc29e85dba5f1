// pfdr — exact/asymptotic detection-volume and power calculations for the
// random-effects multiple-testing model, with a seeded Monte Carlo
// cross-validator.  See README.md for the command tour.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pfdr/commands.hpp"
#include "pfdr/version.hpp"

namespace {

using pfdr::cmd::json;

struct FlagSet {
    std::string family = "normal";
    double a = 0.05, alpha = 0.4, p = 0.9, delta = 0.1;
    std::optional<std::int64_t> k;
    std::optional<std::string> schedule;
    double t = 1.5;
    double sigma = 1.0, theta0 = 0.0, nu = 1.0, fisher = 1.0;
    std::vector<double> deltas;
    std::optional<std::string> out;
    std::string format;  // empty = the command's native format
};

void add_model_flags(CLI::App* sub, FlagSet& f, bool needs_k) {
    sub->add_option("--family", f.family, "normal | gamma | generic")
        ->check(CLI::IsMember({"normal", "gamma", "generic"}));
    sub->add_option("--a", f.a, "population fraction of false nulls, in (0,1)")
        ->required();
    sub->add_option("--alpha", f.alpha, "pFDR level, in (0,1)")->required();
    sub->add_option("--p", f.p, "required detection probability, in (0,1)");
    sub->add_option("--delta", f.delta, "effect size, > 0")->required();
    sub->add_option("--sigma", f.sigma, "normal family: known sigma");
    sub->add_option("--theta0", f.theta0, "normal family: null mean");
    sub->add_option("--nu", f.nu, "gamma family: shape per observation");
    sub->add_option("--fisher", f.fisher, "generic family: Fisher information");
    if (needs_k) {
        sub->add_option("--k", f.k, "replications per null");
        sub->add_option("--schedule", f.schedule,
                        "derive k from delta: sqrt-log | log-log | power-t");
        sub->add_option("--t", f.t, "exponent for --schedule power-t");
    }
}

void add_output_flags(CLI::App* sub, FlagSet& f) {
    sub->add_option("--out", f.out, "write the report here (plus .manifest.json)");
    sub->add_option("--format", f.format, "json | csv")
        ->check(CLI::IsMember({"json", "csv"}));
}

pfdr::ModelParams make_params(const FlagSet& f) {
    pfdr::ModelParams params;
    params.frac_false = f.a;
    params.alpha = f.alpha;
    params.detect_prob = f.p;
    params.delta = f.delta;
    if (f.k) {
        params.k = *f.k;
    } else if (f.schedule) {
        pfdr::RegimeSpec spec{pfdr::schedule_from_name(*f.schedule), f.t};
        params.k = spec.k_rounded(f.delta);
    } else {
        throw std::domain_error("missing --k (or --schedule to derive it)");
    }
    return params;
}

pfdr::FamilySpec make_family(const FlagSet& f) {
    if (f.family == "normal") return pfdr::NormalMeanFamily{f.theta0, f.sigma};
    if (f.family == "gamma") return pfdr::GammaScaleFamily{f.nu};
    return pfdr::GenericFamily{f.fisher};
}

void emit(const std::string& text, const FlagSet& f, const std::string& command,
          const json& resolved, std::optional<std::uint64_t> seed = std::nullopt) {
    if (f.out) {
        pfdr::cmd::write_output(*f.out, text, command, resolved, seed);
    } else {
        std::cout << text;
    }
}

void emit_json(const json& report, const FlagSet& f, const std::string& command) {
    if (f.format == "csv")
        throw std::domain_error(command + " emits a JSON record; --format csv "
                                          "applies to figure/converge/simulate");
    emit(report.dump(2) + "\n", f, command, report, std::nullopt);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"detection volume and power for multiple tests"};
    app.set_version_flag("--version", pfdr::kVersion);
    app.require_subcommand(1);

    // ---- exact ----
    FlagSet fx;
    CLI::App* sc_exact = app.add_subcommand(
        "exact", "exact tail split, minimum N* and volume V*");
    add_model_flags(sc_exact, fx, true);
    add_output_flags(sc_exact, fx);

    // ---- asym ----
    FlagSet fa;
    CLI::App* sc_asym = app.add_subcommand(
        "asym", "closed-form leading terms for p, N*, V*");
    add_model_flags(sc_asym, fa, true);
    add_output_flags(sc_asym, fa);

    // ---- volume ----
    FlagSet fv;
    std::string vol_method = "exact";
    CLI::App* sc_vol = app.add_subcommand("volume", "minimum N* and V* only");
    add_model_flags(sc_vol, fv, true);
    sc_vol->add_option("--method", vol_method, "exact | asym")
        ->check(CLI::IsMember({"exact", "asym"}));
    add_output_flags(sc_vol, fv);

    // ---- power ----
    FlagSet fp;
    std::string proc_kind = "fixed";
    double cutoff_c = 0.0;
    std::optional<double> alpha2;
    CLI::App* sc_power = app.add_subcommand(
        "power", "asymptotic power and pFDR of a thresholding procedure");
    add_model_flags(sc_power, fp, true);
    sc_power->add_option("--procedure", proc_kind, "fixed | shifted")
        ->check(CLI::IsMember({"fixed", "shifted"}));
    sc_power->add_option("--cutoff-c", cutoff_c, "shifted cutoff constant c");
    sc_power->add_option("--alpha2", alpha2, "report the power bound at this level");
    add_output_flags(sc_power, fp);

    // ---- ratio ----
    FlagSet fr;
    std::optional<double> ratio_c, gain_m;
    std::string ratio_schedule = "power-t";
    CLI::App* sc_ratio = app.add_subcommand(
        "ratio", "exact power ratio of shifted over fixed cutoffs along a grid");
    sc_ratio->add_option("--a", fr.a);
    sc_ratio->add_option("--alpha", fr.alpha);
    sc_ratio->add_option("--p", fr.p);
    sc_ratio->add_option("--sigma", fr.sigma);
    sc_ratio->add_option("--cutoff-c", ratio_c, "shift constant c");
    sc_ratio->add_option("--gain-M", gain_m, "derive c for this power gain");
    sc_ratio->add_option("--deltas", fr.deltas, "grid of effect sizes")
        ->delimiter(',');
    sc_ratio->add_option("--schedule", ratio_schedule);
    sc_ratio->add_option("--t", fr.t);
    add_output_flags(sc_ratio, fr);

    // ---- simulate ----
    FlagSet fs;
    std::uint64_t n_nulls = 1000, seed = 0;
    std::uint32_t n_reps = 100;
    int threads = 1;
    bool raw_obs = false;
    std::optional<double> gen_a;
    std::string sim_proc = "fixed";
    double sim_c = 0.0;
    CLI::App* sc_sim = app.add_subcommand(
        "simulate", "Monte Carlo run of the random-effects model");
    add_model_flags(sc_sim, fs, true);
    sc_sim->add_option("--n-nulls", n_nulls, "nulls per repetition");
    sc_sim->add_option("--n-reps", n_reps, "independent repetitions");
    CLI::Option* seed_opt = sc_sim->add_option("--seed", seed, "PRNG seed");
    sc_sim->add_option("--threads", threads,
                       "worker threads (never changes the numbers)");
    sc_sim->add_flag("--raw-observations", raw_obs,
                     "sample k observations per null instead of the sufficient stat");
    sc_sim->add_option("--gen-a", gen_a,
                       "generation-side fraction of false nulls (may be 0)");
    sc_sim->add_option("--procedure", sim_proc, "fixed | shifted")
        ->check(CLI::IsMember({"fixed", "shifted"}));
    sc_sim->add_option("--c", sim_c, "shifted cutoff constant");
    add_output_flags(sc_sim, fs);

    // ---- converge ----
    FlagSet fc;
    std::string conv_schedule = "sqrt-log";
    CLI::App* sc_conv = app.add_subcommand(
        "converge", "exact vs asymptotic log-ratio diagnostic along a delta grid");
    sc_conv->add_option("--family", fc.family)
        ->check(CLI::IsMember({"normal", "gamma"}));
    sc_conv->add_option("--a", fc.a);
    sc_conv->add_option("--alpha", fc.alpha);
    sc_conv->add_option("--p", fc.p);
    sc_conv->add_option("--sigma", fc.sigma);
    sc_conv->add_option("--nu", fc.nu);
    sc_conv->add_option("--deltas", fc.deltas)->delimiter(',');
    sc_conv->add_option("--schedule", conv_schedule);
    sc_conv->add_option("--t", fc.t);
    add_output_flags(sc_conv, fc);

    // ---- figure ----
    FlagSet ff;
    std::string panel = "A", variant = "printed";
    double t_min = 1.0, t_max = 2.0;
    int t_steps = 101;
    CLI::App* sc_fig = app.add_subcommand(
        "figure", "CSV data for the volume/power panels (plotting left external)");
    sc_fig->add_option("--panel", panel, "A: log10(V_t/V_2), B: log10 P_t")
        ->check(CLI::IsMember({"A", "B"}));
    sc_fig->add_option("--a", ff.a);
    sc_fig->add_option("--alpha", ff.alpha);
    sc_fig->add_option("--p", ff.p);
    sc_fig->add_option("--deltas", ff.deltas)->delimiter(',');
    sc_fig->add_option("--t-min", t_min);
    sc_fig->add_option("--t-max", t_max);
    sc_fig->add_option("--t-steps", t_steps);
    sc_fig->add_option("--variant", variant, "panel B: printed | prop1")
        ->check(CLI::IsMember({"printed", "prop1"}));
    add_output_flags(sc_fig, ff);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sc_exact->parsed()) {
            pfdr::cmd::ExactOptions opt{make_params(fx), make_family(fx)};
            emit_json(pfdr::cmd::exact_report(opt), fx, "exact");
        } else if (sc_asym->parsed()) {
            pfdr::cmd::AsymOptions opt{make_params(fa), make_family(fa)};
            emit_json(pfdr::cmd::asym_report(opt), fa, "asym");
        } else if (sc_vol->parsed()) {
            pfdr::cmd::VolumeOptions opt{make_params(fv), make_family(fv), vol_method};
            emit_json(pfdr::cmd::volume_report(opt), fv, "volume");
        } else if (sc_power->parsed()) {
            pfdr::cmd::PowerOptions opt;
            opt.params = make_params(fp);
            opt.family = make_family(fp);
            opt.procedure = (proc_kind == "fixed")
                                ? pfdr::ThresholdProcedure::fixed(fp.alpha)
                                : pfdr::ThresholdProcedure::shifted(fp.alpha, cutoff_c);
            opt.alpha2 = alpha2;
            emit_json(pfdr::cmd::power_report(opt), fp, "power");
        } else if (sc_ratio->parsed()) {
            pfdr::cmd::RatioOptions opt;
            opt.params.frac_false = fr.a;
            opt.params.alpha = fr.alpha;
            opt.params.detect_prob = fr.p;
            opt.sigma = fr.sigma;
            opt.cutoff_c = ratio_c;
            opt.gain_m = gain_m;
            if (!fr.deltas.empty()) opt.deltas = fr.deltas;
            opt.schedule = pfdr::RegimeSpec{pfdr::schedule_from_name(ratio_schedule),
                                            fr.t};
            emit_json(pfdr::cmd::ratio_report(opt), fr, "ratio");
        } else if (sc_sim->parsed()) {
            if (!*seed_opt)
                std::cerr << "warning: --seed not given; using seed 0\n";
            pfdr::SimConfig cfg;
            cfg.params = make_params(fs);
            cfg.family = make_family(fs);
            cfg.n_nulls = n_nulls;
            cfg.n_reps = n_reps;
            cfg.seed = seed;
            cfg.threads = threads;
            cfg.raw_observations = raw_obs;
            cfg.gen_frac_false = gen_a;
            cfg.procedure = (sim_proc == "fixed")
                                ? pfdr::ThresholdProcedure::fixed(fs.alpha)
                                : pfdr::ThresholdProcedure::shifted(fs.alpha, sim_c);
            if (const char* env = std::getenv("PFDR_BUDGET"))
                cfg.budget = std::strtoull(env, nullptr, 10);
            std::string reps_csv;
            bool want_csv = fs.format == "csv";
            json report = pfdr::cmd::simulate_report({cfg},
                                                     want_csv ? &reps_csv : nullptr);
            if (want_csv && !fs.out)
                throw std::domain_error("simulate --format csv needs --out");
            auto hits = report["totals"]["reps_with_rejection"].get<std::uint64_t>();
            if (2 * hits < n_reps)
                std::cerr << "warning: only " << hits << "/" << n_reps
                          << " repetitions produced a rejection; power/pFDR "
                             "estimates will be noisy (raise --n-nulls)\n";
            emit(report.dump(2) + "\n", fs, "simulate", report, seed);
            if (want_csv) {
                pfdr::cmd::write_output(*fs.out + ".reps.csv", reps_csv, "simulate",
                                        report["config"], seed);
            }
        } else if (sc_conv->parsed()) {
            pfdr::cmd::ConvergeOptions opt;
            opt.family = fc.family;
            opt.nu = fc.nu;
            opt.sigma = fc.sigma;
            if (!fc.deltas.empty()) opt.deltas = fc.deltas;
            opt.schedule = pfdr::RegimeSpec{pfdr::schedule_from_name(conv_schedule),
                                            fc.t};
            opt.params.frac_false = fc.a;
            opt.params.alpha = fc.alpha;
            opt.params.detect_prob = fc.p;
            json summary;
            std::string csv = pfdr::cmd::converge_csv(opt, &summary);
            if (fc.format == "json")
                emit(summary.dump(2) + "\n", fc, "converge", summary, std::nullopt);
            else
                emit(csv, fc, "converge", summary, std::nullopt);
            if (opt.family == "gamma")
                std::cerr << "adjudication: "
                          << summary["adjudication"]["converging_formula"]
                          << " has the vanishing |log ratio| "
                          << summary["adjudication"]["endpoint_abs_log_ratio"].dump()
                          << "\n";
        } else if (sc_fig->parsed()) {
            pfdr::cmd::FigureOptions opt;
            opt.panel = panel;
            opt.t_min = t_min;
            opt.t_max = t_max;
            opt.t_steps = t_steps;
            if (!ff.deltas.empty()) opt.deltas = ff.deltas;
            opt.params.frac_false = ff.a;
            opt.params.alpha = ff.alpha;
            opt.params.detect_prob = ff.p;
            opt.variant = variant;
            if (ff.format == "json")
                throw std::domain_error("figure emits CSV only");
            json resolved{{"panel", panel}, {"t_min", t_min}, {"t_max", t_max},
                          {"t_steps", t_steps}, {"variant", variant}};
            emit(pfdr::cmd::figure_csv(opt), ff, "figure", resolved, std::nullopt);
        }
    } catch (const pfdr::budget_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
