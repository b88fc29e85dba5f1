#include "pfdr/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pfdr/philox.hpp"
#include "pfdr/version.hpp"

namespace pfdr::cmd {

namespace {

json prob_json(LogProb p) {
    return json{{"linear", p.linear()}, {"log", p.log_value}};
}

json extended_real_json(const ExtendedReal& v) {
    json out;
    out["value"] = v.value ? json(*v.value) : json(nullptr);
    out["log"] = v.log_value;
    return out;
}

json header(const char* schema) {
    return json{{"schema", std::string("pfdr/") + schema + "/v1"},
                {"tool_version", kVersion}};
}

json procedure_json(const ThresholdProcedure& proc) {
    json out;
    out["kind"] = proc.kind == ThresholdProcedure::Kind::fixed ? "fixed" : "shifted";
    out["alpha"] = proc.alpha;
    if (proc.kind == ThresholdProcedure::Kind::shifted) out["c"] = proc.c;
    return out;
}

}  // namespace

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json params_json(const ModelParams& p) {
    return json{{"frac_false", p.frac_false}, {"alpha", p.alpha},
                {"detect_prob", p.detect_prob}, {"delta", p.delta}, {"k", p.k}};
}

json family_json(const FamilySpec& family) {
    if (const auto* nf = std::get_if<NormalMeanFamily>(&family))
        return json{{"name", "normal"}, {"theta0", nf->theta0}, {"sigma", nf->sigma}};
    if (const auto* gf = std::get_if<GammaScaleFamily>(&family))
        return json{{"name", "gamma"}, {"nu", gf->nu}};
    if (const auto* uf = std::get_if<GenericFamily>(&family))
        return json{{"name", "generic"}, {"fisher_info", uf->fisher_info}};
    const auto& mf = std::get<GenericMultivariateFamily>(family);
    return json{{"name", "generic_multivariate"}, {"dim", mf.dim}};
}

json volume_json(const VolumeResult& v) {
    json out;
    out["provenance"] = provenance_name(v.provenance);
    out["p_event"] = prob_json(v.p_event);
    out["n_star"] = extended_real_json(v.n_star);
    out["n_star_int"] = v.n_star_int ? json(*v.n_star_int) : json(nullptr);
    out["v_star"] = extended_real_json(v.v_star);
    out["k"] = v.k;
    return out;
}

// ------------------------------------------------------------------ exact

json exact_report(const ExactOptions& opt) {
    TailSplit t = exact_p(opt.params, opt.family);
    VolumeResult v = min_volume_exact(opt.params, opt.family);
    json out = header("exact_report");
    out["params"] = params_json(opt.params);
    out["family"] = family_json(opt.family);
    out["tail"] = json{{"p_null", prob_json(t.p_null)},
                       {"p_alt", prob_json(t.p_alt)},
                       {"p_mix", prob_json(t.p_mix)}};
    out["volume"] = volume_json(v);
    if (const auto* gf = std::get_if<GammaScaleFamily>(&opt.family)) {
        GammaThresholds th = gamma_lr_thresholds(opt.params, *gf);
        out["thresholds"] = json{{"c_k", th.c_k}, {"d_k", th.d_k}};
    } else if (const auto* nf = std::get_if<NormalMeanFamily>(&opt.family)) {
        out["thresholds"] = json{{"sum_x", normal_lr_threshold(opt.params, *nf)}};
    }
    return out;
}

// ------------------------------------------------------------------- asym

json asym_report(const AsymOptions& opt) {
    json out = header("asym_report");
    out["params"] = params_json(opt.params);
    out["family"] = family_json(opt.family);
    LogProb p;
    Provenance prov;
    if (const auto* nf = std::get_if<NormalMeanFamily>(&opt.family)) {
        p = asym_p_normal(opt.params, *nf);
        prov = Provenance::asymptotic_normal;
    } else if (const auto* gf = std::get_if<GammaScaleFamily>(&opt.family)) {
        p = asym_p_gamma(opt.params, *gf);
        prov = Provenance::asymptotic_gamma;
    } else if (const auto* uf = std::get_if<GenericFamily>(&opt.family)) {
        p = asym_p_univariate(opt.params, uf->fisher_info);
        prov = Provenance::asymptotic_thm1;
    } else {
        throw std::domain_error("asym: multivariate family needs the library API");
    }
    out["p_event"] = prob_json(p);
    out["volume"] = volume_json(asym_v_generic(p, opt.params, prov));
    out["regime_warnings"] = regime_warnings(opt.params, opt.family);
    return out;
}

json volume_report(const VolumeOptions& opt) {
    json out = header("volume_report");
    out["params"] = params_json(opt.params);
    out["family"] = family_json(opt.family);
    out["method"] = opt.method;
    if (opt.method == "exact") {
        out["volume"] = volume_json(min_volume_exact(opt.params, opt.family));
    } else if (opt.method == "asym") {
        AsymOptions a{opt.params, opt.family};
        json rep = asym_report(a);
        out["volume"] = rep["volume"];
        out["regime_warnings"] = rep["regime_warnings"];
    } else {
        throw std::domain_error("--method must be exact or asym");
    }
    return out;
}

// ------------------------------------------------------------------ power

json power_report(const PowerOptions& opt) {
    PowerReport r = power_pfdr_threshold(opt.procedure, opt.params, opt.family);
    json out = header("power_report");
    out["params"] = params_json(opt.params);
    out["family"] = family_json(opt.family);
    out["procedure"] = procedure_json(opt.procedure);
    out["effective_cutoff"] = r.effective_cutoff;
    out["power_inf"] = prob_json(r.power_inf);
    out["pfdr_inf"] = r.pfdr_inf;
    out["identity_ratio"] = power_identity_check(opt.params, opt.family);
    if (opt.alpha2) {
        LogProb bound = power_upper_bound(opt.params, opt.family, *opt.alpha2);
        out["power_upper_bound"] =
            json{{"alpha2", *opt.alpha2}, {"linear", std::exp(bound.log_value)},
                 {"log", bound.log_value}};
    }
    return out;
}

json ratio_report(const RatioOptions& opt) {
    opt.params.validate();
    NormalMeanFamily fam{0.0, opt.sigma};
    double fisher = 1.0 / (opt.sigma * opt.sigma);
    double c;
    if (opt.cutoff_c)
        c = *opt.cutoff_c;
    else if (opt.gain_m)
        c = shifted_cutoff_for_gain(opt.params, fisher, *opt.gain_m);
    else
        throw std::domain_error("ratio needs --cutoff-c or --gain-M");
    PowerRatioLimit lim = power_ratio_limit(opt.params, c, fam);

    json rows = json::array();
    double last_ratio = 0.0;
    for (double d : opt.deltas) {
        std::int64_t k = opt.schedule.k_rounded(d);
        ModelParams at = opt.params;
        at.delta = d;
        at.k = k;
        ThresholdProcedure proc = ThresholdProcedure::shifted(opt.params.alpha, c);
        PowerReport pr = power_pfdr_threshold(proc, at, FamilySpec{fam});
        double ratio = lim.exact_ratio(d, k);
        last_ratio = ratio;
        rows.push_back(json{{"delta", d},
                            {"k", k},
                            {"effective_cutoff", pr.effective_cutoff},
                            {"ratio", ratio},
                            {"pfdr_inf", pr.pfdr_inf}});
    }
    json out = header("ratio_report");
    out["params"] = params_json(opt.params);
    out["c"] = c;
    if (opt.gain_m) out["gain_M"] = *opt.gain_m;
    out["rows"] = rows;
    out["limit_candidates"] =
        json{{"exp_2c_lnQ_over_1ma", lim.candidate_denom_one_minus_alpha},
             {"exp_2c_lnQ_over_1ma_a", lim.candidate_denom_one_minus_alpha_alpha}};
    out["adjudicated_limit"] = lim.adjudicated_limit;
    // which closed form the computed ratios actually approach
    double da = std::fabs(std::log(last_ratio / lim.candidate_denom_one_minus_alpha));
    double db =
        std::fabs(std::log(last_ratio / lim.candidate_denom_one_minus_alpha_alpha));
    double dj = std::fabs(std::log(last_ratio / lim.adjudicated_limit));
    const char* closest = "exp{c lnQ/((1-alpha) alpha)}";
    if (da < dj && da < db) closest = "exp{2c lnQ/(1-alpha)}";
    if (db < dj && db < da) closest = "exp{2c lnQ/((1-alpha) alpha)}";
    out["endpoint_ratio"] = last_ratio;
    out["closest_form"] = closest;
    return out;
}

// ----------------------------------------------------------------- figure

std::string figure_csv(const FigureOptions& opt) {
    opt.params.validate();
    if (!(opt.t_min > 0.0 && opt.t_max <= 2.0 && opt.t_min <= opt.t_max))
        throw std::domain_error("t range must satisfy 0 < t_min <= t_max <= 2");
    if (opt.t_steps < 1 || opt.deltas.empty())
        throw std::domain_error("empty figure grid");
    if (opt.panel != "A" && opt.panel != "B")
        throw std::domain_error("--panel must be A or B");
    NormalMeanFamily fam;  // sigma = 1 as in the reference plots
    const double ln10 = std::log(10.0);

    std::ostringstream csv;
    csv << "t,delta,value\n";
    for (double d : opt.deltas) {
        ModelParams at = opt.params;
        at.delta = d;
        double log_v2 = (opt.panel == "A")
                            ? asym_log_v_normal_k(at, fam, std::pow(d, -2.0))
                            : 0.0;
        for (int i = 0; i < opt.t_steps; ++i) {
            double t = (opt.t_steps == 1)
                           ? opt.t_min
                           : opt.t_min + (opt.t_max - opt.t_min) * i /
                                             (opt.t_steps - 1.0);
            double k_real = std::pow(d, -t);
            double value;
            if (opt.panel == "A") {
                value = (asym_log_v_normal_k(at, fam, k_real) - log_v2) / ln10;
            } else {
                double log_p = asym_log_p_univariate_k(at, 1.0, k_real);
                double weight = (opt.variant == "prop1")
                                    ? std::log1p(-at.alpha) - std::log(at.frac_false)
                                    : std::log1p(-at.alpha) - std::log(at.alpha);
                value = (log_p + weight) / ln10;
            }
            csv << format_g17(t) << ',' << format_g17(d) << ',' << format_g17(value)
                << '\n';
        }
    }
    return csv.str();
}

// --------------------------------------------------------------- converge

std::string converge_csv(const ConvergeOptions& opt, json* summary) {
    opt.params.validate();
    if (opt.deltas.empty()) throw std::domain_error("empty delta grid");
    std::ostringstream csv;
    json rows = json::array();
    if (opt.family == "normal") {
        csv << "delta,k,p_exact_log,p_asym_log,log_ratio\n";
        NormalMeanFamily fam{0.0, opt.sigma};
        for (double d : opt.deltas) {
            ModelParams at = opt.params;
            at.delta = d;
            at.k = opt.schedule.k_rounded(d);
            double ex = exact_p_normal(at, fam).p_mix.log_value;
            double as = asym_p_normal(at, fam).log_value;
            csv << format_g17(d) << ',' << at.k << ',' << format_g17(ex) << ','
                << format_g17(as) << ',' << format_g17(ex - as) << '\n';
            rows.push_back(json{{"delta", d}, {"k", at.k}, {"log_ratio", ex - as}});
        }
        if (summary) {
            *summary = header("converge_summary");
            (*summary)["family"] = "normal";
            (*summary)["rows"] = rows;
        }
    } else if (opt.family == "gamma") {
        csv << "delta,k,p_exact_log,p_fisher_log,p_gamma_form_log,p_gamma_lnq_log,"
               "log_ratio_fisher,log_ratio_gamma_form,log_ratio_gamma_lnq\n";
        GammaScaleFamily fam{opt.nu};
        for (double d : opt.deltas) {
            ModelParams at = opt.params;
            at.delta = d;
            at.k = opt.schedule.k_rounded(d);
            double ex = exact_p_gamma(at, fam).p_mix.log_value;
            // three closed-form candidates: the general parametric form
            // with the gamma Fisher information I = nu / scale^2 = nu, the
            // gamma form as displayed (sqrt(ln Q) prefactor), and the same
            // exponent with the ln Q prefactor the tail expansions imply
            double a1 = asym_p_univariate(at, fam.nu).log_value;
            double a2 = asym_p_gamma(at, fam).log_value;
            double a3 = asym_p_gamma_lnq(at, fam).log_value;
            csv << format_g17(d) << ',' << at.k << ',' << format_g17(ex) << ','
                << format_g17(a1) << ',' << format_g17(a2) << ',' << format_g17(a3)
                << ',' << format_g17(ex - a1) << ',' << format_g17(ex - a2) << ','
                << format_g17(ex - a3) << '\n';
            rows.push_back(json{{"delta", d},
                                {"k", at.k},
                                {"log_ratio_fisher", ex - a1},
                                {"log_ratio_gamma_form", ex - a2},
                                {"log_ratio_gamma_lnq", ex - a3}});
        }
        if (summary) {
            *summary = header("converge_summary");
            (*summary)["family"] = "gamma";
            (*summary)["nu"] = opt.nu;
            (*summary)["rows"] = rows;
            const json& endr = rows.back();
            double e1 = std::fabs(endr["log_ratio_fisher"].get<double>());
            double e2 = std::fabs(endr["log_ratio_gamma_form"].get<double>());
            double e3 = std::fabs(endr["log_ratio_gamma_lnq"].get<double>());
            const char* which = "gamma_lnq";
            if (e1 < e2 && e1 < e3) which = "fisher";
            if (e2 < e1 && e2 < e3) which = "gamma_form";
            (*summary)["adjudication"] = json{
                {"converging_formula", which},
                {"endpoint_abs_log_ratio",
                 json{{"fisher", e1}, {"gamma_form", e2}, {"gamma_lnq", e3}}},
                {"note",
                 "fisher = general parametric form with I = nu; gamma_form "
                 "= gamma form as displayed (sqrt(lnQ) prefactor); gamma_lnq "
                 "= same exponent with the lnQ prefactor implied by the tail "
                 "expansions"}};
        }
    } else {
        throw std::domain_error("converge supports --family normal or gamma");
    }
    return csv.str();
}

// --------------------------------------------------------------- simulate

json simulate_report(const SimulateOptions& opt, std::string* per_rep_csv) {
    SimReport rep = simulate(opt.config);
    const SimAggregates& a = rep.agg;
    json out = header("sim_report");
    out["rng"] = rep.rng;
    // deliberately no thread count here: the aggregate report must be
    // byte-identical for any --threads value
    json cfg;
    cfg["params"] = params_json(opt.config.params);
    cfg["family"] = family_json(opt.config.family);
    cfg["n_nulls"] = opt.config.n_nulls;
    cfg["n_reps"] = opt.config.n_reps;
    cfg["seed"] = opt.config.seed;
    cfg["procedure"] = procedure_json(opt.config.procedure);
    cfg["raw_observations"] = opt.config.raw_observations;
    cfg["gen_frac_false"] =
        opt.config.gen_frac_false ? json(*opt.config.gen_frac_false) : json(nullptr);
    out["config"] = cfg;
    out["effective_cutoff"] = rep.effective_cutoff;
    out["log_q_cutoff"] = rep.log_q_cutoff;
    json est;
    est["p_hat"] = a.p_hat;
    est["p_se"] = a.p_se;
    est["criterion_hat"] = a.criterion_hat;
    est["criterion_se"] = a.criterion_se;
    est["power_hat"] = a.power_hat ? json(*a.power_hat) : json(nullptr);
    est["power_se"] = a.power_se;
    est["pfdr_hat"] = a.pfdr_hat ? json(*a.pfdr_hat) : json(nullptr);
    est["pfdr_se"] = a.pfdr_se;
    est["pfdr_truth_hat"] = a.pfdr_truth_hat ? json(*a.pfdr_truth_hat) : json(nullptr);
    est["pfdr_truth_se"] = a.pfdr_truth_se;
    est["r_rate"] = a.r_rate;
    est["r0_rate"] = a.r0_rate;
    est["ra_rate"] = a.ra_rate;
    est["na_rate"] = a.na_rate;
    out["estimates"] = est;
    out["totals"] = json{{"events", a.events_total},
                         {"reps_with_rejection", a.reps_with_rejection},
                         {"reps_with_alternative", a.reps_with_alternative}};
    if (per_rep_csv) {
        std::ostringstream csv;
        csv << "rep_index,R,R0_expected,Ra,Na,criterion_hit,min_posterior\n";
        for (const RepRecord& r : rep.reps) {
            csv << r.rep_index << ',' << r.r << ',' << format_g17(r.r0_expected) << ','
                << r.ra << ',' << r.na << ',' << (r.criterion_hit ? 1 : 0) << ','
                << format_g17(r.min_posterior) << '\n';
        }
        *per_rep_csv = csv.str();
    }
    return out;
}

// ---------------------------------------------------------------- output

void write_output(const std::string& path, const std::string& text,
                  const std::string& command, const json& resolved,
                  std::optional<std::uint64_t> seed) {
    {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file " + path);
        f << text;
    }
    json manifest = header("run_manifest");
    manifest["command"] = command;
    manifest["resolved_options"] = resolved;
    manifest["seed"] = seed ? json(*seed) : json(nullptr);
    auto now = std::chrono::system_clock::now().time_since_epoch();
    manifest["timestamp_unix_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
    manifest["outputs"] =
        json::array({json{{"path", path}, {"bytes", text.size()}}});
    std::ofstream mf(path + ".manifest.json", std::ios::binary);
    mf << manifest.dump(2) << '\n';
}

}  // namespace pfdr::cmd
