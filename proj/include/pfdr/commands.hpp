#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pfdr/asymptotics.hpp"
#include "pfdr/exact.hpp"
#include "pfdr/model.hpp"
#include "pfdr/power.hpp"
#include "pfdr/sim.hpp"

// Command implementations behind the CLI.  Each one is a pure function of
// its options (plus the seed where applicable): the CLI binary parses flags
// into these structs, and the test suites call them in-process.

namespace pfdr::cmd {

using json = nlohmann::ordered_json;

// ------------------------------------------------------------ reports

struct ExactOptions {
    ModelParams params;
    FamilySpec family;
};
json exact_report(const ExactOptions& opt);

struct AsymOptions {
    ModelParams params;
    FamilySpec family;  // normal, gamma or generic (univariate)
};
json asym_report(const AsymOptions& opt);

struct VolumeOptions {
    ModelParams params;
    FamilySpec family;
    std::string method = "exact";  // exact | asym
};
json volume_report(const VolumeOptions& opt);

struct PowerOptions {
    ModelParams params;
    FamilySpec family;
    ThresholdProcedure procedure;
    std::optional<double> alpha2;  // adds the dominating power bound
};
json power_report(const PowerOptions& opt);

struct RatioOptions {
    ModelParams params;          // delta/k ignored; grid below drives them
    double sigma = 1.0;
    std::optional<double> cutoff_c;  // explicit shift constant
    std::optional<double> gain_m;    // or derive c for a target gain
    std::vector<double> deltas = {0.1, 0.05, 0.02, 0.01};
    RegimeSpec schedule{Schedule::power_t, 1.5};
};
json ratio_report(const RatioOptions& opt);

// --------------------------------------------------------------- grids

struct FigureOptions {
    std::string panel = "A";  // A: log10(V_t/V_2); B: log10 P_t
    double t_min = 1.0, t_max = 2.0;
    int t_steps = 101;
    std::vector<double> deltas = {0.1, 0.2, 0.4};
    ModelParams params;           // delta/k ignored
    std::string variant = "printed";  // panel B: printed | prop1
};
// CSV columns: t,delta,value; delta-major, t-minor ordering.
std::string figure_csv(const FigureOptions& opt);

struct ConvergeOptions {
    std::string family = "normal";  // normal | gamma
    double nu = 1.0;
    double sigma = 1.0;
    std::vector<double> deltas = {0.2, 0.1, 0.05, 0.02};
    RegimeSpec schedule{Schedule::sqrt_log, 1.5};
    ModelParams params;  // delta/k ignored
};
// normal: delta,k,p_exact_log,p_asym_log,log_ratio
// gamma adds columns for both closed forms and the lnQ-prefactor variant;
// summary (optional) carries the endpoint ratios and the adjudication.
std::string converge_csv(const ConvergeOptions& opt, json* summary = nullptr);

struct SimulateOptions {
    SimConfig config;
};
json simulate_report(const SimulateOptions& opt, std::string* per_rep_csv = nullptr);

// ------------------------------------------------------------ plumbing

json params_json(const ModelParams& params);
json family_json(const FamilySpec& family);
json volume_json(const VolumeResult& v);

// Writes `text` to `path` and drops a sibling RunManifest
// (<path>.manifest.json) recording command, resolved options, tool version,
// seed and the output file list.  Data files never embed timestamps, so
// reruns are byte-identical; the manifest carries the timestamp.
void write_output(const std::string& path, const std::string& text,
                  const std::string& command, const json& resolved,
                  std::optional<std::uint64_t> seed);

std::string format_g17(double v);

}  // namespace pfdr::cmd
