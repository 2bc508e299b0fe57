#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "etairl/girl.hpp"
#include "etairl/idle.hpp"
#include "etairl/serialize.hpp"

namespace etairl {

/// Parsed experiment description: environment, algorithm, eta spec, seeds and
/// loop sizes. `gail` is normalized at parse time to `megan` with a geometric
/// eta of parameter 0 and uniform present-time sampling, so both names share
/// one code path.
struct RunConfig {
    FiniteMdp env;
    std::string env_name;
    std::string algorithm = "megan";  // megan | emma | wiem (gail normalizes)
    bool gail_mode = false;
    IrlConfig irl;
    ExpertConfig expert;
    std::string features = "one_hot";
    int final_window = 20;
    std::string out_dir = "runs/out";
    std::vector<RngSeed> seeds = {1, 2, 3};
    std::vector<HorizonDistribution> eta_grid;  // sweep-eta only
    std::vector<double> gamma_rl_grid;          // gamma-sweep only
    IdleConfig idle;
    int idle_augment_per_state = 0;
    std::string policy_path;  // eval only
    int n_eval_rollouts = 200;

    nlohmann::json echo;  // the normalized document, for summaries
};

RunConfig parse_run_config(const nlohmann::json& doc);
FiniteMdp env_from_spec(const nlohmann::json& spec, std::string* name_out = nullptr);

/// Per-seed outcome of one training cell.
struct RunSummary {
    std::string run_id;
    RngSeed seed = 0;
    double final_mmd_rho = 0.0;  // final-window means
    double final_mmd_mu = 0.0;
    double final_true_return = 0.0;
    double wall_ms = 0.0;
};

/// Trains every seed sequentially, writing metrics.csv (deterministic bytes),
/// per-run policy/discriminator JSON and summary.json under out_dir.
std::vector<RunSummary> cmd_train(const RunConfig& cfg);

/// One training cell per eta grid entry; emits per-cell artifacts, a sweep
/// CSV of final-window medians and SVG line plots over the eta parameter.
nlohmann::json cmd_sweep_eta(const RunConfig& cfg);

/// Uniform-sampling cells across the gamma_rl grid compared against one
/// geometric-eta reference cell; emits the comparison CSV and summary.
nlohmann::json cmd_gamma_sweep(const RunConfig& cfg);

/// Trains the adversarial future-state generator on the expert buffer and
/// reports per-state total variation against the exact distribution.
nlohmann::json cmd_idle(const RunConfig& cfg);

/// Scores a stored policy on the configured environment.
nlohmann::json cmd_eval(const RunConfig& cfg);

/// Median of a vector (empty -> NaN).
double median(std::vector<double> xs);

/// Minimal standalone SVG line chart; series share x. The raw data rides
/// along in a trailing comment so plots stay diffable.
std::string render_line_svg(const std::string& title, const std::string& x_label,
                            const std::vector<double>& xs,
                            const std::vector<std::pair<std::string, std::vector<double>>>& series);

}  // namespace etairl
