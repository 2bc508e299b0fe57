#include "etairl/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "etairl/checks.hpp"

namespace etairl {

namespace fs = std::filesystem;

FiniteMdp env_from_spec(const json& spec, std::string* name_out) {
    try {
        const std::string name = spec.at("name").get<std::string>();
        if (name_out) *name_out = name;
        if (name == "chain")
            return chain_env(spec.value("n", 20), spec.value("slip", 0.1),
                             spec.value("gamma", 0.99));
        if (name == "four_lakes") {
            auto cells = [](const json& arr) {
                std::vector<GridCell> out;
                for (const auto& c : arr) out.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
                return out;
            };
            const int grid = spec.value("grid", 5);
            std::vector<GridCell> lakes, targets;
            if (spec.contains("lakes")) lakes = cells(spec["lakes"]);
            if (spec.contains("targets"))
                targets = cells(spec["targets"]);
            else
                targets.push_back({grid / 2, grid / 2});
            auto [mdp, tasks] = four_lakes_env(grid, lakes, targets, spec.value("gamma", 0.99));
            if (spec.value("multitask", false) && tasks.task_costs.size() > 1)
                return multitask_mdp(mdp, tasks);
            return mdp;
        }
        if (name == "custom") {
            if (spec.contains("mdp")) return mdp_from_json(spec["mdp"]);
            if (spec.contains("path")) return mdp_from_json(json::parse(read_text_file(spec["path"])));
            throw ParseError("custom env needs an inline \"mdp\" or a \"path\"");
        }
        throw ParseError("unknown env name: " + name);
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad env spec: ") + e.what());
    }
}

RunConfig parse_run_config(const json& doc) {
    try {
        RunConfig cfg;
        if (!doc.contains("env")) throw ParseError("config needs an \"env\" block");
        cfg.env = env_from_spec(doc["env"], &cfg.env_name);
        const auto problems = validate_mdp(cfg.env);
        if (!problems.empty()) throw ParseError("invalid env mdp: " + problems.front());

        cfg.algorithm = doc.value("algorithm", std::string("megan"));
        if (doc.contains("eta")) cfg.irl.eta = horizon_from_json(doc["eta"]);
        if (cfg.algorithm == "gail") {
            // uniform transition sampling with no future offset
            cfg.algorithm = "megan";
            cfg.gail_mode = true;
            cfg.irl.eta = HorizonDistribution::geometric(0.0);
            cfg.irl.gamma_irl = 1.0;
        }
        if (cfg.algorithm != "megan" && cfg.algorithm != "emma" && cfg.algorithm != "wiem")
            throw ParseError("unknown algorithm: " + cfg.algorithm);

        if (doc.contains("seeds")) {
            cfg.seeds.clear();
            for (const auto& s : doc["seeds"]) cfg.seeds.push_back(s.get<RngSeed>());
            if (cfg.seeds.empty()) throw ParseError("seeds list is empty");
        }
        const json irl = doc.value("irl", json::object());
        cfg.irl.n_outer_iters = irl.value("n_outer_iters", cfg.irl.n_outer_iters);
        cfg.irl.rollouts_per_iter = irl.value("rollouts_per_iter", cfg.irl.rollouts_per_iter);
        cfg.irl.horizon = irl.value("horizon", cfg.irl.horizon);
        cfg.irl.batch_size = irl.value("batch_size", cfg.irl.batch_size);
        cfg.irl.disc_epochs = irl.value("disc_epochs", cfg.irl.disc_epochs);
        cfg.irl.disc_learning_rate = irl.value("disc_learning_rate", cfg.irl.disc_learning_rate);
        cfg.irl.temperature = irl.value("temperature", cfg.irl.temperature);
        cfg.irl.policy_buffer_capacity =
            irl.value("policy_buffer_capacity", cfg.irl.policy_buffer_capacity);
        cfg.irl.gamma_irl = doc.value("gamma_irl", cfg.irl.gamma_irl);
        cfg.irl.gamma_rl = doc.value("gamma_rl", cfg.irl.gamma_rl);
        if (cfg.irl.gamma_rl > 0.0 && cfg.irl.gamma_rl >= 1.0)
            throw ParseError("gamma_rl must lie in (0,1)");

        const json expert = doc.value("expert", json::object());
        cfg.expert.n_trajectories = expert.value("n_trajectories", cfg.expert.n_trajectories);
        cfg.expert.horizon = expert.value("horizon", cfg.irl.horizon);
        cfg.expert.temperature = expert.value("temperature", cfg.expert.temperature);
        cfg.expert.seed = expert.value("seed", static_cast<RngSeed>(90001));

        cfg.features = doc.value("features", cfg.features);
        if (cfg.features != "one_hot" && cfg.features != "state_indicators")
            throw ParseError("unknown feature basis: " + cfg.features);
        cfg.final_window = doc.value("final_window", cfg.final_window);
        cfg.out_dir = doc.value("out_dir", cfg.out_dir);
        cfg.n_eval_rollouts = doc.value("n_eval_rollouts", cfg.n_eval_rollouts);
        cfg.policy_path = doc.value("policy_path", cfg.policy_path);

        if (doc.contains("eta_grid"))
            for (const auto& spec : doc["eta_grid"]) cfg.eta_grid.push_back(horizon_from_json(spec));
        if (doc.contains("gamma_rl_grid"))
            for (const auto& g : doc["gamma_rl_grid"]) {
                const double gamma = g.get<double>();
                if (gamma <= 0.0 || gamma >= 1.0) throw ParseError("gamma_rl grid entry outside (0,1)");
                cfg.gamma_rl_grid.push_back(gamma);
            }

        const json idle = doc.value("idle", json::object());
        cfg.idle.epochs = idle.value("epochs", cfg.idle.epochs);
        cfg.idle.gen_lr = idle.value("gen_lr", cfg.idle.gen_lr);
        cfg.idle.disc_lr = idle.value("disc_lr", cfg.idle.disc_lr);
        cfg.idle.batch_size = idle.value("batch_size", cfg.idle.batch_size);
        cfg.idle.seed = idle.value("seed", cfg.idle.seed);
        if (idle.contains("eta")) cfg.idle.eta = horizon_from_json(idle["eta"]);
        cfg.idle_augment_per_state = idle.value("augment_per_state", 0);

        cfg.echo = doc;
        cfg.echo["algorithm"] = cfg.gail_mode ? "gail" : cfg.algorithm;
        return cfg;
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad run config: ") + e.what());
    }
}

namespace {

std::string eta_tag(const HorizonDistribution& eta) {
    std::ostringstream out;
    switch (eta.kind()) {
        case HorizonKind::Dirac: out << "dirac" << static_cast<int>(eta.param()); break;
        case HorizonKind::Geometric: out << "geom" << format_double(eta.param()); break;
        case HorizonKind::Poisson: out << "poisson" << format_double(eta.param()); break;
        case HorizonKind::Uniform: out << "uniform" << static_cast<int>(eta.param()); break;
        case HorizonKind::Custom: out << "custom"; break;
    }
    return out.str();
}

double window_mean(const std::vector<IrlMetricsRow>& rows, int window,
                   double IrlMetricsRow::* field) {
    const int n = static_cast<int>(rows.size());
    const int start = std::max(0, n - window);
    if (start == n) return std::numeric_limits<double>::quiet_NaN();
    double acc = 0.0;
    for (int i = start; i < n; ++i) acc += rows[i].*field;
    return acc / (n - start);
}

struct CellOutcome {
    std::vector<RunSummary> runs;
    std::string metrics_csv;
    std::vector<IrlResult> results;
};

// One algorithm cell: all seeds, shared expert data, deterministic CSV text.
CellOutcome run_cell(const RunConfig& cfg, const std::string& run_tag) {
    CellOutcome out;
    const ExpertBundle expert = make_expert(cfg.env, cfg.expert);
    const FeatureBasis basis = cfg.features == "one_hot"
                                   ? FeatureBasis::one_hot(cfg.env.n_states, cfg.env.n_actions)
                                   : FeatureBasis::state_indicators(cfg.env.n_states,
                                                                    cfg.env.n_actions);
    EvalContext eval;
    eval.expert = &expert.policy;

    std::ostringstream csv;
    csv << "run_id,seed,iter,mmd_rho,mmd_mu,true_return,disc_objective\n";
    for (const RngSeed seed : cfg.seeds) {
        IrlConfig irl = cfg.irl;
        irl.seed = seed;
        const auto t0 = std::chrono::steady_clock::now();
        IrlResult result;
        if (cfg.algorithm == "megan")
            result = megan_train(cfg.env, expert.buffer, irl, &eval);
        else if (cfg.algorithm == "emma")
            result = emma_train(cfg.env, expert.buffer, basis, irl, &eval);
        else
            result = wiem_train(cfg.env, expert.buffer, basis, irl, &eval);
        const auto t1 = std::chrono::steady_clock::now();

        const std::string run_id = run_tag + "_seed" + std::to_string(seed);
        for (const auto& row : result.metrics)
            csv << run_id << ',' << seed << ',' << row.iter << ',' << format_double(row.mmd_rho)
                << ',' << format_double(row.mmd_mu) << ',' << format_double(row.true_return)
                << ',' << format_double(row.disc_objective) << '\n';

        RunSummary summary;
        summary.run_id = run_id;
        summary.seed = seed;
        summary.final_mmd_rho = window_mean(result.metrics, cfg.final_window, &IrlMetricsRow::mmd_rho);
        summary.final_mmd_mu = window_mean(result.metrics, cfg.final_window, &IrlMetricsRow::mmd_mu);
        summary.final_true_return =
            window_mean(result.metrics, cfg.final_window, &IrlMetricsRow::true_return);
        summary.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        out.runs.push_back(summary);
        out.results.push_back(std::move(result));
    }
    out.metrics_csv = csv.str();
    return out;
}

json summaries_to_json(const std::vector<RunSummary>& runs) {
    json arr = json::array();
    for (const auto& r : runs)
        arr.push_back(json{{"run_id", r.run_id}, {"seed", r.seed},
                           {"final_mmd_rho", r.final_mmd_rho}, {"final_mmd_mu", r.final_mmd_mu},
                           {"final_true_return", r.final_true_return}, {"wall_ms", r.wall_ms}});
    return arr;
}

void write_cell_artifacts(const RunConfig& cfg, const std::string& dir, const std::string& tag,
                          const CellOutcome& cell) {
    fs::create_directories(dir);
    write_text_file(dir + "/metrics.csv", cell.metrics_csv);
    for (std::size_t i = 0; i < cell.results.size(); ++i) {
        const auto& result = cell.results[i];
        const std::string run_id = tag + "_seed" + std::to_string(cfg.seeds[i]);
        write_text_file(dir + "/policy_" + run_id + ".json",
                        policy_to_json(result.policy).dump(2) + "\n");
        if (cfg.algorithm == "megan")
            write_text_file(dir + "/discriminator_" + run_id + ".json",
                            discriminator_to_json(result.discriminator).dump(2) + "\n");
        else {
            json w = json::array();
            for (int j = 0; j < result.cost_weights.size(); ++j)
                w.push_back(result.cost_weights(j));
            write_text_file(dir + "/cost_weights_" + run_id + ".json", w.dump(2) + "\n");
        }
    }
}

}  // namespace

double median(std::vector<double> xs) {
    if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

std::vector<RunSummary> cmd_train(const RunConfig& cfg) {
    // run ids carry the normalized algorithm, so the uniform-sampling alias
    // writes bytes identical to its explicit spelling; summary.json keeps the
    // requested name
    const std::string tag = cfg.algorithm + "_" + eta_tag(cfg.irl.eta);
    const CellOutcome cell = run_cell(cfg, tag);
    write_cell_artifacts(cfg, cfg.out_dir, tag, cell);
    json summary;
    summary["config"] = cfg.echo;
    summary["final_window"] = cfg.final_window;
    summary["runs"] = summaries_to_json(cell.runs);
    summary["median_final_mmd_mu"] = [&] {
        std::vector<double> v;
        for (const auto& r : cell.runs) v.push_back(r.final_mmd_mu);
        return median(v);
    }();
    write_text_file(cfg.out_dir + "/summary.json", summary.dump(2) + "\n");
    return cell.runs;
}

json cmd_sweep_eta(const RunConfig& cfg) {
    if (cfg.eta_grid.empty()) throw ParseError("sweep-eta needs a non-empty eta_grid");
    std::ostringstream csv;
    csv << "eta_kind,eta_param,median_mmd_rho,median_mmd_mu,median_true_return\n";
    std::vector<double> xs, med_rho, med_mu, med_ret;
    json cells = json::array();
    for (std::size_t k = 0; k < cfg.eta_grid.size(); ++k) {
        RunConfig cell_cfg = cfg;
        cell_cfg.irl.eta = cfg.eta_grid[k];
        const std::string tag = cfg.algorithm + "_" + eta_tag(cell_cfg.irl.eta);
        const CellOutcome cell = run_cell(cell_cfg, tag);
        write_cell_artifacts(cell_cfg, cfg.out_dir + "/cell_" + std::to_string(k), tag, cell);
        std::vector<double> rho_v, mu_v, ret_v;
        for (const auto& r : cell.runs) {
            rho_v.push_back(r.final_mmd_rho);
            mu_v.push_back(r.final_mmd_mu);
            ret_v.push_back(r.final_true_return);
        }
        const double mr = median(rho_v), mm = median(mu_v), mt = median(ret_v);
        csv << eta_tag(cfg.eta_grid[k]) << ',' << format_double(cfg.eta_grid[k].param()) << ','
            << format_double(mr) << ',' << format_double(mm) << ',' << format_double(mt) << '\n';
        xs.push_back(cfg.eta_grid[k].param());
        med_rho.push_back(mr);
        med_mu.push_back(mm);
        med_ret.push_back(mt);
        cells.push_back(json{{"eta", horizon_to_json(cfg.eta_grid[k])},
                             {"runs", summaries_to_json(cell.runs)},
                             {"median_mmd_rho", mr}, {"median_mmd_mu", mm},
                             {"median_true_return", mt}});
    }
    fs::create_directories(cfg.out_dir);
    write_text_file(cfg.out_dir + "/sweep.csv", csv.str());
    write_text_file(cfg.out_dir + "/sweep_mmd.svg",
                    render_line_svg("final-window divergence vs eta parameter", "eta parameter",
                                    xs, {{"mmd_rho", med_rho}, {"mmd_mu", med_mu}}));
    write_text_file(cfg.out_dir + "/sweep_return.svg",
                    render_line_svg("final-window normalized return vs eta parameter",
                                    "eta parameter", xs, {{"true_return", med_ret}}));
    json out;
    out["cells"] = cells;
    out["csv"] = cfg.out_dir + "/sweep.csv";
    write_text_file(cfg.out_dir + "/sweep_summary.json", out.dump(2) + "\n");
    return out;
}

json cmd_gamma_sweep(const RunConfig& cfg) {
    if (cfg.gamma_rl_grid.empty()) throw ParseError("gamma-sweep needs a non-empty gamma_rl_grid");
    std::ostringstream csv;
    csv << "cell,gamma_rl,median_mmd_rho,median_mmd_mu,median_true_return\n";
    json cells = json::array();
    std::vector<double> gail_mu_medians;

    for (std::size_t k = 0; k < cfg.gamma_rl_grid.size(); ++k) {
        RunConfig cell_cfg = cfg;
        cell_cfg.gail_mode = true;
        cell_cfg.algorithm = "megan";
        cell_cfg.irl.eta = HorizonDistribution::geometric(0.0);
        cell_cfg.irl.gamma_irl = 1.0;  // uniform transition sampling
        cell_cfg.irl.gamma_rl = cfg.gamma_rl_grid[k];
        const std::string tag = "gail_gamma" + format_double(cfg.gamma_rl_grid[k]);
        const CellOutcome cell = run_cell(cell_cfg, tag);
        write_cell_artifacts(cell_cfg, cfg.out_dir + "/gail_gamma_" + std::to_string(k), tag, cell);
        std::vector<double> rho_v, mu_v, ret_v;
        for (const auto& r : cell.runs) {
            rho_v.push_back(r.final_mmd_rho);
            mu_v.push_back(r.final_mmd_mu);
            ret_v.push_back(r.final_true_return);
        }
        const double mm = median(mu_v);
        gail_mu_medians.push_back(mm);
        csv << tag << ',' << format_double(cfg.gamma_rl_grid[k]) << ','
            << format_double(median(rho_v)) << ',' << format_double(mm) << ','
            << format_double(median(ret_v)) << '\n';
        cells.push_back(json{{"gamma_rl", cfg.gamma_rl_grid[k]},
                             {"runs", summaries_to_json(cell.runs)}, {"median_mmd_mu", mm}});
    }

    // reference cell: the configured eta (geometric 0.99 unless overridden)
    RunConfig ref_cfg = cfg;
    ref_cfg.algorithm = "megan";
    if (ref_cfg.irl.eta.kind() == HorizonKind::Dirac)
        ref_cfg.irl.eta = HorizonDistribution::geometric(0.99);
    const std::string ref_tag = "megan_" + eta_tag(ref_cfg.irl.eta);
    const CellOutcome ref = run_cell(ref_cfg, ref_tag);
    write_cell_artifacts(ref_cfg, cfg.out_dir + "/megan_reference", ref_tag, ref);
    std::vector<double> ref_mu;
    for (const auto& r : ref.runs) ref_mu.push_back(r.final_mmd_mu);
    const double ref_median = median(ref_mu);
    csv << ref_tag << ",," << ',' << format_double(ref_median) << ",\n";

    fs::create_directories(cfg.out_dir);
    write_text_file(cfg.out_dir + "/gamma_sweep.csv", csv.str());
    json out;
    out["gail_cells"] = cells;
    out["megan_reference_median_mmd_mu"] = ref_median;
    out["no_gail_cell_beats_reference"] =
        std::all_of(gail_mu_medians.begin(), gail_mu_medians.end(),
                    [&](double m) { return m >= ref_median; });
    write_text_file(cfg.out_dir + "/gamma_sweep_summary.json", out.dump(2) + "\n");
    return out;
}

json cmd_idle(const RunConfig& cfg) {
    const ExpertBundle expert = make_expert(cfg.env, cfg.expert);
    json out;
    const auto& eta = cfg.idle.eta;
    // high-variance targets are known to destabilize the generator
    const bool high_variance = (eta.kind() == HorizonKind::Uniform && eta.param() > 10) ||
                               (eta.kind() == HorizonKind::Geometric && eta.param() >= 0.95);
    if (high_variance)
        out["warning"] =
            "high-variance eta: the discriminator tends to overpower the generator (mode collapse)";

    auto [disc, gen] = idle_train(expert.buffer, eta, cfg.idle, cfg.env.n_states,
                                  cfg.env.n_actions);
    const Vector tv = generator_tv(gen, cfg.env, expert.policy, eta);
    json tv_json = json::array();
    for (int s = 0; s < tv.size(); ++s) tv_json.push_back(tv(s));
    out["per_state_tv"] = tv_json;
    out["max_tv"] = tv.maxCoeff();
    out["epochs"] = cfg.idle.epochs;

    if (cfg.idle_augment_per_state > 0) {
        const auto synthetic =
            augment_buffer(expert.buffer, gen, cfg.idle_augment_per_state, derive_seed(cfg.idle.seed, 7));
        out["augmented_pairs"] = synthetic.size();
    }

    fs::create_directories(cfg.out_dir);
    write_text_file(cfg.out_dir + "/generator.json", generator_to_json(gen).dump(2) + "\n");
    write_text_file(cfg.out_dir + "/idle_report.json", out.dump(2) + "\n");
    return out;
}

json cmd_eval(const RunConfig& cfg) {
    if (cfg.policy_path.empty()) throw ParseError("eval needs a policy_path");
    const Policy pi = policy_from_json(json::parse(read_text_file(cfg.policy_path)));
    const auto problems = validate_policy(cfg.env, pi);
    if (!problems.empty()) throw ParseError("policy does not fit the env: " + problems.front());

    const ExpertBundle expert = make_expert(cfg.env, cfg.expert);
    ReplayBuffer pi_buffer;
    Rng rng(derive_seed(cfg.expert.seed, 0xE));
    for (int i = 0; i < cfg.expert.n_trajectories; ++i)
        pi_buffer.push(rollout(cfg.env, pi, cfg.expert.horizon, rng));
    const MmdMetrics metrics =
        mmd_metrics(cfg.env, pi, expert.policy, pi_buffer, expert.buffer, 2000,
                    derive_seed(cfg.expert.seed, 0xF), cfg.irl.gamma_irl);

    json out;
    out["normalized_return_exact"] = normalized_return_exact(cfg.env, pi);
    out["normalized_return_mc"] =
        normalized_return(cfg.env, pi, cfg.n_eval_rollouts, cfg.expert.horizon,
                          derive_seed(cfg.expert.seed, 0x10));
    out["mmd_rho_exact"] = metrics.rho_exact;
    out["mmd_mu_exact"] = metrics.mu_exact;
    out["mmd_rho_sample"] = metrics.rho_sample;
    out["mmd_mu_sample"] = metrics.mu_sample;
    fs::create_directories(cfg.out_dir);
    write_text_file(cfg.out_dir + "/eval.json", out.dump(2) + "\n");
    return out;
}

}  // namespace etairl
