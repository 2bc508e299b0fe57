#include "etairl.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "etairl/checks.hpp"
#include "etairl/runner.hpp"
#include "etairl/serialize.hpp"

using namespace etairl;

struct etai_mdp {
    FiniteMdp value;
};
struct etai_policy {
    Policy value;
};
struct etai_buffer {
    ReplayBuffer value;
};

namespace {

thread_local std::string g_last_error = "ok";

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

etai_status fail(etai_status code, const std::string& message) {
    g_last_error = message;
    return code;
}

// Translates C++ failures into status codes; OK resets the error slot.
template <typename Fn>
etai_status guarded(Fn&& fn) {
    try {
        const etai_status code = fn();
        if (code == ETAI_OK) g_last_error = "ok";
        return code;
    } catch (const ParseError& e) {
        return fail(ETAI_ERR_PARSE, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(ETAI_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(ETAI_ERR_RUNTIME, e.what());
    }
}

template <typename Fn>
etai_status run_command(const char* config_json, const char* out_dir_override,
                        const char* seeds_csv, char** summary_json, Fn&& command);

RunConfig config_from_args(const char* config_json, const char* out_dir_override,
                           const char* seeds_csv) {
    if (!config_json) throw std::invalid_argument("config_json is null");
    json doc;
    try {
        doc = json::parse(config_json);
    } catch (const json::exception& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what());
    }
    if (out_dir_override && *out_dir_override) doc["out_dir"] = out_dir_override;
    if (seeds_csv && *seeds_csv) {
        json seeds = json::array();
        std::string tok;
        for (const char* p = seeds_csv;; ++p) {
            if (*p == ',' || *p == '\0') {
                if (!tok.empty()) seeds.push_back(std::stoull(tok));
                tok.clear();
                if (*p == '\0') break;
            } else {
                tok += *p;
            }
        }
        if (seeds.empty()) throw ParseError("seeds list is empty");
        doc["seeds"] = seeds;
    }
    return parse_run_config(doc);
}

template <typename Fn>
etai_status run_command(const char* config_json, const char* out_dir_override,
                        const char* seeds_csv, char** summary_json, Fn&& command) {
    return guarded([&]() -> etai_status {
        if (!summary_json) throw std::invalid_argument("summary output is null");
        const RunConfig cfg = config_from_args(config_json, out_dir_override, seeds_csv);
        *summary_json = dup_string(command(cfg).dump(2));
        return ETAI_OK;
    });
}

}  // namespace

extern "C" {

const char* etai_version(void) { return "0.1.0"; }

const char* etai_last_error(void) { return g_last_error.c_str(); }

void etai_string_free(char* s) { std::free(s); }

etai_status etai_mdp_from_json(const char* text, etai_mdp** out) {
    return guarded([&]() -> etai_status {
        if (!text || !out) throw std::invalid_argument("null argument");
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::exception& e) {
            throw ParseError(std::string("not valid JSON: ") + e.what());
        }
        *out = new etai_mdp{mdp_from_json(doc)};
        return ETAI_OK;
    });
}

etai_status etai_env_create(const char* env_spec_json, etai_mdp** out) {
    return guarded([&]() -> etai_status {
        if (!env_spec_json || !out) throw std::invalid_argument("null argument");
        json doc;
        try {
            doc = json::parse(env_spec_json);
        } catch (const json::exception& e) {
            throw ParseError(std::string("not valid JSON: ") + e.what());
        }
        *out = new etai_mdp{env_from_spec(doc)};
        return ETAI_OK;
    });
}

void etai_mdp_free(etai_mdp* mdp) { delete mdp; }

etai_status etai_mdp_to_json(const etai_mdp* mdp, char** out) {
    return guarded([&]() -> etai_status {
        if (!mdp || !out) throw std::invalid_argument("null argument");
        *out = dup_string(mdp_to_json(mdp->value).dump());
        return ETAI_OK;
    });
}

etai_status etai_mdp_validate(const etai_mdp* mdp, char** report_json) {
    return guarded([&]() -> etai_status {
        if (!mdp || !report_json) throw std::invalid_argument("null argument");
        *report_json = dup_string(json(validate_mdp(mdp->value)).dump());
        return ETAI_OK;
    });
}

etai_status etai_policy_from_json(const char* text, etai_policy** out) {
    return guarded([&]() -> etai_status {
        if (!text || !out) throw std::invalid_argument("null argument");
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::exception& e) {
            throw ParseError(std::string("not valid JSON: ") + e.what());
        }
        *out = new etai_policy{policy_from_json(doc)};
        return ETAI_OK;
    });
}

void etai_policy_free(etai_policy* policy) { delete policy; }

etai_status etai_policy_to_json(const etai_policy* policy, char** out) {
    return guarded([&]() -> etai_status {
        if (!policy || !out) throw std::invalid_argument("null argument");
        *out = dup_string(policy_to_json(policy->value).dump());
        return ETAI_OK;
    });
}

etai_status etai_solve_soft(const etai_mdp* mdp, double temperature, double tolerance,
                            int max_iters, etai_policy** out) {
    return guarded([&]() -> etai_status {
        if (!mdp || !out) throw std::invalid_argument("null argument");
        SoftRlConfig cfg;
        if (temperature > 0.0) cfg.temperature = temperature;
        if (tolerance > 0.0) cfg.tolerance = tolerance;
        if (max_iters > 0) cfg.max_iters = max_iters;
        *out = new etai_policy{soft_value_iteration(mdp->value, cfg).policy};
        return ETAI_OK;
    });
}

etai_status etai_occupancy_csv(const etai_mdp* mdp, const etai_policy* policy,
                               const char* measure, const char* eta_spec_json, char** csv_out) {
    return guarded([&]() -> etai_status {
        if (!mdp || !policy || !measure || !csv_out) throw std::invalid_argument("null argument");
        HorizonDistribution eta = HorizonDistribution::dirac(0);
        if (eta_spec_json && *eta_spec_json) eta = horizon_from_json(json::parse(eta_spec_json));
        const std::string kind = measure;
        OccupancyMeasure m;
        if (kind == "rho")
            m = rho(mdp->value, policy->value);
        else if (kind == "p_eta")
            m = p_eta(mdp->value, policy->value, eta);
        else if (kind == "mu")
            m = mu(mdp->value, policy->value, eta);
        else
            throw std::invalid_argument("unknown measure: " + kind);
        *csv_out = dup_string(occupancy_to_csv(m, mdp->value.n_states, mdp->value.n_actions));
        return ETAI_OK;
    });
}

etai_status etai_rollout_buffer(const etai_mdp* mdp, const etai_policy* policy,
                                int n_trajectories, int horizon, unsigned long long seed,
                                etai_buffer** out) {
    return guarded([&]() -> etai_status {
        if (!mdp || !policy || !out) throw std::invalid_argument("null argument");
        if (n_trajectories < 1) throw std::invalid_argument("need at least one trajectory");
        auto buffer = std::make_unique<etai_buffer>();
        Rng rng(seed);
        for (int i = 0; i < n_trajectories; ++i)
            buffer->value.push(rollout(mdp->value, policy->value, horizon, rng));
        *out = buffer.release();
        return ETAI_OK;
    });
}

void etai_buffer_free(etai_buffer* buffer) { delete buffer; }

etai_status etai_buffer_save_jsonl(const etai_buffer* buffer, const char* path) {
    return guarded([&]() -> etai_status {
        if (!buffer || !path) throw std::invalid_argument("null argument");
        save_buffer_jsonl(buffer->value, path);
        return ETAI_OK;
    });
}

etai_status etai_buffer_load_jsonl(const char* path, etai_buffer** out) {
    return guarded([&]() -> etai_status {
        if (!path || !out) throw std::invalid_argument("null argument");
        *out = new etai_buffer{load_buffer_jsonl(path)};
        return ETAI_OK;
    });
}

long long etai_buffer_size(const etai_buffer* buffer) {
    return buffer ? static_cast<long long>(buffer->value.size()) : -1;
}

etai_status etai_check_run(const char* suite, char** report_json) {
    return guarded([&]() -> etai_status {
        if (!suite || !report_json) throw std::invalid_argument("null argument");
        const auto results = run_check_suite(suite);
        json report = json::array();
        bool all_passed = true;
        for (const auto& r : results) {
            report.push_back(r.to_json());
            all_passed = all_passed && r.passed;
        }
        *report_json = dup_string(report.dump(2));
        if (!all_passed) return fail(ETAI_ERR_CHECK_FAILED, "one or more check suites failed");
        return ETAI_OK;
    });
}

etai_status etai_train_run(const char* config_json, const char* out_dir_override,
                           const char* seeds_csv, char** summary_json) {
    return run_command(config_json, out_dir_override, seeds_csv, summary_json,
                       [](const RunConfig& cfg) {
                           json out;
                           out["runs"] = json::array();
                           for (const auto& r : cmd_train(cfg))
                               out["runs"].push_back(
                                   json{{"run_id", r.run_id}, {"seed", r.seed},
                                        {"final_mmd_rho", r.final_mmd_rho},
                                        {"final_mmd_mu", r.final_mmd_mu},
                                        {"final_true_return", r.final_true_return},
                                        {"wall_ms", r.wall_ms}});
                           out["out_dir"] = cfg.out_dir;
                           return out;
                       });
}

etai_status etai_sweep_eta_run(const char* config_json, const char* out_dir_override,
                               const char* seeds_csv, char** summary_json) {
    return run_command(config_json, out_dir_override, seeds_csv, summary_json, cmd_sweep_eta);
}

etai_status etai_gamma_sweep_run(const char* config_json, const char* out_dir_override,
                                 const char* seeds_csv, char** summary_json) {
    return run_command(config_json, out_dir_override, seeds_csv, summary_json, cmd_gamma_sweep);
}

etai_status etai_idle_run(const char* config_json, const char* out_dir_override,
                          const char* seeds_csv, char** summary_json) {
    return run_command(config_json, out_dir_override, seeds_csv, summary_json, cmd_idle);
}

etai_status etai_eval_run(const char* config_json, const char* out_dir_override,
                          const char* seeds_csv, char** summary_json) {
    return run_command(config_json, out_dir_override, seeds_csv, summary_json, cmd_eval);
}

}  // extern "C"
