#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "etairl/envs.hpp"
#include "etairl/mdp.hpp"
#include "etairl/rng.hpp"

namespace etairl {

struct CheckResult {
    std::string suite;
    bool passed = false;
    int cases = 0;
    double worst = 0.0;  // suite-specific: max residual / violation gap
    std::vector<std::string> notes;

    nlohmann::json to_json() const;
};

/// Named desk-scale environments the identity suites run on.
struct NamedMdp {
    std::string name;
    FiniteMdp mdp;
};
std::vector<NamedMdp> check_fixtures();

// Identity and property suites behind the `check` command. Sizes default to
// the release-gate settings; seeds make every suite deterministic.
CheckResult check_tower(int n_draws = 100, RngSeed seed = 2024);
CheckResult check_bijection(int n_draws = 100, RngSeed seed = 2024);
CheckResult check_flow(int n_draws = 100, RngSeed seed = 2024);
CheckResult check_eta_optimality(int n_competitors = 100, RngSeed seed = 2024);
CheckResult check_gradient(int n_instances = 20, RngSeed seed = 2024);
CheckResult check_trpo(int n_draws = 100, RngSeed seed = 2024);
CheckResult check_entropy_concavity(int n_triples = 1000, RngSeed seed = 2024);
CheckResult check_idle_nash(int n_deviations = 200, RngSeed seed = 2024);
CheckResult check_mmd(int n_repeats = 100, RngSeed seed = 2024);

/// Runs one suite by name, or every suite for "all". Throws
/// std::invalid_argument for unknown names.
std::vector<CheckResult> run_check_suite(const std::string& name);

const std::vector<std::string>& check_suite_names();

}  // namespace etairl
