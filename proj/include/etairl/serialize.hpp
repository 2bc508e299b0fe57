#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "etairl/girl.hpp"
#include "etairl/idle.hpp"
#include "etairl/mdp.hpp"
#include "etairl/occupancy.hpp"
#include "etairl/sampling.hpp"

namespace etairl {

using nlohmann::json;

/// Raised for malformed configs and documents (maps to usage exit code 2).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// MDP document: {n_states, n_actions, transition[s][a][s'], cost[s][a], gamma, p0}
json mdp_to_json(const FiniteMdp& mdp);
FiniteMdp mdp_from_json(const json& doc);

json policy_to_json(const Policy& pi);
Policy policy_from_json(const json& doc);

json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& doc);

// Horizon spec: {"kind": "dirac"|"geometric"|"poisson"|"uniform"|"custom",
//                "param": number, "truncation": int, "pmf": [..] (custom)}
json horizon_to_json(const HorizonDistribution& eta);
HorizonDistribution horizon_from_json(const json& doc);

// JSON Lines: one trajectory object {"states":[],"actions":[],"costs":[]} per line.
void save_buffer_jsonl(const ReplayBuffer& buffer, const std::string& path);
ReplayBuffer load_buffer_jsonl(const std::string& path, std::size_t capacity = 1000000);
std::string trajectory_to_jsonl(const Trajectory& tau);
Trajectory trajectory_from_jsonl(const std::string& line);

/// CSV with columns s0,s,a,value (one row per conditioning point and pair).
std::string occupancy_to_csv(const OccupancyMeasure& m, int n_states, int n_actions);

json discriminator_to_json(const Discriminator& d);
json generator_to_json(const ConditionalGenerator& g);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// Locale-independent shortest-roundtrip float formatting for CSV cells.
std::string format_double(double x);

}  // namespace etairl
