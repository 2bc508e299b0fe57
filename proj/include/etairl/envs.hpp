#pragma once

#include <utility>

#include "etairl/mdp.hpp"
#include "etairl/sampling.hpp"
#include "etairl/soft_rl.hpp"

namespace etairl {

/// Per-task cost tables with a sampling distribution over tasks.
struct TaskSpace {
    std::vector<Matrix> task_costs;  // each S x A
    Vector task_dist;                // sums to 1
};

/// Left/right chain with slip noise. Cost 1 everywhere except 0 at the
/// far-right state; the start is pinned at the far left so the mixing time
/// grows with n.
FiniteMdp chain_env(int n_states, double slip, double gamma);

struct GridCell {
    int x = 0, y = 0;
};

/// Grid navigation with king moves plus stay; moves into lakes or off the
/// grid leave the position unchanged. One cost table per target (1 until the
/// target, 0 on it); the returned MDP carries the first target's costs.
std::pair<FiniteMdp, TaskSpace> four_lakes_env(int grid_size, const std::vector<GridCell>& lakes,
                                               const std::vector<GridCell>& targets, double gamma);

/// Cross product with a task space: states (s, theta), transitions keep theta
/// fixed, cost comes from the active task, p0 factorizes with the task
/// distribution. Pair index is theta * S + s so transitions are
/// block-diagonal in theta.
FiniteMdp multitask_mdp(const FiniteMdp& base, const TaskSpace& tasks);

struct ExpertConfig {
    int n_trajectories = 90;
    int horizon = 50;
    double temperature = 0.01;
    RngSeed seed = 1;
};

struct ExpertBundle {
    Policy policy;
    ReplayBuffer buffer;
};

/// Soft-optimal policy on the true cost plus a buffer of its rollouts.
ExpertBundle make_expert(const FiniteMdp& mdp, const ExpertConfig& cfg);

}  // namespace etairl
