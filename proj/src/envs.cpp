#include "etairl/envs.hpp"

#include <algorithm>

namespace etairl {

FiniteMdp chain_env(int n_states, double slip, double gamma) {
    if (n_states < 2) throw std::invalid_argument("chain needs at least 2 states");
    if (slip < 0.0 || slip >= 1.0) throw std::invalid_argument("slip must lie in [0,1)");
    FiniteMdp mdp;
    mdp.n_states = n_states;
    mdp.n_actions = 2;  // 0 = left, 1 = right
    mdp.gamma = gamma;
    mdp.transition.assign(2, Matrix::Zero(n_states, n_states));
    auto clamp = [&](int s) { return std::clamp(s, 0, n_states - 1); };
    for (int s = 0; s < n_states; ++s) {
        for (int a = 0; a < 2; ++a) {
            const int dir = a == 0 ? -1 : +1;
            mdp.transition[a](s, clamp(s + dir)) += 1.0 - slip;
            mdp.transition[a](s, clamp(s - dir)) += slip;
        }
    }
    mdp.cost = Matrix::Ones(n_states, 2);
    mdp.cost.row(n_states - 1).setZero();
    mdp.p0 = Vector::Zero(n_states);
    mdp.p0(0) = 1.0;
    return mdp;
}

std::pair<FiniteMdp, TaskSpace> four_lakes_env(int grid_size, const std::vector<GridCell>& lakes,
                                               const std::vector<GridCell>& targets, double gamma) {
    if (grid_size < 2) throw std::invalid_argument("grid must be at least 2x2");
    if (targets.empty()) throw std::invalid_argument("at least one target required");
    auto inside = [&](int x, int y) { return x >= 0 && x < grid_size && y >= 0 && y < grid_size; };
    auto cell_index = [&](int x, int y) { return x * grid_size + y; };
    std::vector<bool> lake(grid_size * grid_size, false);
    for (const auto& c : lakes) {
        if (!inside(c.x, c.y)) throw std::invalid_argument("lake cell outside grid");
        lake[cell_index(c.x, c.y)] = true;
    }
    for (const auto& t : targets) {
        if (!inside(t.x, t.y)) throw std::invalid_argument("target outside grid");
        if (lake[cell_index(t.x, t.y)]) throw std::invalid_argument("target inside a lake");
    }

    // king moves + stay; the zero move discretizes the interior of the action ball
    std::vector<std::pair<int, int>> moves;
    for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy) moves.push_back({dx, dy});

    FiniteMdp mdp;
    const int S = grid_size * grid_size;
    const int A = static_cast<int>(moves.size());
    mdp.n_states = S;
    mdp.n_actions = A;
    mdp.gamma = gamma;
    mdp.transition.assign(A, Matrix::Zero(S, S));
    for (int x = 0; x < grid_size; ++x)
        for (int y = 0; y < grid_size; ++y) {
            const int s = cell_index(x, y);
            for (int a = 0; a < A; ++a) {
                int nx = x + moves[a].first, ny = y + moves[a].second;
                if (!inside(nx, ny) || lake[cell_index(nx, ny)]) {
                    nx = x;  // blocked: stay in place
                    ny = y;
                }
                mdp.transition[a](s, cell_index(nx, ny)) = 1.0;
            }
        }

    TaskSpace tasks;
    for (const auto& t : targets) {
        Matrix c = Matrix::Ones(S, A);
        c.row(cell_index(t.x, t.y)).setZero();
        tasks.task_costs.push_back(std::move(c));
    }
    tasks.task_dist = Vector::Constant(targets.size(), 1.0 / targets.size());

    mdp.cost = tasks.task_costs.front();
    int n_free = 0;
    mdp.p0 = Vector::Zero(S);
    for (int s = 0; s < S; ++s)
        if (!lake[s]) ++n_free;
    for (int s = 0; s < S; ++s)
        if (!lake[s]) mdp.p0(s) = 1.0 / n_free;
    return {std::move(mdp), std::move(tasks)};
}

FiniteMdp multitask_mdp(const FiniteMdp& base, const TaskSpace& tasks) {
    const int S = base.n_states, A = base.n_actions;
    const int T = static_cast<int>(tasks.task_costs.size());
    if (T == 0) throw std::invalid_argument("empty task space");
    for (const auto& c : tasks.task_costs)
        if (c.rows() != S || c.cols() != A) throw std::invalid_argument("task cost shape mismatch");
    if (tasks.task_dist.size() != T) throw std::invalid_argument("task distribution length mismatch");

    FiniteMdp out;
    out.n_states = S * T;
    out.n_actions = A;
    out.gamma = base.gamma;
    out.transition.assign(A, Matrix::Zero(S * T, S * T));
    for (int a = 0; a < A; ++a)
        for (int th = 0; th < T; ++th)
            out.transition[a].block(th * S, th * S, S, S) = base.transition[a];
    out.cost = Matrix(S * T, A);
    out.p0 = Vector(S * T);
    for (int th = 0; th < T; ++th) {
        out.cost.block(th * S, 0, S, A) = tasks.task_costs[th];
        out.p0.segment(th * S, S) = tasks.task_dist(th) * base.p0;
    }
    return out;
}

ExpertBundle make_expert(const FiniteMdp& mdp, const ExpertConfig& cfg) {
    SoftRlConfig rl;
    rl.temperature = cfg.temperature;
    ExpertBundle out;
    out.policy = soft_value_iteration(mdp, rl).policy;
    Rng rng(cfg.seed);
    for (int i = 0; i < cfg.n_trajectories; ++i)
        out.buffer.push(rollout(mdp, out.policy, cfg.horizon, rng));
    return out;
}

}  // namespace etairl
