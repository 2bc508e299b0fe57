#include "etairl/sampling.hpp"

#include <cmath>

namespace etairl {

void ReplayBuffer::push(Trajectory tau) {
    total_ += tau.length();
    trajectories_.push_back(std::move(tau));
    std::size_t drop = 0;
    while (total_ > capacity_ && drop + 1 < trajectories_.size()) {
        total_ -= trajectories_[drop].length();
        ++drop;
    }
    if (drop > 0) trajectories_.erase(trajectories_.begin(), trajectories_.begin() + drop);
}

void ReplayBuffer::clear() {
    trajectories_.clear();
    total_ = 0;
}

Trajectory rollout(const FiniteMdp& mdp, const Policy& pi, int horizon, Rng& rng) {
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    Trajectory tau;
    tau.states.reserve(horizon);
    tau.actions.reserve(horizon);
    tau.costs.reserve(horizon);
    Vector p0 = mdp.p0;
    int s = rng.categorical(p0.data(), mdp.n_states, p0.sum());
    for (int t = 0; t < horizon; ++t) {
        const int a = rng.categorical_row(pi.probs, s);
        tau.states.push_back(s);
        tau.actions.push_back(a);
        tau.costs.push_back(mdp.cost(s, a));
        s = rng.categorical_row(mdp.transition[a], s);
    }
    return tau;
}

Trajectory rollout(const FiniteMdp& mdp, const Policy& pi, int horizon, RngSeed seed) {
    Rng rng(seed);
    return rollout(mdp, pi, horizon, rng);
}

int sample_occupancy_index(int horizon, double gamma, Rng& rng) {
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    const double u = rng.uniform();  // always one draw, keeps streams aligned
    if (gamma <= 0.0) return 0;
    if (gamma >= 1.0) {
        int t = static_cast<int>(u * horizon);
        return t < horizon ? t : horizon - 1;
    }
    // inverse cdf of the truncated geometric weights gamma^t
    const double total = (1.0 - std::pow(gamma, horizon)) / (1.0 - gamma);
    double target = u * total, acc = 0.0, w = 1.0;
    for (int t = 0; t < horizon; ++t) {
        acc += w;
        if (target < acc) return t;
        w *= gamma;
    }
    return horizon - 1;
}

int sample_occupancy_index(int horizon, double gamma, RngSeed seed) {
    Rng rng(seed);
    return sample_occupancy_index(horizon, gamma, rng);
}

int sample_future_index(const HorizonDistribution& eta, int remaining, Rng& rng) {
    if (remaining < 1) throw std::invalid_argument("remaining must be >= 1");
    const double u = rng.uniform();
    const auto& w = eta.weights();
    const int n = std::min<int>(remaining, static_cast<int>(w.size()));
    double total = 0.0;
    for (int k = 0; k < n; ++k) total += w[k];
    if (total <= 0.0) return remaining - 1;  // all eta mass beyond the range
    double target = u * total, acc = 0.0;
    for (int k = 0; k < n; ++k) {
        acc += w[k];
        if (target < acc) return k;
    }
    return n - 1;
}

int sample_future_index(const HorizonDistribution& eta, int remaining, RngSeed seed) {
    Rng rng(seed);
    return sample_future_index(eta, remaining, rng);
}

std::vector<MuPair> sample_mu_pairs(const ReplayBuffer& buffer, double gamma,
                                    const HorizonDistribution& eta, int batch_size, Rng& rng) {
    if (buffer.empty()) throw std::invalid_argument("replay buffer is empty");
    std::vector<MuPair> out;
    out.reserve(batch_size);
    for (int i = 0; i < batch_size; ++i) {
        const Trajectory& tau = buffer.at(rng.uniform_int(static_cast<int>(buffer.size())));
        const int horizon = tau.length();
        const int t = sample_occupancy_index(horizon, gamma, rng);
        const int k = sample_future_index(eta, horizon - t, rng);
        out.push_back({tau.states[t], tau.actions[t], tau.states[t + k], tau.actions[t + k]});
    }
    return out;
}

std::vector<MuPair> sample_mu_pairs(const ReplayBuffer& buffer, double gamma,
                                    const HorizonDistribution& eta, int batch_size, RngSeed seed) {
    Rng rng(seed);
    return sample_mu_pairs(buffer, gamma, eta, batch_size, rng);
}

}  // namespace etairl
