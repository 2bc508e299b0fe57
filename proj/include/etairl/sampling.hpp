#pragma once

#include <cstddef>

#include "etairl/mdp.hpp"
#include "etairl/rng.hpp"

namespace etairl {

/// FIFO trajectory store bounded by a total-transition capacity: pushing past
/// the cap evicts whole trajectories from the front.
class ReplayBuffer {
  public:
    explicit ReplayBuffer(std::size_t capacity_transitions = 1000000)
        : capacity_(capacity_transitions) {}

    void push(Trajectory tau);
    std::size_t size() const { return trajectories_.size(); }
    bool empty() const { return trajectories_.empty(); }
    std::size_t total_transitions() const { return total_; }
    std::size_t capacity() const { return capacity_; }
    const Trajectory& at(std::size_t i) const { return trajectories_[i]; }
    const std::vector<Trajectory>& trajectories() const { return trajectories_; }
    void clear();

  private:
    std::vector<Trajectory> trajectories_;
    std::size_t capacity_;
    std::size_t total_ = 0;
};

/// Length-H rollout: s0 ~ p0, a_t ~ pi(.|s_t), s_{t+1} ~ P(.|s_t,a_t).
Trajectory rollout(const FiniteMdp& mdp, const Policy& pi, int horizon, RngSeed seed);
Trajectory rollout(const FiniteMdp& mdp, const Policy& pi, int horizon, Rng& rng);

/// Time index t in {0,...,H-1} with pmf proportional to gamma^t. gamma = 1
/// draws uniformly; gamma = 0 always returns 0.
int sample_occupancy_index(int horizon, double gamma, RngSeed seed);
int sample_occupancy_index(int horizon, double gamma, Rng& rng);

/// Offset k in {0,...,remaining-1} from eta truncated and renormalized to the
/// available range. When eta puts no mass there (a point mass beyond the end
/// of the trajectory) the latest available offset is returned.
int sample_future_index(const HorizonDistribution& eta, int remaining, RngSeed seed);
int sample_future_index(const HorizonDistribution& eta, int remaining, Rng& rng);

/// Present/future pair: (s,a) at the occupancy-sampled time, (s+,a+) at the
/// eta-shifted offset.
struct MuPair {
    int s = 0, a = 0, s_plus = 0, a_plus = 0;
};

/// Two-stage index sampling over a buffer: trajectory uniform, t by
/// sample_occupancy_index, k by sample_future_index on the remaining length.
/// The (s+,a+) marginal approximates the normalized eta-weighted occupancy.
std::vector<MuPair> sample_mu_pairs(const ReplayBuffer& buffer, double gamma,
                                    const HorizonDistribution& eta, int batch_size, RngSeed seed);
std::vector<MuPair> sample_mu_pairs(const ReplayBuffer& buffer, double gamma,
                                    const HorizonDistribution& eta, int batch_size, Rng& rng);

}  // namespace etairl
