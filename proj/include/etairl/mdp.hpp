#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace etairl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised when two computations that must agree (independent routes to the
/// same quantity) disagree beyond tolerance.
struct ConsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when an iterative solver exhausts its iteration budget.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Finite discounted MDP: state/action index sets, row-stochastic kernel,
/// non-negative cost table, discount in (0,1) and an initial distribution.
struct FiniteMdp {
    int n_states = 0;
    int n_actions = 0;
    std::vector<Matrix> transition;  // per action: S x S', rows sum to 1
    Matrix cost;                     // S x A
    double gamma = 0.9;
    Vector p0;                       // length S, sums to 1

    int n_pairs() const { return n_states * n_actions; }
    int pair_index(int s, int a) const { return s * n_actions + a; }
    double trans(int s, int a, int s2) const { return transition[a](s, s2); }
};

/// Stationary stochastic policy: probs(s,a) = pi(a|s), rows sum to 1.
struct Policy {
    Matrix probs;

    static Policy uniform(int n_states, int n_actions) {
        Policy pi;
        pi.probs = Matrix::Constant(n_states, n_actions, 1.0 / n_actions);
        return pi;
    }
    static Policy deterministic(int n_states, int n_actions,
                                const std::vector<int>& action_per_state) {
        Policy pi;
        pi.probs = Matrix::Zero(n_states, n_actions);
        for (int s = 0; s < n_states; ++s) pi.probs(s, action_per_state[s]) = 1.0;
        return pi;
    }
};

enum class HorizonKind { Dirac, Geometric, Poisson, Uniform, Custom };

/// Distribution over step offsets n = 0,1,2,... truncated at a finite index
/// and renormalized. Geometric(kappa) carries pmf proportional to kappa^n
/// (support starting at n = 0, so kappa = 0 degenerates to a point mass at 0
/// and kappa = 1 to a uniform distribution over the truncated support).
class HorizonDistribution {
  public:
    static HorizonDistribution dirac(int n0, int truncation = -1);
    static HorizonDistribution geometric(double kappa, int truncation = -1);
    static HorizonDistribution poisson(double lambda, int truncation = -1);
    static HorizonDistribution uniform(int horizon);  // support {0,...,horizon-1}
    static HorizonDistribution custom(std::vector<double> weights);

    HorizonKind kind() const { return kind_; }
    double param() const { return param_; }
    int truncation() const { return static_cast<int>(pmf_.size()) - 1; }
    const std::vector<double>& weights() const { return pmf_; }

    /// Renormalized truncated mass at n; zero beyond the truncation.
    double pmf(int n) const {
        if (n < 0 || n >= static_cast<int>(pmf_.size())) return 0.0;
        return pmf_[n];
    }
    double mean() const;

    /// True when the exact geometric fixed-point solve applies (kappa < 1).
    bool has_geometric_fixed_point() const {
        return kind_ == HorizonKind::Geometric && param_ < 1.0;
    }
    /// Contraction modulus of the geometric fixed point.
    double gamma_eta() const { return param_; }

  private:
    HorizonDistribution(HorizonKind kind, double param, std::vector<double> pmf)
        : kind_(kind), param_(param), pmf_(std::move(pmf)) {}
    HorizonKind kind_;
    double param_;
    std::vector<double> pmf_;
};

/// One finite rollout; states/actions/costs share the same length.
struct Trajectory {
    std::vector<int> states;
    std::vector<int> actions;
    std::vector<double> costs;

    int length() const { return static_cast<int>(states.size()); }
};

/// Checks every structural invariant and returns one message per violation.
/// An empty report means the MDP is valid.
std::vector<std::string> validate_mdp(const FiniteMdp& mdp);

/// Row-stochasticity / non-negativity report for a policy against an MDP.
std::vector<std::string> validate_policy(const FiniteMdp& mdp, const Policy& pi);

/// Checks that every transition along the trajectory has positive probability.
std::vector<std::string> validate_trajectory(const FiniteMdp& mdp, const Trajectory& tau);

/// State-action transition operator M[(s,a)][(s',a')] = P(s'|s,a) pi(a'|s').
/// Powers of M give the n-step state-action marginals.
Matrix policy_transition_operator(const FiniteMdp& mdp, const Policy& pi);

/// State-to-state kernel P_pi(s'|s) = sum_a pi(a|s) P(s'|s,a).
Matrix policy_state_kernel(const FiniteMdp& mdp, const Policy& pi);

}  // namespace etairl
