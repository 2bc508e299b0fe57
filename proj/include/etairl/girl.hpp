#pragma once

#include <optional>

#include "etairl/envs.hpp"
#include "etairl/eval.hpp"
#include "etairl/mdp.hpp"
#include "etairl/occupancy.hpp"
#include "etairl/sampling.hpp"
#include "etairl/soft_rl.hpp"

namespace etairl {

/// Finite basis of cost features f_i(s,a), stored as an (S*A) x d matrix.
struct FeatureBasis {
    Matrix features;  // row = pair index, col = feature

    int dim() const { return static_cast<int>(features.cols()); }
    static FeatureBasis one_hot(int n_states, int n_actions) {
        return {Matrix::Identity(n_states * n_actions, n_states * n_actions)};
    }
    /// One indicator feature per state, shared across actions.
    static FeatureBasis state_indicators(int n_states, int n_actions);
};

enum class CostConstraint { None, L2Ball, Simplex, Negative };

/// Materialized cost table with the feasible-set tag its penalty implies.
struct CostModel {
    enum class Kind { Tabular, Linear, FromDiscriminator } kind = Kind::Tabular;
    Matrix table;    // S x A, always materialized
    Vector weights;  // Linear only
    CostConstraint constraint = CostConstraint::None;

    static CostModel tabular(Matrix c, CostConstraint constraint = CostConstraint::None);
    static CostModel linear(const Vector& w, const FeatureBasis& basis, int n_states,
                            int n_actions, CostConstraint constraint);
    /// c = log D with D clamped into [1e-6, 1-1e-6]; strictly negative.
    static CostModel from_discriminator(const Matrix& d_table);

    /// Messages for violated constraint invariants (empty = feasible).
    std::vector<std::string> validate() const;
};

/// Binary classifier over state-action pairs, D(s,a) = sigmoid(logit).
struct Discriminator {
    enum class Kind { Tabular, LinearLogistic } kind = Kind::Tabular;
    Matrix logits;   // Tabular: S x A
    Vector weights;  // LinearLogistic: over a feature basis

    static Discriminator tabular(int n_states, int n_actions);
    static Discriminator linear_logistic(int dim);

    double prob(int s, int a, int n_actions, const FeatureBasis* basis = nullptr) const;
    /// D as a full S x A table, optionally clamped away from {0,1}.
    Matrix prob_table(int n_states, int n_actions, const FeatureBasis* basis = nullptr,
                      double clamp = 0.0) const;
};

struct IrlConfig {
    int n_outer_iters = 60;
    int rollouts_per_iter = 8;
    int horizon = 30;
    int batch_size = 256;
    int disc_epochs = 10;
    double disc_learning_rate = 0.5;
    double temperature = 0.01;          // RL entropy weight
    double gamma_irl = 1.0;             // present-time sampling discount
    double gamma_rl = -1.0;             // < 0: use the MDP's own gamma
    HorizonDistribution eta = HorizonDistribution::dirac(0);
    RngSeed seed = 1;
    std::size_t policy_buffer_capacity = 240;  // transitions kept for sampling
    Discriminator::Kind disc_kind = Discriminator::Kind::Tabular;
};

/// Exact eta-weighted cost gap sum_{s0} p0 sum c [mu_pi - mu_piE].
double cost_weighted_divergence(const FiniteMdp& mdp, const Policy& pi, const Policy& pi_expert,
                                const Matrix& cost, const HorizonDistribution& eta);

/// GAN penalty: E^eta of -c - log(1 - e^c) under the expert measure when the
/// cost is strictly negative, +infinity otherwise.
double psi_gan(const CostModel& cost, const OccupancyMeasure& mu_expert, const FiniteMdp& mdp);

/// Saddle objective L(pi, c) = -tau H_eta(pi) - psi(c) + cost-weighted gap.
/// Returns -infinity when the penalty is infinite (infeasible cost).
double dual_objective(const FiniteMdp& mdp, const Policy& pi, const Policy& pi_expert,
                      const CostModel& cost, const HorizonDistribution& eta, double tau);

/// Feature expectation gap g_i = sum_{s0} p0 [mu_pi - mu_piE] f_i.
Vector feature_gap(const Vector& p0, const OccupancyMeasure& mu_pi,
                   const OccupancyMeasure& mu_expert, const FeatureBasis& basis);

/// Closed-form inner maximizer over the l2 ball: w* = g/||g|| with value
/// ||g|| (zero weights when the gap vanishes).
struct LinearCostSolution {
    Vector weights;
    double value = 0.0;
};
LinearCostSolution optimal_linear_cost(const OccupancyMeasure& mu_pi,
                                       const OccupancyMeasure& mu_expert,
                                       const FeatureBasis& basis, const Vector& p0);

/// Closed-form inner maximizer over the simplex: the best single feature
/// (lowest index wins ties).
struct ConvexCostSolution {
    int index = 0;
    double value = 0.0;
};
ConvexCostSolution optimal_convex_cost(const OccupancyMeasure& mu_pi,
                                       const OccupancyMeasure& mu_expert,
                                       const FeatureBasis& basis, const Vector& p0);

Vector project_l2_ball(const Vector& w);
Vector project_simplex(const Vector& w);

/// Empirical batch losses driving the EMMA / WIEM weight updates.
double batch_linear_loss(const Vector& w, const Vector& mean_pol_features,
                         const Vector& mean_exp_features);
double batch_convex_loss(const Vector& w, const Vector& mean_pol_features,
                         const Vector& mean_exp_features);

/// Maximization objective sum log D(policy) + sum log(1 - D(expert)).
double discriminator_objective(const Discriminator& disc, const std::vector<MuPair>& policy_batch,
                               const std::vector<MuPair>& expert_batch, int n_actions,
                               const FeatureBasis* basis = nullptr);

/// One full-batch ascent step on discriminator_objective (mean gradients).
void discriminator_ascent_step(Discriminator& disc, const std::vector<MuPair>& policy_batch,
                               const std::vector<MuPair>& expert_batch, int n_actions,
                               double learning_rate, const FeatureBasis* basis = nullptr);

enum class PenaltyKind { Gan, Linear, Convex };

struct IrlMetricsRow {
    int iter = 0;
    double mmd_rho = 0.0;
    double mmd_mu = 0.0;
    double true_return = 0.0;  // normalized: 0 expert, 1 uniform random
    double disc_objective = 0.0;
};

struct IrlResult {
    Policy policy;
    Discriminator discriminator;  // Gan penalty only
    Vector cost_weights;          // Linear / Convex penalties only
    CostModel final_cost;
    std::vector<IrlMetricsRow> metrics;
};

/// Exact-metric context: per-iteration divergences are computed against this
/// policy on the environment's own discount.
struct EvalContext {
    const Policy* expert = nullptr;
    double kappa_mu = 0.99;
};

/// Template loop: rollout, sample present/future pairs on both sides, update
/// the penalized cost, solve the entropy-regularized MDP exactly, repeat.
/// The three named algorithms are this loop with the matching penalty.
IrlResult girl_iterate(const FiniteMdp& mdp, const ReplayBuffer& expert_buffer,
                       PenaltyKind penalty, const IrlConfig& cfg,
                       const FeatureBasis* basis = nullptr, const EvalContext* eval = nullptr);

IrlResult megan_train(const FiniteMdp& mdp, const ReplayBuffer& expert_buffer,
                      const IrlConfig& cfg, const EvalContext* eval = nullptr);
IrlResult emma_train(const FiniteMdp& mdp, const ReplayBuffer& expert_buffer,
                     const FeatureBasis& basis, const IrlConfig& cfg,
                     const EvalContext* eval = nullptr);
IrlResult wiem_train(const FiniteMdp& mdp, const ReplayBuffer& expert_buffer,
                     const FeatureBasis& basis, const IrlConfig& cfg,
                     const EvalContext* eval = nullptr);

}  // namespace etairl
