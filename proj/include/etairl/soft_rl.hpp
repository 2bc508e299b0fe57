#pragma once

#include <limits>

#include "etairl/mdp.hpp"
#include "etairl/occupancy.hpp"
#include "etairl/rng.hpp"

namespace etairl {

struct ValueFunction {
    Vector v;  // length S
};

struct QFunction {
    Matrix q;  // S x A
};

struct SoftRlConfig {
    double temperature = 0.01;  // entropy weight, > 0 for the soft operators
    double tolerance = 1e-12;
    int max_iters = 200000;
};

/// Regularized policy-evaluation backup:
/// [T v](s) = E_{a~pi}[c(s,a) + gamma E_{s'}[v(s')]] + tau sum_a pi log pi.
/// Pass `cost` to evaluate a cost table other than the MDP's own.
ValueFunction bellman_policy(const ValueFunction& v, const FiniteMdp& mdp, const Policy& pi,
                             const SoftRlConfig& cfg, const Matrix* cost = nullptr);

/// Entropy-regularized optimality backup in closed form,
/// [T v](s) = -tau log sum_a exp(-Q(s,a)/tau), with the softmin greedy policy.
/// Stabilized by row-min subtraction; requires temperature > 0.
std::pair<ValueFunction, Policy> bellman_optimality(const ValueFunction& v, const FiniteMdp& mdp,
                                                    const SoftRlConfig& cfg,
                                                    const Matrix* cost = nullptr);

struct SoftSolution {
    ValueFunction value;
    Policy policy;
    int iterations = 0;
    double residual = 0.0;
};

/// Iterates the optimality backup to tolerance. Throws ConvergenceError with
/// the final residual if the iteration budget is exhausted.
SoftSolution soft_value_iteration(const FiniteMdp& mdp, const SoftRlConfig& cfg,
                                  const Matrix* cost = nullptr);

/// Exact regularized value of a fixed policy via one linear solve:
/// v = (I - gamma P_pi)^{-1} (c_pi + tau sum_a pi log pi).
Vector policy_value(const FiniteMdp& mdp, const Policy& pi, const Matrix& cost, double tau);

/// Regularized Q(s,a) = c(s,a) + gamma E_{s'|s,a}[v_pi(s')].
QFunction policy_q(const FiniteMdp& mdp, const Policy& pi, const Matrix& cost, double tau);

/// Eta-weighted regularized loss L(pi, c) = E^eta_{p0,pi}[sum_t gamma^t c_t]
/// minus temperature times the eta-weighted entropy, both computed exactly
/// through the mu measure.
double eta_loss(const FiniteMdp& mdp, const Policy& pi, const Matrix& cost,
                const HorizonDistribution& eta, const SoftRlConfig& cfg);

struct OptimalityViolation {
    int eta_index = 0;
    int competitor = 0;
    double gap = 0.0;  // loss(pi*) - loss(competitor), positive = violation
};

struct OptimalityReport {
    bool passed = true;
    int checks = 0;
    // largest loss(pi*) - loss(competitor) seen; negative means the optimal
    // policy stayed strictly ahead of every competitor
    double worst_gap = -std::numeric_limits<double>::infinity();
    std::vector<OptimalityViolation> violations;
};

/// Compares eta_loss of the soft-optimal policy against random and
/// perturbed-greedy competitors on every eta in the grid (slack 1e-6).
OptimalityReport eta_optimality_check(const FiniteMdp& mdp,
                                      const std::vector<HorizonDistribution>& eta_grid,
                                      const SoftRlConfig& cfg, int n_competitors, RngSeed seed);

/// Gradient of the unregularized eta-loss for a tabular softmax policy,
/// split into the future-distribution term (differentiating P_eta with the
/// value held fixed) and the weighted classical policy-gradient term.
struct PolicyGradient {
    Matrix total;       // S x A, additional + modified
    Matrix additional;  // integral of v against the P_eta derivative
    Matrix modified;    // eta-weighted classical policy-gradient term
};
PolicyGradient generalized_policy_gradient(const FiniteMdp& mdp, const Matrix& theta,
                                           const Matrix& cost, const HorizonDistribution& eta);

/// Unregularized eta-loss of the softmax policy for logits theta (the
/// function generalized_policy_gradient differentiates).
double eta_loss_softmax(const FiniteMdp& mdp, const Matrix& theta, const Matrix& cost,
                        const HorizonDistribution& eta);

/// Residual of the local-improvement identity
///   L0(pi_n) = <p0 P_eta_{pi_n}, v_{pi_o}> + E^eta_{p0,pi_n}[sum gamma^t A_{pi_o}]
/// computed exactly through the mu measures. The baseline term evaluates the
/// old policy's value under the new policy's eta-weighted state distribution,
/// which reduces to the old loss itself when eta is a point mass at 0.
double trpo_identity_residual(const FiniteMdp& mdp, const Policy& pi_new, const Policy& pi_old,
                              const Matrix& cost, const HorizonDistribution& eta);

Policy softmax_policy(const Matrix& theta);

}  // namespace etairl
