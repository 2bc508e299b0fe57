#pragma once

#include "etairl/mdp.hpp"
#include "etairl/occupancy.hpp"
#include "etairl/sampling.hpp"

namespace etairl {

struct KernelConfig {
    double bandwidth_divisor = 1.0;  // d in exp(-||x-y||^2 / d)
    // Reproduces the literal printed cross-term coefficient 1/N^2 instead of
    // the standard unbiased 2/(mn); off by default.
    bool literal_cross_term = false;
};

/// exp(-||x-y||^2 / d).
double rbf_kernel(const Vector& x, const Vector& y, const KernelConfig& cfg);

/// Unbiased two-sample MMD^2 U-statistic; may be negative.
double mmd2_unbiased(const std::vector<Vector>& xs, const std::vector<Vector>& ys,
                     const KernelConfig& cfg);

/// Population MMD^2 between two distributions over (s,a) pairs embedded as
/// concatenated one-hots (bandwidth divisor = embedding dimension S + A).
/// Non-negative, zero iff the distributions coincide.
double mmd2_population(const Vector& p, const Vector& q, int n_states, int n_actions);

/// One-hot concatenated embedding of a state-action pair.
Vector embed_pair(int s, int a, int n_states, int n_actions);

/// p0-marginalized, normalized eta-weighted occupancy of a policy (the
/// population distribution the mu-pair sampler approximates).
Vector exact_mu_marginal(const FiniteMdp& mdp, const Policy& pi, const HorizonDistribution& eta);

/// Normalized plain occupancy marginal (eta collapsed to a point mass at 0).
Vector exact_rho_marginal(const FiniteMdp& mdp, const Policy& pi);

struct MmdMetrics {
    double rho_sample = 0.0;
    double mu_sample = 0.0;
    double rho_exact = 0.0;
    double mu_exact = 0.0;
    int n_samples = 0;
};

/// The two divergences reported per training iteration: distance between
/// occupancy measures (eta = point mass at 0, t drawn with gamma_irl) and
/// between long-range mixtures (eta geometric with the given kappa). Sample
/// estimates come from buffers through the mu-pair sampler; exact values from
/// the population measures.
MmdMetrics mmd_metrics(const FiniteMdp& mdp, const Policy& pi, const Policy& pi_expert,
                       const ReplayBuffer& policy_buffer, const ReplayBuffer& expert_buffer,
                       int n_samples, RngSeed seed, double gamma_irl = 1.0,
                       double kappa_mu = 0.99);

/// (J(pi) - J(expert)) / (J(random) - J(expert)) with J the Monte-Carlo mean
/// discounted cost; 0 anchors the expert, 1 the uniform-random policy.
/// Throws when the anchors coincide.
double normalized_return(const FiniteMdp& mdp, const Policy& pi, int n_rollouts, int horizon,
                         RngSeed seed);

/// Noise-free variant via exact policy evaluation on the true cost.
double normalized_return_exact(const FiniteMdp& mdp, const Policy& pi);

/// Exact discounted cost of a policy from p0 (tau = 0).
double exact_return(const FiniteMdp& mdp, const Policy& pi);

}  // namespace etairl
