#pragma once

#include "etairl/mdp.hpp"

namespace etairl {

/// Conditional discounted state-action measure. Row r holds the measure of
/// every (s,a) pair given initial state r (or initial pair r when
/// pair_conditioned). total_mass is the expected row sum: 1/(1-gamma) for the
/// occupancy measure and its eta-weighted composition, 1 for the future-state
/// distribution.
struct OccupancyMeasure {
    Matrix values;  // n_cond x (S*A)
    double total_mass = 0.0;
    bool pair_conditioned = false;

    int n_cond() const { return static_cast<int>(values.rows()); }
};

/// Discounted occupancy measure: row s0 solves x = iota_{s0} + gamma * x M
/// exactly (dense LU), where iota routes the initial state through the
/// policy. Row mass 1/(1-gamma).
OccupancyMeasure rho(const FiniteMdp& mdp, const Policy& pi, bool pair_conditioned = false);

/// Eta-weighted future state-action distribution, row mass 1.
///
/// Geometric eta with kappa < 1 is solved exactly as the fixed point of the
/// kappa-contraction g = iota + kappa * g M, rescaled by (1-kappa). Every
/// other kind (and kappa = 1) is the truncated power sum over the
/// renormalized pmf.
OccupancyMeasure p_eta(const FiniteMdp& mdp, const Policy& pi, const HorizonDistribution& eta,
                       bool pair_conditioned = false);

/// Composition measure mu(s+,a+|s0) = sum_{s,a} rho(s,a|s0) P_eta(s+,a+|s,a);
/// row mass 1/(1-gamma). Equals the double mixture over discounted time and
/// eta-weighted offset.
OccupancyMeasure mu(const FiniteMdp& mdp, const Policy& pi, const HorizonDistribution& eta,
                    bool pair_conditioned = false);

/// Pair-conditioned kernels used by the compositions above: row (s,a) of the
/// returned SA x SA matrix is the measure conditioned on starting pair (s,a).
Matrix rho_kernel(const FiniteMdp& mdp, const Policy& pi);
Matrix future_kernel(const FiniteMdp& mdp, const Policy& pi, const HorizonDistribution& eta);

struct PolicyRecovery {
    Policy policy;
    std::vector<int> zero_mass_states;  // rows filled uniform for lack of evidence
};

/// Normalizes the state-marginals of a measure into a policy:
/// pi(a|s) = Phi(s,a)/sum_a' Phi(s,a'). Mass is accumulated across all
/// conditioning rows (each row contributes proportionally to the same
/// conditional), so any state reachable under some conditioning gets its row.
PolicyRecovery policy_from_occupancy(const OccupancyMeasure& phi, int n_states, int n_actions);

/// Max absolute residuals of the four affine flow identities tying
/// (f, g, h) = (mu, unnormalized future distribution, rho) together:
///   sum_a f(s,a|s0) = sum_a g(s,a|s0) + gamma     * sum_{s',a'} f(s',a'|s0) P(s|s',a')
///   sum_a f(s,a|s0) = sum_a h(s,a|s0) + gamma_eta * sum_{s',a'} f(s',a'|s0) P(s|s',a')
///   sum_a g(s,a|s0) = [s = s0] + gamma_eta * sum_{s',a'} P(s|s',a') g(s',a'|s0)
///   sum_a h(s,a|s0) = [s = s0] + gamma     * sum_{s',a'} P(s|s',a') h(s',a'|s0)
/// f and g are passed in the normalized forms produced by mu and p_eta; both
/// are rescaled internally by 1/(1-gamma_eta) to the proof's unnormalized
/// convention (the geometric weights enter as plain powers there).
struct FlowResiduals {
    double f_gamma = 0.0;      // first identity
    double f_gamma_eta = 0.0;  // second identity
    double g_flow = 0.0;       // third identity
    double h_flow = 0.0;       // fourth identity

    double max_abs() const;
};
FlowResiduals flow_residuals(const OccupancyMeasure& f, const OccupancyMeasure& g,
                             const OccupancyMeasure& h, const FiniteMdp& mdp, double gamma_eta);

/// The three independent routes to E^eta_{p0,pi}[sum_t gamma^t fn(s_t,a_t)]:
/// rho composed with the future kernel, mu directly, and a truncated double
/// power sum over operator powers.
struct EtaExpectationRoutes {
    double via_composition = 0.0;
    double via_mu = 0.0;
    double via_power_sum = 0.0;

    double max_discrepancy() const;
};
EtaExpectationRoutes eta_expectation_routes(const FiniteMdp& mdp, const Policy& pi,
                                            const HorizonDistribution& eta, const Matrix& fn);

/// E^eta_{p0,pi}[sum_t gamma^t fn(s_t,a_t)] with pairwise agreement of the
/// three routes asserted to a 1e-6 relative tolerance. Returns the
/// composition route. fn is an S x A table. Throws ConsistencyError on
/// disagreement (a solver bug, not an input error).
double eta_expectation(const FiniteMdp& mdp, const Policy& pi, const HorizonDistribution& eta,
                       const Matrix& fn);

/// Eta-weighted entropy functional evaluated on a conditional measure: the
/// conditioning rows are aggregated against p0 into one measure m(s,a) and
/// the entropy is -sum m(s,a) log(m(s,a)/m(s)) with 0 log 0 = 0. Concave in
/// the measure; equals the eta-weighted policy entropy when the measure comes
/// from a policy.
double eta_weighted_entropy(const Vector& p0, const OccupancyMeasure& mu);

/// p0-weighted aggregate of a state-conditioned measure (length S*A vector).
Vector aggregate_measure(const Vector& p0, const OccupancyMeasure& m);

}  // namespace etairl
