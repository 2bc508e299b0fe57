#include "etairl/eval.hpp"

#include <cmath>

#include "etairl/soft_rl.hpp"

namespace etairl {

double rbf_kernel(const Vector& x, const Vector& y, const KernelConfig& cfg) {
    if (x.size() != y.size()) throw std::invalid_argument("kernel inputs must share a dimension");
    if (cfg.bandwidth_divisor <= 0.0) throw std::invalid_argument("bandwidth divisor must be > 0");
    return std::exp(-(x - y).squaredNorm() / cfg.bandwidth_divisor);
}

double mmd2_unbiased(const std::vector<Vector>& xs, const std::vector<Vector>& ys,
                     const KernelConfig& cfg) {
    const int m = static_cast<int>(xs.size()), n = static_cast<int>(ys.size());
    if (m < 2 || n < 2) throw std::invalid_argument("need at least two samples per side");
    double kxx = 0.0, kyy = 0.0, kxy = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) kxx += rbf_kernel(xs[i], xs[j], cfg);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) kyy += rbf_kernel(ys[i], ys[j], cfg);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) kxy += rbf_kernel(xs[i], ys[j], cfg);
    const double cross = cfg.literal_cross_term ? kxy / (static_cast<double>(m) * m)
                                                : 2.0 * kxy / (static_cast<double>(m) * n);
    return 2.0 * kxx / (static_cast<double>(m) * (m - 1)) +
           2.0 * kyy / (static_cast<double>(n) * (n - 1)) - cross;
}

Vector embed_pair(int s, int a, int n_states, int n_actions) {
    Vector x = Vector::Zero(n_states + n_actions);
    x(s) = 1.0;
    x(n_states + a) = 1.0;
    return x;
}

double mmd2_population(const Vector& p, const Vector& q, int n_states, int n_actions) {
    const int SA = n_states * n_actions;
    if (p.size() != SA || q.size() != SA)
        throw std::invalid_argument("distribution length must be n_states * n_actions");
    const double d = static_cast<double>(n_states + n_actions);
    // ||e_i - e_j||^2 = 2 [s_i != s_j] + 2 [a_i != a_j]
    const double k_state = std::exp(-2.0 / d);   // actions equal, states differ
    const double k_action = std::exp(-2.0 / d);  // states equal, actions differ
    const double k_both = std::exp(-4.0 / d);
    const Vector diff = p - q;
    double acc = 0.0;
    for (int i = 0; i < SA; ++i) {
        if (diff(i) == 0.0) continue;
        const int si = i / n_actions, ai = i % n_actions;
        for (int j = 0; j < SA; ++j) {
            const int sj = j / n_actions, aj = j % n_actions;
            double k = 1.0;
            if (si != sj && ai != aj)
                k = k_both;
            else if (si != sj)
                k = k_state;
            else if (ai != aj)
                k = k_action;
            acc += diff(i) * k * diff(j);
        }
    }
    return acc;
}

Vector exact_mu_marginal(const FiniteMdp& mdp, const Policy& pi, const HorizonDistribution& eta) {
    return aggregate_measure(mdp.p0, mu(mdp, pi, eta)) * (1.0 - mdp.gamma);
}

Vector exact_rho_marginal(const FiniteMdp& mdp, const Policy& pi) {
    return aggregate_measure(mdp.p0, rho(mdp, pi)) * (1.0 - mdp.gamma);
}

namespace {

std::vector<Vector> embed_batch(const std::vector<MuPair>& pairs, int S, int A) {
    std::vector<Vector> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back(embed_pair(p.s_plus, p.a_plus, S, A));
    return out;
}

}  // namespace

MmdMetrics mmd_metrics(const FiniteMdp& mdp, const Policy& pi, const Policy& pi_expert,
                       const ReplayBuffer& policy_buffer, const ReplayBuffer& expert_buffer,
                       int n_samples, RngSeed seed, double gamma_irl, double kappa_mu) {
    const int S = mdp.n_states, A = mdp.n_actions;
    MmdMetrics out;
    out.n_samples = n_samples;
    KernelConfig kernel{static_cast<double>(S + A), false};

    const auto dirac0 = HorizonDistribution::dirac(0);
    const auto geom = HorizonDistribution::geometric(kappa_mu);
    Rng rng(seed);
    const auto pol_rho = embed_batch(sample_mu_pairs(policy_buffer, gamma_irl, dirac0, n_samples, rng), S, A);
    const auto exp_rho = embed_batch(sample_mu_pairs(expert_buffer, gamma_irl, dirac0, n_samples, rng), S, A);
    const auto pol_mu = embed_batch(sample_mu_pairs(policy_buffer, gamma_irl, geom, n_samples, rng), S, A);
    const auto exp_mu = embed_batch(sample_mu_pairs(expert_buffer, gamma_irl, geom, n_samples, rng), S, A);
    out.rho_sample = mmd2_unbiased(pol_rho, exp_rho, kernel);
    out.mu_sample = mmd2_unbiased(pol_mu, exp_mu, kernel);

    out.rho_exact = mmd2_population(exact_rho_marginal(mdp, pi), exact_rho_marginal(mdp, pi_expert), S, A);
    out.mu_exact = mmd2_population(exact_mu_marginal(mdp, pi, geom), exact_mu_marginal(mdp, pi_expert, geom), S, A);
    return out;
}

double exact_return(const FiniteMdp& mdp, const Policy& pi) {
    return mdp.p0.dot(policy_value(mdp, pi, mdp.cost, 0.0));
}

namespace {

double mc_return(const FiniteMdp& mdp, const Policy& pi, int n_rollouts, int horizon, Rng& rng) {
    double total = 0.0;
    for (int i = 0; i < n_rollouts; ++i) {
        const Trajectory tau = rollout(mdp, pi, horizon, rng);
        double disc = 1.0, j = 0.0;
        for (double c : tau.costs) {
            j += disc * c;
            disc *= mdp.gamma;
        }
        total += j;
    }
    return total / n_rollouts;
}

}  // namespace

double normalized_return(const FiniteMdp& mdp, const Policy& pi, int n_rollouts, int horizon,
                         RngSeed seed) {
    SoftRlConfig cfg;
    const Policy expert = soft_value_iteration(mdp, cfg).policy;
    const Policy random_pi = Policy::uniform(mdp.n_states, mdp.n_actions);
    Rng rng(seed);
    const double j_pi = mc_return(mdp, pi, n_rollouts, horizon, rng);
    const double j_exp = mc_return(mdp, expert, n_rollouts, horizon, rng);
    const double j_rand = mc_return(mdp, random_pi, n_rollouts, horizon, rng);
    if (std::abs(j_rand - j_exp) < 1e-12)
        throw std::invalid_argument("normalized return undefined: random and expert anchors coincide");
    return (j_pi - j_exp) / (j_rand - j_exp);
}

double normalized_return_exact(const FiniteMdp& mdp, const Policy& pi) {
    SoftRlConfig cfg;
    const Policy expert = soft_value_iteration(mdp, cfg).policy;
    const double j_exp = exact_return(mdp, expert);
    const double j_rand = exact_return(mdp, Policy::uniform(mdp.n_states, mdp.n_actions));
    if (std::abs(j_rand - j_exp) < 1e-12)
        throw std::invalid_argument("normalized return undefined: random and expert anchors coincide");
    return (exact_return(mdp, pi) - j_exp) / (j_rand - j_exp);
}

}  // namespace etairl
