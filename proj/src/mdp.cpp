#include "etairl/mdp.hpp"

#include <cmath>
#include <numeric>

namespace etairl {

namespace {

constexpr double kStochasticTol = 1e-12;

int auto_truncation_geometric(double kappa) {
    if (kappa <= 0.0) return 0;
    if (kappa >= 1.0) return 4096;
    // tail mass below 1e-14
    int t = static_cast<int>(std::ceil(std::log(1e-14) / std::log(kappa)));
    return std::max(64, std::min(t, 65536));
}

int auto_truncation_poisson(double lambda) {
    return std::max(32, static_cast<int>(std::ceil(lambda + 12.0 * std::sqrt(lambda) + 12.0)));
}

std::vector<double> renormalize(std::vector<double> w) {
    double total = std::accumulate(w.begin(), w.end(), 0.0);
    if (total <= 0.0) throw std::invalid_argument("horizon pmf has zero total mass");
    for (double& x : w) x /= total;
    return w;
}

}  // namespace

HorizonDistribution HorizonDistribution::dirac(int n0, int truncation) {
    if (n0 < 0) throw std::invalid_argument("dirac offset must be non-negative");
    if (truncation < 0) truncation = n0;
    if (truncation < n0) throw std::invalid_argument("dirac offset beyond truncation");
    std::vector<double> w(truncation + 1, 0.0);
    w[n0] = 1.0;
    return HorizonDistribution(HorizonKind::Dirac, static_cast<double>(n0), std::move(w));
}

HorizonDistribution HorizonDistribution::geometric(double kappa, int truncation) {
    if (kappa < 0.0 || kappa > 1.0) throw std::invalid_argument("geometric parameter outside [0,1]");
    if (truncation < 0) truncation = auto_truncation_geometric(kappa);
    std::vector<double> w(truncation + 1);
    double x = 1.0;  // kappa^0, so kappa = 0 leaves a point mass at 0
    for (int n = 0; n <= truncation; ++n) {
        w[n] = x;
        x *= kappa;
    }
    return HorizonDistribution(HorizonKind::Geometric, kappa, renormalize(std::move(w)));
}

HorizonDistribution HorizonDistribution::poisson(double lambda, int truncation) {
    if (lambda < 0.0) throw std::invalid_argument("poisson rate must be non-negative");
    if (truncation < 0) truncation = auto_truncation_poisson(lambda);
    std::vector<double> w(truncation + 1);
    w[0] = std::exp(-lambda);
    for (int n = 1; n <= truncation; ++n) w[n] = w[n - 1] * lambda / n;
    return HorizonDistribution(HorizonKind::Poisson, lambda, renormalize(std::move(w)));
}

HorizonDistribution HorizonDistribution::uniform(int horizon) {
    if (horizon < 1) throw std::invalid_argument("uniform horizon must be >= 1");
    std::vector<double> w(horizon, 1.0 / horizon);
    return HorizonDistribution(HorizonKind::Uniform, static_cast<double>(horizon), std::move(w));
}

HorizonDistribution HorizonDistribution::custom(std::vector<double> weights) {
    if (weights.empty()) throw std::invalid_argument("custom pmf must be non-empty");
    for (double x : weights)
        if (x < 0.0 || !std::isfinite(x)) throw std::invalid_argument("custom pmf entries must be finite and >= 0");
    return HorizonDistribution(HorizonKind::Custom, 0.0, renormalize(std::move(weights)));
}

double HorizonDistribution::mean() const {
    double m = 0.0;
    for (std::size_t n = 0; n < pmf_.size(); ++n) m += static_cast<double>(n) * pmf_[n];
    return m;
}

std::vector<std::string> validate_mdp(const FiniteMdp& mdp) {
    std::vector<std::string> report;
    if (mdp.n_states < 1 || mdp.n_actions < 1) {
        report.push_back("state and action counts must be positive");
        return report;
    }
    if (static_cast<int>(mdp.transition.size()) != mdp.n_actions)
        report.push_back("transition holds " + std::to_string(mdp.transition.size()) +
                         " action slices, expected " + std::to_string(mdp.n_actions));
    for (int a = 0; a < std::min<int>(mdp.n_actions, mdp.transition.size()); ++a) {
        const Matrix& P = mdp.transition[a];
        if (P.rows() != mdp.n_states || P.cols() != mdp.n_states) {
            report.push_back("transition slice for action " + std::to_string(a) + " has wrong shape");
            continue;
        }
        for (int s = 0; s < mdp.n_states; ++s) {
            if (P.row(s).minCoeff() < 0.0)
                report.push_back("negative transition probability at (s=" + std::to_string(s) +
                                 ", a=" + std::to_string(a) + ")");
            if (std::abs(P.row(s).sum() - 1.0) > kStochasticTol)
                report.push_back("transition row (s=" + std::to_string(s) + ", a=" +
                                 std::to_string(a) + ") sums to " + std::to_string(P.row(s).sum()));
        }
    }
    if (mdp.cost.rows() != mdp.n_states || mdp.cost.cols() != mdp.n_actions)
        report.push_back("cost table has wrong shape");
    else
        for (int s = 0; s < mdp.n_states; ++s)
            for (int a = 0; a < mdp.n_actions; ++a)
                if (mdp.cost(s, a) < 0.0)
                    report.push_back("negative cost at (s=" + std::to_string(s) + ", a=" +
                                     std::to_string(a) + ")");
    if (!(mdp.gamma > 0.0 && mdp.gamma < 1.0))
        report.push_back("gamma must lie in (0,1), got " + std::to_string(mdp.gamma));
    if (mdp.p0.size() != mdp.n_states)
        report.push_back("p0 has wrong length");
    else {
        if (mdp.p0.minCoeff() < 0.0) report.push_back("p0 has negative entries");
        if (std::abs(mdp.p0.sum() - 1.0) > kStochasticTol)
            report.push_back("p0 sums to " + std::to_string(mdp.p0.sum()));
    }
    return report;
}

std::vector<std::string> validate_policy(const FiniteMdp& mdp, const Policy& pi) {
    std::vector<std::string> report;
    if (pi.probs.rows() != mdp.n_states || pi.probs.cols() != mdp.n_actions) {
        report.push_back("policy has wrong shape");
        return report;
    }
    for (int s = 0; s < mdp.n_states; ++s) {
        if (pi.probs.row(s).minCoeff() < 0.0)
            report.push_back("negative policy probability at state " + std::to_string(s));
        if (std::abs(pi.probs.row(s).sum() - 1.0) > kStochasticTol)
            report.push_back("policy row " + std::to_string(s) + " sums to " +
                             std::to_string(pi.probs.row(s).sum()));
    }
    return report;
}

std::vector<std::string> validate_trajectory(const FiniteMdp& mdp, const Trajectory& tau) {
    std::vector<std::string> report;
    if (tau.states.size() != tau.actions.size() || tau.states.size() != tau.costs.size())
        report.push_back("trajectory field lengths differ");
    for (std::size_t t = 0; t + 1 < tau.states.size(); ++t) {
        int s = tau.states[t], a = tau.actions[t], s2 = tau.states[t + 1];
        if (mdp.trans(s, a, s2) <= 0.0)
            report.push_back("impossible transition at step " + std::to_string(t));
    }
    return report;
}

Matrix policy_transition_operator(const FiniteMdp& mdp, const Policy& pi) {
    if (pi.probs.rows() != mdp.n_states || pi.probs.cols() != mdp.n_actions)
        throw std::invalid_argument("policy/mdp dimension mismatch");
    const int S = mdp.n_states, A = mdp.n_actions;
    Matrix M = Matrix::Zero(S * A, S * A);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            const int row = mdp.pair_index(s, a);
            for (int s2 = 0; s2 < S; ++s2) {
                const double p = mdp.trans(s, a, s2);
                if (p == 0.0) continue;
                for (int a2 = 0; a2 < A; ++a2) M(row, mdp.pair_index(s2, a2)) = p * pi.probs(s2, a2);
            }
        }
    return M;
}

Matrix policy_state_kernel(const FiniteMdp& mdp, const Policy& pi) {
    const int S = mdp.n_states, A = mdp.n_actions;
    Matrix P = Matrix::Zero(S, S);
    for (int a = 0; a < A; ++a) P += pi.probs.col(a).asDiagonal() * mdp.transition[a];
    return P;
}

}  // namespace etairl
