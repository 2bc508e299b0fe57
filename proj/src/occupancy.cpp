#include "etairl/occupancy.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

namespace etairl {

namespace {

// Rows of initial mass: state-conditioned rows route the initial state
// through the policy, pair-conditioned rows are point masses.
Matrix initial_rows(const FiniteMdp& mdp, const Policy& pi, bool pair_conditioned) {
    const int S = mdp.n_states, A = mdp.n_actions, SA = S * A;
    if (pair_conditioned) return Matrix::Identity(SA, SA);
    Matrix init = Matrix::Zero(S, SA);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) init(s, mdp.pair_index(s, a)) = pi.probs(s, a);
    return init;
}

// Solves X = Init (I - disc*M)^{-1} row-wise via one LU factorization.
Matrix resolvent_rows(const Matrix& init, const Matrix& M, double disc) {
    const Matrix system = (Matrix::Identity(M.rows(), M.cols()) - disc * M).transpose();
    Eigen::PartialPivLU<Matrix> lu(system);
    return lu.solve(init.transpose()).transpose();
}

// Truncated power sum  sum_n w_n * Init * M^n.
Matrix power_sum_rows(const Matrix& init, const Matrix& M, const std::vector<double>& w) {
    Matrix acc = Matrix::Zero(init.rows(), init.cols());
    Matrix cur = init;
    for (std::size_t n = 0; n < w.size(); ++n) {
        if (w[n] != 0.0) acc += w[n] * cur;
        if (n + 1 < w.size()) cur = cur * M;
    }
    return acc;
}

}  // namespace

OccupancyMeasure rho(const FiniteMdp& mdp, const Policy& pi, bool pair_conditioned) {
    const Matrix M = policy_transition_operator(mdp, pi);
    OccupancyMeasure out;
    out.values = resolvent_rows(initial_rows(mdp, pi, pair_conditioned), M, mdp.gamma);
    out.total_mass = 1.0 / (1.0 - mdp.gamma);
    out.pair_conditioned = pair_conditioned;
    return out;
}

OccupancyMeasure p_eta(const FiniteMdp& mdp, const Policy& pi, const HorizonDistribution& eta,
                       bool pair_conditioned) {
    const Matrix M = policy_transition_operator(mdp, pi);
    const Matrix init = initial_rows(mdp, pi, pair_conditioned);
    OccupancyMeasure out;
    if (eta.has_geometric_fixed_point()) {
        const double kappa = eta.gamma_eta();
        out.values = (1.0 - kappa) * resolvent_rows(init, M, kappa);
    } else {
        out.values = power_sum_rows(init, M, eta.weights());
    }
    out.total_mass = 1.0;
    out.pair_conditioned = pair_conditioned;
    return out;
}

Matrix rho_kernel(const FiniteMdp& mdp, const Policy& pi) {
    return rho(mdp, pi, /*pair_conditioned=*/true).values;
}

Matrix future_kernel(const FiniteMdp& mdp, const Policy& pi, const HorizonDistribution& eta) {
    return p_eta(mdp, pi, eta, /*pair_conditioned=*/true).values;
}

OccupancyMeasure mu(const FiniteMdp& mdp, const Policy& pi, const HorizonDistribution& eta,
                    bool pair_conditioned) {
    OccupancyMeasure base = rho(mdp, pi, pair_conditioned);
    OccupancyMeasure out;
    out.values = base.values * future_kernel(mdp, pi, eta);
    out.total_mass = 1.0 / (1.0 - mdp.gamma);
    out.pair_conditioned = pair_conditioned;
    return out;
}

PolicyRecovery policy_from_occupancy(const OccupancyMeasure& phi, int n_states, int n_actions) {
    if (phi.values.cols() != static_cast<Eigen::Index>(n_states) * n_actions)
        throw std::invalid_argument("measure width does not match n_states * n_actions");
    PolicyRecovery out;
    out.policy.probs = Matrix::Zero(n_states, n_actions);
    // Sum over conditioning rows: each row equals (state marginal) * pi(a|s),
    // so the aggregate keeps the same conditional wherever any row has mass.
    Eigen::RowVectorXd total = phi.values.colwise().sum();
    for (int s = 0; s < n_states; ++s) {
        double mass = 0.0;
        for (int a = 0; a < n_actions; ++a) mass += total(s * n_actions + a);
        if (mass <= 0.0) {
            out.zero_mass_states.push_back(s);
            out.policy.probs.row(s).setConstant(1.0 / n_actions);
        } else {
            for (int a = 0; a < n_actions; ++a)
                out.policy.probs(s, a) = total(s * n_actions + a) / mass;
        }
    }
    return out;
}

double FlowResiduals::max_abs() const {
    return std::max({f_gamma, f_gamma_eta, g_flow, h_flow});
}

FlowResiduals flow_residuals(const OccupancyMeasure& f, const OccupancyMeasure& g,
                             const OccupancyMeasure& h, const FiniteMdp& mdp, double gamma_eta) {
    const int S = mdp.n_states, A = mdp.n_actions;
    if (f.pair_conditioned || g.pair_conditioned || h.pair_conditioned)
        throw std::invalid_argument("flow residuals are defined on state-conditioned measures");
    if (f.values.rows() != S || g.values.rows() != S || h.values.rows() != S)
        throw std::invalid_argument("flow residuals need one row per initial state");

    // Proof convention: the eta-weights inside f and g are unnormalized
    // powers of gamma_eta, so both shed the (1 - gamma_eta) factor carried by
    // the normalized measures; masses become 1/((1-gamma)(1-gamma_eta)) and
    // 1/(1-gamma_eta).
    const Matrix f_un = f.values / (1.0 - gamma_eta);
    const Matrix g_un = g.values / (1.0 - gamma_eta);

    // state marginals: rows s0, cols s
    auto state_marginal = [&](const Matrix& m) {
        Matrix out = Matrix::Zero(S, S);
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) out.col(s) += m.col(s * A + a);
        return out;
    };
    // inflow(s0, s) = sum_{s',a'} m(s',a'|s0) P(s|s',a')
    auto inflow = [&](const Matrix& m) {
        Matrix out = Matrix::Zero(S, S);
        for (int a = 0; a < A; ++a) {
            Matrix slice(S, S);  // slice(s0, s') = m(s',a'|s0) for this a'
            for (int sp = 0; sp < S; ++sp) slice.col(sp) = m.col(sp * A + a);
            out += slice * mdp.transition[a];
        }
        return out;
    };

    const Matrix fm = state_marginal(f_un), gm = state_marginal(g_un),
                 hm = state_marginal(h.values);
    const Matrix fin = inflow(f_un), gin = inflow(g_un), hin = inflow(h.values);
    const Matrix seed = Matrix::Identity(S, S);

    FlowResiduals r;
    r.f_gamma = (fm - gm - mdp.gamma * fin).cwiseAbs().maxCoeff();
    r.f_gamma_eta = (fm - hm - gamma_eta * fin).cwiseAbs().maxCoeff();
    r.g_flow = (gm - seed - gamma_eta * gin).cwiseAbs().maxCoeff();
    r.h_flow = (hm - seed - mdp.gamma * hin).cwiseAbs().maxCoeff();
    return r;
}

Vector aggregate_measure(const Vector& p0, const OccupancyMeasure& m) {
    if (m.pair_conditioned) throw std::invalid_argument("expected a state-conditioned measure");
    if (p0.size() != m.values.rows()) throw std::invalid_argument("p0 length mismatch");
    return m.values.transpose() * p0;
}

double EtaExpectationRoutes::max_discrepancy() const {
    return std::max({std::abs(via_composition - via_mu), std::abs(via_composition - via_power_sum),
                     std::abs(via_mu - via_power_sum)});
}

EtaExpectationRoutes eta_expectation_routes(const FiniteMdp& mdp, const Policy& pi,
                                            const HorizonDistribution& eta, const Matrix& fn) {
    if (fn.rows() != mdp.n_states || fn.cols() != mdp.n_actions)
        throw std::invalid_argument("fn must be an S x A table");
    const int SA = mdp.n_pairs();
    Vector f_vec(SA);
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a) f_vec(mdp.pair_index(s, a)) = fn(s, a);

    // Route (i): p0-weighted rho rows composed with the future kernel.
    const Vector rho_agg = aggregate_measure(mdp.p0, rho(mdp, pi));
    const double via_composition = rho_agg.dot(future_kernel(mdp, pi, eta) * f_vec);

    // Route (ii): mu directly.
    const double via_mu = aggregate_measure(mdp.p0, mu(mdp, pi, eta)).dot(f_vec);

    // Route (iii): truncated double sum over gamma^t eta(k) M^{t+k}, built
    // from operator powers only (independent of the linear solves above).
    const Matrix M = policy_transition_operator(mdp, pi);
    Eigen::RowVectorXd start = Eigen::RowVectorXd::Zero(SA);
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a)
            start(mdp.pair_index(s, a)) = mdp.p0(s) * pi.probs(s, a);
    const int t_max =
        std::max<int>(8, static_cast<int>(std::ceil(std::log(1e-12 * (1.0 - mdp.gamma)) /
                                                    std::log(mdp.gamma))));
    const auto& w = eta.weights();
    const int n_max = t_max + static_cast<int>(w.size());
    // coefficient of M^n is sum_{k <= min(n,T)} eta(k) gamma^{n-k}
    std::vector<double> coef(n_max + 1, 0.0);
    for (int k = 0; k < static_cast<int>(w.size()); ++k) {
        double disc = 1.0;
        for (int t = 0; t <= t_max; ++t) {
            coef[k + t] += w[k] * disc;
            disc *= mdp.gamma;
        }
    }
    double via_power = 0.0;
    Eigen::RowVectorXd cur = start;
    for (int n = 0; n <= n_max; ++n) {
        via_power += coef[n] * cur.dot(f_vec);
        if (n < n_max) cur = cur * M;
    }
    return {via_composition, via_mu, via_power};
}

double eta_expectation(const FiniteMdp& mdp, const Policy& pi, const HorizonDistribution& eta,
                       const Matrix& fn) {
    const EtaExpectationRoutes r = eta_expectation_routes(mdp, pi, eta, fn);
    const double scale = std::max(1.0, std::abs(r.via_composition));
    if (r.max_discrepancy() > 1e-6 * scale)
        throw ConsistencyError("eta_expectation routes disagree: " +
                               std::to_string(r.via_composition) + " vs " +
                               std::to_string(r.via_mu) + " vs " +
                               std::to_string(r.via_power_sum));
    return r.via_composition;
}

double eta_weighted_entropy(const Vector& p0, const OccupancyMeasure& mu) {
    const Vector m = aggregate_measure(p0, mu);
    const int SA = static_cast<int>(m.size());
    const int S = static_cast<int>(p0.size());
    const int A = SA / S;
    double h = 0.0;
    for (int s = 0; s < S; ++s) {
        double mass = 0.0;
        for (int a = 0; a < A; ++a) mass += m(s * A + a);
        if (mass <= 0.0) continue;
        for (int a = 0; a < A; ++a) {
            const double x = m(s * A + a);
            if (x > 0.0) h -= x * std::log(x / mass);
        }
    }
    return h;
}

}  // namespace etairl
