#include "etairl/soft_rl.hpp"

#include <cmath>

#include <Eigen/LU>

namespace etairl {

namespace {

// sum_a pi log pi per state, with 0 log 0 = 0
Vector neg_entropy_rows(const Matrix& probs) {
    Vector out = Vector::Zero(probs.rows());
    for (int s = 0; s < probs.rows(); ++s)
        for (int a = 0; a < probs.cols(); ++a) {
            const double p = probs(s, a);
            if (p > 0.0) out(s) += p * std::log(p);
        }
    return out;
}

Matrix q_backup(const FiniteMdp& mdp, const Vector& v, const Matrix& cost) {
    Matrix q = cost;
    for (int a = 0; a < mdp.n_actions; ++a) q.col(a) += mdp.gamma * (mdp.transition[a] * v);
    return q;
}

const Matrix& pick_cost(const FiniteMdp& mdp, const Matrix* cost) {
    return cost ? *cost : mdp.cost;
}

}  // namespace

Policy softmax_policy(const Matrix& theta) {
    Policy pi;
    pi.probs = Matrix(theta.rows(), theta.cols());
    for (int s = 0; s < theta.rows(); ++s) {
        const double m = theta.row(s).maxCoeff();
        double z = 0.0;
        for (int a = 0; a < theta.cols(); ++a) {
            pi.probs(s, a) = std::exp(theta(s, a) - m);
            z += pi.probs(s, a);
        }
        pi.probs.row(s) /= z;
    }
    return pi;
}

ValueFunction bellman_policy(const ValueFunction& v, const FiniteMdp& mdp, const Policy& pi,
                             const SoftRlConfig& cfg, const Matrix* cost) {
    const Matrix q = q_backup(mdp, v.v, pick_cost(mdp, cost));
    ValueFunction out;
    out.v = (pi.probs.array() * q.array()).rowwise().sum().matrix() +
            cfg.temperature * neg_entropy_rows(pi.probs);
    return out;
}

std::pair<ValueFunction, Policy> bellman_optimality(const ValueFunction& v, const FiniteMdp& mdp,
                                                    const SoftRlConfig& cfg, const Matrix* cost) {
    if (cfg.temperature <= 0.0)
        throw std::invalid_argument("bellman_optimality requires temperature > 0");
    const double tau = cfg.temperature;
    const Matrix q = q_backup(mdp, v.v, pick_cost(mdp, cost));
    ValueFunction out;
    out.v = Vector(mdp.n_states);
    Policy greedy;
    greedy.probs = Matrix(mdp.n_states, mdp.n_actions);
    for (int s = 0; s < mdp.n_states; ++s) {
        const double m = q.row(s).minCoeff();
        double z = 0.0;
        for (int a = 0; a < mdp.n_actions; ++a) {
            greedy.probs(s, a) = std::exp(-(q(s, a) - m) / tau);
            z += greedy.probs(s, a);
        }
        out.v(s) = m - tau * std::log(z);
        greedy.probs.row(s) /= z;
    }
    return {out, greedy};
}

SoftSolution soft_value_iteration(const FiniteMdp& mdp, const SoftRlConfig& cfg,
                                  const Matrix* cost) {
    SoftSolution sol;
    sol.value.v = Vector::Zero(mdp.n_states);
    for (int it = 1; it <= cfg.max_iters; ++it) {
        auto [next, greedy] = bellman_optimality(sol.value, mdp, cfg, cost);
        sol.residual = (next.v - sol.value.v).cwiseAbs().maxCoeff();
        sol.value = next;
        sol.policy = greedy;
        sol.iterations = it;
        if (sol.residual < cfg.tolerance) return sol;
    }
    throw ConvergenceError("soft value iteration stopped at residual " +
                           std::to_string(sol.residual));
}

Vector policy_value(const FiniteMdp& mdp, const Policy& pi, const Matrix& cost, double tau) {
    const Matrix P = policy_state_kernel(mdp, pi);
    const Vector r = (pi.probs.array() * cost.array()).rowwise().sum().matrix() +
                     tau * neg_entropy_rows(pi.probs);
    const Matrix system = Matrix::Identity(mdp.n_states, mdp.n_states) - mdp.gamma * P;
    return Eigen::PartialPivLU<Matrix>(system).solve(r);
}

QFunction policy_q(const FiniteMdp& mdp, const Policy& pi, const Matrix& cost, double tau) {
    QFunction out;
    out.q = q_backup(mdp, policy_value(mdp, pi, cost, tau), cost);
    return out;
}

double eta_loss(const FiniteMdp& mdp, const Policy& pi, const Matrix& cost,
                const HorizonDistribution& eta, const SoftRlConfig& cfg) {
    const OccupancyMeasure m = mu(mdp, pi, eta);
    const Vector agg = aggregate_measure(mdp.p0, m);
    double cost_term = 0.0;
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a)
            cost_term += agg(mdp.pair_index(s, a)) * cost(s, a);
    if (cfg.temperature == 0.0) return cost_term;
    return cost_term - cfg.temperature * eta_weighted_entropy(mdp.p0, m);
}

OptimalityReport eta_optimality_check(const FiniteMdp& mdp,
                                      const std::vector<HorizonDistribution>& eta_grid,
                                      const SoftRlConfig& cfg, int n_competitors, RngSeed seed) {
    const SoftSolution sol = soft_value_iteration(mdp, cfg);
    Rng rng(seed);
    OptimalityReport report;
    for (std::size_t e = 0; e < eta_grid.size(); ++e) {
        const double loss_star = eta_loss(mdp, sol.policy, mdp.cost, eta_grid[e], cfg);
        for (int i = 0; i < n_competitors; ++i) {
            Policy comp;
            if (i % 2 == 0) {
                comp = random_policy(mdp.n_states, mdp.n_actions, rng);
            } else {
                comp.probs = sol.policy.probs;
                for (int s = 0; s < mdp.n_states; ++s) {
                    for (int a = 0; a < mdp.n_actions; ++a) comp.probs(s, a) += rng.uniform(0.0, 0.3);
                    comp.probs.row(s) /= comp.probs.row(s).sum();
                }
            }
            const double gap = loss_star - eta_loss(mdp, comp, mdp.cost, eta_grid[e], cfg);
            ++report.checks;
            report.worst_gap = std::max(report.worst_gap, gap);
            if (gap > 1e-6) {
                report.passed = false;
                report.violations.push_back({static_cast<int>(e), i, gap});
            }
        }
    }
    return report;
}

double eta_loss_softmax(const FiniteMdp& mdp, const Matrix& theta, const Matrix& cost,
                        const HorizonDistribution& eta) {
    SoftRlConfig cfg;
    cfg.temperature = 0.0;
    return eta_loss(mdp, softmax_policy(theta), cost, eta, cfg);
}

PolicyGradient generalized_policy_gradient(const FiniteMdp& mdp, const Matrix& theta,
                                           const Matrix& cost, const HorizonDistribution& eta) {
    const int S = mdp.n_states, A = mdp.n_actions, SA = S * A;
    const Policy pi = softmax_policy(theta);
    const Matrix M = policy_transition_operator(mdp, pi);

    const Vector v = policy_value(mdp, pi, cost, /*tau=*/0.0);
    const Matrix q = q_backup(mdp, v, cost);

    // v lifted to pairs, constant across actions
    Vector v_pair(SA);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) v_pair(mdp.pair_index(s, a)) = v(s);

    // z(s,a) = p0(s) pi(a|s): the p0-weighted initial pair row
    Eigen::RowVectorXd z(SA);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) z(mdp.pair_index(s, a)) = mdp.p0(s) * pi.probs(s, a);

    // softmax row adjustment: grad(s,a') = pi(a'|s) (x(s,a') - <pi_s, x(s,.)>)
    auto softmax_adjust = [&](const auto& x_at) {
        Matrix g = Matrix::Zero(S, A);
        for (int s = 0; s < S; ++s) {
            double mean = 0.0;
            for (int a = 0; a < A; ++a) mean += pi.probs(s, a) * x_at(s, a);
            for (int a = 0; a < A; ++a) g(s, a) = pi.probs(s, a) * (x_at(s, a) - mean);
        }
        return g;
    };

    PolicyGradient out;
    // ---- additional term: differentiate z * G * v_pair with v held fixed
    Vector y;  // G v_pair
    Matrix through_kernel = Matrix::Zero(S, A);
    if (eta.has_geometric_fixed_point()) {
        const double kappa = eta.gamma_eta();
        const Matrix system = Matrix::Identity(SA, SA) - kappa * M;
        Eigen::PartialPivLU<Matrix> lu(system);
        y = lu.solve((1.0 - kappa) * v_pair);
        Eigen::RowVectorXd w =
            Eigen::PartialPivLU<Matrix>(system.transpose()).solve(z.transpose()).transpose();
        // inflow(s) = sum_{s1,a1} w(s1,a1) P(s|s1,a1)
        Vector inflow = Vector::Zero(S);
        for (int a = 0; a < A; ++a) {
            Vector wa(S);
            for (int s = 0; s < S; ++s) wa(s) = w(mdp.pair_index(s, a));
            inflow += mdp.transition[a].transpose() * wa;
        }
        through_kernel = softmax_adjust([&](int s, int a) { return kappa * inflow(s) * y(s * A + a); });
    } else {
        const auto& wts = eta.weights();
        const int T = static_cast<int>(wts.size()) - 1;  // pmf support ends at T
        // forward rows z_i = z M^i and backward columns y_j = M^j v_pair
        std::vector<Eigen::RowVectorXd> zs(T + 1);
        std::vector<Vector> ys(T + 1);
        zs[0] = z;
        ys[0] = v_pair;
        for (int i = 1; i <= T; ++i) {
            zs[i] = zs[i - 1] * M;
            ys[i] = M * ys[i - 1];
        }
        y = Vector::Zero(SA);
        for (int n = 0; n <= T; ++n)
            if (wts[n] != 0.0) y += wts[n] * ys[n];
        // B(s,a2) = sum_i inflow_i(s) * Y_i(s,a2), Y_i = sum_j eta(i+j+1) y_j
        Matrix B = Matrix::Zero(S, A);
        for (int i = 0; i + 1 <= T; ++i) {
            Vector Yi = Vector::Zero(SA);
            bool any = false;
            for (int j = 0; i + j + 1 <= T; ++j) {
                const double wij = wts[i + j + 1];
                if (wij != 0.0) {
                    Yi += wij * ys[j];
                    any = true;
                }
            }
            if (!any) continue;
            Vector inflow_i = Vector::Zero(S);
            for (int a = 0; a < A; ++a) {
                Vector wa(S);
                for (int s = 0; s < S; ++s) wa(s) = zs[i](mdp.pair_index(s, a));
                inflow_i += mdp.transition[a].transpose() * wa;
            }
            for (int s = 0; s < S; ++s)
                for (int a2 = 0; a2 < A; ++a2) B(s, a2) += inflow_i(s) * Yi(s * A + a2);
        }
        through_kernel = softmax_adjust([&](int s, int a) { return B(s, a); });
    }
    const Matrix through_init = softmax_adjust([&](int s, int a) { return mdp.p0(s) * y(s * A + a); });
    out.additional = through_init + through_kernel;

    // ---- modified term: W(s) = sum_{s+} P_eta(s+|p0) rho_state(s|s+)
    const Vector peta_pairs = future_kernel(mdp, pi, eta).transpose() * z.transpose();
    Vector peta_state = Vector::Zero(S);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) peta_state(s) += peta_pairs(s * A + a);
    const OccupancyMeasure occ = rho(mdp, pi);  // rows: initial state
    Vector W = Vector::Zero(S);
    for (int s = 0; s < S; ++s)
        for (int sp = 0; sp < S; ++sp) {
            double row_mass = 0.0;
            for (int a = 0; a < A; ++a) row_mass += occ.values(sp, s * A + a);
            W(s) += peta_state(sp) * row_mass;
        }
    out.modified = Matrix::Zero(S, A);
    for (int s = 0; s < S; ++s) {
        double baseline = 0.0;
        for (int a = 0; a < A; ++a) baseline += pi.probs(s, a) * q(s, a);
        for (int a = 0; a < A; ++a)
            out.modified(s, a) = W(s) * pi.probs(s, a) * (q(s, a) - baseline);
    }

    out.total = out.additional + out.modified;
    return out;
}

double trpo_identity_residual(const FiniteMdp& mdp, const Policy& pi_new, const Policy& pi_old,
                              const Matrix& cost, const HorizonDistribution& eta) {
    SoftRlConfig unreg;
    unreg.temperature = 0.0;
    const double lhs = eta_loss(mdp, pi_new, cost, eta, unreg);

    const Vector v_old = policy_value(mdp, pi_old, cost, 0.0);
    const Matrix q_old = policy_q(mdp, pi_old, cost, 0.0).q;
    Matrix adv = q_old;
    for (int a = 0; a < mdp.n_actions; ++a) adv.col(a) -= v_old;

    // baseline: old value under the new policy's eta-weighted future states
    const Vector peta_agg = aggregate_measure(mdp.p0, p_eta(mdp, pi_new, eta));
    double baseline = 0.0;
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a)
            baseline += peta_agg(mdp.pair_index(s, a)) * v_old(s);

    const Vector mu_agg = aggregate_measure(mdp.p0, mu(mdp, pi_new, eta));
    double adv_term = 0.0;
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a)
            adv_term += mu_agg(mdp.pair_index(s, a)) * adv(s, a);

    return std::abs(lhs - baseline - adv_term);
}

FiniteMdp random_mdp(int n_states, int n_actions, double gamma, Rng& rng) {
    FiniteMdp mdp;
    mdp.n_states = n_states;
    mdp.n_actions = n_actions;
    mdp.gamma = gamma;
    mdp.transition.resize(n_actions);
    Matrix stacked = rng.random_stochastic(n_states * n_actions, n_states);
    for (int a = 0; a < n_actions; ++a) {
        mdp.transition[a] = Matrix(n_states, n_states);
        for (int s = 0; s < n_states; ++s) mdp.transition[a].row(s) = stacked.row(s * n_actions + a);
    }
    mdp.cost = Matrix(n_states, n_actions);
    for (int s = 0; s < n_states; ++s)
        for (int a = 0; a < n_actions; ++a) mdp.cost(s, a) = rng.uniform();
    mdp.p0 = rng.random_stochastic(1, n_states).row(0).transpose();
    return mdp;
}

Policy random_policy(int n_states, int n_actions, Rng& rng) {
    Policy pi;
    pi.probs = rng.random_stochastic(n_states, n_actions);
    return pi;
}

}  // namespace etairl
