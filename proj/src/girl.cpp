#include "etairl/girl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

namespace etairl {

namespace {

constexpr double kDiscClamp = 1e-6;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Matrix reshape_to_table(const Vector& flat, int n_states, int n_actions) {
    Matrix out(n_states, n_actions);
    for (int s = 0; s < n_states; ++s)
        for (int a = 0; a < n_actions; ++a) out(s, a) = flat(s * n_actions + a);
    return out;
}

}  // namespace

FeatureBasis FeatureBasis::state_indicators(int n_states, int n_actions) {
    Matrix f = Matrix::Zero(n_states * n_actions, n_states);
    for (int s = 0; s < n_states; ++s)
        for (int a = 0; a < n_actions; ++a) f(s * n_actions + a, s) = 1.0;
    return {f};
}

CostModel CostModel::tabular(Matrix c, CostConstraint constraint) {
    CostModel out;
    out.kind = Kind::Tabular;
    out.table = std::move(c);
    out.constraint = constraint;
    return out;
}

CostModel CostModel::linear(const Vector& w, const FeatureBasis& basis, int n_states,
                            int n_actions, CostConstraint constraint) {
    CostModel out;
    out.kind = Kind::Linear;
    out.weights = w;
    out.table = reshape_to_table(basis.features * w, n_states, n_actions);
    out.constraint = constraint;
    return out;
}

CostModel CostModel::from_discriminator(const Matrix& d_table) {
    CostModel out;
    out.kind = Kind::FromDiscriminator;
    out.table = d_table.cwiseMax(kDiscClamp).cwiseMin(1.0 - kDiscClamp).array().log().matrix();
    out.constraint = CostConstraint::Negative;
    return out;
}

std::vector<std::string> CostModel::validate() const {
    std::vector<std::string> report;
    switch (constraint) {
        case CostConstraint::None:
            break;
        case CostConstraint::L2Ball:
            if (weights.size() == 0)
                report.push_back("l2-ball constraint needs linear weights");
            else if (weights.norm() > 1.0 + 1e-9)
                report.push_back("weights outside the unit l2 ball");
            break;
        case CostConstraint::Simplex: {
            if (weights.size() == 0) {
                report.push_back("simplex constraint needs linear weights");
                break;
            }
            if (weights.minCoeff() < -1e-12) report.push_back("negative simplex weight");
            if (std::abs(weights.sum() - 1.0) > 1e-9) report.push_back("simplex weights do not sum to 1");
            break;
        }
        case CostConstraint::Negative:
            if (table.maxCoeff() >= 0.0) report.push_back("cost must be strictly negative");
            break;
    }
    return report;
}

Discriminator Discriminator::tabular(int n_states, int n_actions) {
    Discriminator d;
    d.kind = Kind::Tabular;
    d.logits = Matrix::Zero(n_states, n_actions);
    return d;
}

Discriminator Discriminator::linear_logistic(int dim) {
    Discriminator d;
    d.kind = Kind::LinearLogistic;
    d.weights = Vector::Zero(dim);
    return d;
}

double Discriminator::prob(int s, int a, int n_actions, const FeatureBasis* basis) const {
    if (kind == Kind::Tabular) return sigmoid(logits(s, a));
    if (!basis) throw std::invalid_argument("linear-logistic discriminator needs a basis");
    return sigmoid(basis->features.row(s * n_actions + a).dot(weights));
}

Matrix Discriminator::prob_table(int n_states, int n_actions, const FeatureBasis* basis,
                                 double clamp) const {
    Matrix out(n_states, n_actions);
    for (int s = 0; s < n_states; ++s)
        for (int a = 0; a < n_actions; ++a) out(s, a) = prob(s, a, n_actions, basis);
    if (clamp > 0.0) out = out.cwiseMax(clamp).cwiseMin(1.0 - clamp);
    return out;
}

double cost_weighted_divergence(const FiniteMdp& mdp, const Policy& pi, const Policy& pi_expert,
                                const Matrix& cost, const HorizonDistribution& eta) {
    const Vector diff = aggregate_measure(mdp.p0, mu(mdp, pi, eta)) -
                        aggregate_measure(mdp.p0, mu(mdp, pi_expert, eta));
    double acc = 0.0;
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a) acc += diff(mdp.pair_index(s, a)) * cost(s, a);
    return acc;
}

double psi_gan(const CostModel& cost, const OccupancyMeasure& mu_expert, const FiniteMdp& mdp) {
    if (cost.table.maxCoeff() >= 0.0) return std::numeric_limits<double>::infinity();
    const Vector agg = aggregate_measure(mdp.p0, mu_expert);
    double acc = 0.0;
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a) {
            const double c = cost.table(s, a);
            acc += agg(mdp.pair_index(s, a)) * (-c - std::log1p(-std::exp(c)));
        }
    return acc;
}

double dual_objective(const FiniteMdp& mdp, const Policy& pi, const Policy& pi_expert,
                      const CostModel& cost, const HorizonDistribution& eta, double tau) {
    double penalty = 0.0;
    switch (cost.constraint) {
        case CostConstraint::None:
            break;
        case CostConstraint::L2Ball:
        case CostConstraint::Simplex:
            if (!cost.validate().empty()) penalty = std::numeric_limits<double>::infinity();
            break;
        case CostConstraint::Negative:
            penalty = psi_gan(cost, mu(mdp, pi_expert, eta), mdp);
            break;
    }
    if (std::isinf(penalty)) return -std::numeric_limits<double>::infinity();
    const OccupancyMeasure mu_pi = mu(mdp, pi, eta);
    const double omega = tau * eta_weighted_entropy(mdp.p0, mu_pi);
    return -omega - penalty + cost_weighted_divergence(mdp, pi, pi_expert, cost.table, eta);
}

Vector feature_gap(const Vector& p0, const OccupancyMeasure& mu_pi,
                   const OccupancyMeasure& mu_expert, const FeatureBasis& basis) {
    const Vector diff = aggregate_measure(p0, mu_pi) - aggregate_measure(p0, mu_expert);
    return basis.features.transpose() * diff;
}

LinearCostSolution optimal_linear_cost(const OccupancyMeasure& mu_pi,
                                       const OccupancyMeasure& mu_expert,
                                       const FeatureBasis& basis, const Vector& p0) {
    const Vector g = feature_gap(p0, mu_pi, mu_expert, basis);
    LinearCostSolution out;
    out.value = g.norm();
    out.weights = out.value > 0.0 ? Vector(g / out.value) : Vector(Vector::Zero(g.size()));
    return out;
}

ConvexCostSolution optimal_convex_cost(const OccupancyMeasure& mu_pi,
                                       const OccupancyMeasure& mu_expert,
                                       const FeatureBasis& basis, const Vector& p0) {
    const Vector g = feature_gap(p0, mu_pi, mu_expert, basis);
    ConvexCostSolution out;
    out.index = 0;
    out.value = g(0);
    for (int i = 1; i < g.size(); ++i)
        if (g(i) > out.value) {  // strict: lowest index wins ties
            out.value = g(i);
            out.index = i;
        }
    return out;
}

Vector project_l2_ball(const Vector& w) {
    const double n = w.norm();
    return n <= 1.0 ? w : Vector(w / n);
}

Vector project_simplex(const Vector& w) {
    // Euclidean projection by the sort-and-shift rule.
    const int d = static_cast<int>(w.size());
    std::vector<double> u(w.data(), w.data() + d);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double acc = 0.0, theta = 0.0;
    int rho = 0;
    for (int j = 0; j < d; ++j) {
        acc += u[j];
        const double candidate = (acc - 1.0) / (j + 1);
        if (u[j] - candidate > 0.0) {
            rho = j + 1;
            theta = candidate;
        }
    }
    (void)rho;
    Vector out(d);
    for (int i = 0; i < d; ++i) out(i) = std::max(w(i) - theta, 0.0);
    return out;
}

double batch_linear_loss(const Vector& w, const Vector& mean_pol_features,
                         const Vector& mean_exp_features) {
    const Vector delta = mean_pol_features - mean_exp_features;
    const double r = w.dot(delta) - delta.norm();
    return r * r;
}

double batch_convex_loss(const Vector& w, const Vector& mean_pol_features,
                         const Vector& mean_exp_features) {
    const Vector delta = mean_pol_features - mean_exp_features;
    const double r = w.dot(delta) - delta.maxCoeff();
    return r * r;
}

double discriminator_objective(const Discriminator& disc, const std::vector<MuPair>& policy_batch,
                               const std::vector<MuPair>& expert_batch, int n_actions,
                               const FeatureBasis* basis) {
    double acc = 0.0;
    for (const auto& p : policy_batch) {
        const double d = std::clamp(disc.prob(p.s_plus, p.a_plus, n_actions, basis), kDiscClamp,
                                    1.0 - kDiscClamp);
        acc += std::log(d);
    }
    for (const auto& p : expert_batch) {
        const double d = std::clamp(disc.prob(p.s_plus, p.a_plus, n_actions, basis), kDiscClamp,
                                    1.0 - kDiscClamp);
        acc += std::log1p(-d);
    }
    return acc;
}

void discriminator_ascent_step(Discriminator& disc, const std::vector<MuPair>& policy_batch,
                               const std::vector<MuPair>& expert_batch, int n_actions,
                               double learning_rate, const FeatureBasis* basis) {
    if (disc.kind == Discriminator::Kind::Tabular) {
        Matrix grad = Matrix::Zero(disc.logits.rows(), disc.logits.cols());
        for (const auto& p : policy_batch)
            grad(p.s_plus, p.a_plus) += (1.0 - disc.prob(p.s_plus, p.a_plus, n_actions)) /
                                        policy_batch.size();
        for (const auto& p : expert_batch)
            grad(p.s_plus, p.a_plus) -= disc.prob(p.s_plus, p.a_plus, n_actions) /
                                        expert_batch.size();
        disc.logits += learning_rate * grad;
    } else {
        if (!basis) throw std::invalid_argument("linear-logistic discriminator needs a basis");
        Vector grad = Vector::Zero(disc.weights.size());
        for (const auto& p : policy_batch) {
            const int idx = p.s_plus * n_actions + p.a_plus;
            grad += (1.0 - disc.prob(p.s_plus, p.a_plus, n_actions, basis)) *
                    basis->features.row(idx).transpose() / policy_batch.size();
        }
        for (const auto& p : expert_batch) {
            const int idx = p.s_plus * n_actions + p.a_plus;
            grad -= disc.prob(p.s_plus, p.a_plus, n_actions, basis) *
                    basis->features.row(idx).transpose() / expert_batch.size();
        }
        disc.weights += learning_rate * grad;
    }
}

namespace {

// Shared penalized-cost update interface for the training template.
struct CostUpdater {
    virtual ~CostUpdater() = default;
    virtual void step(const std::vector<MuPair>& pol, const std::vector<MuPair>& exp) = 0;
    virtual CostModel cost() const = 0;
    virtual void fill_result(IrlResult& out) const = 0;
};

struct GanUpdater : CostUpdater {
    Discriminator disc;
    double lr;
    int n_states, n_actions;
    const FeatureBasis* basis;

    GanUpdater(int S, int A, const IrlConfig& cfg, const FeatureBasis* b)
        : lr(cfg.disc_learning_rate), n_states(S), n_actions(A), basis(b) {
        disc = cfg.disc_kind == Discriminator::Kind::Tabular
                   ? Discriminator::tabular(S, A)
                   : Discriminator::linear_logistic(b->dim());
    }
    void step(const std::vector<MuPair>& pol, const std::vector<MuPair>& exp) override {
        discriminator_ascent_step(disc, pol, exp, n_actions, lr, basis);
    }
    CostModel cost() const override {
        return CostModel::from_discriminator(disc.prob_table(n_states, n_actions, basis));
    }
    void fill_result(IrlResult& out) const override { out.discriminator = disc; }
};

struct FeatureUpdater : CostUpdater {
    Vector w;
    const FeatureBasis& basis;
    double lr;
    int n_states, n_actions;
    bool simplex;

    FeatureUpdater(const FeatureBasis& b, const IrlConfig& cfg, int S, int A, bool use_simplex)
        : basis(b), lr(cfg.disc_learning_rate), n_states(S), n_actions(A), simplex(use_simplex) {
        w = simplex ? Vector(Vector::Constant(b.dim(), 1.0 / b.dim()))
                    : Vector(Vector::Zero(b.dim()));
    }
    void step(const std::vector<MuPair>& pol, const std::vector<MuPair>& exp) override {
        Vector fp = Vector::Zero(basis.dim()), fe = Vector::Zero(basis.dim());
        for (const auto& p : pol) fp += basis.features.row(p.s_plus * n_actions + p.a_plus);
        for (const auto& p : exp) fe += basis.features.row(p.s_plus * n_actions + p.a_plus);
        fp /= pol.size();
        fe /= exp.size();
        const Vector delta = fp - fe;
        const double target = simplex ? delta.maxCoeff() : delta.norm();
        const Vector grad = 2.0 * (w.dot(delta) - target) * delta;
        w = simplex ? project_simplex(w - lr * grad) : project_l2_ball(w - lr * grad);
    }
    CostModel cost() const override {
        return CostModel::linear(w, basis, n_states, n_actions,
                                 simplex ? CostConstraint::Simplex : CostConstraint::L2Ball);
    }
    void fill_result(IrlResult& out) const override { out.cost_weights = w; }
};

}  // namespace

IrlResult girl_iterate(const FiniteMdp& mdp, const ReplayBuffer& expert_buffer,
                       PenaltyKind penalty, const IrlConfig& cfg, const FeatureBasis* basis,
                       const EvalContext* eval) {
    if (expert_buffer.empty()) throw std::invalid_argument("expert buffer is empty");
    const int S = mdp.n_states, A = mdp.n_actions;

    std::unique_ptr<CostUpdater> updater;
    switch (penalty) {
        case PenaltyKind::Gan:
            if (cfg.disc_kind == Discriminator::Kind::LinearLogistic && !basis)
                throw std::invalid_argument("linear-logistic discriminator needs a basis");
            updater = std::make_unique<GanUpdater>(S, A, cfg, basis);
            break;
        case PenaltyKind::Linear:
        case PenaltyKind::Convex:
            if (!basis) throw std::invalid_argument("feature-linear penalties need a basis");
            updater = std::make_unique<FeatureUpdater>(*basis, cfg, S, A,
                                                       penalty == PenaltyKind::Convex);
            break;
    }

    FiniteMdp solver_mdp = mdp;
    if (cfg.gamma_rl > 0.0) solver_mdp.gamma = cfg.gamma_rl;
    SoftRlConfig rl;
    rl.temperature = cfg.temperature;

    const HorizonDistribution metric_eta =
        HorizonDistribution::geometric(eval ? eval->kappa_mu : 0.99);
    Vector mu_expert_exact, rho_expert_exact;
    if (eval && eval->expert) {
        mu_expert_exact = exact_mu_marginal(mdp, *eval->expert, metric_eta);
        rho_expert_exact = exact_rho_marginal(mdp, *eval->expert);
    }

    Rng roll_rng(derive_seed(cfg.seed, 0x01));
    Rng batch_rng(derive_seed(cfg.seed, 0x02));

    IrlResult out;
    out.policy = Policy::uniform(S, A);
    ReplayBuffer policy_buffer(cfg.policy_buffer_capacity);
    for (int iter = 0; iter < cfg.n_outer_iters; ++iter) {
        for (int r = 0; r < cfg.rollouts_per_iter; ++r)
            policy_buffer.push(rollout(mdp, out.policy, cfg.horizon, roll_rng));

        double last_obj = 0.0;
        for (int e = 0; e < cfg.disc_epochs; ++e) {
            const auto pol = sample_mu_pairs(policy_buffer, cfg.gamma_irl, cfg.eta,
                                             cfg.batch_size, batch_rng);
            const auto exp = sample_mu_pairs(expert_buffer, cfg.gamma_irl, cfg.eta,
                                             cfg.batch_size, batch_rng);
            updater->step(pol, exp);
            if (e + 1 == cfg.disc_epochs && penalty == PenaltyKind::Gan)
                last_obj = discriminator_objective(static_cast<GanUpdater&>(*updater).disc, pol,
                                                   exp, A, basis);
        }

        out.final_cost = updater->cost();
        out.policy = soft_value_iteration(solver_mdp, rl, &out.final_cost.table).policy;

        IrlMetricsRow row;
        row.iter = iter;
        row.disc_objective = last_obj;
        if (eval && eval->expert) {
            row.mmd_rho = mmd2_population(exact_rho_marginal(mdp, out.policy), rho_expert_exact, S, A);
            row.mmd_mu =
                mmd2_population(exact_mu_marginal(mdp, out.policy, metric_eta), mu_expert_exact, S, A);
            row.true_return = normalized_return_exact(mdp, out.policy);
        }
        out.metrics.push_back(row);
    }
    updater->fill_result(out);
    return out;
}

IrlResult megan_train(const FiniteMdp& mdp, const ReplayBuffer& expert_buffer,
                      const IrlConfig& cfg, const EvalContext* eval) {
    return girl_iterate(mdp, expert_buffer, PenaltyKind::Gan, cfg, nullptr, eval);
}

IrlResult emma_train(const FiniteMdp& mdp, const ReplayBuffer& expert_buffer,
                     const FeatureBasis& basis, const IrlConfig& cfg, const EvalContext* eval) {
    return girl_iterate(mdp, expert_buffer, PenaltyKind::Linear, cfg, &basis, eval);
}

IrlResult wiem_train(const FiniteMdp& mdp, const ReplayBuffer& expert_buffer,
                     const FeatureBasis& basis, const IrlConfig& cfg, const EvalContext* eval) {
    return girl_iterate(mdp, expert_buffer, PenaltyKind::Convex, cfg, &basis, eval);
}

}  // namespace etairl
