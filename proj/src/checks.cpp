#include "etairl/checks.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "etairl/eval.hpp"
#include "etairl/idle.hpp"
#include "etairl/occupancy.hpp"
#include "etairl/serialize.hpp"
#include "etairl/soft_rl.hpp"

namespace etairl {

nlohmann::json CheckResult::to_json() const {
    return nlohmann::json{{"suite", suite}, {"passed", passed}, {"cases", cases},
                          {"worst", worst}, {"notes", notes}};
}

namespace {

HorizonDistribution random_eta(Rng& rng) {
    switch (rng.uniform_int(4)) {
        case 0: return HorizonDistribution::dirac(rng.uniform_int(4));
        case 1: return HorizonDistribution::geometric(rng.uniform(0.1, 0.9));
        case 2: return HorizonDistribution::poisson(rng.uniform(0.5, 4.0));
        default: return HorizonDistribution::uniform(1 + rng.uniform_int(20));
    }
}

std::vector<HorizonDistribution> release_eta_grid() {
    return {HorizonDistribution::dirac(0), HorizonDistribution::geometric(0.5),
            HorizonDistribution::geometric(0.99), HorizonDistribution::poisson(3.0),
            HorizonDistribution::uniform(20)};
}

}  // namespace

std::vector<NamedMdp> check_fixtures() {
    std::vector<NamedMdp> out;
    out.push_back({"chain-2", chain_env(2, 0.0, 0.9)});
    out.push_back({"chain-5-slip", chain_env(5, 0.1, 0.9)});
    out.push_back({"chain-20", chain_env(20, 0.1, 0.99)});
    const auto lakes = four_lakes_env(3, {}, {{1, 1}}, 0.9);
    out.push_back({"lakes-3x3", lakes.first});
    TaskSpace two_tasks;
    const FiniteMdp base = chain_env(4, 0.05, 0.9);
    two_tasks.task_costs = {base.cost, Matrix::Ones(4, 2) - base.cost};
    two_tasks.task_dist = Vector::Constant(2, 0.5);
    out.push_back({"multitask-chain", multitask_mdp(base, two_tasks)});
    return out;
}

CheckResult check_tower(int n_draws, RngSeed seed) {
    CheckResult res;
    res.suite = "tower";
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < n_draws; ++i) {
        const int S = 2 + rng.uniform_int(4), A = 2 + rng.uniform_int(2);
        const FiniteMdp mdp = random_mdp(S, A, rng.uniform(0.5, 0.95), rng);
        const Policy pi = random_policy(S, A, rng);
        const HorizonDistribution eta = random_eta(rng);
        Matrix fn(S, A);
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) fn(s, a) = rng.uniform(-1.0, 1.0);
        const auto routes = eta_expectation_routes(mdp, pi, eta, fn);
        const double scale = std::max(1.0, std::abs(routes.via_composition));
        worst = std::max(worst, routes.max_discrepancy() / scale);
    }
    res.cases = n_draws;
    res.worst = worst;
    res.passed = worst < 1e-6;
    res.notes.push_back("max relative three-way discrepancy " + format_double(worst));
    return res;
}

CheckResult check_bijection(int n_draws, RngSeed seed) {
    CheckResult res;
    res.suite = "bijection";
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < n_draws; ++i) {
        const int S = 2 + rng.uniform_int(4), A = 2 + rng.uniform_int(2);
        const FiniteMdp mdp = random_mdp(S, A, rng.uniform(0.5, 0.95), rng);
        const Policy pi = random_policy(S, A, rng);
        const auto from_rho = policy_from_occupancy(rho(mdp, pi), S, A);
        worst = std::max(worst, (from_rho.policy.probs - pi.probs).cwiseAbs().maxCoeff());
        const auto from_mu = policy_from_occupancy(mu(mdp, pi, random_eta(rng)), S, A);
        worst = std::max(worst, (from_mu.policy.probs - pi.probs).cwiseAbs().maxCoeff());
    }
    res.cases = 2 * n_draws;
    res.worst = worst;
    res.passed = worst < 1e-9;
    res.notes.push_back("max round-trip error " + format_double(worst));
    return res;
}

CheckResult check_flow(int n_draws, RngSeed seed) {
    CheckResult res;
    res.suite = "flow";
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < n_draws; ++i) {
        const int S = 2 + rng.uniform_int(4), A = 2 + rng.uniform_int(2);
        const FiniteMdp mdp = random_mdp(S, A, rng.uniform(0.5, 0.95), rng);
        const double kappa = rng.uniform(0.1, 0.9);
        const HorizonDistribution eta = HorizonDistribution::geometric(kappa);
        const Policy pi1 = random_policy(S, A, rng), pi2 = random_policy(S, A, rng);

        const OccupancyMeasure f1 = mu(mdp, pi1, eta), g1 = p_eta(mdp, pi1, eta),
                               h1 = rho(mdp, pi1);
        worst = std::max(worst, flow_residuals(f1, g1, h1, mdp, kappa).max_abs());

        // convex combination of two valid triples stays in the constraint set
        const OccupancyMeasure f2 = mu(mdp, pi2, eta), g2 = p_eta(mdp, pi2, eta),
                               h2 = rho(mdp, pi2);
        const double lam = rng.uniform(0.1, 0.9);
        OccupancyMeasure fc = f1, gc = g1, hc = h1;
        fc.values = lam * f1.values + (1 - lam) * f2.values;
        gc.values = lam * g1.values + (1 - lam) * g2.values;
        hc.values = lam * h1.values + (1 - lam) * h2.values;
        worst = std::max(worst, flow_residuals(fc, gc, hc, mdp, kappa).max_abs());
    }
    res.cases = 2 * n_draws;
    res.worst = worst;
    res.passed = worst < 1e-8;
    res.notes.push_back("max affine-constraint residual " + format_double(worst));
    return res;
}

CheckResult check_eta_optimality(int n_competitors, RngSeed seed) {
    CheckResult res;
    res.suite = "eta-optimality";
    SoftRlConfig cfg;
    const auto grid = release_eta_grid();
    double worst = -std::numeric_limits<double>::infinity();
    int violations = 0;
    for (const auto& fixture : check_fixtures()) {
        const auto report = eta_optimality_check(fixture.mdp, grid, cfg, n_competitors,
                                                 derive_seed(seed, res.cases));
        res.cases += report.checks;
        worst = std::max(worst, report.worst_gap);
        violations += static_cast<int>(report.violations.size());
        if (!report.violations.empty())
            res.notes.push_back(fixture.name + ": " + std::to_string(report.violations.size()) +
                                " violations, worst gap " + format_double(report.worst_gap));
    }
    res.worst = worst;
    res.passed = violations == 0;
    res.notes.push_back("worst competitor gap " + format_double(worst) +
                        " (negative = optimal policy strictly ahead)");
    return res;
}

CheckResult check_gradient(int n_instances, RngSeed seed) {
    CheckResult res;
    res.suite = "gradient";
    Rng rng(seed);
    double worst_rel = 0.0, largest_additional = 0.0;
    const double step = 1e-5;
    for (int i = 0; i < n_instances; ++i) {
        const int S = 2 + rng.uniform_int(2), A = 2 + rng.uniform_int(2);
        const FiniteMdp mdp = random_mdp(S, A, rng.uniform(0.5, 0.9), rng);
        HorizonDistribution eta = i % 4 == 0 ? HorizonDistribution::dirac(0) : random_eta(rng);
        Matrix theta(S, A);
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) theta(s, a) = rng.uniform(-1.0, 1.0);
        const PolicyGradient grad = generalized_policy_gradient(mdp, theta, mdp.cost, eta);
        if (eta.kind() != HorizonKind::Dirac || eta.param() != 0.0)
            largest_additional =
                std::max(largest_additional, grad.additional.cwiseAbs().maxCoeff());
        double scale = std::max(1e-8, grad.total.cwiseAbs().maxCoeff());
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) {
                Matrix tp = theta, tm = theta;
                tp(s, a) += step;
                tm(s, a) -= step;
                const double fd = (eta_loss_softmax(mdp, tp, mdp.cost, eta) -
                                   eta_loss_softmax(mdp, tm, mdp.cost, eta)) /
                                  (2 * step);
                worst_rel = std::max(worst_rel, std::abs(grad.total(s, a) - fd) / scale);
            }
        res.cases += S * A;
    }
    res.worst = worst_rel;
    res.passed = worst_rel < 1e-4 && largest_additional > 1e-8;
    res.notes.push_back("max relative error vs central differences " + format_double(worst_rel));
    res.notes.push_back("largest future-distribution term entry " +
                        format_double(largest_additional) + " (must be nonzero)");
    return res;
}

CheckResult check_trpo(int n_draws, RngSeed seed) {
    CheckResult res;
    res.suite = "trpo";
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < n_draws; ++i) {
        const int S = 2 + rng.uniform_int(4), A = 2 + rng.uniform_int(2);
        const FiniteMdp mdp = random_mdp(S, A, rng.uniform(0.5, 0.95), rng);
        const Policy pi_new = random_policy(S, A, rng), pi_old = random_policy(S, A, rng);
        worst = std::max(worst,
                         trpo_identity_residual(mdp, pi_new, pi_old, mdp.cost, random_eta(rng)));
    }
    res.cases = n_draws;
    res.worst = worst;
    res.passed = worst < 1e-8;
    res.notes.push_back("max identity residual " + format_double(worst));
    return res;
}

CheckResult check_entropy_concavity(int n_triples, RngSeed seed) {
    CheckResult res;
    res.suite = "entropy-concavity";
    Rng rng(seed);
    double worst_violation = 0.0, worst_equality = 0.0;
    for (int i = 0; i < n_triples; ++i) {
        const int S = 2 + rng.uniform_int(3), A = 2 + rng.uniform_int(2);
        Vector p0 = rng.random_stochastic(1, S).row(0).transpose();
        const double lam = 0.1 + 0.8 * rng.uniform();
        OccupancyMeasure m1, m2;
        m1.values = Matrix(S, S * A);
        m2.values = Matrix(S, S * A);
        for (int r = 0; r < S; ++r)
            for (int c = 0; c < S * A; ++c) {
                m1.values(r, c) = rng.uniform();
                m2.values(r, c) = rng.uniform();
            }
        OccupancyMeasure blend = m1;
        blend.values = lam * m1.values + (1 - lam) * m2.values;
        const double lhs = eta_weighted_entropy(p0, blend);
        const double rhs =
            lam * eta_weighted_entropy(p0, m1) + (1 - lam) * eta_weighted_entropy(p0, m2);
        worst_violation = std::max(worst_violation, rhs - lhs);

        // shared-policy pair: mixtures of measures of one policy stay tight
        const FiniteMdp mdp = random_mdp(S, A, rng.uniform(0.5, 0.95), rng);
        const Policy pi = random_policy(S, A, rng);
        const OccupancyMeasure s1 = mu(mdp, pi, HorizonDistribution::dirac(0));
        const OccupancyMeasure s2 = mu(mdp, pi, HorizonDistribution::geometric(0.5));
        OccupancyMeasure sb = s1;
        sb.values = lam * s1.values + (1 - lam) * s2.values;
        const double gap = eta_weighted_entropy(mdp.p0, sb) -
                           lam * eta_weighted_entropy(mdp.p0, s1) -
                           (1 - lam) * eta_weighted_entropy(mdp.p0, s2);
        worst_equality = std::max(worst_equality, std::abs(gap));
    }
    res.cases = 2 * n_triples;
    res.worst = std::max(worst_violation, worst_equality);
    res.passed = worst_violation <= 1e-10 && worst_equality <= 1e-8;
    res.notes.push_back("worst concavity violation " + format_double(worst_violation));
    res.notes.push_back("worst shared-policy equality gap " + format_double(worst_equality));
    return res;
}

CheckResult check_idle_nash(int n_deviations, RngSeed seed) {
    CheckResult res;
    res.suite = "idle-nash";
    Rng rng(seed);
    const FiniteMdp mdp = random_mdp(3, 2, 0.9, rng);
    const Policy pi = random_policy(3, 2, rng);
    const HorizonDistribution eta = HorizonDistribution::geometric(0.7);

    IdleDiscriminator half = IdleDiscriminator::flat(3, 2);
    ConditionalGenerator truth;
    truth.probs = p_eta(mdp, pi, eta).values;

    const auto report = nash_check(half, truth, mdp, pi, eta, n_deviations, derive_seed(seed, 1));
    res.cases = report.deviations;
    res.worst = std::max({report.worst_generator_gain, report.worst_discriminator_gain,
                          report.worst_bayes_shortfall});
    res.passed = report.passed;
    res.notes.push_back("worst generator deviation gain " +
                        format_double(report.worst_generator_gain));
    res.notes.push_back("worst discriminator deviation gain " +
                        format_double(report.worst_discriminator_gain));
    res.notes.push_back("worst best-response shortfall " +
                        format_double(report.worst_bayes_shortfall));

    const double value = idle_value(half, truth, mdp, pi, eta);
    const double expected = -2.0 * std::log(2.0);
    if (std::abs(value - expected) > 1e-12) {
        res.passed = false;
        res.notes.push_back("equilibrium value " + format_double(value) + " != -log 4");
    }
    return res;
}

CheckResult check_mmd(int n_repeats, RngSeed seed) {
    CheckResult res;
    res.suite = "mmd";
    Rng rng(seed);
    const int dim = 4, n = 200;
    KernelConfig kernel{static_cast<double>(dim), false};

    // identical distributions: the unbiased statistic averages to zero
    double mean = 0.0, m2 = 0.0;
    for (int r = 0; r < n_repeats; ++r) {
        std::vector<Vector> xs, ys;
        for (int i = 0; i < n; ++i) {
            Vector x(dim), y(dim);
            for (int d = 0; d < dim; ++d) {
                x(d) = rng.uniform();
                y(d) = rng.uniform();
            }
            xs.push_back(x);
            ys.push_back(y);
        }
        const double v = mmd2_unbiased(xs, ys, kernel);
        const double delta = v - mean;
        mean += delta / (r + 1);
        m2 += delta * (v - mean);
    }
    const double stderr_mean = std::sqrt(m2 / (n_repeats - 1) / n_repeats);
    const bool calibrated = std::abs(mean) <= 3.0 * stderr_mean;
    res.notes.push_back("null mean " + format_double(mean) + " (3 sigma = " +
                        format_double(3.0 * stderr_mean) + ")");

    // population form: non-negative, zero exactly on equal distributions
    double worst_negative = 0.0, worst_self = 0.0;
    for (int r = 0; r < 50; ++r) {
        const int S = 2 + rng.uniform_int(3), A = 2 + rng.uniform_int(2);
        const Vector p = rng.random_stochastic(1, S * A).row(0).transpose();
        const Vector q = rng.random_stochastic(1, S * A).row(0).transpose();
        worst_negative = std::min(worst_negative, mmd2_population(p, q, S, A));
        worst_self = std::max(worst_self, std::abs(mmd2_population(p, p, S, A)));
    }
    res.cases = n_repeats + 100;
    res.worst = std::max({std::abs(mean) - 3.0 * stderr_mean, -worst_negative, worst_self});
    res.passed = calibrated && worst_negative >= -1e-15 && worst_self < 1e-12;
    res.notes.push_back("population self-distance max " + format_double(worst_self));
    return res;
}

const std::vector<std::string>& check_suite_names() {
    static const std::vector<std::string> names = {
        "tower", "bijection", "flow", "eta-optimality", "gradient",
        "trpo",  "entropy-concavity", "idle-nash", "mmd"};
    return names;
}

std::vector<CheckResult> run_check_suite(const std::string& name) {
    if (name == "all") {
        std::vector<CheckResult> out;
        for (const auto& suite : check_suite_names()) {
            auto sub = run_check_suite(suite);
            out.insert(out.end(), sub.begin(), sub.end());
        }
        return out;
    }
    if (name == "tower") return {check_tower()};
    if (name == "bijection") return {check_bijection()};
    if (name == "flow") return {check_flow()};
    if (name == "eta-optimality") return {check_eta_optimality()};
    if (name == "gradient") return {check_gradient()};
    if (name == "trpo") return {check_trpo()};
    if (name == "entropy-concavity") return {check_entropy_concavity()};
    if (name == "idle-nash") return {check_idle_nash()};
    if (name == "mmd") return {check_mmd()};
    throw std::invalid_argument("unknown check suite: " + name);
}

}  // namespace etairl
