#include <doctest.h>

#include <cmath>

#include "etairl/envs.hpp"
#include "etairl/eval.hpp"
#include "oracles.hpp"

using namespace etairl;

TEST_CASE("rbf kernel values and symmetry") {
    KernelConfig cfg{4.0, false};
    Vector x(2), y(2);
    x << 1.0, 2.0;
    y = x;
    CHECK(rbf_kernel(x, y, cfg) == 1.0);
    y << 1.0, 4.0;  // squared distance 4 = divisor
    CHECK(rbf_kernel(x, y, cfg) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(rbf_kernel(x, y, cfg) == rbf_kernel(y, x, cfg));
    Vector z(3);
    CHECK_THROWS_AS(rbf_kernel(x, z, cfg), std::invalid_argument);
    CHECK_THROWS_AS(rbf_kernel(x, y, KernelConfig{0.0, false}), std::invalid_argument);
}

TEST_CASE("unbiased mmd: degenerate and hand-expanded batches") {
    KernelConfig cfg{2.0, false};
    Vector p(1), q(1);
    p << 0.0;
    q << 1.0;
    std::vector<Vector> same = {p, p, p};
    CHECK(mmd2_unbiased(same, same, cfg) == doctest::Approx(0.0).epsilon(1e-12));

    // X = Y = {p, q}: statistic collapses to k(p,q) - 1 <= 0
    const double kpq = rbf_kernel(p, q, cfg);
    std::vector<Vector> xs = {p, q}, ys = {p, q};
    CHECK(mmd2_unbiased(xs, ys, cfg) == doctest::Approx(kpq - 1.0).epsilon(1e-12));

    CHECK_THROWS_AS(mmd2_unbiased({p}, ys, cfg), std::invalid_argument);
}

TEST_CASE("unbiased mmd is symmetric and permutation invariant") {
    Rng rng(3);
    KernelConfig cfg{3.0, false};
    std::vector<Vector> xs, ys;
    for (int i = 0; i < 12; ++i) {
        Vector x(3), y(3);
        for (int d = 0; d < 3; ++d) {
            x(d) = rng.uniform();
            y(d) = rng.uniform(0.5, 1.5);
        }
        xs.push_back(x);
        ys.push_back(y);
    }
    const double forward = mmd2_unbiased(xs, ys, cfg);
    CHECK(mmd2_unbiased(ys, xs, cfg) == doctest::Approx(forward).epsilon(1e-12));
    std::reverse(xs.begin(), xs.end());
    CHECK(mmd2_unbiased(xs, ys, cfg) == doctest::Approx(forward).epsilon(1e-12));
}

TEST_CASE("literal cross-term flag reproduces the printed coefficient") {
    KernelConfig standard{2.0, false}, literal{2.0, true};
    Rng rng(5);
    std::vector<Vector> xs, ys;
    for (int i = 0; i < 8; ++i) {
        Vector x(2), y(2);
        x << rng.uniform(), rng.uniform();
        y << rng.uniform(), rng.uniform();
        xs.push_back(x);
        ys.push_back(y);
    }
    double cross = 0.0;
    for (const auto& x : xs)
        for (const auto& y : ys) cross += rbf_kernel(x, y, standard);
    // the two variants differ exactly by the cross-term coefficient
    const double diff = mmd2_unbiased(xs, ys, standard) - mmd2_unbiased(xs, ys, literal);
    CHECK(diff == doctest::Approx(-2.0 * cross / 64.0 + cross / 64.0).epsilon(1e-12));
}

TEST_CASE("population mmd: zero iff equal, positive otherwise") {
    Rng rng(7);
    for (int i = 0; i < 20; ++i) {
        const int S = 2 + rng.uniform_int(3), A = 2 + rng.uniform_int(2);
        const Vector p = rng.random_stochastic(1, S * A).row(0).transpose();
        const Vector q = rng.random_stochastic(1, S * A).row(0).transpose();
        CHECK(mmd2_population(p, p, S, A) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(mmd2_population(p, q, S, A) >= 0.0);
        if (oracles::tv_distance(p, q) > 1e-6) CHECK(mmd2_population(p, q, S, A) > 0.0);
    }
}

TEST_CASE("population mmd agrees with the U-statistic on large samples") {
    const FiniteMdp mdp = chain_env(5, 0.1, 0.9);
    Rng rng(11);
    const Policy pi = random_policy(5, 2, rng);
    const Policy pi2 = random_policy(5, 2, rng);
    ReplayBuffer b1(100000), b2(100000);
    for (int i = 0; i < 150; ++i) {
        b1.push(rollout(mdp, pi, 120, rng));
        b2.push(rollout(mdp, pi2, 120, rng));
    }
    const MmdMetrics m = mmd_metrics(mdp, pi, pi2, b1, b2, 10000, RngSeed{13}, mdp.gamma, 0.5);
    CHECK(std::abs(m.mu_sample - m.mu_exact) < 0.02);
    CHECK(std::abs(m.rho_sample - m.rho_exact) < 0.02);
}

TEST_CASE("identical policies calibrate the sampled metric near zero") {
    const FiniteMdp mdp = chain_env(5, 0.1, 0.9);
    Rng rng(17);
    const Policy pi = random_policy(5, 2, rng);
    ReplayBuffer b1, b2;
    for (int i = 0; i < 40; ++i) {
        b1.push(rollout(mdp, pi, 100, rng));
        b2.push(rollout(mdp, pi, 100, rng));
    }
    const MmdMetrics m = mmd_metrics(mdp, pi, pi, b1, b2, 10000, RngSeed{19});
    CHECK(m.rho_exact == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(m.mu_exact == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(m.rho_sample) < 0.01);
    CHECK(std::abs(m.mu_sample) < 0.01);
}

TEST_CASE("slow-mixing chain separates short-term and stationary matching") {
    // expert pushes right and parks at the goal; the short-term imitator
    // copies it only near the start, the stationary imitator dawdles early
    // but still reaches the goal
    const FiniteMdp mdp = chain_env(20, 0.05, 0.99);
    SoftRlConfig cfg;
    const Policy expert = soft_value_iteration(mdp, cfg).policy;

    Policy short_term = expert;
    for (int s = 6; s < 20; ++s) {
        short_term.probs(s, 0) = 0.9;  // turn back mid-chain
        short_term.probs(s, 1) = 0.1;
    }
    Policy stationary = expert;
    for (int s = 0; s < 6; ++s) {
        stationary.probs(s, 0) = 0.45;  // noisy start, same long-run behaviour
        stationary.probs(s, 1) = 0.55;
    }

    const auto eta = HorizonDistribution::geometric(0.99);
    const Vector mu_e = exact_mu_marginal(mdp, expert, eta);
    const double short_mu = mmd2_population(exact_mu_marginal(mdp, short_term, eta), mu_e, 20, 2);
    const double stat_mu = mmd2_population(exact_mu_marginal(mdp, stationary, eta), mu_e, 20, 2);
    CHECK(short_mu > stat_mu);
}

TEST_CASE("normalized return anchors the expert at zero and random at one") {
    const FiniteMdp mdp = chain_env(10, 0.1, 0.95);
    SoftRlConfig cfg;
    const Policy expert = soft_value_iteration(mdp, cfg).policy;
    CHECK(normalized_return_exact(mdp, expert) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(normalized_return_exact(mdp, Policy::uniform(10, 2)) ==
          doctest::Approx(1.0).epsilon(1e-9));
    // Monte-Carlo variant lands inside a generous noise band
    CHECK(std::abs(normalized_return(mdp, expert, 400, 120, RngSeed{3})) < 0.1);
    CHECK(normalized_return(mdp, Policy::uniform(10, 2), 400, 120, RngSeed{3}) ==
          doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("normalized return flags coinciding anchors") {
    // constant cost: every policy scores the same
    FiniteMdp mdp = chain_env(4, 0.1, 0.9);
    mdp.cost = Matrix::Ones(4, 2);
    CHECK_THROWS_AS(normalized_return_exact(mdp, Policy::uniform(4, 2)), std::invalid_argument);
}
