#include <doctest.h>

#include <cmath>

#include "etairl/eval.hpp"
#include "etairl/sampling.hpp"
#include "oracles.hpp"

using namespace etairl;

TEST_CASE("replay buffer evicts whole trajectories FIFO past its capacity") {
    ReplayBuffer buf(10);
    Trajectory tau;
    tau.states = {0, 0, 0, 0};
    tau.actions = {0, 0, 0, 0};
    tau.costs = {0, 0, 0, 0};
    for (int i = 0; i < 5; ++i) buf.push(tau);
    CHECK(buf.total_transitions() <= 10 + 4);  // at most one overflow trajectory
    CHECK(buf.size() <= 3);
}

TEST_CASE("deterministic rollouts ignore the seed") {
    const FiniteMdp mdp = oracles::two_state_switch();
    const Policy pi = oracles::always_switch();
    const Trajectory a = rollout(mdp, pi, 6, RngSeed{1});
    const Trajectory b = rollout(mdp, pi, 6, RngSeed{999});
    CHECK(a.states == std::vector<int>{0, 1, 0, 1, 0, 1});
    CHECK(a.states == b.states);
    CHECK(a.actions == b.actions);
}

TEST_CASE("identical seeds reproduce identical trajectories and batches") {
    Rng mk(3);
    const FiniteMdp mdp = random_mdp(4, 2, 0.9, mk);
    const Policy pi = random_policy(4, 2, mk);
    const Trajectory a = rollout(mdp, pi, 50, RngSeed{42});
    const Trajectory b = rollout(mdp, pi, 50, RngSeed{42});
    CHECK(a.states == b.states);
    CHECK(a.actions == b.actions);

    ReplayBuffer buf;
    buf.push(a);
    buf.push(b);
    const auto eta = HorizonDistribution::geometric(0.5);
    const auto p1 = sample_mu_pairs(buf, 0.9, eta, 64, RngSeed{7});
    const auto p2 = sample_mu_pairs(buf, 0.9, eta, 64, RngSeed{7});
    REQUIRE(p1.size() == p2.size());
    for (std::size_t i = 0; i < p1.size(); ++i) {
        CHECK(p1[i].s == p2[i].s);
        CHECK(p1[i].s_plus == p2[i].s_plus);
    }
}

TEST_CASE("rollout visit frequencies match the exact marginals") {
    Rng mk(5);
    const FiniteMdp mdp = random_mdp(3, 2, 0.9, mk);
    const Policy pi = random_policy(3, 2, mk);
    const Matrix M = policy_transition_operator(mdp, pi);
    // exact 4-step pair marginal from p0
    Eigen::RowVectorXd start = Eigen::RowVectorXd::Zero(6);
    for (int s = 0; s < 3; ++s)
        for (int a = 0; a < 2; ++a) start(mdp.pair_index(s, a)) = mdp.p0(s) * pi.probs(s, a);
    Eigen::RowVectorXd exact = start;
    for (int i = 0; i < 4; ++i) exact = exact * M;

    const int n = 100000;
    Vector counts = Vector::Zero(6);
    Rng rng(99);
    for (int i = 0; i < n; ++i) {
        const Trajectory tau = rollout(mdp, pi, 5, rng);
        counts(mdp.pair_index(tau.states[4], tau.actions[4])) += 1.0;
    }
    counts /= n;
    for (int j = 0; j < 6; ++j) {
        const double se = std::sqrt(std::max(exact(j) * (1 - exact(j)), 1e-9) / n);
        CHECK(std::abs(counts(j) - exact(j)) < 3.5 * se + 1e-4);
    }
}

TEST_CASE("occupancy index: degenerate and uniform endpoints") {
    Rng rng(1);
    for (int i = 0; i < 50; ++i) CHECK(sample_occupancy_index(9, 0.0, rng) == 0);
    Vector counts = Vector::Zero(3);
    for (int i = 0; i < 30000; ++i) counts(sample_occupancy_index(3, 1.0, rng)) += 1.0;
    for (int t = 0; t < 3; ++t) CHECK(counts(t) / 30000 == doctest::Approx(1.0 / 3).epsilon(0.05));
}

TEST_CASE("occupancy index follows the truncated geometric pmf") {
    // gamma 0.5, horizon 3: pmf (4/7, 2/7, 1/7); chi-square on 1e5 draws
    const int n = 100000;
    Rng rng(12);
    Vector counts = Vector::Zero(3);
    for (int i = 0; i < n; ++i) counts(sample_occupancy_index(3, 0.5, rng)) += 1.0;
    const double expected[3] = {4.0 / 7, 2.0 / 7, 1.0 / 7};
    double chi2 = 0.0;
    for (int t = 0; t < 3; ++t) {
        const double e = expected[t] * n;
        chi2 += (counts(t) - e) * (counts(t) - e) / e;
    }
    CHECK(chi2 < 13.8);  // 2 dof, far beyond the 99.9th percentile
}

TEST_CASE("future index: forced and point-mass cases") {
    Rng rng(2);
    const auto d0 = HorizonDistribution::dirac(0);
    for (int i = 0; i < 20; ++i) CHECK(sample_future_index(d0, 5, rng) == 0);
    for (int i = 0; i < 20; ++i) CHECK(sample_future_index(HorizonDistribution::geometric(0.7), 1, rng) == 0);
    // point mass beyond the available range falls back to the latest step
    const auto d9 = HorizonDistribution::dirac(9);
    CHECK(sample_future_index(d9, 4, rng) == 3);
}

TEST_CASE("future index empirical mean matches the truncated pmf") {
    const auto eta = HorizonDistribution::geometric(0.7);
    const int remaining = 12, n = 100000;
    double trunc_mean = 0.0, total = 0.0;
    for (int k = 0; k < remaining; ++k) {
        trunc_mean += k * eta.pmf(k);
        total += eta.pmf(k);
    }
    trunc_mean /= total;
    double var = 0.0;
    for (int k = 0; k < remaining; ++k) var += (k - trunc_mean) * (k - trunc_mean) * eta.pmf(k) / total;
    Rng rng(77);
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += sample_future_index(eta, remaining, rng);
    mean /= n;
    CHECK(std::abs(mean - trunc_mean) < 3.0 * std::sqrt(var / n));
}

TEST_CASE("mu-pair batch edge cases") {
    ReplayBuffer empty;
    CHECK_THROWS_AS(sample_mu_pairs(empty, 0.9, HorizonDistribution::dirac(0), 8, RngSeed{1}),
                    std::invalid_argument);
    ReplayBuffer buf;
    buf.push(rollout(oracles::two_state_switch(), oracles::always_switch(), 5, RngSeed{1}));
    CHECK(sample_mu_pairs(buf, 0.9, HorizonDistribution::dirac(0), 0, RngSeed{1}).empty());
    // point mass at zero collapses the pair onto the present
    for (const auto& p : sample_mu_pairs(buf, 0.9, HorizonDistribution::dirac(0), 32, RngSeed{2})) {
        CHECK(p.s == p.s_plus);
        CHECK(p.a == p.a_plus);
    }
}

TEST_CASE("mu-pair marginal approximates the exact normalized measure") {
    const FiniteMdp mdp = oracles::two_state_switch(0.5);
    const Policy pi = oracles::always_switch();
    ReplayBuffer buf;
    Rng rng(31);
    for (int i = 0; i < 50; ++i) buf.push(rollout(mdp, pi, 200, rng));
    const auto eta = HorizonDistribution::geometric(0.5);
    const auto pairs = sample_mu_pairs(buf, 0.5, eta, 100000, RngSeed{8});
    Vector empirical = Vector::Zero(4);
    for (const auto& p : pairs) empirical(mdp.pair_index(p.s_plus, p.a_plus)) += 1.0;
    empirical /= pairs.size();
    CHECK(oracles::tv_distance(empirical, exact_mu_marginal(mdp, pi, eta)) < 0.02);
}

TEST_CASE("mu-pair marginal stays close across eta kinds on random MDPs") {
    Rng mk(101);
    for (int trial = 0; trial < 3; ++trial) {
        const FiniteMdp mdp = random_mdp(3, 2, 0.9, mk);
        const Policy pi = random_policy(3, 2, mk);
        ReplayBuffer buf;
        Rng rng(trial + 1);
        const int horizon = 160;  // gamma^H and eta tails both below 1e-3
        for (int i = 0; i < 60; ++i) buf.push(rollout(mdp, pi, horizon, rng));
        const std::vector<HorizonDistribution> etas = {
            HorizonDistribution::dirac(0), HorizonDistribution::geometric(0.5),
            HorizonDistribution::poisson(3.0), HorizonDistribution::uniform(20)};
        for (const auto& eta : etas) {
            const auto pairs = sample_mu_pairs(buf, mdp.gamma, eta, 100000, RngSeed{55});
            Vector empirical = Vector::Zero(6);
            for (const auto& p : pairs) empirical(mdp.pair_index(p.s_plus, p.a_plus)) += 1.0;
            empirical /= pairs.size();
            CHECK(oracles::tv_distance(empirical, exact_mu_marginal(mdp, pi, eta)) < 0.05);
        }
    }
}
