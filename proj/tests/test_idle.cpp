#include <doctest.h>

#include <cmath>

#include "etairl/envs.hpp"
#include "etairl/idle.hpp"
#include "oracles.hpp"

using namespace etairl;

TEST_CASE("game value at a flat classifier is minus two log two for any generator") {
    Rng rng(3);
    const FiniteMdp mdp = random_mdp(3, 2, 0.8, rng);
    const Policy pi = random_policy(3, 2, rng);
    const auto eta = HorizonDistribution::geometric(0.7);
    const IdleDiscriminator half = IdleDiscriminator::flat(3, 2);
    for (int i = 0; i < 5; ++i) {
        ConditionalGenerator g;
        g.probs = rng.random_stochastic(3, 6);
        CHECK(idle_value(half, g, mdp, pi, eta) ==
              doctest::Approx(-2.0 * std::log(2.0)).epsilon(1e-12));
    }
}

TEST_CASE("bayes classifier: equal densities give one half, boundaries saturate") {
    Rng rng(5);
    const FiniteMdp mdp = random_mdp(3, 2, 0.8, rng);
    const Policy pi = random_policy(3, 2, rng);
    const auto eta = HorizonDistribution::geometric(0.6);
    ConditionalGenerator truth;
    truth.probs = p_eta(mdp, pi, eta).values;
    const IdleDiscriminator d = idle_bayes_discriminator(truth, mdp, pi, eta);
    for (int s = 0; s < 3; ++s)
        for (int j = 0; j < 6; ++j)
            if (truth.probs(s, j) > 0.0) CHECK(d.prob(s, j) == doctest::Approx(0.5).epsilon(1e-12));

    // generator holes force the classifier to certainty
    ConditionalGenerator holes = truth;
    holes.probs(0, 0) = 0.0;
    holes.probs.row(0) /= holes.probs.row(0).sum();
    const IdleDiscriminator d2 = idle_bayes_discriminator(holes, mdp, pi, eta);
    if (truth.probs(0, 0) > 0.0) CHECK(d2.prob(0, 0) > 0.999);

    // random generators stay strictly inside (0,1) on the joint support
    ConditionalGenerator g;
    g.probs = rng.random_stochastic(3, 6);
    const IdleDiscriminator d3 = idle_bayes_discriminator(g, mdp, pi, eta);
    for (int s = 0; s < 3; ++s)
        for (int j = 0; j < 6; ++j)
            if (truth.probs(s, j) > 0.0 && g.probs(s, j) > 0.0) {
                CHECK(d3.prob(s, j) > 0.0);
                CHECK(d3.prob(s, j) < 1.0);
            }
}

TEST_CASE("best response to the exact distribution scores minus log four") {
    Rng rng(7);
    const FiniteMdp mdp = random_mdp(3, 2, 0.85, rng);
    const Policy pi = random_policy(3, 2, rng);
    const auto eta = HorizonDistribution::geometric(0.7);
    ConditionalGenerator truth;
    truth.probs = p_eta(mdp, pi, eta).values;
    const IdleDiscriminator bayes = idle_bayes_discriminator(truth, mdp, pi, eta);
    CHECK(idle_value(bayes, truth, mdp, pi, eta) ==
          doctest::Approx(-std::log(4.0)).epsilon(1e-10));
}

TEST_CASE("best-response value is the Jensen-Shannon divergence shifted by log four") {
    Rng rng(11);
    const FiniteMdp mdp = random_mdp(3, 2, 0.8, rng);
    const Policy pi = random_policy(3, 2, rng);
    const auto eta = HorizonDistribution::geometric(0.5);
    const Matrix truth = p_eta(mdp, pi, eta).values;
    const Vector w = [&] {
        const Vector agg = aggregate_measure(mdp.p0, rho(mdp, pi)) * (1.0 - mdp.gamma);
        Vector ws = Vector::Zero(3);
        for (int s = 0; s < 3; ++s)
            for (int a = 0; a < 2; ++a) ws(s) += agg(mdp.pair_index(s, a));
        return ws;
    }();

    for (int trial = 0; trial < 10; ++trial) {
        ConditionalGenerator g;
        g.probs = rng.random_stochastic(3, 6);
        const IdleDiscriminator bayes = idle_bayes_discriminator(g, mdp, pi, eta);
        const double value = idle_value(bayes, g, mdp, pi, eta);
        // direct JSD between the two conditional rows, averaged over states
        double jsd = 0.0;
        for (int s = 0; s < 3; ++s) {
            double acc = 0.0;
            for (int j = 0; j < 6; ++j) {
                const double p = truth(s, j), q = g.probs(s, j), m = 0.5 * (p + q);
                if (p > 0.0) acc += 0.5 * p * std::log(p / m);
                if (q > 0.0) acc += 0.5 * q * std::log(q / m);
            }
            jsd += w(s) * acc;
        }
        CHECK(value == doctest::Approx(2.0 * jsd - std::log(4.0)).epsilon(1e-8));
        CHECK(value >= -std::log(4.0) - 1e-12);
    }
}

TEST_CASE("equilibrium survives random and extreme deviations") {
    Rng rng(13);
    const FiniteMdp mdp = random_mdp(3, 2, 0.8, rng);
    const Policy pi = random_policy(3, 2, rng);
    const auto eta = HorizonDistribution::geometric(0.7);
    ConditionalGenerator truth;
    truth.probs = p_eta(mdp, pi, eta).values;
    const auto report =
        nash_check(IdleDiscriminator::flat(3, 2), truth, mdp, pi, eta, 200, RngSeed{17});
    CHECK(report.passed);
    CHECK(report.deviations == 400);
    CHECK(report.worst_generator_gain <= 1e-9);
    CHECK(report.worst_discriminator_gain <= 1e-9);
    CHECK(report.worst_bayes_shortfall <= 1e-9);
}

TEST_CASE("adversarial training recovers the future distribution on the chain") {
    const FiniteMdp mdp = oracles::two_state_switch(0.5);
    const Policy pi = oracles::always_switch();
    const auto eta = HorizonDistribution::geometric(0.5);
    ReplayBuffer buffer;
    Rng rng(19);
    for (int i = 0; i < 40; ++i) buffer.push(rollout(mdp, pi, 60, rng));

    IdleConfig cfg;
    cfg.epochs = 5000;
    cfg.seed = 21;
    const auto [disc, gen] = idle_train(buffer, eta, cfg, 2, 2);
    const Vector tv = generator_tv(gen, mdp, pi, eta);
    for (int s = 0; s < 2; ++s) CHECK(tv(s) < 0.1);

    // near equilibrium the classifier hovers around one half on the support
    const Matrix truth = p_eta(mdp, pi, eta).values;
    for (int s = 0; s < 2; ++s)
        for (int j = 0; j < 4; ++j)
            if (truth(s, j) > 0.05) CHECK(std::abs(disc.prob(s, j) - 0.5) < 0.15);
}

TEST_CASE("training is seed-deterministic") {
    const FiniteMdp mdp = oracles::two_state_switch(0.5);
    ReplayBuffer buffer;
    Rng rng(23);
    for (int i = 0; i < 10; ++i) buffer.push(rollout(mdp, oracles::always_switch(), 30, rng));
    IdleConfig cfg;
    cfg.epochs = 200;
    cfg.seed = 3;
    const auto [d1, g1] = idle_train(buffer, cfg.eta, cfg, 2, 2);
    const auto [d2, g2] = idle_train(buffer, cfg.eta, cfg, 2, 2);
    CHECK((d1.logits - d2.logits).cwiseAbs().maxCoeff() == 0.0);
    CHECK((g1.probs - g2.probs).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("augmentation: counts, determinism and the empty case") {
    const FiniteMdp mdp = oracles::two_state_switch(0.5);
    ReplayBuffer buffer;
    Rng rng(29);
    for (int i = 0; i < 3; ++i) buffer.push(rollout(mdp, oracles::always_switch(), 7, rng));
    ConditionalGenerator g = ConditionalGenerator::uniform(2, 2);
    CHECK(augment_buffer(buffer, g, 0, RngSeed{1}).empty());
    const auto synth = augment_buffer(buffer, g, 4, RngSeed{1});
    CHECK(synth.size() == 3 * 7 * 4);
    const auto synth2 = augment_buffer(buffer, g, 4, RngSeed{1});
    REQUIRE(synth.size() == synth2.size());
    for (std::size_t i = 0; i < synth.size(); ++i) {
        CHECK(synth[i].s == synth2[i].s);
        CHECK(synth[i].s_plus == synth2[i].s_plus);
        CHECK(synth[i].a_plus == synth2[i].a_plus);
    }
}

TEST_CASE("exact-generator augmentation tightens the empirical future marginal") {
    const FiniteMdp mdp = chain_env(4, 0.15, 0.9);
    SoftRlConfig rl;
    const Policy pi = soft_value_iteration(mdp, rl).policy;
    const auto eta = HorizonDistribution::geometric(0.7);
    ConditionalGenerator exact;
    exact.probs = p_eta(mdp, pi, eta).values;

    // tiny real budget: two short trajectories
    ReplayBuffer buffer;
    Rng rng(31);
    for (int i = 0; i < 2; ++i) buffer.push(rollout(mdp, pi, 12, rng));

    // state-conditioned empirical future-pair distribution, real pairs only
    const int SA = 8;
    Matrix real_counts = Matrix::Zero(4, SA);
    Rng sampler(33);
    for (int i = 0; i < 400; ++i) {
        const Trajectory& tau = buffer.at(sampler.uniform_int(static_cast<int>(buffer.size())));
        const int t = sample_occupancy_index(tau.length(), 1.0, sampler);
        const int k = sample_future_index(eta, tau.length() - t, sampler);
        real_counts(tau.states[t], mdp.pair_index(tau.states[t + k], tau.actions[t + k])) += 1.0;
    }
    Matrix augmented_counts = real_counts;
    for (const auto& triple : augment_buffer(buffer, exact, 40, RngSeed{35}))
        augmented_counts(triple.s, mdp.pair_index(triple.s_plus, triple.a_plus)) += 1.0;

    const Matrix truth = p_eta(mdp, pi, eta).values;
    double tv_real = 0.0, tv_aug = 0.0;
    int states_seen = 0;
    for (int s = 0; s < 4; ++s) {
        if (real_counts.row(s).sum() == 0.0) continue;
        ++states_seen;
        tv_real += 0.5 * (real_counts.row(s) / real_counts.row(s).sum() - truth.row(s))
                             .cwiseAbs()
                             .sum();
        tv_aug += 0.5 * (augmented_counts.row(s) / augmented_counts.row(s).sum() - truth.row(s))
                            .cwiseAbs()
                            .sum();
    }
    REQUIRE(states_seen > 0);
    CHECK(tv_aug < tv_real);
}
