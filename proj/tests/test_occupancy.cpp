#include <doctest.h>

#include "etairl/occupancy.hpp"
#include "etairl/rng.hpp"
#include "oracles.hpp"

using namespace etairl;

TEST_CASE("rho on the 2-state chain matches the truncated power sum") {
    const FiniteMdp mdp = oracles::two_state_switch(0.5);
    const Policy pi = oracles::always_switch();
    const OccupancyMeasure occ = rho(mdp, pi);

    // brute-force oracle: sum_{t<=1000} gamma^t from each start
    const Matrix brute = oracles::weighted_measure_brute(mdp, pi, oracles::geometric_weights(0.5, 1000));
    CHECK((occ.values - brute).cwiseAbs().maxCoeff() < 1e-12);

    // mass on each state from s0: 4/3 on s0, 2/3 on the other
    double mass_s0 = occ.values(0, mdp.pair_index(0, 0)) + occ.values(0, mdp.pair_index(0, 1));
    double mass_s1 = occ.values(0, mdp.pair_index(1, 0)) + occ.values(0, mdp.pair_index(1, 1));
    CHECK(mass_s0 == doctest::Approx(4.0 / 3.0).epsilon(1e-10));
    CHECK(mass_s1 == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("rho of an absorbing single state is the geometric series") {
    FiniteMdp mdp;
    mdp.n_states = 1;
    mdp.n_actions = 1;
    mdp.gamma = 0.9;
    mdp.transition = {Matrix::Ones(1, 1)};
    mdp.cost = Matrix::Zero(1, 1);
    mdp.p0 = Vector::Ones(1);
    const OccupancyMeasure occ = rho(mdp, Policy::uniform(1, 1));
    CHECK(occ.values(0, 0) == doctest::Approx(10.0).epsilon(1e-10));
}

TEST_CASE("rho rows carry mass 1/(1-gamma) for arbitrary policies") {
    Rng rng(3);
    for (int i = 0; i < 10; ++i) {
        const FiniteMdp mdp = random_mdp(4, 3, rng.uniform(0.3, 0.95), rng);
        const OccupancyMeasure occ = rho(mdp, random_policy(4, 3, rng));
        for (int r = 0; r < occ.values.rows(); ++r)
            CHECK(occ.values.row(r).sum() ==
                  doctest::Approx(1.0 / (1.0 - mdp.gamma)).epsilon(1e-8));
    }
}

TEST_CASE("p_eta with a point mass at zero is the routed initial state") {
    const FiniteMdp mdp = oracles::two_state_switch();
    Rng rng(9);
    const Policy pi = random_policy(2, 2, rng);
    const OccupancyMeasure m = p_eta(mdp, pi, HorizonDistribution::dirac(0));
    for (int s0 = 0; s0 < 2; ++s0)
        for (int s = 0; s < 2; ++s)
            for (int a = 0; a < 2; ++a)
                CHECK(m.values(s0, mdp.pair_index(s, a)) ==
                      doctest::Approx(s == s0 ? pi.probs(s0, a) : 0.0));
}

TEST_CASE("p_eta geometric fixed point matches the 2-state closed form") {
    const FiniteMdp mdp = oracles::two_state_switch();
    const Policy pi = oracles::always_switch();
    const OccupancyMeasure m = p_eta(mdp, pi, HorizonDistribution::geometric(0.5));
    // (1-k) sum_n k^n over even/odd alternation: 2/3 at s0, 1/3 at s1
    const double mass_s0 = m.values(0, mdp.pair_index(0, 1));
    const double mass_s1 = m.values(0, mdp.pair_index(1, 1));
    CHECK(mass_s0 == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    CHECK(mass_s1 == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
    // brute force against the truncated renormalized sum
    const Matrix brute = oracles::weighted_measure_brute(mdp, pi,
                                                         oracles::geometric_weights(0.5, 1000, 0.5));
    CHECK((m.values - brute).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("geometric fixed-point and power-sum paths agree") {
    Rng rng(17);
    for (double kappa : {0.25, 0.5, 0.9}) {
        const FiniteMdp mdp = random_mdp(3, 2, 0.8, rng);
        const Policy pi = random_policy(3, 2, rng);
        const OccupancyMeasure exact = p_eta(mdp, pi, HorizonDistribution::geometric(kappa));
        // force the truncated power-sum route through a custom pmf
        const int t_max = kappa < 0.5 ? 600 : 2500;
        std::vector<double> w(t_max);
        double x = 1.0;
        for (int n = 0; n < t_max; ++n) {
            w[n] = x;
            x *= kappa;
        }
        const OccupancyMeasure truncated = p_eta(mdp, pi, HorizonDistribution::custom(w));
        CHECK((exact.values - truncated.values).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("mu with a point mass at zero collapses to rho") {
    Rng rng(23);
    const FiniteMdp mdp = random_mdp(4, 2, 0.85, rng);
    const Policy pi = random_policy(4, 2, rng);
    const OccupancyMeasure m = mu(mdp, pi, HorizonDistribution::dirac(0));
    const OccupancyMeasure r = rho(mdp, pi);
    CHECK((m.values - r.values).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("mu equals the brute-force double sum") {
    Rng rng(29);
    const FiniteMdp mdp = random_mdp(3, 2, 0.8, rng);
    const Policy pi = random_policy(3, 2, rng);
    const auto eta = HorizonDistribution::geometric(0.6, 400);
    const OccupancyMeasure m = mu(mdp, pi, eta);
    const Matrix brute = oracles::mu_double_sum_brute(mdp, pi, eta, 500);
    CHECK((m.values - brute).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("mu composition commutes") {
    Rng rng(31);
    for (int i = 0; i < 5; ++i) {
        const FiniteMdp mdp = random_mdp(3, 2, rng.uniform(0.5, 0.9), rng);
        const Policy pi = random_policy(3, 2, rng);
        const auto eta = HorizonDistribution::geometric(rng.uniform(0.2, 0.8));
        const OccupancyMeasure lhs = mu(mdp, pi, eta);
        // commuted order: P_eta rows composed with the pair-conditioned rho
        const Matrix commuted = p_eta(mdp, pi, eta).values * rho_kernel(mdp, pi);
        CHECK((lhs.values - commuted).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("policy recovery round-trips through rho and mu") {
    Rng rng(37);
    for (int i = 0; i < 10; ++i) {
        const FiniteMdp mdp = random_mdp(4, 3, 0.9, rng);
        const Policy pi = random_policy(4, 3, rng);
        const auto via_rho = policy_from_occupancy(rho(mdp, pi), 4, 3);
        CHECK(via_rho.zero_mass_states.empty());
        CHECK((via_rho.policy.probs - pi.probs).cwiseAbs().maxCoeff() < 1e-9);
        const auto via_mu =
            policy_from_occupancy(mu(mdp, pi, HorizonDistribution::geometric(0.5)), 4, 3);
        CHECK((via_mu.policy.probs - pi.probs).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("policy recovery flags unreachable states and fills them uniformly") {
    // deterministic stay-put chain: state 1 unreachable from state 0
    FiniteMdp mdp = oracles::two_state_switch();
    const Policy stay = Policy::deterministic(2, 2, {0, 0});
    OccupancyMeasure occ = rho(mdp, stay);
    occ.values.row(1).setZero();  // keep only the s0-conditioned row
    OccupancyMeasure first_row = occ;
    const auto rec = policy_from_occupancy(first_row, 2, 2);
    REQUIRE(rec.zero_mass_states == std::vector<int>{1});
    CHECK(rec.policy.probs(1, 0) == doctest::Approx(0.5));
    CHECK(rec.policy.probs(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("flow residuals vanish on solver triples and react to perturbations") {
    Rng rng(41);
    const FiniteMdp mdp = random_mdp(3, 2, 0.5, rng);
    const Policy pi = random_policy(3, 2, rng);
    const double kappa = 0.4;
    const auto eta = HorizonDistribution::geometric(kappa);
    const OccupancyMeasure f = mu(mdp, pi, eta), g = p_eta(mdp, pi, eta), h = rho(mdp, pi);
    CHECK(flow_residuals(f, g, h, mdp, kappa).max_abs() < 1e-8);

    OccupancyMeasure f2 = f;
    f2.values(0, 0) += 0.1;
    const auto r = flow_residuals(f2, g, h, mdp, kappa);
    CHECK(r.f_gamma >= 0.05);
}

TEST_CASE("eta expectation: zero and constant integrands") {
    Rng rng(43);
    const FiniteMdp mdp = random_mdp(4, 2, 0.7, rng);
    const Policy pi = random_policy(4, 2, rng);
    const auto eta = HorizonDistribution::poisson(2.0);
    CHECK(eta_expectation(mdp, pi, eta, Matrix::Zero(4, 2)) == doctest::Approx(0.0));
    CHECK(eta_expectation(mdp, pi, eta, Matrix::Ones(4, 2)) ==
          doctest::Approx(1.0 / (1.0 - mdp.gamma)).epsilon(1e-9));
}

TEST_CASE("eta expectation matches the geometric-series value on the chain") {
    const FiniteMdp mdp = oracles::two_state_switch(0.5);
    // f = state cost (1,0); always-switch from s0 under a point mass at 0
    const double v =
        eta_expectation(mdp, oracles::always_switch(), HorizonDistribution::dirac(0), mdp.cost);
    CHECK(v == doctest::Approx(4.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("aggregated entropy equals the policy entropy on policy measures") {
    Rng rng(47);
    const FiniteMdp mdp = random_mdp(3, 3, 0.8, rng);
    const Policy pi = random_policy(3, 3, rng);
    const auto eta = HorizonDistribution::geometric(0.5);
    const OccupancyMeasure m = mu(mdp, pi, eta);
    // direct form: -sum_s0 p0 sum mu log pi
    const Vector agg = aggregate_measure(mdp.p0, m);
    double direct = 0.0;
    for (int s = 0; s < 3; ++s)
        for (int a = 0; a < 3; ++a)
            direct -= agg(mdp.pair_index(s, a)) * std::log(pi.probs(s, a));
    CHECK(eta_weighted_entropy(mdp.p0, m) == doctest::Approx(direct).epsilon(1e-10));
}
