#include "etairl/idle.hpp"

#include <cmath>

#include "etairl/rng.hpp"

namespace etairl {

namespace {

constexpr double kLogitCap = 700.0;  // sigmoid saturates safely beyond this

Vector occupancy_state_weights(const FiniteMdp& mdp, const Policy& pi) {
    const Vector agg = aggregate_measure(mdp.p0, rho(mdp, pi)) * (1.0 - mdp.gamma);
    Vector w = Vector::Zero(mdp.n_states);
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a) w(s) += agg(mdp.pair_index(s, a));
    return w;
}

Matrix softmax_rows(const Matrix& logits) {
    Matrix out(logits.rows(), logits.cols());
    for (int r = 0; r < logits.rows(); ++r) {
        const double m = logits.row(r).maxCoeff();
        double z = 0.0;
        for (int c = 0; c < logits.cols(); ++c) {
            out(r, c) = std::exp(logits(r, c) - m);
            z += out(r, c);
        }
        out.row(r) /= z;
    }
    return out;
}

}  // namespace

ConditionalGenerator ConditionalGenerator::uniform(int n_states, int n_actions) {
    ConditionalGenerator g;
    g.probs = Matrix::Constant(n_states, n_states * n_actions,
                               1.0 / (n_states * n_actions));
    return g;
}

IdleDiscriminator IdleDiscriminator::flat(int n_states, int n_actions) {
    IdleDiscriminator d;
    d.logits = Matrix::Zero(n_states, n_states * n_actions);
    return d;
}

double idle_value(const IdleDiscriminator& d, const ConditionalGenerator& g, const FiniteMdp& mdp,
                  const Policy& pi, const HorizonDistribution& eta) {
    const Vector w = occupancy_state_weights(mdp, pi);
    const Matrix truth = p_eta(mdp, pi, eta).values;  // rows: current state, mass 1
    const int SA = mdp.n_pairs();
    double value = 0.0;
    for (int s = 0; s < mdp.n_states; ++s) {
        if (w(s) == 0.0) continue;
        double inner = 0.0;
        for (int j = 0; j < SA; ++j) {
            const double dv = d.prob(s, j);
            if (truth(s, j) > 0.0) inner += truth(s, j) * std::log(std::max(dv, 1e-300));
            if (g.probs(s, j) > 0.0) inner += g.probs(s, j) * std::log(std::max(1.0 - dv, 1e-300));
        }
        value += w(s) * inner;
    }
    return value;
}

IdleDiscriminator idle_bayes_discriminator(const ConditionalGenerator& g, const FiniteMdp& mdp,
                                           const Policy& pi, const HorizonDistribution& eta) {
    const Matrix truth = p_eta(mdp, pi, eta).values;
    IdleDiscriminator d;
    d.logits = Matrix::Zero(mdp.n_states, mdp.n_pairs());
    for (int s = 0; s < mdp.n_states; ++s)
        for (int j = 0; j < mdp.n_pairs(); ++j) {
            const double p = truth(s, j), q = g.probs(s, j);
            if (p > 0.0 && q > 0.0)
                d.logits(s, j) = std::log(p / q);
            else if (p > 0.0)
                d.logits(s, j) = kLogitCap;
            else if (q > 0.0)
                d.logits(s, j) = -kLogitCap;
            // both zero: logit 0, D = 1/2
        }
    return d;
}

std::pair<IdleDiscriminator, ConditionalGenerator> idle_train(const ReplayBuffer& buffer,
                                                              const HorizonDistribution& eta,
                                                              const IdleConfig& cfg, int n_states,
                                                              int n_actions) {
    if (buffer.empty()) throw std::invalid_argument("idle training needs a non-empty buffer");
    const int SA = n_states * n_actions;
    IdleDiscriminator disc = IdleDiscriminator::flat(n_states, n_actions);
    Matrix gen_logits = Matrix::Zero(n_states, SA);
    Rng rng(cfg.seed);

    std::vector<int> batch_state(cfg.batch_size), batch_true(cfg.batch_size),
        batch_gen(cfg.batch_size);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const Matrix gen_probs = softmax_rows(gen_logits);
        for (int b = 0; b < cfg.batch_size; ++b) {
            const Trajectory& tau = buffer.at(rng.uniform_int(static_cast<int>(buffer.size())));
            const int horizon = tau.length();
            const int t = sample_occupancy_index(horizon, 1.0, rng);
            const int k = sample_future_index(eta, horizon - t, rng);
            batch_state[b] = tau.states[t];
            batch_true[b] = tau.states[t + k] * n_actions + tau.actions[t + k];
            batch_gen[b] = rng.categorical_row(gen_probs, batch_state[b]);
        }

        // discriminator: ascend sum log D(true) + sum log(1 - D(gen))
        for (int b = 0; b < cfg.batch_size; ++b) {
            const double d_true = disc.prob(batch_state[b], batch_true[b]);
            disc.logits(batch_state[b], batch_true[b]) +=
                cfg.disc_lr * (1.0 - d_true) / cfg.batch_size;
            const double d_gen = disc.prob(batch_state[b], batch_gen[b]);
            disc.logits(batch_state[b], batch_gen[b]) -= cfg.disc_lr * d_gen / cfg.batch_size;
        }

        // generator: exact per-row gradient of E_G[log D] for states in batch
        Vector counts = Vector::Zero(n_states);
        for (int b = 0; b < cfg.batch_size; ++b) counts(batch_state[b]) += 1.0;
        for (int s = 0; s < n_states; ++s) {
            if (counts(s) == 0.0) continue;
            double mean_logd = 0.0;
            Vector logd(SA);
            for (int j = 0; j < SA; ++j) {
                logd(j) = std::log(std::clamp(disc.prob(s, j), 1e-6, 1.0 - 1e-6));
                mean_logd += gen_probs(s, j) * logd(j);
            }
            const double scale = cfg.gen_lr * counts(s) / cfg.batch_size;
            for (int j = 0; j < SA; ++j)
                gen_logits(s, j) += scale * gen_probs(s, j) * (logd(j) - mean_logd);
        }
    }
    ConditionalGenerator gen;
    gen.probs = softmax_rows(gen_logits);
    return {std::move(disc), std::move(gen)};
}

NashReport nash_check(const IdleDiscriminator& d, const ConditionalGenerator& g,
                      const FiniteMdp& mdp, const Policy& pi, const HorizonDistribution& eta,
                      int n_deviations, RngSeed seed) {
    NashReport report;
    const double base = idle_value(d, g, mdp, pi, eta);
    Rng rng(seed);
    const int SA = mdp.n_pairs();
    for (int i = 0; i < n_deviations; ++i) {
        ConditionalGenerator g2 = g;
        if (i % 3 == 0) {
            // extreme: all mass on one pair per state
            g2.probs.setZero();
            for (int s = 0; s < mdp.n_states; ++s) g2.probs(s, rng.uniform_int(SA)) = 1.0;
        } else {
            g2.probs = rng.random_stochastic(mdp.n_states, SA);
        }
        // at D = 1/2 the value cannot depend on the generator at all
        const double gain = std::abs(idle_value(d, g2, mdp, pi, eta) - base);
        report.worst_generator_gain = std::max(report.worst_generator_gain, gain);
        // against its own best response no generator beats the equilibrium
        const double shortfall =
            base - idle_value(idle_bayes_discriminator(g2, mdp, pi, eta), g2, mdp, pi, eta);
        report.worst_bayes_shortfall = std::max(report.worst_bayes_shortfall, shortfall);

        IdleDiscriminator d2 = d;
        for (int s = 0; s < mdp.n_states; ++s)
            for (int j = 0; j < SA; ++j)
                d2.logits(s, j) = i % 3 == 0 ? (rng.uniform() < 0.5 ? -30.0 : 30.0)
                                             : rng.uniform(-3.0, 3.0);
        const double rise = idle_value(d2, g, mdp, pi, eta) - base;
        report.worst_discriminator_gain = std::max(report.worst_discriminator_gain, rise);
        report.deviations += 2;
    }
    report.passed = report.worst_generator_gain <= 1e-9 &&
                    report.worst_discriminator_gain <= 1e-9 &&
                    report.worst_bayes_shortfall <= 1e-9;
    return report;
}

std::vector<IdleTriple> augment_buffer(const ReplayBuffer& buffer, const ConditionalGenerator& g,
                                       int per_state, RngSeed seed) {
    std::vector<IdleTriple> out;
    const int SA = static_cast<int>(g.probs.cols());
    const int n_actions = SA / static_cast<int>(g.probs.rows());
    Rng rng(seed);
    for (const Trajectory& tau : buffer.trajectories())
        for (int s : tau.states)
            for (int i = 0; i < per_state; ++i) {
                const int j = rng.categorical_row(g.probs, s);
                out.push_back({s, j / n_actions, j % n_actions});
            }
    return out;
}

Vector generator_tv(const ConditionalGenerator& g, const FiniteMdp& mdp, const Policy& pi,
                    const HorizonDistribution& eta) {
    const Matrix truth = p_eta(mdp, pi, eta).values;
    Vector tv = Vector::Zero(mdp.n_states);
    for (int s = 0; s < mdp.n_states; ++s)
        tv(s) = 0.5 * (g.probs.row(s) - truth.row(s)).cwiseAbs().sum();
    return tv;
}

}  // namespace etairl
