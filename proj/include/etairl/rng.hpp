#pragma once

#include <cstdint>
#include <random>

#include "etairl/mdp.hpp"

namespace etairl {

/// Seed for every randomized operation; identical seeds give identical
/// results on any platform (draws avoid std distribution objects).
using RngSeed = std::uint64_t;

/// Derives an independent stream seed from a base seed (splitmix64 mix).
inline RngSeed derive_seed(RngSeed base, RngSeed stream) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// mt19937_64-backed generator with hand-rolled draws for reproducibility.
class Rng {
  public:
    explicit Rng(RngSeed seed) : gen_(seed) {}

    /// Uniform double in [0, 1).
    double uniform() { return (gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in {0, ..., n-1}.
    int uniform_int(int n) {
        int i = static_cast<int>(uniform() * n);
        return i < n ? i : n - 1;
    }

    /// Index drawn proportionally to non-negative weights w[0..n-1] with
    /// total mass `total`. Falls back to the last positive-weight entry on
    /// accumulated rounding.
    int categorical(const double* w, int n, double total) {
        double u = uniform() * total;
        double acc = 0.0;
        int last = 0;
        for (int i = 0; i < n; ++i) {
            if (w[i] <= 0.0) continue;
            acc += w[i];
            last = i;
            if (u < acc) return i;
        }
        return last;
    }

    int categorical(const Vector& w) { return categorical(w.data(), static_cast<int>(w.size()), w.sum()); }

    /// Row of a stochastic matrix (mass 1).
    int categorical_row(const Matrix& m, int row) {
        Vector w = m.row(row).transpose();
        return categorical(w.data(), static_cast<int>(w.size()), w.sum());
    }

    /// Random stochastic matrix with rows drawn from a flat Dirichlet.
    Matrix random_stochastic(int rows, int cols) {
        Matrix m(rows, cols);
        for (int r = 0; r < rows; ++r) {
            double sum = 0.0;
            for (int c = 0; c < cols; ++c) {
                double e = -std::log(1.0 - uniform());
                m(r, c) = e;
                sum += e;
            }
            m.row(r) /= sum;
        }
        return m;
    }

    std::mt19937_64& raw() { return gen_; }

  private:
    std::mt19937_64 gen_;
};

/// Dense random MDP with Dirichlet kernel rows and uniform costs.
FiniteMdp random_mdp(int n_states, int n_actions, double gamma, Rng& rng);

/// Random stochastic policy.
Policy random_policy(int n_states, int n_actions, Rng& rng);

}  // namespace etairl
