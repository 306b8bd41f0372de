#pragma once

#include <cstdint>
#include <vector>
#include <random>

namespace adacomm {

// Deterministic RNG used everywhere randomness is needed. std::mt19937_64
// has a standard-specified bit stream; the distributions are hand-rolled so
// generated traces do not depend on the standard library's
// implementation-defined distribution algorithms.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased uniform integer in [0, n), n > 0.
    std::uint64_t uniform_index(std::uint64_t n);

    double normal(double mean = 0.0, double sigma = 1.0);

    // Knuth's product method; fine for the per-window rates used here.
    int poisson(double lambda);

    bool bernoulli(double p) { return uniform() < p; }

    // Random sign, +1 or -1.
    double sign() { return (engine_() & 1u) ? 1.0 : -1.0; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_index(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Derive a child seed; used to give subsystems independent streams.
    std::uint64_t fork() { return engine_(); }

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace adacomm
