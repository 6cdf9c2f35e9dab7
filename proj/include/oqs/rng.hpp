// rng.hpp — Seeded PRNG with fully specified distributions.
//
// std::mt19937_64 is bit-stable across platforms, but the standard
// distributions are not; the draw functions here are spelled out so that
// identical seeds give identical streams on any build. Parallel work units
// (trajectories, noise realizations) derive independent streams with
// derive(seed, index), so results do not depend on scheduling.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace oqs {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // uniform in [0, 1) with 53-bit resolution
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    // exponential waiting time, mean 1/rate
    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

    // standard normal (Box-Muller, cosine branch)
    double normal() {
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    // splitmix64 mix of (seed, stream): decorrelated per-work-unit seeds
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 gen_;
};

} // namespace oqs
