#pragma once

#include <cstdint>
#include <random>

namespace specverify {

// Deterministic RNG wrapper. std::uniform_real_distribution is
// implementation-defined, so the uniform transforms live here; outputs are
// bit-identical across standard libraries for a given seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Independent stream for (seed, stream) pairs, e.g. one per PGD restart
    // or per dataset chunk. Mixing is splitmix64 so neighbouring stream ids
    // do not produce correlated engines.
    static Rng derive(std::uint64_t seed, std::uint64_t stream) {
        return Rng(mix(seed + 0x9e3779b97f4a7c15ULL * (stream + 1)));
    }

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform in [a, b).
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Uniform integer in [lo, hi] without modulo bias worth worrying about
    // at the ranges used here (shuffles, label picks).
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(uniform() * static_cast<double>(hi - lo + 1));
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace specverify
