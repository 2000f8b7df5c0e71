#pragma once

#include <cstdint>
#include <random>

namespace hazard {

// Deterministic RNG wrapper. All samplers are implemented against the raw
// 64-bit stream so that results are bit-identical across standard libraries;
// std::*_distribution is implementation-defined and must not be used here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(mix(seed)) {}

    // Independent stream for one Monte Carlo path. Derived from the master
    // seed and the path index only, so results do not depend on the thread
    // count or on scheduling.
    static Rng for_path(std::uint64_t master_seed, std::uint64_t path_index) {
        return Rng(mix(master_seed) ^ mix(path_index * 0x9e3779b97f4a7c15ULL + 0x3c6ef372fe94f82aULL));
    }

    std::uint64_t bits() { return gen_(); }

    // Uniform on [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; safe as a log() argument.
    double uniform_pos() { return 1.0 - uniform(); }

    double normal();
    double exponential(double rate); // rate > 0
    double gamma(double shape);      // unit scale, shape > 0
    double beta(double alpha, double beta);

private:
    static std::uint64_t mix(std::uint64_t x) {
        // splitmix64 finalizer
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace hazard
