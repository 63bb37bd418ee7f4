#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace aec {

// Deterministic random stream. mt19937_64 output is fully specified by the
// standard; doubles are extracted by hand so results do not depend on the
// library's distribution implementations.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    // splitmix64-style mix for deriving independent per-episode streams from
    // (global seed, stream index).
    static uint64_t derive(uint64_t seed, uint64_t stream) {
        uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double uniform() {  // [0,1)
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform() < p; }

    uint64_t below(uint64_t n) {  // uniform in [0,n)
        return n ? gen_() % n : 0;
    }

    double normal() {  // Box-Muller, fresh pair each call
        double u1 = uniform();
        double u2 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace aec
