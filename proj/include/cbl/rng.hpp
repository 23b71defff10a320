#pragma once

#include <cstdint>

#include "cbl/geometry.hpp"

namespace cbl {

// splitmix64: portable, deterministic across platforms and standard libraries
// (std::uniform_real_distribution is implementation-defined, so reports built
// from it would not be byte-stable across toolchains).
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed = 0x9e3779b97f4a7c15ull) : state(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    Vec uniform_vec(int n, double lo, double hi) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = uniform(lo, hi);
        return v;
    }

    // Deterministic derived stream, independent of call order elsewhere.
    static Rng derive(std::uint64_t seed, std::uint64_t stream) {
        Rng r(seed ^ (0xd1342543de82ef95ull * (stream + 1)));
        r.next_u64();
        return r;
    }
};

}  // namespace cbl
