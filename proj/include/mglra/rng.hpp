#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

#include "mglra/errors.hpp"

namespace mglra {

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// splitmix64 finalizer; full avalanche, portable.
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
}

// Counter-based deterministic RNG: the value at (seed, counter) is a pure
// function of both, identical on every platform. No hidden global state.
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t counter = 0;

    RngStream() = default;
    explicit RngStream(std::uint64_t s, std::uint64_t c = 0) : seed(s), counter(c) {}

    std::uint64_t next_u64() {
        std::uint64_t z = seed + (counter + 1) * 0x9e3779b97f4a7c15ull;
        ++counter;
        return mix64(z);
    }

    // [0, 1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform_range(double lo, double hi) {
        return lo + uniform() * (hi - lo);
    }

    // Box-Muller; consumes exactly two counter steps per call.
    double gaussian() {
        double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; // (0, 1]
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    bool bernoulli(double p) {
        if (p < 0.0 || p > 1.0) throw ContractError("bernoulli: p out of [0,1]");
        return uniform() < p;
    }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) throw ContractError("next_below: n must be positive");
        // 53-bit mantissa path keeps this exactly reproducible across platforms
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
    }

    // Independent named stream derived from this stream's seed.
    RngStream substream(std::string_view name) const {
        return RngStream(mix64(seed ^ fnv1a(name)));
    }

    // Independent stream for a numbered subtask (e.g. per-dialogue).
    RngStream substream(std::uint64_t index) const {
        return RngStream(mix64(seed ^ mix64(index + 0x51ed270b7a4fb21dull)));
    }
};

} // namespace mglra
