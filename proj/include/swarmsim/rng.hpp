#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace swarmsim {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Seed of the substream named `label`. Streams never share state, so drawing
/// from one cannot shift another.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
    return splitmix64(seed ^ splitmix64(fnv1a(label)));
}

/// Uniform [0,1) draw that depends only on (seed, index); for decisions that
/// must not depend on the order in which events happen to be processed.
inline double keyed_unit(std::uint64_t stream_seed, std::uint64_t index) {
    const std::uint64_t bits = splitmix64(stream_seed ^ splitmix64(index + 1));
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

struct RngStreams {
    std::mt19937_64 topology;
    std::mt19937_64 heterogeneity;
    std::mt19937_64 workload;
    std::mt19937_64 network;
    std::mt19937_64 failures;
    std::uint64_t obstacle_seed;

    explicit RngStreams(std::uint64_t seed)
        : topology(derive_seed(seed, "topology")),
          heterogeneity(derive_seed(seed, "heterogeneity")),
          workload(derive_seed(seed, "workload")),
          network(derive_seed(seed, "network")),
          failures(derive_seed(seed, "failures")),
          obstacle_seed(derive_seed(seed, "obstacle")) {}
};

/// Uniform [0,1) from a 64-bit engine, independent of library distribution code.
inline double unit(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

}  // namespace swarmsim
