#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace segwise {

using Rng = std::mt19937_64;

// Purpose tags for derived substreams.
enum class StreamTag : std::uint64_t {
    wbs_intervals = 0x7762'7300,
    bootstrap = 0x626f'6f74,
    replication = 0x7265'706c,
    model = 0x6d6f'6465,
    noise = 0x6e6f'6973,
    fold = 0x666f'6c64,
    uq = 0x7571'0000,
};

// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for the substream identified by (seed, tag, keys...). Independent of
/// evaluation order, so results do not depend on worker scheduling.
inline std::uint64_t derive_seed(std::uint64_t seed, StreamTag tag,
                                 std::initializer_list<std::uint64_t> keys = {}) {
    std::uint64_t h = mix64(seed ^ mix64(static_cast<std::uint64_t>(tag)));
    for (std::uint64_t k : keys) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
    return h;
}

inline Rng make_stream(std::uint64_t seed, StreamTag tag, std::initializer_list<std::uint64_t> keys = {}) {
    return Rng(derive_seed(seed, tag, keys));
}

}  // namespace segwise
