#pragma once

#include <cstdint>
#include <random>

namespace sduo {

// splitmix64 finaliser; good avalanche, cheap enough to call per step
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derive an independent sub-seed from a base seed and one or more tags.
// Used to key per-step stream draws and per-component generators so that
// runs are reproducible regardless of evaluation order.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
    return mix64(base ^ mix64(tag));
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag_a,
                                 std::uint64_t tag_b) {
    return derive_seed(derive_seed(base, tag_a), tag_b);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

} // namespace sduo
