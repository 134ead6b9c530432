// Copyright (c) 2026 The sflf Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SFLF_RNG_HPP
#define SFLF_RNG_HPP

#include <cstdint>
#include <initializer_list>

namespace sflf {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Order-sensitive hash of a tuple of counters.
constexpr std::uint64_t hash_counters(std::initializer_list<std::uint64_t> keys) {
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (auto k : keys) h = splitmix64(h ^ splitmix64(k));
    return h;
}

// PCG-XSH-RR 32-bit generator. One stream per (seed, texel, sample) keeps
// results independent of thread scheduling.
class Pcg32 {
  public:
    explicit constexpr Pcg32(std::uint64_t seed, std::uint64_t stream = 0x853c49e6748fea9bULL)
        : inc_((stream << 1u) | 1u) {
        next_u32();
        state_ += seed;
        next_u32();
    }

    constexpr std::uint32_t next_u32() {
        const std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        const auto rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((~rot + 1u) & 31u));
    }

    // Uniform in [0, 1).
    constexpr double uniform() {
        const std::uint64_t hi = next_u32();
        const std::uint64_t lo = next_u32();
        return static_cast<double>(((hi << 32) | lo) >> 11) * 0x1.0p-53;
    }

  private:
    std::uint64_t state_ = 0;
    std::uint64_t inc_;
};

}  // namespace sflf

#endif  // SFLF_RNG_HPP
