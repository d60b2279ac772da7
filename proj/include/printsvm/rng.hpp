/*
 * Copyright 2026 The printsvm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>

namespace printsvm {

/// 64-bit linear congruential generator (Knuth MMIX constants).
///
/// All randomness in the toolchain flows through this generator so that
/// splits and training runs are reproducible across platforms and
/// standard-library implementations. Only the high 32 bits of the state
/// are used for draws, since the low bits of a power-of-two LCG have
/// short periods.
class Lcg64 {
public:
    static constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;
    static constexpr std::uint64_t kIncrement = 1442695040888963407ULL;

    explicit constexpr Lcg64(std::uint64_t seed) : state_(seed) { next(); }

    constexpr std::uint64_t next() {
        state_ = state_ * kMultiplier + kIncrement;
        return state_;
    }

    /// Uniform integer in [0, bound), bound < 2^32.
    constexpr std::uint32_t uniform(std::uint32_t bound) {
        const std::uint64_t hi = next() >> 32;
        return static_cast<std::uint32_t>((hi * bound) >> 32);
    }

    /// Uniform real in [0, 1) with 32 bits of resolution.
    constexpr double uniform_real() {
        return static_cast<double>(next() >> 32) * (1.0 / 4294967296.0);
    }

    constexpr std::uint64_t state() const { return state_; }

private:
    std::uint64_t state_;
};

/// Derive an independent stream seed, e.g. one per OvR classifier.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer over (seed, stream)
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace printsvm
