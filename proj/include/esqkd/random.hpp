// Copyright 2026 The esqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>

namespace esqkd {

/// Seeded source of measurement randomness.
///
/// Output is bit-exact across platforms: std::mt19937_64 has a fully
/// specified sequence, and every derived quantity (labels, unit reals,
/// bounded integers) is computed here rather than through the
/// implementation-defined std distributions.
class RandomStream {
   public:
    explicit RandomStream(uint64_t seed) : seed_(seed), engine_(seed) {
    }

    uint64_t seed() const {
        return seed_;
    }

    uint64_t next_u64() {
        return engine_();
    }

    /// Two uniform bits (the top two of the next word).
    unsigned next_two_bits() {
        return static_cast<unsigned>(engine_() >> 62);
    }

    /// Uniform in [0, 1) with 53 bits of resolution.
    double next_unit() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [0, bound). Rejection sampling keeps it unbiased.
    uint64_t next_below(uint64_t bound) {
        if (bound <= 1) {
            return 0;
        }
        uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        uint64_t r;
        do {
            r = engine_();
        } while (r >= limit);
        return r % bound;
    }

    /// Independent child stream. The child seed is
    /// splitmix64(seed ^ splitmix64(stream_index)), so children are a pure
    /// function of (parent seed, index) and never of how much the parent
    /// has been consumed.
    RandomStream split(uint64_t stream_index) const {
        return RandomStream(derive_seed(seed_, stream_index));
    }

    static uint64_t derive_seed(uint64_t seed, uint64_t stream_index) {
        return splitmix64(seed ^ splitmix64(stream_index));
    }

    static constexpr uint64_t splitmix64(uint64_t x) {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

   private:
    uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace esqkd
