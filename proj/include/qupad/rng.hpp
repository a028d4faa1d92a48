// Copyright 2026 The QuPAD Authors
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

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace qupad {

/// Mixes a seed with a stream id so independent consumers get uncorrelated engines.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seeded random source with platform-independent output.
///
/// std::uniform_real_distribution and std::normal_distribution are not specified
/// bit-for-bit, so the transforms are done here on top of the raw 64-bit engine.
/// The number of engine draws is counted so a stream can be resumed from (seed, draws).
class Rng {
   public:
    explicit Rng(std::uint64_t seed = 0, std::uint64_t draws = 0) : seed_(seed), engine_(seed) {
        engine_.discard(draws);
        draws_ = draws;
    }

    std::uint64_t next_u64() {
        ++draws_;
        return engine_();
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal by Box-Muller; consumes exactly two engine draws.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 <= 0.0) {
            u1 = 0x1.0p-53;
        }
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)); }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t draws() const { return draws_; }

   private:
    std::uint64_t seed_;
    std::uint64_t draws_ = 0;
    std::mt19937_64 engine_;
};

}  // namespace qupad
