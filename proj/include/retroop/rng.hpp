// Copyright 2026 The RetroOp Authors
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

/**
 * @file
 * Counter-based SplitMix64 streams.
 *
 * Draw i of the stream with key k is mix64(k + (i + 1) * 0x9e3779b97f4a7c15),
 * where mix64 is the SplitMix64 finalizer. A stream key is derived from a
 * 64-bit seed and a stream id by hashing both, so trajectory t of a run
 * always sees the same numbers no matter which thread draws them.
 */

#pragma once

#include <cstdint>
#include <limits>

namespace retroop {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class CounterRng {
  public:
    using result_type = std::uint64_t;

    explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}

    /// Independent stream `stream_id` of run `seed`.
    static constexpr CounterRng stream(std::uint64_t seed, std::uint64_t stream_id) {
        return CounterRng(mix64(mix64(seed) ^ mix64(stream_id + kGoldenGamma)));
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() { return mix64(key_ + (++counter_) * kGoldenGamma); }

    /// Uniform on [0, 1) with 53 random bits.
    constexpr double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    constexpr std::uint64_t key() const { return key_; }
    constexpr std::uint64_t counter() const { return counter_; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace retroop
