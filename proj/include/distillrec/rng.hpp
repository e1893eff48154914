// Copyright 2026 The distillrec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>

namespace distillrec {

// Purpose tags for deriving independent sampling streams from one experiment
// seed. Streams keyed on (seed, stream, a, b) are stable across runs and do
// not depend on scheduling, so per-user sampling replays identically no
// matter how work is ordered.
enum class Stream : std::uint64_t {
  kEmbeddingInit = 1,
  kSplit = 2,
  kBprSampling = 3,
  kDistillSampling = 4,
  kEpochShuffle = 5,
  kSynthetic = 6,
  kCausal = 7,
};

std::uint64_t splitmix64(std::uint64_t x);

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                       std::uint64_t c = 0);

std::mt19937_64 make_rng(std::uint64_t seed, Stream stream, std::uint64_t a = 0,
                         std::uint64_t b = 0);

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
/// Used instead of std::uniform_real_distribution so streams are stable
/// across standard-library implementations.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform index in [0, n). Modulo bias is below n / 2^64, far under any
/// tolerance used here.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  return rng() % n;
}

}  // namespace distillrec
