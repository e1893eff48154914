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
#include <string>
#include <vector>

#include "distillrec/common.hpp"

namespace distillrec {

/// Controls the synthetic implicit-feedback world: users hold latent tastes,
/// items hold latent traits plus a long-tailed exposure boost, and each user
/// interacts with their noisy top items. Preference structure makes capacity
/// matter; exposure skew makes popularity matter.
struct BenchmarkConfig {
  std::uint32_t num_users = 2000;
  std::uint32_t num_items = 1200;
  std::uint32_t latent_dim = 16;
  /// Scales the taste-trait inner product in the interaction score.
  double affinity_weight = 3.0;
  /// Scales the long-tail exposure offset in the interaction score.
  double popularity_weight = 1.0;
  double zipf_exponent = 1.0;
  std::uint32_t min_interactions_per_user = 25;
  /// Mean of the exponential tail added on top of the minimum.
  double mean_extra_interactions = 35.0;
  std::uint64_t seed = 0;
};

struct SyntheticInteraction {
  std::uint32_t user = 0;
  std::uint32_t item = 0;
};

/// Draws the full interaction set. Each user's items are a Gumbel-noised
/// top-k of affinity_weight * taste.trait + popularity_weight * exposure_i,
/// so the draw is without replacement and deterministic per seed.
std::vector<SyntheticInteraction> generate_benchmark(
    const BenchmarkConfig& config);

/// Writes "user<TAB>item<TAB>rating<TAB>timestamp" rows (rating fixed at 5,
/// timestamps sequential) ready for dataset ingestion.
void write_benchmark_interactions(const BenchmarkConfig& config,
                                  const std::string& path);

}  // namespace distillrec
