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

#include "distillrec/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include "distillrec/rng.hpp"

namespace distillrec {

std::vector<SyntheticInteraction> generate_benchmark(
    const BenchmarkConfig& config) {
  if (config.num_users == 0 || config.num_items == 0 ||
      config.latent_dim == 0) {
    throw std::invalid_argument("benchmark dimensions must be positive");
  }
  if (config.min_interactions_per_user >= config.num_items) {
    throw std::invalid_argument(
        "per-user minimum must be below the item count");
  }

  const std::uint32_t m = config.num_users;
  const std::uint32_t n = config.num_items;
  const std::uint32_t h = config.latent_dim;

  std::mt19937_64 latent_rng = make_rng(config.seed, Stream::kSynthetic, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat tastes(m, h);
  for (std::uint32_t u = 0; u < m; ++u) {
    for (std::uint32_t k = 0; k < h; ++k) tastes(u, k) = normal(latent_rng);
  }
  Mat traits(n, h);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t k = 0; k < h; ++k) traits(i, k) = normal(latent_rng);
  }
  tastes /= std::sqrt(static_cast<double>(h));

  // Exposure ranks are a random permutation so item id carries no signal.
  std::vector<std::uint32_t> exposure_rank(n);
  std::iota(exposure_rank.begin(), exposure_rank.end(), 0);
  std::mt19937_64 perm_rng = make_rng(config.seed, Stream::kSynthetic, 1);
  std::shuffle(exposure_rank.begin(), exposure_rank.end(), perm_rng);
  Vec exposure(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    exposure[i] = -config.zipf_exponent *
                  std::log(static_cast<double>(exposure_rank[i]) + 1.0);
  }

  std::vector<SyntheticInteraction> interactions;
  const std::size_t cap =
      std::max<std::size_t>(config.min_interactions_per_user + 1, n / 3);
  for (std::uint32_t u = 0; u < m; ++u) {
    std::mt19937_64 rng = make_rng(config.seed, Stream::kSynthetic, 2, u);
    const double extra =
        -config.mean_extra_interactions * std::log(1.0 - uniform_unit(rng));
    const std::size_t count = std::min<std::size_t>(
        cap, config.min_interactions_per_user +
                 static_cast<std::size_t>(extra));

    Vec scores(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      const double gumbel = -std::log(-std::log(
          std::max(uniform_unit(rng), 1e-300)));
      scores[i] = config.affinity_weight * tastes.row(u).dot(traits.row(i)) +
                  config.popularity_weight * exposure[i] + gumbel;
    }
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + count, order.end(),
                      [&](std::uint32_t a, std::uint32_t b) {
                        if (scores[a] != scores[b]) return scores[a] > scores[b];
                        return a < b;
                      });
    for (std::size_t k = 0; k < count; ++k) {
      interactions.push_back({u, order[k]});
    }
  }
  return interactions;
}

void write_benchmark_interactions(const BenchmarkConfig& config,
                                  const std::string& path) {
  const auto interactions = generate_benchmark(config);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  std::uint64_t timestamp = 1;
  for (const auto& it : interactions) {
    out << (it.user + 1) << '\t' << (it.item + 1) << "\t5\t" << timestamp++
        << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace distillrec
