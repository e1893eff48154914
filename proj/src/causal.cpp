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

#include "distillrec/causal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "distillrec/rng.hpp"

namespace distillrec {

double SyntheticCausalModel::bias_offset(ItemId i) const {
  return gamma * std::log1p(static_cast<double>(popularity[i]));
}

double SyntheticCausalModel::soft_label(UserId u, ItemId i) const {
  return affinity(u, i) + bias_offset(i);
}

double SyntheticCausalModel::counterfactual_soft_label(UserId u, ItemId i,
                                                       ItemId z_source) const {
  return affinity(u, i) + bias_offset(z_source);
}

ItemId median_popularity_item(const std::vector<std::uint32_t>& popularity) {
  if (popularity.empty()) {
    throw std::invalid_argument("popularity vector is empty");
  }
  std::vector<ItemId> order(popularity.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](ItemId a, ItemId b) {
    if (popularity[a] != popularity[b]) return popularity[a] < popularity[b];
    return a < b;
  });
  return order[(order.size() - 1) / 2];
}

SyntheticCausalModel make_causal_model(Mat affinity,
                                       std::vector<std::uint32_t> popularity,
                                       double gamma, ItemId baseline_item) {
  if (static_cast<std::size_t>(affinity.cols()) != popularity.size()) {
    throw std::invalid_argument("affinity columns must match popularity size");
  }
  if (baseline_item >= popularity.size()) {
    throw std::invalid_argument("baseline item out of range");
  }
  if (gamma < 0) {
    throw std::invalid_argument("gamma must be non-negative");
  }
  SyntheticCausalModel model;
  model.affinity = std::move(affinity);
  model.popularity = std::move(popularity);
  model.gamma = gamma;
  model.baseline_item = baseline_item;
  return model;
}

SyntheticCausalModel generate_causal_model(std::uint32_t num_users,
                                           std::uint32_t num_items,
                                           double gamma,
                                           const PowerLawConfig& power_law,
                                           std::uint64_t seed) {
  if (num_users == 0 || num_items == 0) {
    throw std::invalid_argument("model needs at least one user and item");
  }
  if (!(power_law.alpha > 1.0)) {
    throw std::invalid_argument("power-law alpha must exceed 1");
  }
  if (power_law.z_min < 1 || power_law.z_max < power_law.z_min) {
    throw std::invalid_argument("power-law range is invalid");
  }

  Mat affinity(num_users, num_items);
  std::mt19937_64 rng_m = make_rng(seed, Stream::kCausal, 0);
  for (std::uint32_t u = 0; u < num_users; ++u) {
    for (std::uint32_t i = 0; i < num_items; ++i) {
      affinity(u, i) = uniform_unit(rng_m);
    }
  }

  std::vector<std::uint32_t> popularity(num_items);
  std::mt19937_64 rng_z = make_rng(seed, Stream::kCausal, 1);
  const double exponent = -1.0 / (power_law.alpha - 1.0);
  for (std::uint32_t i = 0; i < num_items; ++i) {
    const double u = uniform_unit(rng_z);
    const double raw =
        static_cast<double>(power_law.z_min) * std::pow(1.0 - u, exponent);
    const double clamped =
        std::min(raw, static_cast<double>(power_law.z_max));
    popularity[i] = static_cast<std::uint32_t>(clamped);
  }

  const ItemId baseline = median_popularity_item(popularity);
  return make_causal_model(std::move(affinity), std::move(popularity), gamma,
                           baseline);
}

double total_effect(const SyntheticCausalModel& model, UserId u, ItemId i) {
  return model.soft_label(u, i) - model.soft_label(u, model.baseline_item);
}

double path_effect_z(const SyntheticCausalModel& model, UserId u, ItemId i) {
  return model.counterfactual_soft_label(u, model.baseline_item, i) -
         model.soft_label(u, model.baseline_item);
}

double path_effect_m(const SyntheticCausalModel& model, UserId u, ItemId i) {
  return total_effect(model, u, i) - path_effect_z(model, u, i);
}

namespace {

std::vector<ItemId> rank_descending(const std::vector<ItemId>& subset,
                                    const std::vector<double>& values) {
  std::vector<std::size_t> order(subset.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (values[a] != values[b]) return values[a] > values[b];
                     return subset[a] < subset[b];
                   });
  std::vector<ItemId> ranked(subset.size());
  for (std::size_t k = 0; k < order.size(); ++k) ranked[k] = subset[order[k]];
  return ranked;
}

LemmaCheckResult compare_rankings(const SyntheticCausalModel& model, UserId u,
                                  const std::vector<ItemId>& subset) {
  std::vector<double> labels(subset.size());
  std::vector<double> preferences(subset.size());
  for (std::size_t k = 0; k < subset.size(); ++k) {
    labels[k] = model.soft_label(u, subset[k]);
    preferences[k] = path_effect_m(model, u, subset[k]);
  }
  LemmaCheckResult result;
  result.by_soft_label = rank_descending(subset, labels);
  result.by_preference = rank_descending(subset, preferences);
  result.rankings_equal = result.by_soft_label == result.by_preference;
  return result;
}

}  // namespace

LemmaCheckResult lemma1_check(const SyntheticCausalModel& model, UserId u,
                              const std::vector<ItemId>& subset) {
  for (ItemId i : subset) {
    if (model.popularity[i] != model.popularity[subset.front()]) {
      throw std::invalid_argument(
          "lemma check requires equal popularity across the subset");
    }
  }
  return compare_rankings(model, u, subset);
}

LemmaCheckResult lemma1_check_relaxed(const SyntheticCausalModel& model,
                                      UserId u,
                                      const std::vector<ItemId>& subset) {
  return compare_rankings(model, u, subset);
}

std::vector<std::vector<ItemId>> equal_popularity_strata(
    const SyntheticCausalModel& model) {
  std::map<std::uint32_t, std::vector<ItemId>, std::greater<>> by_popularity;
  for (ItemId i = 0; i < model.num_items(); ++i) {
    by_popularity[model.popularity[i]].push_back(i);
  }
  std::vector<std::vector<ItemId>> strata;
  strata.reserve(by_popularity.size());
  for (auto& [z, items] : by_popularity) strata.push_back(std::move(items));
  return strata;
}

double popular_decile_share_top10(const SyntheticCausalModel& model) {
  const std::uint32_t n = model.num_items();
  const std::uint32_t decile = std::max<std::uint32_t>(1, (n + 9) / 10);
  std::vector<ItemId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](ItemId a, ItemId b) {
    if (model.popularity[a] != model.popularity[b]) {
      return model.popularity[a] > model.popularity[b];
    }
    return a < b;
  });
  std::vector<char> in_decile(n, 0);
  for (std::uint32_t k = 0; k < decile; ++k) in_decile[order[k]] = 1;

  const std::size_t depth = std::min<std::size_t>(10, n);
  std::size_t hits = 0;
  std::vector<ItemId> all(n);
  std::iota(all.begin(), all.end(), 0);
  for (UserId u = 0; u < model.num_users(); ++u) {
    std::vector<double> labels(n);
    for (ItemId i = 0; i < n; ++i) labels[i] = model.soft_label(u, i);
    const auto ranked = rank_descending(all, labels);
    for (std::size_t k = 0; k < depth; ++k) {
      if (in_decile[ranked[k]]) ++hits;
    }
  }
  return static_cast<double>(hits) /
         static_cast<double>(model.num_users() * depth);
}

}  // namespace distillrec
