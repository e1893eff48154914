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
#include <vector>

#include "distillrec/common.hpp"

namespace distillrec {

struct PowerLawConfig {
  double alpha = 1.5;
  std::uint32_t z_min = 1;
  std::uint32_t z_max = 1000;
};

/// Synthetic world where soft labels decompose exactly: each label is the
/// true affinity plus a monotone popularity offset,
/// Y(u, i) = M(u, i) + gamma * log(1 + Z_i). Every counterfactual below is
/// closed-form, so effect decompositions can be checked to float precision.
struct SyntheticCausalModel {
  Mat affinity;
  std::vector<std::uint32_t> popularity;
  double gamma = 1.0;
  /// The intervention anchor: effects compare item i against this item.
  ItemId baseline_item = 0;

  std::uint32_t num_users() const {
    return static_cast<std::uint32_t>(affinity.rows());
  }
  std::uint32_t num_items() const {
    return static_cast<std::uint32_t>(affinity.cols());
  }

  double bias_offset(ItemId i) const;
  double soft_label(UserId u, ItemId i) const;
  /// Label of item i with its popularity replaced by z_source's.
  double counterfactual_soft_label(UserId u, ItemId i, ItemId z_source) const;
};

/// Index of the item with median popularity (lower median, ties toward the
/// smaller index).
ItemId median_popularity_item(const std::vector<std::uint32_t>& popularity);

/// Explicit construction for tests and hand-built instances.
SyntheticCausalModel make_causal_model(Mat affinity,
                                       std::vector<std::uint32_t> popularity,
                                       double gamma, ItemId baseline_item);

/// Affinities i.i.d. uniform(0,1); popularity from a discretized power law
/// (ties expected, which creates equal-popularity strata); baseline at the
/// median-popularity item.
SyntheticCausalModel generate_causal_model(std::uint32_t num_users,
                                           std::uint32_t num_items,
                                           double gamma,
                                           const PowerLawConfig& power_law,
                                           std::uint64_t seed);

/// Label difference against the baseline item: Y(u,i) - Y(u,i*).
double total_effect(const SyntheticCausalModel& model, UserId u, ItemId i);

/// Effect of moving only popularity: the baseline item's label under item i's
/// popularity, minus its factual label.
double path_effect_z(const SyntheticCausalModel& model, UserId u, ItemId i);

/// The preference component: total effect minus the popularity path.
double path_effect_m(const SyntheticCausalModel& model, UserId u, ItemId i);

struct LemmaCheckResult {
  bool rankings_equal = false;
  std::vector<ItemId> by_soft_label;
  std::vector<ItemId> by_preference;
};

/// Within an equal-popularity item subset, ranking by soft label must equal
/// ranking by preference effect (the popularity offset is a shared constant).
/// Unequal popularity in the subset is a caller error.
LemmaCheckResult lemma1_check(const SyntheticCausalModel& model, UserId u,
                              const std::vector<ItemId>& subset);

/// Same comparison without the equal-popularity precondition; near-equal
/// popularity may break the equality, which is the point of checking.
LemmaCheckResult lemma1_check_relaxed(const SyntheticCausalModel& model,
                                      UserId u,
                                      const std::vector<ItemId>& subset);

/// Items grouped by exact popularity value, most popular stratum first.
std::vector<std::vector<ItemId>> equal_popularity_strata(
    const SyntheticCausalModel& model);

/// Fraction of top-10-by-label slots (across all users) held by the most
/// popular decile of items. Grows with gamma: the bias knob made visible.
double popular_decile_share_top10(const SyntheticCausalModel& model);

}  // namespace distillrec
