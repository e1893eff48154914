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
#include <span>
#include <string>
#include <vector>

#include "distillrec/backbone.hpp"
#include "distillrec/common.hpp"
#include "distillrec/dataset.hpp"
#include "distillrec/gradients.hpp"

namespace distillrec {

enum class DistillMethod : std::uint8_t { kNone = 0, kRd = 1, kCd = 2, kUnkd = 3 };

std::string to_string(DistillMethod method);
DistillMethod parse_distill_method(const std::string& name);

/// Items partitioned into groups of near-equal total interaction mass.
/// Groups are ordered from most to least popular; `groups[0]` holds the head.
struct PopularityPartition {
  std::uint32_t k = 0;
  std::vector<std::vector<ItemId>> groups;
  std::vector<std::uint64_t> group_mass;
  /// item -> group index. Zero-popularity items land in the last group.
  std::vector<std::uint32_t> item_group;
};

/// Greedy equal-mass grouping: walk items by descending popularity and close
/// the current group once its mass reaches (remaining mass) / (open groups).
/// Requires at least k items with nonzero popularity.
PopularityPartition partition_items(const std::vector<std::uint32_t>& popularity,
                                    std::uint32_t k);

/// One teacher-ranked candidate list. `items[r]` is the candidate at rank r+1;
/// ties in score break toward the lower item id.
struct RankedCandidates {
  std::vector<ItemId> items;
  std::vector<double> scores;
};

/// Per-user teacher rankings restricted to one popularity group, truncated to
/// the per-group budget. Training and validation items are excluded. Groups
/// with no remaining candidates yield empty lists.
std::vector<RankedCandidates> teacher_group_ranking(
    const EmbeddingModel& teacher, const InteractionDataset& dataset,
    const PopularityPartition& partition, UserId user,
    std::uint32_t per_group_budget);

/// Normalized rank-decayed sampling weights: w_r proportional to exp(-r / mu)
/// for ranks r = 1..len.
std::vector<double> rank_sampling_weights(std::size_t len, double mu);

struct DistillPair {
  UserId user = 0;
  ItemId pos = 0;
  ItemId neg = 0;
};

/// Draws `num_pairs` (positive, negative) pairs from one ranked list. The
/// positive rank follows the exp(-r / mu) law; the negative is uniform among
/// strictly lower-ranked candidates. A positive drawn at the bottom rank has
/// no admissible negative and is redrawn. Requires at least two candidates.
std::vector<DistillPair> sample_group_pairs(const RankedCandidates& ranking,
                                            UserId user, double mu,
                                            std::uint32_t num_pairs,
                                            std::mt19937_64& rng);

/// Frozen teacher knowledge prepared for student training. For the ranking
/// methods the per-user lists are grouped by popularity; for the score-weighted
/// method there is a single global list per user plus fixed position weights.
struct DistillPlan {
  DistillMethod method = DistillMethod::kNone;
  std::uint32_t k = 1;
  double mu = 10.0;
  double lambda = 0.0;
  std::uint32_t soft_label_budget = 40;
  std::uint32_t per_group_budget = 40;
  PopularityPartition partition;
  /// users[u][g] is user u's ranked list for group g (ranking methods).
  std::vector<std::vector<RankedCandidates>> users;
  /// Global per-user list and its position weights (score-weighted method).
  std::vector<RankedCandidates> global_lists;
  std::vector<double> global_weights;
};

DistillPlan build_group_plan(const EmbeddingModel& teacher,
                             const InteractionDataset& dataset,
                             std::uint32_t k, double mu, double lambda,
                             std::uint32_t soft_label_budget);

/// Single-group special case of the group plan.
DistillPlan build_cd_plan(const EmbeddingModel& teacher,
                          const InteractionDataset& dataset, double mu,
                          double lambda, std::uint32_t soft_label_budget);

DistillPlan build_rd_plan(const EmbeddingModel& teacher,
                          const InteractionDataset& dataset,
                          std::uint32_t top_n, double mu, double lambda);

/// Draws one epoch's worth of pairs across every user and group in the plan.
/// Each user consumes an independent stream keyed by (seed, user, epoch), so
/// the draw is reproducible regardless of iteration order. `pairs_per_group`
/// of zero means one pair per candidate-list slot (the per-group budget).
std::vector<DistillPair> sample_plan_pairs(const DistillPlan& plan,
                                           std::uint64_t seed,
                                           std::uint32_t epoch,
                                           std::uint32_t pairs_per_group);

/// Mean over contributing users of the summed pairwise soft ranking loss
/// -log sigmoid(s_pos - s_neg). Adds `scale` times the gradient into `grad`
/// and returns the unscaled loss. `num_norm_users` is the number of distinct
/// users contributing pairs anywhere in the epoch, so chunked calls sum to
/// the full-batch value.
double group_distill_loss_grad(const Mat& eff_user, const Mat& eff_item,
                               std::span<const DistillPair> pairs,
                               std::size_t num_norm_users, double scale,
                               GradientBuffer* grad);

/// One (user, item, weight) term of the score-weighted pointwise loss.
struct RdEntry {
  UserId user = 0;
  ItemId item = 0;
  double weight = 0.0;
};

/// Flattens a score-weighted plan into per-position entries.
std::vector<RdEntry> flatten_rd_entries(const DistillPlan& plan);

/// Mean over contributing users of the weighted pointwise loss
/// -sum_k w_k log sigmoid(s(u, item_k)). Same chunking contract as
/// group_distill_loss_grad.
double rd_loss_grad(const Mat& eff_user, const Mat& eff_item,
                    std::span<const RdEntry> entries,
                    std::size_t num_norm_users, double scale,
                    GradientBuffer* grad);

/// Total objective: base ranking loss plus lambda times the distillation loss.
inline double combined_objective(double base_loss, double distill_loss,
                                 double lambda) {
  return base_loss + lambda * distill_loss;
}

/// Writes "user<TAB>group<TAB>rank<TAB>item<TAB>score" rows for inspection.
void dump_plan(const DistillPlan& plan, const std::string& path);

}  // namespace distillrec
