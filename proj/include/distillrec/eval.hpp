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
#include <optional>
#include <vector>

#include "distillrec/backbone.hpp"
#include "distillrec/common.hpp"
#include "distillrec/dataset.hpp"
#include "distillrec/distill.hpp"

namespace distillrec {

/// |top_N intersect relevant| / |relevant|. Callers skip users with an empty
/// relevant set; passing one is an error.
double recall_at_n(const std::vector<ItemId>& top,
                   const std::vector<ItemId>& relevant, std::size_t n);

/// Binary-relevance NDCG: DCG sums 1/log2(k+1) over relevant hits at 1-based
/// rank k <= N; the ideal DCG places min(|relevant|, N) hits up front.
double ndcg_at_n(const std::vector<ItemId>& top,
                 const std::vector<ItemId>& relevant, std::size_t n);

/// Recall restricted to relevant items inside one popularity group. Empty
/// (relevant intersect group) means the user does not qualify: nullopt.
std::optional<double> group_recall(const std::vector<ItemId>& top,
                                   const std::vector<ItemId>& relevant,
                                   const std::vector<char>& group_mask,
                                   std::size_t n);

/// Fraction of all recommended slots (across users, up to N each) occupied by
/// group members.
double popularity_share(const std::vector<std::vector<ItemId>>& top_lists,
                        const std::vector<char>& group_mask, std::size_t n);

struct EvalReport {
  std::size_t n = 0;
  std::size_t users_evaluated = 0;
  double recall = 0.0;
  double ndcg = 0.0;
  double popular_recall = 0.0;
  double unpopular_recall = 0.0;
  std::size_t popular_users = 0;
  std::size_t unpopular_users = 0;
  /// Share of top-N slots filled by each group, plus the share each group
  /// holds of the test interactions (the composition a bias-free ranker
  /// would be compared against).
  double popular_share = 0.0;
  double unpopular_share = 0.0;
  double ideal_popular_share = 0.0;
  double ideal_unpopular_share = 0.0;
};

/// Ranks every test user over the items outside train u valid and aggregates
/// all metrics. The partition must have exactly two groups: groups[0] is the
/// popular head, groups[1] the unpopular tail.
EvalReport evaluate_model(const EmbeddingModel& model,
                          const InteractionDataset& dataset,
                          const PopularityPartition& partition, std::size_t n);

/// Mean NDCG over users with validation items, excluding only train items
/// from the candidate set. The early-stopping signal.
double mean_validation_ndcg(const EmbeddingModel& model,
                            const InteractionDataset& dataset, std::size_t n);

}  // namespace distillrec
