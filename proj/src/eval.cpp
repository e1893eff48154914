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

#include "distillrec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "distillrec/parallel.hpp"

namespace distillrec {

namespace {

bool contains(const std::vector<ItemId>& sorted, ItemId item) {
  return std::binary_search(sorted.begin(), sorted.end(), item);
}

}  // namespace

double recall_at_n(const std::vector<ItemId>& top,
                   const std::vector<ItemId>& relevant, std::size_t n) {
  if (relevant.empty()) {
    throw std::invalid_argument("recall needs a nonempty relevant set");
  }
  const std::size_t depth = std::min(n, top.size());
  std::size_t hits = 0;
  for (std::size_t k = 0; k < depth; ++k) {
    if (contains(relevant, top[k])) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

double ndcg_at_n(const std::vector<ItemId>& top,
                 const std::vector<ItemId>& relevant, std::size_t n) {
  if (relevant.empty()) {
    throw std::invalid_argument("ndcg needs a nonempty relevant set");
  }
  const std::size_t depth = std::min(n, top.size());
  double dcg = 0.0;
  for (std::size_t k = 0; k < depth; ++k) {
    if (contains(relevant, top[k])) {
      dcg += 1.0 / std::log2(static_cast<double>(k) + 2.0);
    }
  }
  const std::size_t ideal_hits = std::min(relevant.size(), n);
  double idcg = 0.0;
  for (std::size_t k = 0; k < ideal_hits; ++k) {
    idcg += 1.0 / std::log2(static_cast<double>(k) + 2.0);
  }
  return dcg / idcg;
}

std::optional<double> group_recall(const std::vector<ItemId>& top,
                                   const std::vector<ItemId>& relevant,
                                   const std::vector<char>& group_mask,
                                   std::size_t n) {
  std::size_t group_relevant = 0;
  for (ItemId i : relevant) {
    if (group_mask[i]) ++group_relevant;
  }
  if (group_relevant == 0) return std::nullopt;
  const std::size_t depth = std::min(n, top.size());
  std::size_t hits = 0;
  for (std::size_t k = 0; k < depth; ++k) {
    if (group_mask[top[k]] && contains(relevant, top[k])) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(group_relevant);
}

double popularity_share(const std::vector<std::vector<ItemId>>& top_lists,
                        const std::vector<char>& group_mask, std::size_t n) {
  std::size_t slots = 0;
  std::size_t in_group = 0;
  for (const auto& top : top_lists) {
    const std::size_t depth = std::min(n, top.size());
    slots += depth;
    for (std::size_t k = 0; k < depth; ++k) {
      if (group_mask[top[k]]) ++in_group;
    }
  }
  if (slots == 0) return 0.0;
  return static_cast<double>(in_group) / static_cast<double>(slots);
}

EvalReport evaluate_model(const EmbeddingModel& model,
                          const InteractionDataset& dataset,
                          const PopularityPartition& partition, std::size_t n) {
  if (partition.k != 2) {
    throw std::invalid_argument(
        "evaluation expects a two-group popularity partition");
  }
  std::vector<char> popular_mask(dataset.num_items, 0);
  for (ItemId i = 0; i < dataset.num_items; ++i) {
    popular_mask[i] = partition.item_group[i] == 0 ? 1 : 0;
  }
  std::vector<char> unpopular_mask(dataset.num_items, 0);
  for (ItemId i = 0; i < dataset.num_items; ++i) {
    unpopular_mask[i] = popular_mask[i] ? 0 : 1;
  }

  const std::size_t m = dataset.num_users;
  struct UserSlot {
    bool evaluated = false;
    double recall = 0.0;
    double ndcg = 0.0;
    std::optional<double> popular;
    std::optional<double> unpopular;
    std::vector<ItemId> top;
  };
  std::vector<UserSlot> slots(m);

  parallel_for(m, [&](std::size_t u) {
    const auto& relevant = dataset.test[u];
    if (relevant.empty()) return;
    std::vector<char> excluded(dataset.num_items, 0);
    for (ItemId i : dataset.train[u]) excluded[i] = 1;
    for (ItemId i : dataset.valid[u]) excluded[i] = 1;
    UserSlot& slot = slots[u];
    slot.evaluated = true;
    slot.top = model.top_n(static_cast<UserId>(u), n, excluded);
    slot.recall = recall_at_n(slot.top, relevant, n);
    slot.ndcg = ndcg_at_n(slot.top, relevant, n);
    slot.popular = group_recall(slot.top, relevant, popular_mask, n);
    slot.unpopular = group_recall(slot.top, relevant, unpopular_mask, n);
  });

  EvalReport report;
  report.n = n;
  double popular_sum = 0.0;
  double unpopular_sum = 0.0;
  std::vector<std::vector<ItemId>> top_lists;
  std::size_t popular_test = 0;
  std::size_t total_test = 0;
  for (std::size_t u = 0; u < m; ++u) {
    const UserSlot& slot = slots[u];
    if (!slot.evaluated) continue;
    ++report.users_evaluated;
    report.recall += slot.recall;
    report.ndcg += slot.ndcg;
    if (slot.popular) {
      popular_sum += *slot.popular;
      ++report.popular_users;
    }
    if (slot.unpopular) {
      unpopular_sum += *slot.unpopular;
      ++report.unpopular_users;
    }
    top_lists.push_back(slot.top);
    for (ItemId i : dataset.test[u]) {
      ++total_test;
      if (popular_mask[i]) ++popular_test;
    }
  }
  if (report.users_evaluated > 0) {
    report.recall /= static_cast<double>(report.users_evaluated);
    report.ndcg /= static_cast<double>(report.users_evaluated);
  }
  if (report.popular_users > 0) {
    report.popular_recall = popular_sum / static_cast<double>(report.popular_users);
  }
  if (report.unpopular_users > 0) {
    report.unpopular_recall =
        unpopular_sum / static_cast<double>(report.unpopular_users);
  }
  report.popular_share = popularity_share(top_lists, popular_mask, n);
  report.unpopular_share = popularity_share(top_lists, unpopular_mask, n);
  if (total_test > 0) {
    report.ideal_popular_share =
        static_cast<double>(popular_test) / static_cast<double>(total_test);
    report.ideal_unpopular_share = 1.0 - report.ideal_popular_share;
  }
  return report;
}

double mean_validation_ndcg(const EmbeddingModel& model,
                            const InteractionDataset& dataset, std::size_t n) {
  const std::size_t m = dataset.num_users;
  std::vector<double> values(m, -1.0);
  parallel_for(m, [&](std::size_t u) {
    const auto& relevant = dataset.valid[u];
    if (relevant.empty()) return;
    std::vector<char> excluded(dataset.num_items, 0);
    for (ItemId i : dataset.train[u]) excluded[i] = 1;
    const auto top = model.top_n(static_cast<UserId>(u), n, excluded);
    values[u] = ndcg_at_n(top, relevant, n);
  });
  double sum = 0.0;
  std::size_t count = 0;
  for (double v : values) {
    if (v >= 0.0) {
      sum += v;
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

}  // namespace distillrec
