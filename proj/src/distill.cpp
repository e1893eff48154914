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

#include "distillrec/distill.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "distillrec/numerics.hpp"
#include "distillrec/parallel.hpp"
#include "distillrec/rng.hpp"

namespace distillrec {

std::string to_string(DistillMethod method) {
  switch (method) {
    case DistillMethod::kNone:
      return "none";
    case DistillMethod::kRd:
      return "rd";
    case DistillMethod::kCd:
      return "cd";
    case DistillMethod::kUnkd:
      return "unkd";
  }
  throw std::logic_error("unknown distill method");
}

DistillMethod parse_distill_method(const std::string& name) {
  if (name == "none") return DistillMethod::kNone;
  if (name == "rd") return DistillMethod::kRd;
  if (name == "cd") return DistillMethod::kCd;
  if (name == "unkd") return DistillMethod::kUnkd;
  throw std::runtime_error("unknown distillation method '" + name +
                           "' (expected none|rd|cd|unkd)");
}

PopularityPartition partition_items(const std::vector<std::uint32_t>& popularity,
                                    std::uint32_t k) {
  if (k < 1) {
    throw std::invalid_argument("partition group count must be at least 1");
  }
  const std::size_t n = popularity.size();
  std::vector<ItemId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](ItemId a, ItemId b) {
    if (popularity[a] != popularity[b]) return popularity[a] > popularity[b];
    return a < b;
  });

  std::size_t num_positive = 0;
  std::uint64_t total_mass = 0;
  for (std::uint32_t z : popularity) {
    if (z > 0) {
      ++num_positive;
      total_mass += z;
    }
  }
  if (num_positive < k) {
    throw std::runtime_error(
        "not enough items with nonzero popularity for the requested group "
        "count");
  }

  PopularityPartition part;
  part.k = k;
  part.groups.assign(k, {});
  part.group_mass.assign(k, 0);
  part.item_group.assign(n, k - 1);

  std::uint64_t remaining_mass = total_mass;
  std::uint32_t group = 0;
  std::uint64_t current_mass = 0;
  for (std::size_t pos = 0; pos < num_positive; ++pos) {
    const ItemId item = order[pos];
    part.groups[group].push_back(item);
    part.item_group[item] = group;
    current_mass += popularity[item];
    const std::uint32_t open_groups = k - group;
    const bool last_group = group + 1 == k;
    if (!last_group &&
        current_mass * open_groups >= remaining_mass) {
      part.group_mass[group] = current_mass;
      remaining_mass -= current_mass;
      current_mass = 0;
      ++group;
    }
  }
  part.group_mass[group] = current_mass;

  for (std::size_t pos = num_positive; pos < n; ++pos) {
    const ItemId item = order[pos];
    part.groups[k - 1].push_back(item);
    part.item_group[item] = k - 1;
  }
  return part;
}

namespace {

std::vector<char> excluded_mask(const InteractionDataset& dataset, UserId user) {
  std::vector<char> mask(dataset.num_items, 0);
  for (ItemId i : dataset.train[user]) mask[i] = 1;
  for (ItemId i : dataset.valid[user]) mask[i] = 1;
  return mask;
}

RankedCandidates top_of_group(const Vec& scores, const std::vector<ItemId>& group,
                              const std::vector<char>& excluded,
                              std::uint32_t budget) {
  std::vector<ItemId> cands;
  cands.reserve(group.size());
  for (ItemId i : group) {
    if (!excluded[i]) cands.push_back(i);
  }
  const auto better = [&](ItemId a, ItemId b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  const std::size_t keep = std::min<std::size_t>(budget, cands.size());
  std::partial_sort(cands.begin(), cands.begin() + keep, cands.end(), better);
  cands.resize(keep);

  RankedCandidates out;
  out.items = std::move(cands);
  out.scores.reserve(out.items.size());
  for (ItemId i : out.items) out.scores.push_back(scores[i]);
  return out;
}

}  // namespace

std::vector<RankedCandidates> teacher_group_ranking(
    const EmbeddingModel& teacher, const InteractionDataset& dataset,
    const PopularityPartition& partition, UserId user,
    std::uint32_t per_group_budget) {
  const Vec scores = teacher.score_all(user);
  const std::vector<char> mask = excluded_mask(dataset, user);
  std::vector<RankedCandidates> lists;
  lists.reserve(partition.k);
  for (const auto& group : partition.groups) {
    lists.push_back(top_of_group(scores, group, mask, per_group_budget));
  }
  return lists;
}

std::vector<double> rank_sampling_weights(std::size_t len, double mu) {
  if (len < 1) throw std::invalid_argument("weight vector length must be >= 1");
  if (!(mu > 0)) throw std::invalid_argument("mu must be positive");
  std::vector<double> w(len);
  double total = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    w[k] = std::exp(-static_cast<double>(k + 1) / mu);
    total += w[k];
  }
  for (double& v : w) v /= total;
  return w;
}

std::vector<DistillPair> sample_group_pairs(const RankedCandidates& ranking,
                                            UserId user, double mu,
                                            std::uint32_t num_pairs,
                                            std::mt19937_64& rng) {
  const std::size_t len = ranking.items.size();
  if (len < 2) {
    throw std::invalid_argument("pair sampling needs at least two candidates");
  }
  std::vector<double> cdf = rank_sampling_weights(len, mu);
  for (std::size_t k = 1; k < len; ++k) cdf[k] += cdf[k - 1];
  cdf.back() = 1.0;

  std::vector<DistillPair> pairs;
  pairs.reserve(num_pairs);
  while (pairs.size() < num_pairs) {
    const double u = uniform_unit(rng);
    const std::size_t pos =
        std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
    if (pos + 1 >= len) continue;
    const std::size_t neg =
        pos + 1 + uniform_index(rng, len - pos - 1);
    pairs.push_back({user, ranking.items[pos], ranking.items[neg]});
  }
  return pairs;
}

namespace {

DistillPlan build_ranked_plan(const EmbeddingModel& teacher,
                              const InteractionDataset& dataset,
                              DistillMethod method, std::uint32_t k, double mu,
                              double lambda, std::uint32_t soft_label_budget) {
  if (soft_label_budget < k) {
    throw std::invalid_argument(
        "soft-label budget must be at least the group count");
  }
  DistillPlan plan;
  plan.method = method;
  plan.k = k;
  plan.mu = mu;
  plan.lambda = lambda;
  plan.soft_label_budget = soft_label_budget;
  plan.per_group_budget =
      (soft_label_budget + k - 1) / k;
  plan.partition = partition_items(dataset.popularity, k);
  plan.users.resize(dataset.num_users);
  parallel_for(dataset.num_users, [&](std::size_t u) {
    plan.users[u] = teacher_group_ranking(
        teacher, dataset, plan.partition, static_cast<UserId>(u),
        plan.per_group_budget);
  });
  return plan;
}

}  // namespace

DistillPlan build_group_plan(const EmbeddingModel& teacher,
                             const InteractionDataset& dataset,
                             std::uint32_t k, double mu, double lambda,
                             std::uint32_t soft_label_budget) {
  return build_ranked_plan(teacher, dataset, DistillMethod::kUnkd, k, mu,
                           lambda, soft_label_budget);
}

DistillPlan build_cd_plan(const EmbeddingModel& teacher,
                          const InteractionDataset& dataset, double mu,
                          double lambda, std::uint32_t soft_label_budget) {
  return build_ranked_plan(teacher, dataset, DistillMethod::kCd, 1, mu, lambda,
                           soft_label_budget);
}

DistillPlan build_rd_plan(const EmbeddingModel& teacher,
                          const InteractionDataset& dataset,
                          std::uint32_t top_n, double mu, double lambda) {
  if (top_n < 1) throw std::invalid_argument("top_n must be at least 1");
  DistillPlan plan;
  plan.method = DistillMethod::kRd;
  plan.k = 1;
  plan.mu = mu;
  plan.lambda = lambda;
  plan.soft_label_budget = top_n;
  plan.per_group_budget = top_n;
  plan.global_weights = rank_sampling_weights(top_n, mu);
  plan.global_lists.resize(dataset.num_users);
  parallel_for(dataset.num_users, [&](std::size_t u) {
    const Vec scores = teacher.score_all(static_cast<UserId>(u));
    std::vector<char> mask =
        excluded_mask(dataset, static_cast<UserId>(u));
    std::vector<ItemId> all(dataset.num_items);
    std::iota(all.begin(), all.end(), 0);
    plan.global_lists[u] = top_of_group(scores, all, mask, top_n);
  });
  return plan;
}

std::vector<DistillPair> sample_plan_pairs(const DistillPlan& plan,
                                           std::uint64_t seed,
                                           std::uint32_t epoch,
                                           std::uint32_t pairs_per_group) {
  const std::uint32_t count =
      pairs_per_group == 0 ? plan.per_group_budget : pairs_per_group;
  std::vector<DistillPair> out;
  for (UserId u = 0; u < plan.users.size(); ++u) {
    const auto& lists = plan.users[u];
    bool any = false;
    for (const auto& list : lists) {
      if (list.items.size() >= 2) {
        any = true;
        break;
      }
    }
    if (!any) continue;
    std::mt19937_64 rng = make_rng(seed, Stream::kDistillSampling, u, epoch);
    for (const auto& list : lists) {
      if (list.items.size() < 2) continue;
      auto pairs = sample_group_pairs(list, u, plan.mu, count, rng);
      out.insert(out.end(), pairs.begin(), pairs.end());
    }
  }
  return out;
}

double group_distill_loss_grad(const Mat& eff_user, const Mat& eff_item,
                               std::span<const DistillPair> pairs,
                               std::size_t num_norm_users, double scale,
                               GradientBuffer* grad) {
  if (num_norm_users == 0) return 0.0;
  const double inv_users = 1.0 / static_cast<double>(num_norm_users);
  double loss = 0.0;
  for (const DistillPair& p : pairs) {
    const auto eu = eff_user.row(p.user);
    const auto ep = eff_item.row(p.pos);
    const auto en = eff_item.row(p.neg);
    const double delta = eu.dot(ep) - eu.dot(en);
    loss += neg_log_sigmoid(delta);
    if (grad != nullptr) {
      const double c = -sigmoid(-delta) * inv_users * scale;
      grad->user.row(p.user) += c * (ep - en);
      grad->item.row(p.pos) += c * eu;
      grad->item.row(p.neg) -= c * eu;
    }
  }
  const double value = loss * inv_users;
  if (!std::isfinite(value)) {
    throw std::runtime_error("distillation loss is not finite");
  }
  return value;
}

std::vector<RdEntry> flatten_rd_entries(const DistillPlan& plan) {
  std::vector<RdEntry> entries;
  for (UserId u = 0; u < plan.global_lists.size(); ++u) {
    const auto& list = plan.global_lists[u];
    for (std::size_t r = 0; r < list.items.size(); ++r) {
      entries.push_back({u, list.items[r], plan.global_weights[r]});
    }
  }
  return entries;
}

double rd_loss_grad(const Mat& eff_user, const Mat& eff_item,
                    std::span<const RdEntry> entries,
                    std::size_t num_norm_users, double scale,
                    GradientBuffer* grad) {
  if (num_norm_users == 0) return 0.0;
  const double inv_users = 1.0 / static_cast<double>(num_norm_users);
  double loss = 0.0;
  for (const RdEntry& e : entries) {
    const auto eu = eff_user.row(e.user);
    const auto ei = eff_item.row(e.item);
    const double s = eu.dot(ei);
    loss += e.weight * neg_log_sigmoid(s);
    if (grad != nullptr) {
      const double c = -e.weight * sigmoid(-s) * inv_users * scale;
      grad->user.row(e.user) += c * ei;
      grad->item.row(e.item) += c * eu;
    }
  }
  const double value = loss * inv_users;
  if (!std::isfinite(value)) {
    throw std::runtime_error("distillation loss is not finite");
  }
  return value;
}

void dump_plan(const DistillPlan& plan, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "user\tgroup\trank\titem\tscore\n";
  const auto write_list = [&out](UserId u, std::size_t g,
                                 const RankedCandidates& list) {
    for (std::size_t r = 0; r < list.items.size(); ++r) {
      out << u << '\t' << g << '\t' << (r + 1) << '\t' << list.items[r] << '\t'
          << list.scores[r] << '\n';
    }
  };
  for (UserId u = 0; u < plan.users.size(); ++u) {
    for (std::size_t g = 0; g < plan.users[u].size(); ++g) {
      write_list(u, g, plan.users[u][g]);
    }
  }
  for (UserId u = 0; u < plan.global_lists.size(); ++u) {
    write_list(u, 0, plan.global_lists[u]);
  }
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace distillrec
