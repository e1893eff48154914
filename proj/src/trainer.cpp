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

#include "distillrec/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "distillrec/eval.hpp"
#include "distillrec/numerics.hpp"
#include "distillrec/rng.hpp"

namespace distillrec {

std::vector<BprTriple> sample_user_triplets(const InteractionDataset& dataset,
                                            UserId user, std::size_t count,
                                            std::mt19937_64& rng) {
  const auto& positives = dataset.train[user];
  if (positives.empty()) {
    throw std::invalid_argument("user has no training positives");
  }
  if (positives.size() >= dataset.num_items) {
    throw std::invalid_argument("user has no candidate negatives");
  }
  std::vector<BprTriple> triples;
  triples.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    const ItemId pos =
        positives[uniform_index(rng, positives.size())];
    ItemId neg = 0;
    for (;;) {
      neg = static_cast<ItemId>(uniform_index(rng, dataset.num_items));
      if (!std::binary_search(positives.begin(), positives.end(), neg)) break;
    }
    triples.push_back({user, pos, neg});
  }
  return triples;
}

std::vector<BprTriple> sample_epoch_triplets(const InteractionDataset& dataset,
                                             std::uint64_t seed,
                                             std::uint32_t epoch) {
  std::vector<BprTriple> triples;
  triples.reserve(dataset.train_size());
  for (UserId u = 0; u < dataset.num_users; ++u) {
    const auto& positives = dataset.train[u];
    if (positives.empty() || positives.size() >= dataset.num_items) continue;
    std::mt19937_64 rng = make_rng(seed, Stream::kBprSampling, u, epoch);
    auto user_triples =
        sample_user_triplets(dataset, u, positives.size(), rng);
    triples.insert(triples.end(), user_triples.begin(), user_triples.end());
  }
  std::mt19937_64 shuffle_rng = make_rng(seed, Stream::kEpochShuffle, epoch);
  std::shuffle(triples.begin(), triples.end(), shuffle_rng);
  return triples;
}

double bpr_loss_grad(const Mat& eff_user, const Mat& eff_item,
                     std::span<const BprTriple> triples, double l2_coeff,
                     GradientBuffer* grad) {
  if (triples.empty()) return 0.0;
  const double inv_count = 1.0 / static_cast<double>(triples.size());
  double rank_loss = 0.0;
  double reg_loss = 0.0;
  for (const BprTriple& t : triples) {
    const auto eu = eff_user.row(t.user);
    const auto ep = eff_item.row(t.pos);
    const auto en = eff_item.row(t.neg);
    const double delta = eu.dot(ep) - eu.dot(en);
    rank_loss += neg_log_sigmoid(delta);
    reg_loss += eu.squaredNorm() + ep.squaredNorm() + en.squaredNorm();
    if (grad != nullptr) {
      const double c = -sigmoid(-delta) * inv_count;
      grad->user.row(t.user) += c * (ep - en) + (2.0 * l2_coeff * inv_count) * eu;
      grad->item.row(t.pos) += c * eu + (2.0 * l2_coeff * inv_count) * ep;
      grad->item.row(t.neg) += -c * eu + (2.0 * l2_coeff * inv_count) * en;
    }
  }
  const double loss = (rank_loss + l2_coeff * reg_loss) * inv_count;
  if (!std::isfinite(loss)) {
    throw std::runtime_error("ranking loss is not finite");
  }
  return loss;
}

AdamState::AdamState(std::uint32_t num_users, std::uint32_t num_items,
                     std::uint32_t dim) {
  m_user_ = Mat::Zero(num_users, dim);
  v_user_ = Mat::Zero(num_users, dim);
  m_item_ = Mat::Zero(num_items, dim);
  v_item_ = Mat::Zero(num_items, dim);
}

void AdamState::apply(Mat* user, Mat* item, const GradientBuffer& grad,
                      double lr) {
  ++step_;
  const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(step_));
  const auto update = [&](Mat& param, Mat& m, Mat& v, const Mat& g) {
    m = kBeta1 * m + (1.0 - kBeta1) * g;
    v.array() = kBeta2 * v.array() + (1.0 - kBeta2) * g.array().square();
    param.array() -=
        lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + kEps);
  };
  update(*user, m_user_, v_user_, grad.user);
  update(*item, m_item_, v_item_, grad.item);
}

void adam_update(EmbeddingModel* model, const GradientBuffer& grad,
                 AdamState* state, double lr) {
  state->apply(&model->mutable_user_emb(), &model->mutable_item_emb(), grad,
               lr);
}

void backprop_propagation(const NormalizedGraph& graph, std::uint32_t layers,
                          GradientBuffer* grad) {
  if (layers == 0) return;
  const std::uint32_t m = graph.num_users();
  const std::uint32_t n = graph.num_items();
  const auto dim = grad->user.cols();
  Mat stacked(m + n, dim);
  stacked.topRows(m) = grad->user;
  stacked.bottomRows(n) = grad->item;
  Mat acc = stacked;
  Mat cur = stacked;
  for (std::uint32_t l = 0; l < layers; ++l) {
    cur = graph.adjacency() * cur;
    acc += cur;
  }
  acc /= static_cast<double>(layers + 1);
  grad->user = acc.topRows(m);
  grad->item = acc.bottomRows(n);
}

namespace {

std::size_t count_distinct_users(const std::vector<DistillPair>& pairs) {
  std::vector<char> seen;
  std::size_t count = 0;
  for (const DistillPair& p : pairs) {
    if (p.user >= seen.size()) seen.resize(p.user + 1, 0);
    if (!seen[p.user]) {
      seen[p.user] = 1;
      ++count;
    }
  }
  return count;
}

std::size_t count_distinct_users(const std::vector<RdEntry>& entries) {
  std::vector<char> seen;
  std::size_t count = 0;
  for (const RdEntry& e : entries) {
    if (e.user >= seen.size()) seen.resize(e.user + 1, 0);
    if (!seen[e.user]) {
      seen[e.user] = 1;
      ++count;
    }
  }
  return count;
}

}  // namespace

TrainResult fit(EmbeddingModel model, const InteractionDataset& dataset,
                const NormalizedGraph* graph, const TrainConfig& config,
                const Objective& objective, const ValidationHook& validation) {
  if (config.learning_rate <= 0) {
    throw std::invalid_argument("learning rate must be positive");
  }
  if (config.max_epochs < 1 || config.patience < 1 || config.batch_size < 1) {
    throw std::invalid_argument("epochs, patience, and batch size must be >= 1");
  }
  const bool is_gcn = model.kind() == ModelKind::kLightGcn;
  if (is_gcn && graph == nullptr) {
    throw std::invalid_argument("LightGCN training requires a graph");
  }
  if (!validation) {
    bool has_valid = false;
    for (const auto& v : dataset.valid) {
      if (!v.empty()) {
        has_valid = true;
        break;
      }
    }
    if (!has_valid) {
      throw std::runtime_error("validation split is empty");
    }
  }

  const DistillPlan* plan = objective.plan;
  const bool ranked_distill = (objective.method == DistillMethod::kUnkd ||
                               objective.method == DistillMethod::kCd);
  const bool rd_distill = objective.method == DistillMethod::kRd;
  if ((ranked_distill || rd_distill) && plan == nullptr) {
    throw std::invalid_argument("distillation objective requires a plan");
  }
  const double lambda = plan != nullptr ? plan->lambda : 0.0;
  const bool use_distill = (ranked_distill || rd_distill) && lambda > 0.0;

  GradientBuffer grad;
  grad.resize(model.num_users(), model.num_items(), model.dim());
  AdamState adam(model.num_users(), model.num_items(), model.dim());

  std::vector<RdEntry> rd_entries;
  std::size_t rd_users = 0;
  if (use_distill && rd_distill) {
    rd_entries = flatten_rd_entries(*plan);
    rd_users = count_distinct_users(rd_entries);
  }

  TrainResult result;
  result.model = model;
  result.best_valid_ndcg = -1.0;
  std::uint32_t epochs_since_best = 0;
  std::vector<DistillPair> pairs;
  std::size_t pair_users = 0;

  for (std::uint32_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    auto triples = sample_epoch_triplets(dataset, config.seed, epoch);
    if (triples.empty()) {
      throw std::runtime_error("no trainable users in the dataset");
    }
    if (use_distill && ranked_distill &&
        (objective.resample_each_epoch || epoch == 1)) {
      const std::uint32_t sample_epoch =
          objective.resample_each_epoch ? epoch : 1;
      pairs = sample_plan_pairs(*plan, config.seed, sample_epoch,
                                objective.pairs_per_group);
      pair_users = count_distinct_users(pairs);
    }
    if (use_distill && rd_distill) {
      std::mt19937_64 rng = make_rng(config.seed, Stream::kEpochShuffle, epoch, 1);
      std::shuffle(rd_entries.begin(), rd_entries.end(), rng);
    }

    const std::size_t total = triples.size();
    const std::size_t num_batches =
        (total + config.batch_size - 1) / config.batch_size;
    const std::size_t distill_total =
        rd_distill ? rd_entries.size() : pairs.size();

    double base_loss_sum = 0.0;
    double distill_loss = 0.0;
    for (std::size_t b = 0; b < num_batches; ++b) {
      const std::size_t begin = b * config.batch_size;
      const std::size_t end = std::min(total, begin + config.batch_size);
      if (is_gcn && !model.propagation_fresh()) model.propagate(*graph);
      const Mat& eff_u = model.effective_user_emb();
      const Mat& eff_i = model.effective_item_emb();
      grad.set_zero();
      const double batch_loss = bpr_loss_grad(
          eff_u, eff_i,
          std::span<const BprTriple>(triples).subspan(begin, end - begin),
          config.l2_coeff, &grad);
      base_loss_sum += batch_loss * static_cast<double>(end - begin);
      if (use_distill && distill_total > 0) {
        const std::size_t cb = b * distill_total / num_batches;
        const std::size_t ce = (b + 1) * distill_total / num_batches;
        if (ce > cb) {
          if (ranked_distill) {
            distill_loss += group_distill_loss_grad(
                eff_u, eff_i,
                std::span<const DistillPair>(pairs).subspan(cb, ce - cb),
                pair_users, lambda, &grad);
          } else {
            distill_loss += rd_loss_grad(
                eff_u, eff_i,
                std::span<const RdEntry>(rd_entries).subspan(cb, ce - cb),
                rd_users, lambda, &grad);
          }
        }
      }
      if (is_gcn) backprop_propagation(*graph, model.lightgcn_layers(), &grad);
      adam_update(&model, grad, &adam, config.learning_rate);
    }

    const double train_loss =
        base_loss_sum / static_cast<double>(total) + lambda * distill_loss;
    if (!std::isfinite(train_loss)) {
      throw std::runtime_error("training diverged: loss is not finite");
    }

    if (is_gcn) model.propagate(*graph);
    const double ndcg = validation
                            ? validation(model)
                            : mean_validation_ndcg(model, dataset, config.eval_n);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    result.log.push_back({epoch, train_loss, ndcg, elapsed});

    if (ndcg > result.best_valid_ndcg) {
      result.best_valid_ndcg = ndcg;
      result.best_epoch = epoch;
      result.model = model;
      epochs_since_best = 0;
    } else {
      ++epochs_since_best;
      if (epochs_since_best >= config.patience) break;
    }
  }
  return result;
}

void write_training_log(const std::vector<EpochLog>& log,
                        const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "epoch,train_loss,valid_ndcg10,elapsed_seconds\n";
  out.precision(17);
  for (const EpochLog& e : log) {
    out << e.epoch << ',' << e.train_loss << ',' << e.valid_ndcg << ','
        << e.elapsed_seconds << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace distillrec
