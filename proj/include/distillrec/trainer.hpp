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
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "distillrec/backbone.hpp"
#include "distillrec/common.hpp"
#include "distillrec/dataset.hpp"
#include "distillrec/distill.hpp"
#include "distillrec/gradients.hpp"

namespace distillrec {

struct TrainConfig {
  double learning_rate = 1e-3;
  double l2_coeff = 1e-4;
  std::uint32_t batch_size = 2048;
  std::uint32_t max_epochs = 1000;
  std::uint32_t patience = 100;
  std::uint64_t seed = 0;
  std::size_t eval_n = 10;
};

struct BprTriple {
  UserId user = 0;
  ItemId pos = 0;
  ItemId neg = 0;
};

/// Draws `count` triples for one user: positives uniform over the user's
/// train items, negatives uniform over everything else (rejection sampled).
std::vector<BprTriple> sample_user_triplets(const InteractionDataset& dataset,
                                            UserId user, std::size_t count,
                                            std::mt19937_64& rng);

/// One epoch's triples: |train_u| per user from a per-(user, epoch) stream,
/// then globally shuffled. Users with no train items, or with every item in
/// train, are skipped.
std::vector<BprTriple> sample_epoch_triplets(const InteractionDataset& dataset,
                                             std::uint64_t seed,
                                             std::uint32_t epoch);

/// Pairwise ranking loss: mean over triples of -log sigmoid(s_pos - s_neg)
/// plus l2_coeff times the mean squared norm of the involved embeddings.
/// Adds gradients into `grad`; returns the loss.
double bpr_loss_grad(const Mat& eff_user, const Mat& eff_item,
                     std::span<const BprTriple> triples, double l2_coeff,
                     GradientBuffer* grad);

/// Bias-corrected Adam with dense moment matrices per parameter matrix.
class AdamState {
 public:
  AdamState(std::uint32_t num_users, std::uint32_t num_items,
            std::uint32_t dim);

  void apply(Mat* user, Mat* item, const GradientBuffer& grad, double lr);
  std::uint64_t step() const { return step_; }

  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

 private:
  Mat m_user_, v_user_, m_item_, v_item_;
  std::uint64_t step_ = 0;
};

/// One optimizer step on the model's raw embeddings. Invalidate-on-write
/// semantics: the model's propagation cache goes stale.
void adam_update(EmbeddingModel* model, const GradientBuffer& grad,
                 AdamState* state, double lr);

/// Pulls a gradient on propagated embeddings back to the raw embeddings:
/// mean over layers 0..L of repeated adjacency multiplication, mirroring the
/// forward pass (the adjacency is symmetric).
void backprop_propagation(const NormalizedGraph& graph, std::uint32_t layers,
                          GradientBuffer* grad);

struct Objective {
  DistillMethod method = DistillMethod::kNone;
  /// Required for any method other than none. Carries lambda, mu, budgets.
  const DistillPlan* plan = nullptr;
  /// 0 means the plan's per-group budget.
  std::uint32_t pairs_per_group = 0;
  bool resample_each_epoch = true;
};

struct EpochLog {
  std::uint32_t epoch = 0;
  double train_loss = 0.0;
  double valid_ndcg = 0.0;
  double elapsed_seconds = 0.0;
};

struct TrainResult {
  EmbeddingModel model;
  std::vector<EpochLog> log;
  std::uint32_t best_epoch = 0;
  double best_valid_ndcg = 0.0;
};

/// Replaces the default validation-NDCG computation; used by tests to script
/// early-stopping behavior.
using ValidationHook = std::function<double(const EmbeddingModel&)>;

/// Runs mini-batch epochs of the base ranking loss plus the configured
/// distillation term, evaluates validation NDCG after each epoch, and
/// returns the best-validation checkpoint. LightGCN models require `graph`.
/// Non-finite loss aborts.
TrainResult fit(EmbeddingModel model, const InteractionDataset& dataset,
                const NormalizedGraph* graph, const TrainConfig& config,
                const Objective& objective = {},
                const ValidationHook& validation = {});

/// CSV with columns epoch,train_loss,valid_ndcg10,elapsed_seconds.
void write_training_log(const std::vector<EpochLog>& log,
                        const std::string& path);

}  // namespace distillrec
