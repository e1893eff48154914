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

#include <Eigen/SparseCore>
#include <cstdint>
#include <string>
#include <vector>

#include "distillrec/common.hpp"

namespace distillrec {

enum class ModelKind : std::uint8_t { kMf = 0, kLightGcn = 1 };

std::string to_string(ModelKind kind);

/// Symmetric-normalized bipartite adjacency over (num_users + num_items)
/// nodes, built from train interactions. Entry (u, i) carries
/// 1/sqrt(deg(u) * deg(i)); zero-degree nodes get zero rows.
class NormalizedGraph {
 public:
  NormalizedGraph(std::uint32_t num_users, std::uint32_t num_items,
                  const std::vector<std::vector<ItemId>>& train);

  const Eigen::SparseMatrix<double>& adjacency() const { return adjacency_; }
  std::uint32_t num_users() const { return num_users_; }
  std::uint32_t num_items() const { return num_items_; }

 private:
  std::uint32_t num_users_;
  std::uint32_t num_items_;
  Eigen::SparseMatrix<double> adjacency_;
};

/// User and item embeddings with MF or LightGCN scoring. LightGCN keeps a
/// propagated-embedding cache that any parameter mutation invalidates;
/// scoring through a stale cache is an error.
class EmbeddingModel {
 public:
  EmbeddingModel() = default;

  static EmbeddingModel init(ModelKind kind, std::uint32_t num_users,
                             std::uint32_t num_items, std::uint32_t dim,
                             std::uint32_t lightgcn_layers, std::uint64_t seed,
                             double init_scale);

  ModelKind kind() const { return kind_; }
  std::uint32_t num_users() const { return static_cast<std::uint32_t>(user_emb_.rows()); }
  std::uint32_t num_items() const { return static_cast<std::uint32_t>(item_emb_.rows()); }
  std::uint32_t dim() const { return static_cast<std::uint32_t>(user_emb_.cols()); }
  std::uint32_t lightgcn_layers() const { return lightgcn_layers_; }

  const Mat& user_emb() const { return user_emb_; }
  const Mat& item_emb() const { return item_emb_; }
  // Mutable access invalidates the propagation cache.
  Mat& mutable_user_emb();
  Mat& mutable_item_emb();

  /// Mean over layers 0..L of repeated normalized-adjacency multiplication.
  /// L = 0 leaves the raw embeddings. Dimension mismatch with the graph is an
  /// error.
  void propagate(const NormalizedGraph& graph);
  bool propagation_fresh() const { return propagation_fresh_; }
  void invalidate_propagation() { propagation_fresh_ = false; }

  /// Embeddings used for scoring: raw for MF, propagated for LightGCN.
  const Mat& effective_user_emb() const;
  const Mat& effective_item_emb() const;

  double score(UserId u, ItemId i) const;

  /// Scores for every item; entries under the exclusion mask are set to NaN.
  Vec score_all(UserId u) const;
  Vec score_all(UserId u, const std::vector<char>& excluded) const;

  /// The n highest-scoring items outside the exclusion mask, descending
  /// score, ties broken by ascending item index. Returns fewer than n when
  /// fewer candidates exist. An empty mask means no exclusions.
  std::vector<ItemId> top_n(UserId u, std::size_t n,
                            const std::vector<char>& excluded) const;

  /// Checkpoint: magic + version + kind/shape header, then row-major
  /// float32 little-endian user and item matrices. Load is bit-exact.
  void save(const std::string& path) const;
  static EmbeddingModel load(const std::string& path);

 private:
  ModelKind kind_ = ModelKind::kMf;
  std::uint32_t lightgcn_layers_ = 0;
  Mat user_emb_;
  Mat item_emb_;
  Mat propagated_user_;
  Mat propagated_item_;
  bool propagation_fresh_ = false;
};

}  // namespace distillrec
