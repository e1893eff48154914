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

#include "distillrec/backbone.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>

#include "distillrec/rng.hpp"

namespace distillrec {

namespace {

constexpr char kCheckpointMagic[8] = {'D', 'R', 'E', 'C', 'K', 'P', 'T', '1'};
constexpr std::uint32_t kCheckpointVersion = 1;

void write_u32(std::ofstream& out, std::uint32_t v) {
  unsigned char buf[4];
  for (int k = 0; k < 4; ++k) buf[k] = static_cast<unsigned char>(v >> (8 * k));
  out.write(reinterpret_cast<const char*>(buf), 4);
}

std::uint32_t read_u32(std::ifstream& in) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(buf[k]) << (8 * k);
  return v;
}

void write_matrix_f32(std::ofstream& out, const Mat& m) {
  std::vector<float> row(m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row[static_cast<std::size_t>(c)] = static_cast<float>(m(r, c));
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
}

void read_matrix_f32(std::ifstream& in, Mat& m) {
  std::vector<float> row(m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(float)));
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(r, c) = static_cast<double>(row[static_cast<std::size_t>(c)]);
    }
  }
}

}  // namespace

std::string to_string(ModelKind kind) {
  return kind == ModelKind::kMf ? "mf" : "lightgcn";
}

NormalizedGraph::NormalizedGraph(std::uint32_t num_users,
                                 std::uint32_t num_items,
                                 const std::vector<std::vector<ItemId>>& train)
    : num_users_(num_users), num_items_(num_items) {
  if (train.size() != num_users) {
    throw std::invalid_argument("train split size does not match user count");
  }
  std::vector<std::uint32_t> user_deg(num_users, 0);
  std::vector<std::uint32_t> item_deg(num_items, 0);
  std::size_t nnz = 0;
  for (UserId u = 0; u < num_users; ++u) {
    for (ItemId i : train[u]) {
      if (i >= num_items) {
        throw std::invalid_argument("item index out of range in train split");
      }
      ++user_deg[u];
      ++item_deg[i];
      ++nnz;
    }
  }

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(2 * nnz);
  for (UserId u = 0; u < num_users; ++u) {
    for (ItemId i : train[u]) {
      const double w =
          1.0 / std::sqrt(static_cast<double>(user_deg[u]) * item_deg[i]);
      triplets.emplace_back(u, num_users + i, w);
      triplets.emplace_back(num_users + i, u, w);
    }
  }
  const Eigen::Index nodes = static_cast<Eigen::Index>(num_users) + num_items;
  adjacency_.resize(nodes, nodes);
  adjacency_.setFromTriplets(triplets.begin(), triplets.end());
  adjacency_.makeCompressed();
}

EmbeddingModel EmbeddingModel::init(ModelKind kind, std::uint32_t num_users,
                                    std::uint32_t num_items, std::uint32_t dim,
                                    std::uint32_t lightgcn_layers,
                                    std::uint64_t seed, double init_scale) {
  if (num_users < 1 || num_items < 1 || dim < 1) {
    throw std::invalid_argument("model shape must be at least 1x1x1");
  }
  if (kind == ModelKind::kMf && lightgcn_layers != 0) {
    throw std::invalid_argument("MF models take zero propagation layers");
  }
  EmbeddingModel model;
  model.kind_ = kind;
  model.lightgcn_layers_ = lightgcn_layers;
  model.user_emb_.resize(num_users, dim);
  model.item_emb_.resize(num_items, dim);

  std::mt19937_64 rng = make_rng(seed, Stream::kEmbeddingInit);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (Eigen::Index r = 0; r < model.user_emb_.rows(); ++r) {
    for (Eigen::Index c = 0; c < model.user_emb_.cols(); ++c) {
      model.user_emb_(r, c) = init_scale * dist(rng);
    }
  }
  for (Eigen::Index r = 0; r < model.item_emb_.rows(); ++r) {
    for (Eigen::Index c = 0; c < model.item_emb_.cols(); ++c) {
      model.item_emb_(r, c) = init_scale * dist(rng);
    }
  }
  return model;
}

Mat& EmbeddingModel::mutable_user_emb() {
  propagation_fresh_ = false;
  return user_emb_;
}

Mat& EmbeddingModel::mutable_item_emb() {
  propagation_fresh_ = false;
  return item_emb_;
}

void EmbeddingModel::propagate(const NormalizedGraph& graph) {
  if (kind_ != ModelKind::kLightGcn) {
    throw std::logic_error("propagate() requires a LightGCN model");
  }
  if (graph.num_users() != num_users() || graph.num_items() != num_items()) {
    throw std::invalid_argument("graph dimensions do not match model");
  }

  const Eigen::Index m = user_emb_.rows();
  const Eigen::Index n = item_emb_.rows();
  Mat layer(m + n, dim());
  layer.topRows(m) = user_emb_;
  layer.bottomRows(n) = item_emb_;

  Mat sum = layer;
  for (std::uint32_t l = 0; l < lightgcn_layers_; ++l) {
    layer = graph.adjacency() * layer;
    sum += layer;
  }
  sum /= static_cast<double>(lightgcn_layers_ + 1);

  propagated_user_ = sum.topRows(m);
  propagated_item_ = sum.bottomRows(n);
  propagation_fresh_ = true;
}

const Mat& EmbeddingModel::effective_user_emb() const {
  if (kind_ == ModelKind::kMf) return user_emb_;
  if (!propagation_fresh_) {
    throw std::logic_error(
        "LightGCN propagation cache is stale; call propagate() after updates");
  }
  return propagated_user_;
}

const Mat& EmbeddingModel::effective_item_emb() const {
  if (kind_ == ModelKind::kMf) return item_emb_;
  if (!propagation_fresh_) {
    throw std::logic_error(
        "LightGCN propagation cache is stale; call propagate() after updates");
  }
  return propagated_item_;
}

double EmbeddingModel::score(UserId u, ItemId i) const {
  if (u >= num_users() || i >= num_items()) {
    throw std::out_of_range("score(): index out of range");
  }
  return effective_user_emb().row(u).dot(effective_item_emb().row(i));
}

Vec EmbeddingModel::score_all(UserId u) const {
  if (u >= num_users()) {
    throw std::out_of_range("score_all(): user out of range");
  }
  // Same expression as score() so the two agree bit-for-bit.
  const auto user_row = effective_user_emb().row(u);
  const Mat& items = effective_item_emb();
  Vec scores(num_items());
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    scores[i] = user_row.dot(items.row(i));
  }
  return scores;
}

Vec EmbeddingModel::score_all(UserId u, const std::vector<char>& excluded) const {
  Vec scores = score_all(u);
  if (!excluded.empty()) {
    if (excluded.size() != num_items()) {
      throw std::invalid_argument("exclusion mask size mismatch");
    }
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
      if (excluded[static_cast<std::size_t>(i)]) {
        scores[i] = std::numeric_limits<double>::quiet_NaN();
      }
    }
  }
  return scores;
}

std::vector<ItemId> EmbeddingModel::top_n(
    UserId u, std::size_t n, const std::vector<char>& excluded) const {
  if (n < 1) {
    throw std::invalid_argument("top_n(): n must be >= 1");
  }
  if (!excluded.empty() && excluded.size() != num_items()) {
    throw std::invalid_argument("exclusion mask size mismatch");
  }
  const Vec scores = score_all(u);

  // (score, item) max-selection with ascending-index tie break; the heap
  // holds the current worst of the best n on top.
  auto worse = [](const std::pair<double, ItemId>& a,
                  const std::pair<double, ItemId>& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  };
  std::vector<std::pair<double, ItemId>> heap;
  heap.reserve(n + 1);
  for (ItemId i = 0; i < num_items(); ++i) {
    if (!excluded.empty() && excluded[i]) continue;
    const std::pair<double, ItemId> entry(scores[i], i);
    if (heap.size() < n) {
      heap.push_back(entry);
      std::push_heap(heap.begin(), heap.end(), worse);
    } else if (worse(entry, heap.front())) {
      std::pop_heap(heap.begin(), heap.end(), worse);
      heap.back() = entry;
      std::push_heap(heap.begin(), heap.end(), worse);
    }
  }
  std::sort_heap(heap.begin(), heap.end(), worse);
  std::reverse(heap.begin(), heap.end());

  std::vector<ItemId> result;
  result.reserve(heap.size());
  for (const auto& [score, item] : heap) result.push_back(item);
  return result;
}

void EmbeddingModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write checkpoint " + path);
  }
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  write_u32(out, kCheckpointVersion);
  const unsigned char kind_byte = static_cast<unsigned char>(kind_);
  out.write(reinterpret_cast<const char*>(&kind_byte), 1);
  write_u32(out, num_users());
  write_u32(out, num_items());
  write_u32(out, dim());
  write_u32(out, lightgcn_layers_);
  write_matrix_f32(out, user_emb_);
  write_matrix_f32(out, item_emb_);
  if (!out) {
    throw std::runtime_error("write failed for checkpoint " + path);
  }
}

EmbeddingModel EmbeddingModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open checkpoint " + path);
  }
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw std::runtime_error(path + ": not a distillrec checkpoint");
  }
  const std::uint32_t version = read_u32(in);
  if (version != kCheckpointVersion) {
    throw std::runtime_error(path + ": unsupported checkpoint version " +
                             std::to_string(version));
  }
  unsigned char kind_byte = 0;
  in.read(reinterpret_cast<char*>(&kind_byte), 1);
  if (kind_byte > 1) {
    throw std::runtime_error(path + ": unknown model kind");
  }
  const std::uint32_t m = read_u32(in);
  const std::uint32_t n = read_u32(in);
  const std::uint32_t d = read_u32(in);
  const std::uint32_t layers = read_u32(in);
  if (!in || m < 1 || n < 1 || d < 1) {
    throw std::runtime_error(path + ": corrupt checkpoint header");
  }

  EmbeddingModel model;
  model.kind_ = static_cast<ModelKind>(kind_byte);
  model.lightgcn_layers_ = layers;
  model.user_emb_.resize(m, d);
  model.item_emb_.resize(n, d);
  read_matrix_f32(in, model.user_emb_);
  read_matrix_f32(in, model.item_emb_);
  if (!in) {
    throw std::runtime_error(path + ": truncated checkpoint");
  }
  in.peek();
  if (!in.eof()) {
    throw std::runtime_error(path + ": trailing bytes after checkpoint");
  }
  return model;
}

}  // namespace distillrec
