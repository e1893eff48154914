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

#include <doctest.h>

#include <Eigen/Dense>
#include <random>
#include <set>

#include "distillrec/backbone.hpp"
#include "test_util.hpp"

using namespace distillrec;
using distillrec::testutil::TempDir;
using distillrec::testutil::read_file;

namespace {

EmbeddingModel mf_with(const Mat& users, const Mat& items) {
  EmbeddingModel model = EmbeddingModel::init(
      ModelKind::kMf, static_cast<std::uint32_t>(users.rows()),
      static_cast<std::uint32_t>(items.rows()),
      static_cast<std::uint32_t>(users.cols()), 0, 0, 0.0);
  model.mutable_user_emb() = users;
  model.mutable_item_emb() = items;
  return model;
}

}  // namespace

TEST_CASE("embedding init is deterministic per seed") {
  const auto a = EmbeddingModel::init(ModelKind::kMf, 5, 7, 4, 0, 11, 0.1);
  const auto b = EmbeddingModel::init(ModelKind::kMf, 5, 7, 4, 0, 11, 0.1);
  CHECK(a.user_emb() == b.user_emb());
  CHECK(a.item_emb() == b.item_emb());
  const auto c = EmbeddingModel::init(ModelKind::kMf, 5, 7, 4, 0, 12, 0.1);
  CHECK(a.user_emb() != c.user_emb());
}

TEST_CASE("zero init scale yields zero scores") {
  const auto model = EmbeddingModel::init(ModelKind::kMf, 3, 4, 8, 0, 1, 0.0);
  for (UserId u = 0; u < 3; ++u) {
    for (ItemId i = 0; i < 4; ++i) CHECK(model.score(u, i) == 0.0);
  }
}

TEST_CASE("teacher and student dimensions shape as configured") {
  const auto teacher = EmbeddingModel::init(ModelKind::kMf, 6, 9, 100, 0, 1, 0.1);
  const auto student = EmbeddingModel::init(ModelKind::kMf, 6, 9, 10, 0, 1, 0.1);
  CHECK(teacher.dim() == 100);
  CHECK(student.dim() == 10);
  CHECK(teacher.user_emb().rows() == 6);
  CHECK(teacher.item_emb().rows() == 9);
}

TEST_CASE("orthogonal embeddings score zero") {
  Mat users(1, 2), items(1, 2);
  users << 1, 0;
  items << 0, 1;
  CHECK(mf_with(users, items).score(0, 0) == 0.0);
}

TEST_CASE("all-ones embeddings score the dimension") {
  Mat users(1, 2), items(1, 2);
  users << 1, 1;
  items << 1, 1;
  CHECK(mf_with(users, items).score(0, 0) == 2.0);
}

TEST_CASE("score matches an elementwise sum oracle") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  Mat users(2, 10), items(3, 10);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 10; ++c) users(r, c) = normal(rng);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 10; ++c) items(r, c) = normal(rng);
  const auto model = mf_with(users, items);
  for (UserId u = 0; u < 2; ++u) {
    for (ItemId i = 0; i < 3; ++i) {
      double expected = 0.0;
      for (int c = 0; c < 10; ++c) expected += users(u, c) * items(i, c);
      CHECK(model.score(u, i) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("score_all agrees with score exactly") {
  const auto model = EmbeddingModel::init(ModelKind::kMf, 4, 17, 7, 0, 5, 0.3);
  for (UserId u = 0; u < 4; ++u) {
    const Vec all = model.score_all(u);
    for (ItemId i = 0; i < 17; ++i) {
      CHECK(all[i] == model.score(u, i));
    }
  }
}

TEST_CASE("score_all masks excluded items as NaN") {
  const auto model = EmbeddingModel::init(ModelKind::kMf, 1, 5, 3, 0, 2, 0.2);
  std::vector<char> mask = {0, 1, 0, 1, 0};
  const Vec scores = model.score_all(0, mask);
  CHECK(std::isnan(scores[1]));
  CHECK(std::isnan(scores[3]));
  CHECK(scores[0] == model.score(0, 0));
}

TEST_CASE("top_n ranks by score descending") {
  Mat users(1, 1), items(3, 1);
  users << 1;
  items << 0.1, 0.9, 0.5;
  const auto model = mf_with(users, items);
  CHECK(model.top_n(0, 2, {}) == std::vector<ItemId>{1, 2});
}

TEST_CASE("top_n breaks ties by ascending index") {
  Mat users(1, 1), items(2, 1);
  users << 1;
  items << 0.5, 0.5;
  const auto model = mf_with(users, items);
  CHECK(model.top_n(0, 2, {}) == std::vector<ItemId>{0, 1});
}

TEST_CASE("top_n respects exclusions") {
  Mat users(1, 1), items(3, 1);
  users << 1;
  items << 0.1, 0.9, 0.5;
  const auto model = mf_with(users, items);
  CHECK(model.top_n(0, 2, {0, 1, 0}) == std::vector<ItemId>{2, 0});
}

TEST_CASE("top_n returns fewer items when candidates run out") {
  Mat users(1, 1), items(3, 1);
  users << 1;
  items << 0.1, 0.9, 0.5;
  const auto model = mf_with(users, items);
  CHECK(model.top_n(0, 10, {0, 1, 0}).size() == 2);
}

TEST_CASE("top_n is a permutation prefix with non-increasing scores") {
  const auto model = EmbeddingModel::init(ModelKind::kMf, 3, 40, 6, 0, 9, 0.5);
  std::vector<char> mask(40, 0);
  for (ItemId i = 0; i < 40; i += 5) mask[i] = 1;
  for (UserId u = 0; u < 3; ++u) {
    const auto top = model.top_n(u, 12, mask);
    CHECK(top.size() == 12);
    std::set<ItemId> distinct(top.begin(), top.end());
    CHECK(distinct.size() == top.size());
    for (std::size_t k = 0; k < top.size(); ++k) {
      CHECK(!mask[top[k]]);
      if (k > 0) CHECK(model.score(u, top[k - 1]) >= model.score(u, top[k]));
    }
  }
}

TEST_CASE("zero-layer propagation is the identity") {
  std::vector<std::vector<ItemId>> train = {{0, 1}, {1}};
  const NormalizedGraph graph(2, 2, train);
  auto model = EmbeddingModel::init(ModelKind::kLightGcn, 2, 2, 4, 0, 3, 0.2);
  const Mat users_before = model.user_emb();
  model.propagate(graph);
  CHECK(model.effective_user_emb() == users_before);
}

TEST_CASE("zero-layer LightGCN scores like MF on shared embeddings") {
  std::vector<std::vector<ItemId>> train = {{0, 2}, {1}};
  const NormalizedGraph graph(2, 3, train);
  auto gcn = EmbeddingModel::init(ModelKind::kLightGcn, 2, 3, 4, 0, 3, 0.2);
  auto mf = EmbeddingModel::init(ModelKind::kMf, 2, 3, 4, 0, 3, 0.2);
  gcn.propagate(graph);
  for (UserId u = 0; u < 2; ++u) {
    for (ItemId i = 0; i < 3; ++i) {
      CHECK(std::abs(gcn.score(u, i) - mf.score(u, i)) < 1e-6);
    }
  }
}

TEST_CASE("single-edge one-layer propagation averages the two nodes") {
  std::vector<std::vector<ItemId>> train = {{0}};
  const NormalizedGraph graph(1, 1, train);
  auto model = EmbeddingModel::init(ModelKind::kLightGcn, 1, 1, 3, 1, 4, 0.3);
  const Mat u0 = model.user_emb();
  const Mat i0 = model.item_emb();
  model.propagate(graph);
  const Mat expected_user = (u0 + i0) / 2.0;
  const Mat expected_item = (i0 + u0) / 2.0;
  CHECK((model.effective_user_emb() - expected_user).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((model.effective_item_emb() - expected_item).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("two-layer propagation matches a dense matrix-power oracle") {
  // Path graph: u0 - i0 - u1 over three nodes.
  std::vector<std::vector<ItemId>> train = {{0}, {0}};
  const NormalizedGraph graph(2, 1, train);
  auto model = EmbeddingModel::init(ModelKind::kLightGcn, 2, 1, 5, 2, 6, 0.4);
  const Mat raw_users = model.user_emb();
  const Mat raw_items = model.item_emb();
  model.propagate(graph);

  Eigen::MatrixXd dense = Eigen::MatrixXd(graph.adjacency());
  Mat stacked(3, 5);
  stacked.topRows(2) = raw_users;
  stacked.bottomRows(1) = raw_items;
  Mat expected = stacked;
  Mat cur = stacked;
  for (int l = 0; l < 2; ++l) {
    cur = dense * cur;
    expected += cur;
  }
  expected /= 3.0;
  CHECK((model.effective_user_emb() - expected.topRows(2)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((model.effective_item_emb() - expected.bottomRows(1)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("stale propagation cache is an error") {
  std::vector<std::vector<ItemId>> train = {{0}};
  const NormalizedGraph graph(1, 1, train);
  auto model = EmbeddingModel::init(ModelKind::kLightGcn, 1, 1, 2, 1, 4, 0.3);
  CHECK_THROWS(model.score(0, 0));
  model.propagate(graph);
  CHECK_NOTHROW(model.score(0, 0));
  model.mutable_user_emb()(0, 0) += 1.0;
  CHECK_THROWS(model.score(0, 0));
}

TEST_CASE("graph dimension mismatch is an error") {
  std::vector<std::vector<ItemId>> train = {{0}};
  const NormalizedGraph graph(1, 1, train);
  auto model = EmbeddingModel::init(ModelKind::kLightGcn, 2, 1, 2, 1, 4, 0.3);
  CHECK_THROWS(model.propagate(graph));
}

TEST_CASE("MF rejects nonzero layer counts") {
  CHECK_THROWS(EmbeddingModel::init(ModelKind::kMf, 2, 2, 2, 1, 0, 0.1));
}

TEST_CASE("checkpoint round-trip is bit-exact") {
  const auto model = EmbeddingModel::init(ModelKind::kLightGcn, 7, 9, 6, 2, 21, 0.7);
  TempDir dir("ckpt");
  const auto p1 = dir.path() / "a.ckpt";
  const auto p2 = dir.path() / "b.ckpt";
  model.save(p1.string());
  const auto loaded = EmbeddingModel::load(p1.string());
  CHECK(loaded.kind() == model.kind());
  CHECK(loaded.lightgcn_layers() == 2);
  CHECK(loaded.num_users() == 7);
  CHECK(loaded.num_items() == 9);
  CHECK(loaded.dim() == 6);
  loaded.save(p2.string());
  CHECK(read_file(p1) == read_file(p2));
}

TEST_CASE("truncated checkpoint is rejected") {
  const auto model = EmbeddingModel::init(ModelKind::kMf, 3, 3, 2, 0, 1, 0.1);
  TempDir dir("ckpt_trunc");
  const auto path = dir.path() / "m.ckpt";
  model.save(path.string());
  std::string bytes = read_file(path);
  testutil::write_file(path, bytes.substr(0, bytes.size() - 5));
  CHECK_THROWS(EmbeddingModel::load(path.string()));
}

TEST_CASE("wrong magic is rejected") {
  TempDir dir("ckpt_magic");
  const auto path = dir.path() / "m.ckpt";
  testutil::write_file(path, "NOTACKPTxxxxxxxxxxxxxxxxxxxxxxxx");
  CHECK_THROWS(EmbeddingModel::load(path.string()));
}

TEST_CASE("trailing bytes are rejected") {
  const auto model = EmbeddingModel::init(ModelKind::kMf, 2, 2, 2, 0, 1, 0.1);
  TempDir dir("ckpt_trail");
  const auto path = dir.path() / "m.ckpt";
  model.save(path.string());
  std::string bytes = read_file(path);
  testutil::write_file(path, bytes + "x");
  CHECK_THROWS(EmbeddingModel::load(path.string()));
}
