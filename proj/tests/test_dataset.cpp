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

#include <algorithm>
#include <set>
#include <string>

#include "distillrec/dataset.hpp"
#include "test_util.hpp"

using namespace distillrec;
using distillrec::testutil::TempDir;
using distillrec::testutil::read_file;
using distillrec::testutil::write_file;

TEST_CASE("single-line file yields one interaction") {
  TempDir dir("ds_single");
  write_file(dir.path() / "one.txt", "u1 i1 5 0\n");
  const auto log = load_interactions((dir.path() / "one.txt").string(), " ", 0.0);
  CHECK(log.interactions.size() == 1);
  CHECK(log.num_users == 1);
  CHECK(log.num_items == 1);
  CHECK(log.interactions[0].user == 0);
  CHECK(log.interactions[0].item == 0);
}

TEST_CASE("rating threshold drops low ratings before indexing") {
  TempDir dir("ds_thresh");
  write_file(dir.path() / "r.txt", "u1\ta\t1\t0\nu2\tb\t3\t0\nu3\tc\t5\t0\n");
  const auto log = load_interactions((dir.path() / "r.txt").string(), "\t", 4.0);
  CHECK(log.interactions.size() == 1);
  CHECK(log.num_users == 1);
  CHECK(log.num_items == 1);
  CHECK(log.user_ids[0] == "u3");
}

TEST_CASE("double-colon delimiter splits movie-lens style rows") {
  TempDir dir("ds_colon");
  write_file(dir.path() / "ml.txt", "1::10::4::978300760\n1::11::5::978300760\n2::10::3::978300760\n");
  const auto log = load_interactions((dir.path() / "ml.txt").string(), "::", 0.0);
  CHECK(log.interactions.size() == 3);
  CHECK(log.num_users == 2);
  CHECK(log.num_items == 2);
}

TEST_CASE("malformed line reports its line number") {
  TempDir dir("ds_bad");
  write_file(dir.path() / "bad.txt", "u1\ti1\t5\t0\nu2\n");
  try {
    load_interactions((dir.path() / "bad.txt").string(), "\t", 0.0);
    FAIL("expected a parse error");
  } catch (const std::exception& e) {
    const std::string msg = e.what();
    CHECK(msg.find(":2") != std::string::npos);
  }
}

TEST_CASE("empty file is an error") {
  TempDir dir("ds_empty");
  write_file(dir.path() / "empty.txt", "");
  CHECK_THROWS(load_interactions((dir.path() / "empty.txt").string(), "\t", 0.0));
}

namespace {

InteractionLog log_with_counts(const std::vector<int>& counts) {
  InteractionLog log;
  std::uint32_t item = 0;
  for (std::size_t u = 0; u < counts.size(); ++u) {
    for (int c = 0; c < counts[u]; ++c) {
      log.interactions.push_back({static_cast<UserId>(u), item, 5.0, 0});
      ++item;
    }
    log.user_ids.push_back("u" + std::to_string(u));
  }
  log.num_users = static_cast<std::uint32_t>(counts.size());
  log.num_items = item;
  for (std::uint32_t i = 0; i < item; ++i) {
    log.item_ids.push_back("i" + std::to_string(i));
  }
  return log;
}

}  // namespace

TEST_CASE("minimum-count filter keeps the boundary user") {
  const auto log = log_with_counts({25, 19, 20});
  const auto filtered = filter_min_interactions(log, 20);
  CHECK(filtered.num_users == 2);
  CHECK(filtered.user_ids == std::vector<std::string>{"u0", "u2"});
  CHECK(filtered.interactions.size() == 45);
  CHECK(filtered.num_items == 45);
}

TEST_CASE("minimum count of one is the identity") {
  const auto log = log_with_counts({3, 1, 2});
  const auto filtered = filter_min_interactions(log, 1);
  CHECK(filtered.num_users == log.num_users);
  CHECK(filtered.num_items == log.num_items);
  CHECK(filtered.interactions.size() == log.interactions.size());
}

TEST_CASE("filtering everyone out is an error") {
  const auto log = log_with_counts({2, 3});
  CHECK_THROWS(filter_min_interactions(log, 10));
}

namespace {

InteractionLog uniform_log(std::uint32_t users, std::uint32_t items_per_user,
                           std::uint32_t num_items) {
  InteractionLog log;
  log.num_users = users;
  log.num_items = num_items;
  for (std::uint32_t u = 0; u < users; ++u) {
    log.user_ids.push_back("u" + std::to_string(u));
    for (std::uint32_t j = 0; j < items_per_user; ++j) {
      log.interactions.push_back({u, (u + j) % num_items, 5.0, 0});
    }
  }
  for (std::uint32_t i = 0; i < num_items; ++i) {
    log.item_ids.push_back("i" + std::to_string(i));
  }
  return log;
}

}  // namespace

TEST_CASE("per-user split sizes follow the floor rule") {
  const auto log = uniform_log(1, 20, 30);
  const auto ds = split_per_user(log, 0.1, 0.1, 7);
  CHECK(ds.test[0].size() == 2);
  CHECK(ds.valid[0].size() == 1);
  CHECK(ds.train[0].size() == 17);
}

TEST_CASE("zero validation fraction leaves validation empty") {
  const auto log = uniform_log(3, 10, 15);
  const auto ds = split_per_user(log, 0.2, 0.0, 7);
  for (const auto& v : ds.valid) CHECK(v.empty());
}

TEST_CASE("split is deterministic per seed") {
  const auto log = uniform_log(8, 12, 25);
  const auto a = split_per_user(log, 0.1, 0.1, 3);
  const auto b = split_per_user(log, 0.1, 0.1, 3);
  CHECK(a.train == b.train);
  CHECK(a.valid == b.valid);
  CHECK(a.test == b.test);
  const auto c = split_per_user(log, 0.1, 0.1, 4);
  CHECK(a.train != c.train);
}

TEST_CASE("split fractions are validated") {
  const auto log = uniform_log(2, 10, 15);
  CHECK_THROWS(split_per_user(log, 0.0, 0.1, 1));
  CHECK_THROWS(split_per_user(log, 1.0, 0.1, 1));
  CHECK_THROWS(split_per_user(log, 0.1, 1.0, 1));
  CHECK_THROWS(split_per_user(log, 0.1, -0.1, 1));
}

TEST_CASE("splits are disjoint and conserve interactions") {
  const auto log = uniform_log(20, 15, 40);
  const auto ds = split_per_user(log, 0.15, 0.2, 11);
  for (std::uint32_t u = 0; u < ds.num_users; ++u) {
    std::set<ItemId> all;
    for (const auto* split : {&ds.train[u], &ds.valid[u], &ds.test[u]}) {
      for (ItemId i : *split) {
        CHECK(all.insert(i).second);
      }
    }
    CHECK(all.size() == 15);
    CHECK(!ds.train[u].empty());
    CHECK(!ds.test[u].empty());
  }
}

TEST_CASE("duplicate user-item rows collapse before splitting") {
  InteractionLog log;
  log.num_users = 1;
  log.num_items = 6;
  log.user_ids = {"u0"};
  for (std::uint32_t i = 0; i < 6; ++i) {
    log.item_ids.push_back("i" + std::to_string(i));
    log.interactions.push_back({0, i, 5.0, 0});
    log.interactions.push_back({0, i, 5.0, 1});
  }
  const auto ds = split_per_user(log, 0.2, 0.0, 2);
  CHECK(ds.train[0].size() + ds.test[0].size() == 6);
}

TEST_CASE("popularity counts training interactions only") {
  const auto ds = testutil::make_dataset({{0, 1}, {0}}, {{}, {}}, {{2}, {1}}, 3);
  CHECK(ds.popularity == std::vector<std::uint32_t>{2, 1, 0});
}

TEST_CASE("popularity mass equals total training size") {
  const auto log = uniform_log(10, 12, 30);
  const auto ds = split_per_user(log, 0.1, 0.1, 5);
  std::uint64_t mass = 0;
  for (auto z : ds.popularity) mass += z;
  CHECK(mass == ds.train_size());
}

TEST_CASE("archive round-trips exactly") {
  const auto log = uniform_log(12, 14, 33);
  const auto ds = split_per_user(log, 0.1, 0.1, 9);
  TempDir dir("ds_archive");
  save_archive(ds, dir.str());
  const auto loaded = load_archive(dir.str());
  CHECK(loaded.num_users == ds.num_users);
  CHECK(loaded.num_items == ds.num_items);
  CHECK(loaded.train == ds.train);
  CHECK(loaded.valid == ds.valid);
  CHECK(loaded.test == ds.test);
  CHECK(loaded.popularity == ds.popularity);
  CHECK(loaded.user_ids == ds.user_ids);
  CHECK(loaded.item_ids == ds.item_ids);
}

TEST_CASE("identical inputs serialize byte-identically") {
  const auto log = uniform_log(6, 10, 20);
  const auto ds1 = split_per_user(log, 0.1, 0.1, 13);
  const auto ds2 = split_per_user(log, 0.1, 0.1, 13);
  TempDir d1("ds_bytes1");
  TempDir d2("ds_bytes2");
  save_archive(ds1, d1.str());
  save_archive(ds2, d2.str());
  for (const char* name :
       {"meta.txt", "train.txt", "valid.txt", "test.txt", "popularity.txt",
        "user_map.txt", "item_map.txt"}) {
    CHECK(read_file(d1.path() / name) == read_file(d2.path() / name));
  }
}

TEST_CASE("archive with corrupted popularity is rejected") {
  const auto log = uniform_log(4, 8, 16);
  const auto ds = split_per_user(log, 0.2, 0.1, 1);
  TempDir dir("ds_corrupt");
  save_archive(ds, dir.str());
  std::string pop = read_file(dir.path() / "popularity.txt");
  const auto tab = pop.find('\t');
  pop[tab + 1] = '9';
  write_file(dir.path() / "popularity.txt", pop);
  CHECK_THROWS(load_archive(dir.str()));
}
