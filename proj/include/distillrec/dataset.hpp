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
#include <string>
#include <vector>

#include "distillrec/common.hpp"

namespace distillrec {

/// One binarized interaction with dense user/item indices.
struct Interaction {
  UserId user = 0;
  ItemId item = 0;
  double raw_rating = 1.0;
  std::int64_t timestamp = 0;  // retained, unused by training
};

/// Raw interaction log after loading (and optionally filtering): retained
/// rows plus the dense-index <-> original-id mapping tables.
struct InteractionLog {
  std::vector<Interaction> interactions;
  std::uint32_t num_users = 0;
  std::uint32_t num_items = 0;
  std::vector<std::string> user_ids;  // dense index -> original id
  std::vector<std::string> item_ids;
};

/// Per-user train/validation/test splits over the binarized feedback matrix,
/// plus item popularity counted on the train split.
struct InteractionDataset {
  std::uint32_t num_users = 0;
  std::uint32_t num_items = 0;
  // Per user, ascending item ids. The three splits are pairwise disjoint and
  // their union is the user's retained (unique) interaction set.
  std::vector<std::vector<ItemId>> train;
  std::vector<std::vector<ItemId>> valid;
  std::vector<std::vector<ItemId>> test;
  std::vector<std::uint32_t> popularity;  // Z_i = |{u : i in train_u}|
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;

  std::uint64_t train_size() const;
};

/// Parses a delimited interaction file (user, item[, rating[, timestamp]] per
/// line). Rows with rating below `rating_threshold` are dropped; surviving
/// original ids are mapped to dense indices in first-appearance order.
/// Lines that cannot be parsed raise std::runtime_error naming the line
/// number; an empty file is an error.
InteractionLog load_interactions(const std::string& path,
                                 const std::string& delimiter,
                                 double rating_threshold);

/// Keeps only users with at least `min_count` interactions and re-compacts
/// both index spaces. Applied once, no iterative refiltering.
InteractionLog filter_min_interactions(const InteractionLog& log,
                                       std::uint32_t min_count);

/// Splits each user's interactions into test/validation/train:
/// |test| = max(1, floor(count * test_frac)), then
/// |valid| = floor(remaining * valid_frac). Duplicate (user, item) pairs are
/// collapsed first (binarization). Deterministic under a fixed seed; a user
/// left with an empty train split is an error.
InteractionDataset split_per_user(const InteractionLog& log, double test_frac,
                                  double valid_frac, std::uint64_t seed);

std::vector<std::uint32_t> compute_popularity(
    const std::vector<std::vector<ItemId>>& train, std::uint32_t num_items);

/// Writes the dataset as a round-trippable archive directory:
/// train/valid/test splits as "user<TAB>item" lines, popularity as
/// "item<TAB>count" lines, id mappings, and a meta file. Output is canonical
/// (sorted), so identical datasets serialize to identical bytes.
void save_archive(const InteractionDataset& ds, const std::string& dir);

InteractionDataset load_archive(const std::string& dir);

}  // namespace distillrec
