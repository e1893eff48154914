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

#include "distillrec/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "distillrec/rng.hpp"

namespace distillrec {

namespace {

std::vector<std::string> split_fields(const std::string& line,
                                      const std::string& delimiter) {
  std::vector<std::string> fields;
  if (delimiter.empty()) {
    fields.push_back(line);
    return fields;
  }
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = line.find(delimiter, pos);
    if (next == std::string::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, next - pos));
    pos = next + delimiter.size();
  }
  return fields;
}

bool parse_double(const std::string& s, double* out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, *out);
  return ec == std::errc() && ptr == end;
}

bool parse_int64(const std::string& s, std::int64_t* out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, *out);
  return ec == std::errc() && ptr == end;
}

std::uint32_t parse_index(const std::string& s, const std::string& what,
                          const std::string& where) {
  std::int64_t v = 0;
  if (!parse_int64(s, &v) || v < 0) {
    throw std::runtime_error(where + ": bad " + what + " '" + s + "'");
  }
  return static_cast<std::uint32_t>(v);
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  return in;
}

void write_or_throw(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write " + path);
  }
  out << content;
  if (!out) {
    throw std::runtime_error("write failed for " + path);
  }
}

}  // namespace

std::uint64_t InteractionDataset::train_size() const {
  std::uint64_t total = 0;
  for (const auto& items : train) total += items.size();
  return total;
}

InteractionLog load_interactions(const std::string& path,
                                 const std::string& delimiter,
                                 double rating_threshold) {
  std::ifstream in = open_or_throw(path);

  InteractionLog log;
  std::unordered_map<std::string, UserId> user_index;
  std::unordered_map<std::string, ItemId> item_index;

  std::string line;
  std::size_t line_no = 0;
  std::size_t parsed_rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    const std::vector<std::string> fields = split_fields(line, delimiter);
    if (fields.size() < 2 || fields[0].empty() || fields[1].empty()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected at least user and item fields");
    }
    double rating = 1.0;
    std::int64_t timestamp = 0;
    if (fields.size() >= 3 && !parse_double(fields[2], &rating)) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": bad rating '" + fields[2] + "'");
    }
    if (fields.size() >= 4 && !parse_int64(fields[3], &timestamp)) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": bad timestamp '" + fields[3] + "'");
    }
    ++parsed_rows;
    if (rating < rating_threshold) continue;

    Interaction it;
    auto [uit, user_is_new] =
        user_index.try_emplace(fields[0], static_cast<UserId>(log.user_ids.size()));
    if (user_is_new) log.user_ids.push_back(fields[0]);
    auto [iit, item_is_new] =
        item_index.try_emplace(fields[1], static_cast<ItemId>(log.item_ids.size()));
    if (item_is_new) log.item_ids.push_back(fields[1]);
    it.user = uit->second;
    it.item = iit->second;
    it.raw_rating = rating;
    it.timestamp = timestamp;
    log.interactions.push_back(it);
  }

  if (parsed_rows == 0) {
    throw std::runtime_error(path + ": no interactions found");
  }
  log.num_users = static_cast<std::uint32_t>(log.user_ids.size());
  log.num_items = static_cast<std::uint32_t>(log.item_ids.size());
  return log;
}

InteractionLog filter_min_interactions(const InteractionLog& log,
                                       std::uint32_t min_count) {
  if (min_count < 1) {
    throw std::invalid_argument("min_count must be >= 1");
  }

  std::vector<std::uint32_t> counts(log.num_users, 0);
  for (const Interaction& it : log.interactions) ++counts[it.user];

  InteractionLog out;
  std::vector<UserId> user_remap(log.num_users, UINT32_MAX);
  std::vector<ItemId> item_remap(log.num_items, UINT32_MAX);
  for (const Interaction& it : log.interactions) {
    if (counts[it.user] < min_count) continue;
    if (user_remap[it.user] == UINT32_MAX) {
      user_remap[it.user] = static_cast<UserId>(out.user_ids.size());
      out.user_ids.push_back(log.user_ids[it.user]);
    }
    if (item_remap[it.item] == UINT32_MAX) {
      item_remap[it.item] = static_cast<ItemId>(out.item_ids.size());
      out.item_ids.push_back(log.item_ids[it.item]);
    }
    Interaction kept = it;
    kept.user = user_remap[it.user];
    kept.item = item_remap[it.item];
    out.interactions.push_back(kept);
  }

  if (out.interactions.empty()) {
    throw std::runtime_error("min-interaction filter removed every user");
  }
  out.num_users = static_cast<std::uint32_t>(out.user_ids.size());
  out.num_items = static_cast<std::uint32_t>(out.item_ids.size());
  return out;
}

InteractionDataset split_per_user(const InteractionLog& log, double test_frac,
                                  double valid_frac, std::uint64_t seed) {
  if (!(test_frac > 0.0 && test_frac < 1.0)) {
    throw std::invalid_argument("test_frac must be in (0, 1)");
  }
  if (!(valid_frac >= 0.0 && valid_frac < 1.0)) {
    throw std::invalid_argument("valid_frac must be in [0, 1)");
  }

  InteractionDataset ds;
  ds.num_users = log.num_users;
  ds.num_items = log.num_items;
  ds.user_ids = log.user_ids;
  ds.item_ids = log.item_ids;
  ds.train.resize(log.num_users);
  ds.valid.resize(log.num_users);
  ds.test.resize(log.num_users);

  std::vector<std::vector<ItemId>> per_user(log.num_users);
  for (const Interaction& it : log.interactions) {
    per_user[it.user].push_back(it.item);
  }

  for (UserId u = 0; u < log.num_users; ++u) {
    auto& items = per_user[u];
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    if (items.empty()) continue;

    std::mt19937_64 rng =
        make_rng(seed, Stream::kSplit, u);
    std::shuffle(items.begin(), items.end(), rng);

    const std::size_t count = items.size();
    const std::size_t n_test = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(count * test_frac)));
    const std::size_t remaining = count - n_test;
    const std::size_t n_valid =
        static_cast<std::size_t>(std::floor(remaining * valid_frac));
    const std::size_t n_train = remaining - n_valid;
    if (n_train == 0) {
      throw std::runtime_error("user " + log.user_ids[u] +
                               " left with empty train split");
    }

    ds.test[u].assign(items.begin(), items.begin() + n_test);
    ds.valid[u].assign(items.begin() + n_test, items.begin() + n_test + n_valid);
    ds.train[u].assign(items.begin() + n_test + n_valid, items.end());
    std::sort(ds.test[u].begin(), ds.test[u].end());
    std::sort(ds.valid[u].begin(), ds.valid[u].end());
    std::sort(ds.train[u].begin(), ds.train[u].end());
  }

  ds.popularity = compute_popularity(ds.train, ds.num_items);
  return ds;
}

std::vector<std::uint32_t> compute_popularity(
    const std::vector<std::vector<ItemId>>& train, std::uint32_t num_items) {
  std::vector<std::uint32_t> z(num_items, 0);
  for (const auto& items : train) {
    for (ItemId i : items) ++z[i];
  }
  return z;
}

namespace {

std::string splits_to_text(const std::vector<std::vector<ItemId>>& splits) {
  std::string out;
  for (UserId u = 0; u < splits.size(); ++u) {
    for (ItemId i : splits[u]) {
      out += std::to_string(u);
      out += '\t';
      out += std::to_string(i);
      out += '\n';
    }
  }
  return out;
}

std::vector<std::vector<ItemId>> splits_from_file(const std::string& path,
                                                  std::uint32_t num_users,
                                                  std::uint32_t num_items) {
  std::ifstream in = open_or_throw(path);
  std::vector<std::vector<ItemId>> splits(num_users);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_fields(line, "\t");
    if (fields.size() != 2) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected 'user<TAB>item'");
    }
    const std::string where = path + ":" + std::to_string(line_no);
    const std::uint32_t u = parse_index(fields[0], "user", where);
    const std::uint32_t i = parse_index(fields[1], "item", where);
    if (u >= num_users || i >= num_items) {
      throw std::runtime_error(where + ": index out of range");
    }
    splits[u].push_back(i);
  }
  for (auto& items : splits) std::sort(items.begin(), items.end());
  return splits;
}

std::string ids_to_text(const std::vector<std::string>& ids) {
  std::string out;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    out += std::to_string(k);
    out += '\t';
    out += ids[k];
    out += '\n';
  }
  return out;
}

std::vector<std::string> ids_from_file(const std::string& path,
                                       std::uint32_t expected) {
  std::ifstream in = open_or_throw(path);
  std::vector<std::string> ids(expected);
  std::string line;
  std::size_t line_no = 0;
  std::size_t seen = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected 'index<TAB>id'");
    }
    const std::string where = path + ":" + std::to_string(line_no);
    const std::uint32_t k = parse_index(line.substr(0, tab), "index", where);
    if (k >= expected) {
      throw std::runtime_error(where + ": index out of range");
    }
    ids[k] = line.substr(tab + 1);
    ++seen;
  }
  if (seen != expected) {
    throw std::runtime_error(path + ": expected " + std::to_string(expected) +
                             " entries, found " + std::to_string(seen));
  }
  return ids;
}

}  // namespace

void save_archive(const InteractionDataset& ds, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  std::string meta;
  meta += "format\tdistillrec-dataset-v1\n";
  meta += "users\t" + std::to_string(ds.num_users) + "\n";
  meta += "items\t" + std::to_string(ds.num_items) + "\n";
  write_or_throw(dir + "/meta.txt", meta);

  write_or_throw(dir + "/train.txt", splits_to_text(ds.train));
  write_or_throw(dir + "/valid.txt", splits_to_text(ds.valid));
  write_or_throw(dir + "/test.txt", splits_to_text(ds.test));

  std::string pop;
  for (ItemId i = 0; i < ds.num_items; ++i) {
    pop += std::to_string(i);
    pop += '\t';
    pop += std::to_string(ds.popularity[i]);
    pop += '\n';
  }
  write_or_throw(dir + "/popularity.txt", pop);

  write_or_throw(dir + "/user_map.txt", ids_to_text(ds.user_ids));
  write_or_throw(dir + "/item_map.txt", ids_to_text(ds.item_ids));
}

InteractionDataset load_archive(const std::string& dir) {
  std::ifstream meta_in = open_or_throw(dir + "/meta.txt");
  std::string line;
  std::uint32_t num_users = 0, num_items = 0;
  bool format_ok = false;
  std::size_t line_no = 0;
  while (std::getline(meta_in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw std::runtime_error(dir + "/meta.txt:" + std::to_string(line_no) +
                               ": expected 'key<TAB>value'");
    }
    const std::string key = line.substr(0, tab);
    const std::string value = line.substr(tab + 1);
    const std::string where = dir + "/meta.txt:" + std::to_string(line_no);
    if (key == "format") {
      format_ok = (value == "distillrec-dataset-v1");
    } else if (key == "users") {
      num_users = parse_index(value, "user count", where);
    } else if (key == "items") {
      num_items = parse_index(value, "item count", where);
    }
  }
  if (!format_ok) {
    throw std::runtime_error(dir + "/meta.txt: unknown archive format");
  }

  InteractionDataset ds;
  ds.num_users = num_users;
  ds.num_items = num_items;
  ds.train = splits_from_file(dir + "/train.txt", num_users, num_items);
  ds.valid = splits_from_file(dir + "/valid.txt", num_users, num_items);
  ds.test = splits_from_file(dir + "/test.txt", num_users, num_items);
  ds.user_ids = ids_from_file(dir + "/user_map.txt", num_users);
  ds.item_ids = ids_from_file(dir + "/item_map.txt", num_items);

  std::ifstream pop_in = open_or_throw(dir + "/popularity.txt");
  ds.popularity.assign(num_items, 0);
  line_no = 0;
  while (std::getline(pop_in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    const std::string where =
        dir + "/popularity.txt:" + std::to_string(line_no);
    if (tab == std::string::npos) {
      throw std::runtime_error(where + ": expected 'item<TAB>count'");
    }
    const std::uint32_t i = parse_index(line.substr(0, tab), "item", where);
    if (i >= num_items) {
      throw std::runtime_error(where + ": item out of range");
    }
    ds.popularity[i] = parse_index(line.substr(tab + 1), "count", where);
  }

  const std::vector<std::uint32_t> recomputed =
      compute_popularity(ds.train, num_items);
  if (recomputed != ds.popularity) {
    throw std::runtime_error(dir +
                             ": stored popularity disagrees with train split");
  }
  return ds;
}

}  // namespace distillrec
