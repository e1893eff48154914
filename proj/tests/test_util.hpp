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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "distillrec/common.hpp"
#include "distillrec/dataset.hpp"

namespace distillrec::testutil {

/// Upper regularized incomplete gamma Q(a, x) via the standard series /
/// continued-fraction split; feeds the chi-square p-value below.
inline double upper_regularized_gamma(double a, double x) {
  if (x < 0.0 || a <= 0.0) return 1.0;
  if (x == 0.0) return 1.0;
  const double log_gamma_a = std::lgamma(a);
  if (x < a + 1.0) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int n = 0; n < 500; ++n) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * 1e-15) break;
    }
    const double lower = sum * std::exp(-x + a * std::log(x) - log_gamma_a);
    return 1.0 - lower;
  }
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - log_gamma_a);
}

/// P(chi2 >= stat) for the given degrees of freedom.
inline double chi_square_pvalue(double stat, double dof) {
  return upper_regularized_gamma(dof / 2.0, stat / 2.0);
}

/// Goodness-of-fit p-value for observed counts against expected
/// probabilities (which must sum to 1).
inline double chi_square_gof_pvalue(const std::vector<std::uint64_t>& observed,
                                    const std::vector<double>& expected_prob) {
  std::uint64_t total = 0;
  for (std::uint64_t c : observed) total += c;
  double stat = 0.0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    const double expected = expected_prob[k] * static_cast<double>(total);
    const double diff = static_cast<double>(observed[k]) - expected;
    stat += diff * diff / expected;
  }
  return chi_square_pvalue(stat, static_cast<double>(observed.size() - 1));
}

/// Central-difference gradient check. `loss_of(user, item)` evaluates the
/// loss at perturbed parameters; returns the worst per-coordinate relative
/// error against the provided analytic gradients.
template <typename LossFn>
double max_relative_gradient_error(const Mat& user, const Mat& item,
                                   const LossFn& loss_of, const Mat& grad_user,
                                   const Mat& grad_item, double h = 1e-5) {
  double worst = 0.0;
  const auto check_matrix = [&](const Mat& base, const Mat& analytic,
                                bool is_user) {
    for (Eigen::Index r = 0; r < base.rows(); ++r) {
      for (Eigen::Index c = 0; c < base.cols(); ++c) {
        Mat u_plus = user;
        Mat i_plus = item;
        Mat u_minus = user;
        Mat i_minus = item;
        if (is_user) {
          u_plus(r, c) += h;
          u_minus(r, c) -= h;
        } else {
          i_plus(r, c) += h;
          i_minus(r, c) -= h;
        }
        const double fd =
            (loss_of(u_plus, i_plus) - loss_of(u_minus, i_minus)) / (2.0 * h);
        const double a = analytic(r, c);
        const double scale = std::max({std::fabs(a), std::fabs(fd), 1e-6});
        worst = std::max(worst, std::fabs(a - fd) / scale);
      }
    }
  };
  check_matrix(user, grad_user, true);
  check_matrix(item, grad_item, false);
  return worst;
}

/// Dataset assembled directly from per-user item lists; popularity follows
/// from train.
inline InteractionDataset make_dataset(
    std::vector<std::vector<ItemId>> train,
    std::vector<std::vector<ItemId>> valid,
    std::vector<std::vector<ItemId>> test, std::uint32_t num_items) {
  InteractionDataset ds;
  ds.num_users = static_cast<std::uint32_t>(train.size());
  ds.num_items = num_items;
  for (auto* split : {&train, &valid, &test}) {
    for (auto& items : *split) std::sort(items.begin(), items.end());
  }
  ds.train = std::move(train);
  ds.valid = std::move(valid);
  ds.test = std::move(test);
  ds.popularity = compute_popularity(ds.train, num_items);
  ds.user_ids.resize(ds.num_users);
  ds.item_ids.resize(ds.num_items);
  for (std::uint32_t u = 0; u < ds.num_users; ++u) ds.user_ids[u] = u;
  for (std::uint32_t i = 0; i < num_items; ++i) ds.item_ids[i] = i;
  return ds;
}

/// Random dense-ish dataset for property tests: every user gets a train set,
/// one validation item, and one test item.
inline InteractionDataset random_dataset(std::uint32_t num_users,
                                         std::uint32_t num_items,
                                         std::uint32_t train_per_user,
                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<ItemId>> train(num_users), valid(num_users),
      test(num_users);
  std::vector<ItemId> all(num_items);
  for (std::uint32_t i = 0; i < num_items; ++i) all[i] = i;
  for (std::uint32_t u = 0; u < num_users; ++u) {
    std::shuffle(all.begin(), all.end(), rng);
    const std::uint32_t t = std::min(train_per_user, num_items - 2);
    train[u].assign(all.begin(), all.begin() + t);
    valid[u].push_back(all[t]);
    test[u].push_back(all[t + 1]);
  }
  return make_dataset(std::move(train), std::move(valid), std::move(test),
                      num_items);
}

/// Self-cleaning unique directory under the system temp root.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("distillrec_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path,
                       const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

}  // namespace distillrec::testutil
