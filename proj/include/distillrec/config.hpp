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

#include "distillrec/backbone.hpp"
#include "distillrec/distill.hpp"

namespace distillrec {

/// Everything a run needs, loadable from a flat key=value file. Unknown keys
/// and malformed values are hard errors; hyperparameters outside the
/// supported grids are rejected unless allow_any_hyperparameters is set.
struct ExperimentConfig {
  std::string data_path;
  std::string data_delimiter = "\t";
  double data_rating_threshold = 0.0;
  std::uint32_t data_min_interactions = 20;
  double test_frac = 0.1;
  double valid_frac = 0.1;

  ModelKind backbone = ModelKind::kMf;
  std::uint32_t lightgcn_layers = 2;
  std::uint32_t teacher_dim = 100;
  std::uint32_t student_dim = 10;
  double init_scale = 0.1;

  double learning_rate = 1e-3;
  double l2_coeff = 1e-4;
  std::uint32_t batch_size = 2048;
  std::uint32_t max_epochs = 1000;
  std::uint32_t patience = 100;

  DistillMethod method = DistillMethod::kNone;
  std::uint32_t k = 2;
  double lambda = 0.5;
  double mu = 10.0;
  std::uint32_t soft_labels = 40;
  std::uint32_t pairs_per_group = 0;
  bool resample = true;
  std::uint32_t rd_topn = 40;

  std::size_t eval_n = 10;
  std::vector<std::uint32_t> sweep_ks = {1, 2, 3, 4, 5, 6, 7, 8};

  std::uint32_t causal_users = 50;
  std::uint32_t causal_items = 200;
  double causal_gamma = 1.0;
  double causal_alpha = 1.5;
  std::uint32_t causal_z_max = 1000;

  std::uint64_t seed = 0;
  bool allow_any_hyperparameters = false;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses key=value lines ('#' comments and blank lines allowed). Unknown or
/// duplicate keys, bad values, and out-of-grid hyperparameters are errors.
ExperimentConfig parse_config_text(const std::string& text);

/// parse_config_text over a file, with existence checks on referenced paths.
ExperimentConfig load_config(const std::string& path);

/// Emits every key in a fixed order at full precision, so that
/// parse(serialize(c)) == c field for field.
std::string serialize_config(const ExperimentConfig& config);

/// Grid checks: k in [1,10], lambda in [0,1], mu in {10,20}, soft-label
/// budget in {30,40}, sweep entries in [1,10]. Skipped entirely under
/// allow_any_hyperparameters.
void validate_grids(const ExperimentConfig& config);

}  // namespace distillrec
