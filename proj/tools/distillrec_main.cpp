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

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "distillrec/config.hpp"
#include "distillrec/pipeline.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir = "run";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> method;
  std::optional<std::uint32_t> k;
  std::optional<double> lambda;
  std::optional<double> mu;
};

void add_common_flags(CLI::App* cmd, CommonFlags* flags) {
  cmd->add_option("--config", flags->config_path,
                  "Key=value configuration file");
  cmd->add_option("--out", flags->out_dir, "Run directory")
      ->capture_default_str();
  cmd->add_option("--seed", flags->seed, "Override the experiment seed");
  cmd->add_option("--method", flags->method,
                  "Distillation method: none|rd|cd|unkd");
  cmd->add_option("--k", flags->k, "Popularity group count");
  cmd->add_option("--lambda", flags->lambda, "Distillation loss weight");
  cmd->add_option("--mu", flags->mu, "Rank-decay temperature");
}

distillrec::ExperimentConfig resolve_config(const CommonFlags& flags) {
  distillrec::ExperimentConfig config;
  if (!flags.config_path.empty()) {
    config = distillrec::load_config(flags.config_path);
  }
  if (flags.seed) config.seed = *flags.seed;
  if (flags.method) config.method = distillrec::parse_distill_method(*flags.method);
  if (flags.k) config.k = *flags.k;
  if (flags.lambda) config.lambda = *flags.lambda;
  if (flags.mu) config.mu = *flags.mu;
  distillrec::validate_grids(config);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Popularity-stratified knowledge distillation for implicit-feedback "
      "recommenders"};
  app.require_subcommand(1);

  const std::vector<std::string> commands = {
      "prepare",  "train-teacher", "train-student-base", "distill",
      "evaluate", "sweep-k",       "lemma-check"};
  const std::vector<std::string> descriptions = {
      "Ingest, filter, split, and archive the interaction data",
      "Train the large-dimension teacher",
      "Train the small-dimension student without distillation",
      "Train a student against the frozen teacher, then evaluate",
      "Evaluate existing checkpoints into a metrics CSV",
      "Distill and evaluate once per configured group count",
      "Verify ranking agreement on equal-popularity strata"};

  std::vector<CommonFlags> flags(commands.size());
  std::vector<CLI::App*> subs(commands.size());
  for (std::size_t c = 0; c < commands.size(); ++c) {
    subs[c] = app.add_subcommand(commands[c], descriptions[c]);
    add_common_flags(subs[c], &flags[c]);
  }

  CLI11_PARSE(app, argc, argv);

  for (std::size_t c = 0; c < commands.size(); ++c) {
    if (subs[c]->parsed()) {
      try {
        const distillrec::ExperimentConfig config = resolve_config(flags[c]);
        return distillrec::run_command(commands[c], config, flags[c].out_dir);
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
      }
    }
  }
  return 1;
}
