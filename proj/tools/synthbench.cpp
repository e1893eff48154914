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

#include "distillrec/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Generate a synthetic implicit-feedback benchmark with latent "
      "preferences and long-tailed exposure"};
  distillrec::BenchmarkConfig config;
  std::string out_path = "interactions.tsv";
  app.add_option("--out", out_path, "Output interactions file")
      ->capture_default_str();
  app.add_option("--users", config.num_users)->capture_default_str();
  app.add_option("--items", config.num_items)->capture_default_str();
  app.add_option("--latent-dim", config.latent_dim)->capture_default_str();
  app.add_option("--affinity", config.affinity_weight)->capture_default_str();
  app.add_option("--popularity", config.popularity_weight)
      ->capture_default_str();
  app.add_option("--zipf", config.zipf_exponent)->capture_default_str();
  app.add_option("--min-interactions", config.min_interactions_per_user)
      ->capture_default_str();
  app.add_option("--mean-extra", config.mean_extra_interactions)
      ->capture_default_str();
  app.add_option("--seed", config.seed)->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    distillrec::write_benchmark_interactions(config, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cout << "wrote " << out_path << "\n";
  return 0;
}
