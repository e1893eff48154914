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

#include <filesystem>
#include <string>

#include "distillrec/config.hpp"
#include "distillrec/dataset.hpp"

namespace distillrec {

/// Run-directory layout. Every command resolves its inputs and outputs
/// through these paths and echoes the resolved config at the root.
struct RunPaths {
  std::filesystem::path root;

  explicit RunPaths(std::filesystem::path run_root)
      : root(std::move(run_root)) {}

  std::filesystem::path resolved_config() const {
    return root / "config.resolved";
  }
  std::filesystem::path dataset_dir() const { return root / "dataset"; }
  std::filesystem::path checkpoint_dir() const { return root / "checkpoints"; }
  std::filesystem::path log_dir() const { return root / "logs"; }
  std::filesystem::path report_dir() const { return root / "reports"; }
  std::filesystem::path stale_marker(const std::string& command) const {
    return root / (".stale-" + command);
  }

  void ensure_layout() const;
};

std::string teacher_checkpoint_name(std::uint64_t seed);
std::string student_base_checkpoint_name(std::uint64_t seed);
std::string distilled_checkpoint_name(DistillMethod method, std::uint32_t k,
                                      std::uint64_t seed);

/// Ingests the raw interaction file, filters, splits, and archives the
/// dataset into the run directory.
void cmd_prepare(const ExperimentConfig& config, const RunPaths& paths);

/// Trains the teacher-dimension model on the prepared dataset; writes a
/// checkpoint and a training log.
void cmd_train_teacher(const ExperimentConfig& config, const RunPaths& paths);

/// Trains the student-dimension model with no distillation.
void cmd_train_student_base(const ExperimentConfig& config,
                            const RunPaths& paths);

/// Trains a student against the frozen teacher with the configured
/// distillation method. Writes the checkpoint, training log, and a metrics
/// CSV covering teacher, base student, and the distilled student.
void cmd_distill(const ExperimentConfig& config, const RunPaths& paths);

/// Evaluates whichever of this config's checkpoints exist and writes the
/// metrics CSV. Never modifies checkpoints.
void cmd_evaluate(const ExperimentConfig& config, const RunPaths& paths);

/// Distills and evaluates once per configured K, emitting one CSV with a
/// leading k column.
void cmd_sweep_k(const ExperimentConfig& config, const RunPaths& paths);

/// Generates synthetic causal worlds and reports, per gamma, the equal-
/// popularity ranking agreement and the popular-decile share of top lists.
void cmd_lemma_check(const ExperimentConfig& config, const RunPaths& paths);

/// Dispatches one command by name, maintaining the stale marker around it.
/// Returns a process exit status; failures are reported on stderr.
int run_command(const std::string& command, const ExperimentConfig& config,
                const std::string& out_dir);

/// Loads the archived dataset from the run directory.
InteractionDataset load_run_dataset(const RunPaths& paths);

}  // namespace distillrec
