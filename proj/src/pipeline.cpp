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

#include "distillrec/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <vector>

#include "distillrec/causal.hpp"
#include "distillrec/eval.hpp"
#include "distillrec/trainer.hpp"

namespace distillrec {

namespace {

std::string format_value(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string dataset_label(const ExperimentConfig& config) {
  if (config.data_path.empty()) return "data";
  return std::filesystem::path(config.data_path).stem().string();
}

void echo_config(const ExperimentConfig& config, const RunPaths& paths) {
  std::ofstream out(paths.resolved_config());
  if (!out) {
    throw std::runtime_error("cannot write " +
                             paths.resolved_config().string());
  }
  out << serialize_config(config);
}

TrainConfig make_train_config(const ExperimentConfig& config) {
  TrainConfig tc;
  tc.learning_rate = config.learning_rate;
  tc.l2_coeff = config.l2_coeff;
  tc.batch_size = config.batch_size;
  tc.max_epochs = config.max_epochs;
  tc.patience = config.patience;
  tc.seed = config.seed;
  tc.eval_n = config.eval_n;
  return tc;
}

std::unique_ptr<NormalizedGraph> build_graph_if_needed(
    const ExperimentConfig& config, const InteractionDataset& dataset) {
  if (config.backbone != ModelKind::kLightGcn) return nullptr;
  return std::make_unique<NormalizedGraph>(dataset.num_users,
                                           dataset.num_items, dataset.train);
}

void ready_for_scoring(EmbeddingModel* model, const NormalizedGraph* graph) {
  if (model->kind() == ModelKind::kLightGcn) {
    if (graph == nullptr) {
      throw std::runtime_error("LightGCN checkpoint needs a dataset graph");
    }
    model->propagate(*graph);
  }
}

struct TrainedArtifacts {
  std::filesystem::path checkpoint;
  std::filesystem::path log;
};

TrainedArtifacts train_and_save(const ExperimentConfig& config,
                                const RunPaths& paths,
                                const InteractionDataset& dataset,
                                const NormalizedGraph* graph,
                                std::uint32_t dim, const Objective& objective,
                                const std::string& checkpoint_name) {
  EmbeddingModel model = EmbeddingModel::init(
      config.backbone, dataset.num_users, dataset.num_items, dim,
      config.backbone == ModelKind::kLightGcn ? config.lightgcn_layers : 0,
      config.seed, config.init_scale);
  TrainResult result =
      fit(std::move(model), dataset, graph, make_train_config(config),
          objective);
  TrainedArtifacts artifacts;
  artifacts.checkpoint = paths.checkpoint_dir() / checkpoint_name;
  result.model.save(artifacts.checkpoint.string());
  const std::string stem =
      std::filesystem::path(checkpoint_name).stem().string();
  artifacts.log = paths.log_dir() / (stem + "_train.csv");
  write_training_log(result.log, artifacts.log.string());
  std::cout << stem << ": best epoch " << result.best_epoch
            << ", validation ndcg " << result.best_valid_ndcg << "\n";
  return artifacts;
}

struct MetricRow {
  std::string method;
  std::string metric;
  std::string group;
  std::string value;
};

void append_report_rows(const std::string& method, const EvalReport& report,
                        std::vector<MetricRow>* rows) {
  const auto add = [&](const std::string& metric, const std::string& group,
                       double value) {
    rows->push_back({method, metric, group, format_value(value)});
  };
  add("recall", "overall", report.recall);
  add("ndcg", "overall", report.ndcg);
  add("users", "overall", static_cast<double>(report.users_evaluated));
  add("recall", "popular", report.popular_recall);
  add("users", "popular", static_cast<double>(report.popular_users));
  add("recall", "unpopular", report.unpopular_recall);
  add("users", "unpopular", static_cast<double>(report.unpopular_users));
  add("share", "popular", report.popular_share);
  add("share", "unpopular", report.unpopular_share);
  add("ideal_share", "popular", report.ideal_popular_share);
  add("ideal_share", "unpopular", report.ideal_unpopular_share);
}

void write_metric_csv(const ExperimentConfig& config,
                      const std::vector<MetricRow>& rows,
                      const std::filesystem::path& path, bool with_k_column,
                      const std::vector<std::uint32_t>& k_per_row = {}) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  if (with_k_column) out << "k,";
  out << "dataset,backbone,method,metric,group,N,value,seed\n";
  const std::string dataset = dataset_label(config);
  const std::string backbone = to_string(config.backbone);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (with_k_column) out << k_per_row[r] << ',';
    out << dataset << ',' << backbone << ',' << rows[r].method << ','
        << rows[r].metric << ',' << rows[r].group << ',' << config.eval_n
        << ',' << rows[r].value << ',' << config.seed << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

DistillPlan build_plan(const ExperimentConfig& config,
                       const EmbeddingModel& teacher,
                       const InteractionDataset& dataset) {
  switch (config.method) {
    case DistillMethod::kUnkd:
      return build_group_plan(teacher, dataset, config.k, config.mu,
                              config.lambda, config.soft_labels);
    case DistillMethod::kCd:
      return build_cd_plan(teacher, dataset, config.mu, config.lambda,
                           config.soft_labels);
    case DistillMethod::kRd:
      return build_rd_plan(teacher, dataset, config.rd_topn, config.mu,
                           config.lambda);
    case DistillMethod::kNone:
      break;
  }
  throw std::runtime_error("distillation requires method rd, cd, or unkd");
}

EmbeddingModel load_teacher(const ExperimentConfig& config,
                            const RunPaths& paths,
                            const NormalizedGraph* graph) {
  const auto path =
      paths.checkpoint_dir() / teacher_checkpoint_name(config.seed);
  if (!std::filesystem::exists(path)) {
    throw std::runtime_error("missing teacher checkpoint " + path.string() +
                             " (run train-teacher first)");
  }
  EmbeddingModel teacher = EmbeddingModel::load(path.string());
  ready_for_scoring(&teacher, graph);
  return teacher;
}

}  // namespace

void RunPaths::ensure_layout() const {
  std::filesystem::create_directories(root);
  std::filesystem::create_directories(dataset_dir());
  std::filesystem::create_directories(checkpoint_dir());
  std::filesystem::create_directories(log_dir());
  std::filesystem::create_directories(report_dir());
}

std::string teacher_checkpoint_name(std::uint64_t seed) {
  return "teacher_s" + std::to_string(seed) + ".ckpt";
}

std::string student_base_checkpoint_name(std::uint64_t seed) {
  return "student_base_s" + std::to_string(seed) + ".ckpt";
}

std::string distilled_checkpoint_name(DistillMethod method, std::uint32_t k,
                                      std::uint64_t seed) {
  switch (method) {
    case DistillMethod::kRd:
      return "student_rd_s" + std::to_string(seed) + ".ckpt";
    case DistillMethod::kCd:
      return "student_cd_k1_s" + std::to_string(seed) + ".ckpt";
    case DistillMethod::kUnkd:
      return "student_unkd_k" + std::to_string(k) + "_s" +
             std::to_string(seed) + ".ckpt";
    case DistillMethod::kNone:
      break;
  }
  throw std::runtime_error("no checkpoint name for method none");
}

InteractionDataset load_run_dataset(const RunPaths& paths) {
  return load_archive(paths.dataset_dir().string());
}

void cmd_prepare(const ExperimentConfig& config, const RunPaths& paths) {
  if (config.data_path.empty()) {
    throw std::runtime_error("prepare requires data.path");
  }
  const InteractionLog raw = load_interactions(
      config.data_path, config.data_delimiter, config.data_rating_threshold);
  const InteractionLog filtered =
      filter_min_interactions(raw, config.data_min_interactions);
  const InteractionDataset dataset = split_per_user(
      filtered, config.test_frac, config.valid_frac, config.seed);
  save_archive(dataset, paths.dataset_dir().string());
  std::cout << "prepared dataset: " << dataset.num_users << " users, "
            << dataset.num_items << " items, " << dataset.train_size()
            << " train interactions\n";
}

void cmd_train_teacher(const ExperimentConfig& config, const RunPaths& paths) {
  const InteractionDataset dataset = load_run_dataset(paths);
  const auto graph = build_graph_if_needed(config, dataset);
  train_and_save(config, paths, dataset, graph.get(), config.teacher_dim, {},
                 teacher_checkpoint_name(config.seed));
}

void cmd_train_student_base(const ExperimentConfig& config,
                            const RunPaths& paths) {
  const InteractionDataset dataset = load_run_dataset(paths);
  const auto graph = build_graph_if_needed(config, dataset);
  train_and_save(config, paths, dataset, graph.get(), config.student_dim, {},
                 student_base_checkpoint_name(config.seed));
}

void cmd_distill(const ExperimentConfig& config, const RunPaths& paths) {
  const InteractionDataset dataset = load_run_dataset(paths);
  const auto graph = build_graph_if_needed(config, dataset);
  const EmbeddingModel teacher = load_teacher(config, paths, graph.get());
  const DistillPlan plan = build_plan(config, teacher, dataset);
  Objective objective;
  objective.method = config.method;
  objective.plan = &plan;
  objective.pairs_per_group = config.pairs_per_group;
  objective.resample_each_epoch = config.resample;
  train_and_save(config, paths, dataset, graph.get(), config.student_dim,
                 objective,
                 distilled_checkpoint_name(config.method, config.k,
                                           config.seed));
  cmd_evaluate(config, paths);
}

void cmd_evaluate(const ExperimentConfig& config, const RunPaths& paths) {
  const InteractionDataset dataset = load_run_dataset(paths);
  const auto graph = build_graph_if_needed(config, dataset);
  const PopularityPartition eval_partition =
      partition_items(dataset.popularity, 2);

  struct Candidate {
    std::string method;
    std::filesystem::path path;
  };
  std::vector<Candidate> candidates;
  candidates.push_back(
      {"teacher", paths.checkpoint_dir() / teacher_checkpoint_name(config.seed)});
  candidates.push_back({"none", paths.checkpoint_dir() /
                                    student_base_checkpoint_name(config.seed)});
  if (config.method != DistillMethod::kNone) {
    candidates.push_back(
        {to_string(config.method),
         paths.checkpoint_dir() /
             distilled_checkpoint_name(config.method, config.k, config.seed)});
  }

  std::vector<MetricRow> rows;
  std::size_t evaluated = 0;
  for (const Candidate& candidate : candidates) {
    if (!std::filesystem::exists(candidate.path)) continue;
    EmbeddingModel model = EmbeddingModel::load(candidate.path.string());
    ready_for_scoring(&model, graph.get());
    const EvalReport report =
        evaluate_model(model, dataset, eval_partition, config.eval_n);
    append_report_rows(candidate.method, report, &rows);
    ++evaluated;
  }
  if (evaluated == 0) {
    throw std::runtime_error("no checkpoints to evaluate in " +
                             paths.checkpoint_dir().string());
  }
  write_metric_csv(config, rows, paths.report_dir() / "metrics.csv", false);
  std::cout << "evaluated " << evaluated << " checkpoints into "
            << (paths.report_dir() / "metrics.csv").string() << "\n";
}

void cmd_sweep_k(const ExperimentConfig& config, const RunPaths& paths) {
  const InteractionDataset dataset = load_run_dataset(paths);
  const auto graph = build_graph_if_needed(config, dataset);
  const EmbeddingModel teacher = load_teacher(config, paths, graph.get());
  const PopularityPartition eval_partition =
      partition_items(dataset.popularity, 2);

  std::vector<MetricRow> rows;
  std::vector<std::uint32_t> k_per_row;
  for (std::uint32_t k : config.sweep_ks) {
    const DistillPlan plan = build_group_plan(
        teacher, dataset, k, config.mu, config.lambda, config.soft_labels);
    Objective objective;
    objective.method = DistillMethod::kUnkd;
    objective.plan = &plan;
    objective.pairs_per_group = config.pairs_per_group;
    objective.resample_each_epoch = config.resample;
    const auto artifacts = train_and_save(
        config, paths, dataset, graph.get(), config.student_dim, objective,
        distilled_checkpoint_name(DistillMethod::kUnkd, k, config.seed));
    EmbeddingModel student = EmbeddingModel::load(artifacts.checkpoint.string());
    ready_for_scoring(&student, graph.get());
    const EvalReport report =
        evaluate_model(student, dataset, eval_partition, config.eval_n);
    const std::size_t before = rows.size();
    append_report_rows("unkd", report, &rows);
    k_per_row.resize(rows.size(), k);
    (void)before;
  }
  write_metric_csv(config, rows, paths.report_dir() / "sweep_k.csv", true,
                   k_per_row);
  std::cout << "sweep complete: " << (paths.report_dir() / "sweep_k.csv").string()
            << "\n";
}

void cmd_lemma_check(const ExperimentConfig& config, const RunPaths& paths) {
  std::vector<double> gammas = {0.0, 0.5, 1.0, 2.0};
  if (std::find(gammas.begin(), gammas.end(), config.causal_gamma) ==
      gammas.end()) {
    gammas.push_back(config.causal_gamma);
    std::sort(gammas.begin(), gammas.end());
  }
  PowerLawConfig power_law;
  power_law.alpha = config.causal_alpha;
  power_law.z_max = config.causal_z_max;

  std::ofstream out(paths.report_dir() / "lemma_check.csv");
  if (!out) throw std::runtime_error("cannot write lemma_check.csv");
  out << "gamma,strata,strata_equal,inversion_rate,popular_decile_share\n";

  bool all_equal = true;
  for (double gamma : gammas) {
    const SyntheticCausalModel model = generate_causal_model(
        config.causal_users, config.causal_items, gamma, power_law,
        config.seed);
    const auto strata = equal_popularity_strata(model);
    std::size_t strata_equal = 0;
    for (const auto& stratum : strata) {
      bool stratum_ok = true;
      for (UserId u = 0; u < model.num_users(); ++u) {
        if (!lemma1_check(model, u, stratum).rankings_equal) {
          stratum_ok = false;
          break;
        }
      }
      if (stratum_ok) ++strata_equal;
    }
    if (strata_equal != strata.size()) all_equal = false;

    std::uint64_t inversions = 0;
    std::uint64_t pair_count = 0;
    for (UserId u = 0; u < model.num_users(); ++u) {
      for (ItemId i = 0; i < model.num_items(); ++i) {
        for (ItemId j = i + 1; j < model.num_items(); ++j) {
          const double dy = model.soft_label(u, i) - model.soft_label(u, j);
          const double dm =
              path_effect_m(model, u, i) - path_effect_m(model, u, j);
          ++pair_count;
          if ((dy > 0) != (dm > 0)) ++inversions;
        }
      }
    }
    const double inversion_rate =
        static_cast<double>(inversions) / static_cast<double>(pair_count);
    const double decile_share = popular_decile_share_top10(model);
    out << format_value(gamma) << ',' << strata.size() << ',' << strata_equal
        << ',' << format_value(inversion_rate) << ','
        << format_value(decile_share) << '\n';
    std::cout << "gamma " << gamma << ": " << strata_equal << "/"
              << strata.size() << " strata consistent, inversion rate "
              << inversion_rate << ", popular-decile share " << decile_share
              << "\n";
  }
  if (!out) throw std::runtime_error("failed writing lemma_check.csv");
  if (!all_equal) {
    throw std::runtime_error(
        "equal-popularity ranking agreement failed in at least one stratum");
  }
  std::cout << "all equal-popularity strata rank identically by label and "
               "preference\n";
}

int run_command(const std::string& command, const ExperimentConfig& config,
                const std::string& out_dir) {
  const RunPaths paths{std::filesystem::path(out_dir)};
  try {
    paths.ensure_layout();
    echo_config(config, paths);
    {
      std::ofstream marker(paths.stale_marker(command));
      marker << "in progress\n";
    }
    if (command == "prepare") {
      cmd_prepare(config, paths);
    } else if (command == "train-teacher") {
      cmd_train_teacher(config, paths);
    } else if (command == "train-student-base") {
      cmd_train_student_base(config, paths);
    } else if (command == "distill") {
      cmd_distill(config, paths);
    } else if (command == "evaluate") {
      cmd_evaluate(config, paths);
    } else if (command == "sweep-k") {
      cmd_sweep_k(config, paths);
    } else if (command == "lemma-check") {
      cmd_lemma_check(config, paths);
    } else {
      throw std::runtime_error("unknown command '" + command + "'");
    }
    std::filesystem::remove(paths.stale_marker(command));
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error [" << command << "]: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace distillrec
