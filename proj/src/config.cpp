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

#include "distillrec/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace distillrec {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& expected) {
  throw std::runtime_error("config key '" + key + "': cannot parse '" + value +
                           "' as " + expected);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size() || !std::isfinite(v)) {
      bad_value(key, value, "a real number");
    }
    return v;
  } catch (const std::logic_error&) {
    bad_value(key, value, "a real number");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    if (!value.empty() && value[0] == '-') bad_value(key, value, "an integer");
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) bad_value(key, value, "an integer");
    return v;
  } catch (const std::logic_error&) {
    bad_value(key, value, "an integer");
  }
}

std::uint32_t parse_u32(const std::string& key, const std::string& value) {
  const std::uint64_t v = parse_u64(key, value);
  if (v > 0xffffffffULL) bad_value(key, value, "a 32-bit integer");
  return static_cast<std::uint32_t>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value, "a boolean (true|false)");
}

std::string parse_delimiter(const std::string& key, const std::string& value) {
  if (value == "tab") return "\t";
  if (value == "comma") return ",";
  if (value == "space") return " ";
  if (value == "double_colon") return "::";
  if (value.empty()) bad_value(key, value, "a delimiter");
  return value;
}

std::string delimiter_name(const std::string& delimiter) {
  if (delimiter == "\t") return "tab";
  if (delimiter == ",") return "comma";
  if (delimiter == " ") return "space";
  if (delimiter == "::") return "double_colon";
  return delimiter;
}

ModelKind parse_backbone(const std::string& key, const std::string& value) {
  if (value == "mf") return ModelKind::kMf;
  if (value == "lightgcn") return ModelKind::kLightGcn;
  bad_value(key, value, "a backbone (mf|lightgcn)");
}

std::vector<std::uint32_t> parse_u32_list(const std::string& key,
                                          const std::string& value) {
  std::vector<std::uint32_t> out;
  std::stringstream ss(value);
  std::string part;
  while (std::getline(ss, part, ',')) {
    part = trim(part);
    if (part.empty()) bad_value(key, value, "a comma-separated integer list");
    out.push_back(parse_u32(key, part));
  }
  if (out.empty()) bad_value(key, value, "a comma-separated integer list");
  return out;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig config;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": expected key=value, got '" + stripped + "'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": empty key");
    }
    if (!seen.insert(key).second) {
      throw std::runtime_error("config key '" + key + "' appears twice");
    }

    if (key == "data.path") {
      config.data_path = value;
    } else if (key == "data.delimiter") {
      config.data_delimiter = parse_delimiter(key, value);
    } else if (key == "data.rating_threshold") {
      config.data_rating_threshold = parse_double(key, value);
    } else if (key == "data.min_interactions") {
      config.data_min_interactions = parse_u32(key, value);
    } else if (key == "data.test_frac") {
      config.test_frac = parse_double(key, value);
    } else if (key == "data.valid_frac") {
      config.valid_frac = parse_double(key, value);
    } else if (key == "backbone") {
      config.backbone = parse_backbone(key, value);
    } else if (key == "lightgcn.layers") {
      config.lightgcn_layers = parse_u32(key, value);
    } else if (key == "teacher.dim") {
      config.teacher_dim = parse_u32(key, value);
    } else if (key == "student.dim") {
      config.student_dim = parse_u32(key, value);
    } else if (key == "init_scale") {
      config.init_scale = parse_double(key, value);
    } else if (key == "train.lr") {
      config.learning_rate = parse_double(key, value);
    } else if (key == "train.l2") {
      config.l2_coeff = parse_double(key, value);
    } else if (key == "train.batch_size") {
      config.batch_size = parse_u32(key, value);
    } else if (key == "train.max_epochs") {
      config.max_epochs = parse_u32(key, value);
    } else if (key == "train.patience") {
      config.patience = parse_u32(key, value);
    } else if (key == "distill.method") {
      config.method = parse_distill_method(value);
    } else if (key == "distill.k") {
      config.k = parse_u32(key, value);
    } else if (key == "distill.lambda") {
      config.lambda = parse_double(key, value);
    } else if (key == "distill.mu") {
      config.mu = parse_double(key, value);
    } else if (key == "distill.soft_labels") {
      config.soft_labels = parse_u32(key, value);
    } else if (key == "distill.pairs_per_group") {
      config.pairs_per_group = parse_u32(key, value);
    } else if (key == "distill.resample") {
      config.resample = parse_bool(key, value);
    } else if (key == "distill.rd_topn") {
      config.rd_topn = parse_u32(key, value);
    } else if (key == "eval.n") {
      config.eval_n = parse_u32(key, value);
    } else if (key == "sweep.ks") {
      config.sweep_ks = parse_u32_list(key, value);
    } else if (key == "causal.users") {
      config.causal_users = parse_u32(key, value);
    } else if (key == "causal.items") {
      config.causal_items = parse_u32(key, value);
    } else if (key == "causal.gamma") {
      config.causal_gamma = parse_double(key, value);
    } else if (key == "causal.alpha") {
      config.causal_alpha = parse_double(key, value);
    } else if (key == "causal.z_max") {
      config.causal_z_max = parse_u32(key, value);
    } else if (key == "seed") {
      config.seed = parse_u64(key, value);
    } else if (key == "allow_any_hyperparameters") {
      config.allow_any_hyperparameters = parse_bool(key, value);
    } else {
      throw std::runtime_error("unknown config key '" + key + "'");
    }
  }
  validate_grids(config);
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  ExperimentConfig config = parse_config_text(buffer.str());
  if (!config.data_path.empty() &&
      !std::filesystem::exists(config.data_path)) {
    throw std::runtime_error("data.path does not exist: " + config.data_path);
  }
  return config;
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "data.path=" << c.data_path << '\n';
  out << "data.delimiter=" << delimiter_name(c.data_delimiter) << '\n';
  out << "data.rating_threshold=" << format_double(c.data_rating_threshold)
      << '\n';
  out << "data.min_interactions=" << c.data_min_interactions << '\n';
  out << "data.test_frac=" << format_double(c.test_frac) << '\n';
  out << "data.valid_frac=" << format_double(c.valid_frac) << '\n';
  out << "backbone=" << to_string(c.backbone) << '\n';
  out << "lightgcn.layers=" << c.lightgcn_layers << '\n';
  out << "teacher.dim=" << c.teacher_dim << '\n';
  out << "student.dim=" << c.student_dim << '\n';
  out << "init_scale=" << format_double(c.init_scale) << '\n';
  out << "train.lr=" << format_double(c.learning_rate) << '\n';
  out << "train.l2=" << format_double(c.l2_coeff) << '\n';
  out << "train.batch_size=" << c.batch_size << '\n';
  out << "train.max_epochs=" << c.max_epochs << '\n';
  out << "train.patience=" << c.patience << '\n';
  out << "distill.method=" << to_string(c.method) << '\n';
  out << "distill.k=" << c.k << '\n';
  out << "distill.lambda=" << format_double(c.lambda) << '\n';
  out << "distill.mu=" << format_double(c.mu) << '\n';
  out << "distill.soft_labels=" << c.soft_labels << '\n';
  out << "distill.pairs_per_group=" << c.pairs_per_group << '\n';
  out << "distill.resample=" << (c.resample ? "true" : "false") << '\n';
  out << "distill.rd_topn=" << c.rd_topn << '\n';
  out << "eval.n=" << c.eval_n << '\n';
  out << "sweep.ks=";
  for (std::size_t i = 0; i < c.sweep_ks.size(); ++i) {
    if (i > 0) out << ',';
    out << c.sweep_ks[i];
  }
  out << '\n';
  out << "causal.users=" << c.causal_users << '\n';
  out << "causal.items=" << c.causal_items << '\n';
  out << "causal.gamma=" << format_double(c.causal_gamma) << '\n';
  out << "causal.alpha=" << format_double(c.causal_alpha) << '\n';
  out << "causal.z_max=" << c.causal_z_max << '\n';
  out << "seed=" << c.seed << '\n';
  out << "allow_any_hyperparameters="
      << (c.allow_any_hyperparameters ? "true" : "false") << '\n';
  return out.str();
}

void validate_grids(const ExperimentConfig& c) {
  if (c.allow_any_hyperparameters) return;
  const auto fail = [](const std::string& what) {
    throw std::runtime_error(
        what + " (set allow_any_hyperparameters=true to override)");
  };
  if (c.k < 1 || c.k > 10) {
    fail("distill.k must lie in [1,10]");
  }
  if (c.lambda < 0.0 || c.lambda > 1.0) {
    fail("distill.lambda must lie in [0,1]");
  }
  if (c.mu != 10.0 && c.mu != 20.0) {
    fail("distill.mu must be 10 or 20");
  }
  if (c.soft_labels != 30 && c.soft_labels != 40) {
    fail("distill.soft_labels must be 30 or 40");
  }
  for (std::uint32_t k : c.sweep_ks) {
    if (k < 1 || k > 10) fail("sweep.ks entries must lie in [1,10]");
  }
}

}  // namespace distillrec
