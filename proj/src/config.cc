/*
 * Copyright 2026 The palml Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "palml/config.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include "palml/csv.h"

namespace palml {
namespace {

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw Error(ErrorCode::kInvalidConfig, key + ": " + why);
}

double as_number(const std::string& key, const std::string& v) {
  const auto n = csv::parse_number(v);
  if (!n) bad(key, "expected a number, got '" + v + "'");
  return *n;
}

std::size_t as_count(const std::string& key, const std::string& v) {
  const double n = as_number(key, v);
  if (n < 0 || std::floor(n) != n) bad(key, "expected a non-negative integer, got '" + v + "'");
  return static_cast<std::size_t>(n);
}

std::uint64_t as_seed(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) bad(key, "expected an unsigned integer, got '" + v + "'");
  return out;
}

bool as_bool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  bad(key, "expected true or false, got '" + v + "'");
}

// Strips a trailing comment that is not inside quotes.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

}  // namespace

NormMethod RunConfig::effective_normalizer() const {
  if (normalizer) return *normalizer;
  return task == Task::kClassification ? NormMethod::kZScore : NormMethod::kRobust;
}

Resampler RunConfig::effective_resampler() const {
  if (resample != Resampler::kAuto) return resample;
  return task == Task::kClassification ? Resampler::kSmote : Resampler::kSmogn;
}

CvStrategy RunConfig::effective_cv_strategy() const {
  if (cv_strategy) return *cv_strategy;
  return task == Task::kClassification ? CvStrategy::kRepeatedStratifiedKFold
                                       : CvStrategy::kKFold;
}

std::size_t RunConfig::effective_cv_repeats() const {
  if (cv_repeats) return *cv_repeats;
  return task == Task::kClassification ? 3 : 1;
}

ModelSpec RunConfig::model_spec() const {
  ModelSpec spec{task, model, {}, seed};
  if (preset == Preset::kTuned) {
    if (model != Algorithm::kRandomForest) {
      throw Error(ErrorCode::kInvalidConfig, "preset = tuned needs model = rf");
    }
    spec = task == Task::kClassification ? tuned_forest_classifier(seed)
                                         : tuned_forest_regressor(seed);
  }
  for (const auto& [k, v] : model_params) spec.params[k] = v;
  return spec;
}

SearchSpace RunConfig::search_space() const {
  if (search.empty()) return default_search_space(task);
  SearchSpace s;
  s.task = task;
  s.algorithm = model;
  s.genes = search;
  return s;
}

std::vector<std::pair<std::string, std::string>> read_config_pairs(
    std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body(csv::trim(strip_comment(line)));
    if (body.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    if (body.front() == '[') {
      if (body.back() != ']') bad(where, "unterminated section header");
      section = std::string(csv::trim(std::string_view(body).substr(1, body.size() - 2)));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) bad(where, "expected key = value");
    std::string key(csv::trim(std::string_view(body).substr(0, eq)));
    std::string value(csv::trim(std::string_view(body).substr(eq + 1)));
    if (key.empty()) bad(where, "empty key");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    } else if (!value.empty() && (value.front() == '"' || value.back() == '"')) {
      bad(where, "unbalanced quotes");
    }
    if (!section.empty()) key = section + "." + key;
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

void apply_config_value(RunConfig& c, const std::string& key,
                        const std::string& v) {
  try {
    if (key == "input") {
      c.input = v;
    } else if (key == "out") {
      c.out = v;
    } else if (key == "task") {
      c.task = parse_task(v);
    } else if (key == "normalizer") {
      c.normalizer = parse_norm_method(v);
    } else if (key == "seed") {
      c.seed = as_seed(key, v);
    } else if (key == "test_fraction") {
      c.test_fraction = as_number(key, v);
    } else if (key == "fit_on_all") {
      c.fit_on_all = as_bool(key, v);
    } else if (key == "resample") {
      if (v == "auto") c.resample = Resampler::kAuto;
      else if (v == "none") c.resample = Resampler::kNone;
      else if (v == "smote") c.resample = Resampler::kSmote;
      else if (v == "smogn") c.resample = Resampler::kSmogn;
      else bad(key, "expected auto, none, smote or smogn");
    } else if (key == "smote.k") {
      c.smote.k_neighbors = as_count(key, v);
    } else if (key == "smogn.k") {
      c.smogn.k_neighbors = as_count(key, v);
    } else if (key == "smogn.threshold") {
      c.smogn.relevance_threshold = as_number(key, v);
    } else if (key == "smogn.noise") {
      c.smogn.noise_fraction = as_number(key, v);
    } else if (key == "smogn.safe_quantile") {
      c.smogn.safe_distance_quantile = as_number(key, v);
    } else if (key == "smogn.per_rare") {
      c.smogn.synthetic_per_rare = as_count(key, v);
    } else if (key == "cv.strategy") {
      c.cv_strategy = parse_cv_strategy(v);
    } else if (key == "cv.k") {
      c.cv_k = as_count(key, v);
    } else if (key == "cv.repeats") {
      c.cv_repeats = as_count(key, v);
    } else if (key == "model") {
      c.model = parse_algorithm(v);
    } else if (key == "preset") {
      if (v == "none") c.preset = Preset::kNone;
      else if (v == "tuned") c.preset = Preset::kTuned;
      else bad(key, "expected none or tuned");
    } else if (key.rfind("model.", 0) == 0) {
      c.model_params[key.substr(6)] = as_number(key, v);
    } else if (key == "tune") {
      c.tune = as_bool(key, v);
    } else if (key == "ga.full_scale") {
      if (as_bool(key, v)) {
        const GaConfig full = GaConfig::full_scale();
        c.ga.generations = full.generations;
        c.ga.population = full.population;
        c.ga.offspring = full.offspring;
      }
    } else if (key == "ga.generations") {
      c.ga.generations = as_count(key, v);
    } else if (key == "ga.population") {
      c.ga.population = as_count(key, v);
    } else if (key == "ga.offspring") {
      c.ga.offspring = as_count(key, v);
    } else if (key == "ga.tournament") {
      c.ga.tournament = as_count(key, v);
    } else if (key == "ga.crossover") {
      c.ga.crossover = as_number(key, v);
    } else if (key == "ga.mutation") {
      c.ga.mutation = as_number(key, v);
    } else if (key == "ga.cv_k") {
      c.ga.cv_k = as_count(key, v);
    } else if (key.rfind("search.", 0) == 0) {
      const std::string name = key.substr(7);
      for (const Gene& g : c.search) {
        if (g.name == name) bad(key, "declared twice");
      }
      c.search.push_back(parse_gene(name, v));
    } else {
      bad(key, "unknown key");
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidConfig) throw;
    throw Error(ErrorCode::kInvalidConfig, key + ": " + e.what());
  }
}

RunConfig parse_config(std::istream& in) {
  RunConfig c;
  std::set<std::string> seen;
  for (const auto& [k, v] : read_config_pairs(in)) {
    if (!seen.insert(k).second) bad(k, "set twice");
    apply_config_value(c, k, v);
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config file " + path);
  return parse_config(in);
}

void validate(const RunConfig& c) {
  if (c.input.empty()) bad("input", "no input file given");
  if (c.out.empty()) bad("out", "no output directory given");
  if (!(c.test_fraction > 0.0 && c.test_fraction < 1.0)) {
    bad("test_fraction", "must lie in (0, 1)");
  }
  const Resampler r = c.effective_resampler();
  if (r == Resampler::kSmote && c.task != Task::kClassification) {
    bad("resample", "smote needs a classification task");
  }
  if (r == Resampler::kSmogn && c.task != Task::kRegression) {
    bad("resample", "smogn needs a regression task");
  }
  try {
    validate(c.smote);
    validate(c.smogn);
  } catch (const Error& e) {
    bad("resample", e.what());
  }
  if (c.cv_k < 2) bad("cv.k", "must be at least 2");
  if (c.effective_cv_repeats() < 1) bad("cv.repeats", "must be at least 1");
  if (c.effective_cv_strategy() == CvStrategy::kRepeatedStratifiedKFold &&
      c.task != Task::kClassification) {
    bad("cv.strategy", "stratified folds need a classification task");
  }
  try {
    validate(c.model_spec());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidConfig) throw;
    bad("model", e.what());
  }
  if (c.tune) {
    validate(c.ga);
    validate(c.search_space());
  }
}

}  // namespace palml
