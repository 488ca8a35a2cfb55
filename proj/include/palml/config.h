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

// Run configuration: a flat `key = value` file (a TOML subset).
//
//   # comment
//   input = "data.csv"
//   task = classification
//   [cv]
//   k = 10            # same as cv.k = 10
//
// Values may be bare or double-quoted. A `[section]` header prefixes the
// keys that follow it. Unknown keys are rejected. See README for the key
// reference.

#ifndef PALML_CONFIG_H_
#define PALML_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "palml/evaluate.h"
#include "palml/model_spec.h"
#include "palml/preprocess.h"
#include "palml/resample.h"
#include "palml/tune.h"

namespace palml {

enum class Resampler { kAuto, kNone, kSmote, kSmogn };

enum class Preset { kNone, kTuned };

struct RunConfig {
  std::string input;
  std::string out = "palml_out";
  Task task = Task::kClassification;
  std::optional<NormMethod> normalizer;  // default: zscore / robust by task
  std::uint64_t seed = 0;
  double test_fraction = 0.2;
  // Resample-first order: fit preprocessing on every row and resample the whole set,
  // then split. Default is split first, fit and resample on train only.
  bool fit_on_all = false;

  Resampler resample = Resampler::kAuto;  // smote / smogn by task
  SmoteConfig smote;
  SmognConfig smogn;

  std::optional<CvStrategy> cv_strategy;  // stratified / kfold by task
  std::size_t cv_k = 10;
  std::optional<std::size_t> cv_repeats;  // 3 / 1 by task

  Algorithm model = Algorithm::kRandomForest;
  Preset preset = Preset::kNone;
  std::map<std::string, double> model_params;

  bool tune = false;
  GaConfig ga;
  std::vector<Gene> search;  // empty: default space

  NormMethod effective_normalizer() const;
  Resampler effective_resampler() const;
  CvStrategy effective_cv_strategy() const;
  std::size_t effective_cv_repeats() const;
  ModelSpec model_spec() const;  // preset, then explicit params
  SearchSpace search_space() const;
};

// Raw key/value pairs in file order; throws InvalidConfig on syntax errors.
std::vector<std::pair<std::string, std::string>> read_config_pairs(
    std::istream& in);

// Applies one key. Throws InvalidConfig for unknown keys and bad values.
void apply_config_value(RunConfig& config, const std::string& key,
                        const std::string& value);

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

// Cross-field checks run before any compute.
void validate(const RunConfig& config);

}  // namespace palml

#endif  // PALML_CONFIG_H_
