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

// End-to-end commands behind the palml CLI.
//
// run: load -> label -> split -> fit preprocessing on train -> resample train
//      -> (tune) -> cross-validate -> fit -> test evaluation -> write files.
//      With fit_on_all: fit preprocessing on all rows -> resample -> split.
// Every random draw is derived from RunConfig::seed.

#ifndef PALML_PIPELINE_H_
#define PALML_PIPELINE_H_

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "palml/config.h"
#include "palml/dataset.h"
#include "palml/models.h"
#include "palml/preprocess.h"
#include "palml/synth.h"

namespace palml {

inline constexpr const char* kArtifactFormat = "palml-model";
inline constexpr int kArtifactVersion = 1;

// Everything `predict` needs: fitted preprocessing plus the model.
struct ModelArtifact {
  Preprocessor preprocessor;
  TrainedModel model;
};

nlohmann::json to_json(const ModelArtifact& a);
// Throws SchemaMismatch for malformed artifacts and VersionMismatch for
// other format versions.
ModelArtifact artifact_from_json(const nlohmann::json& j);

// Prediction CSV: `row,predicted_class,label,p_none,p_weak,p_strong,
// p_complete` for classifiers, `row,predicted_mi` for regressors. Unknown
// nominal tokens encode as all-zero one-hot blocks and produce a warning.
void write_predictions(std::ostream& out, const ModelArtifact& artifact,
                       std::span<const RawRecord> records,
                       Diagnostics* diagnostics = nullptr);

std::vector<RawRecord> read_dataset_file(const std::string& path);

// synth: writes a surrogate dataset CSV.
void cmd_synth(const SynthConfig& config, const std::string& out_path);

// summarize: summary.json and correlation.csv (9 x 9) in config.out.
void cmd_summarize(const RunConfig& config);

// run: metrics.json, confusion.csv (classification), roc.csv
// (classification), pred_vs_actual.csv, importance.csv, model.json,
// fitted_predictions.csv, timing.json and, when tuning, history.csv.
void cmd_run(const RunConfig& config, std::ostream& log);

// tune: search only; writes tune.json and history.csv.
void cmd_tune(const RunConfig& config, std::ostream& log);

// predict: one output row per input row. Warnings go to `diagnostics`.
void cmd_predict(const std::string& artifact_path, const std::string& input_path,
                 const std::string& out_path, std::ostream& diagnostics);

}  // namespace palml

#endif  // PALML_PIPELINE_H_
