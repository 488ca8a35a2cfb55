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

// palml command-line front end.
//
//   palml synth --out data.csv [--rows N] [--seed S] [--noise X]
//   palml summarize --input data.csv --out dir
//   palml run --config run.toml [overrides]
//   palml tune --config run.toml [overrides]
//   palml predict --model dir/model.json --input rows.csv [--out preds.csv]
//
// Flags override config file values. `--set key=value` overrides any
// config key.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "palml/config.h"
#include "palml/errors.h"
#include "palml/pipeline.h"
#include "palml/synth.h"

namespace {

struct RunFlags {
  std::string config;
  std::string input;
  std::string out;
  std::string task;
  std::string normalizer;
  std::string model;
  std::string seed;
  std::string smote_k;
  std::string smogn_threshold;
  std::string smogn_noise;
  bool fit_on_all = false;
  bool tune = false;
  std::vector<std::string> sets;
};

void add_run_flags(CLI::App* cmd, RunFlags& f, bool with_model) {
  cmd->add_option("--config", f.config, "Config file (key = value)");
  cmd->add_option("--input", f.input, "Input dataset CSV");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("--task", f.task, "classification or regression");
  cmd->add_option("--normalizer", f.normalizer, "zscore, minmax, maxabs or robust");
  if (with_model) {
    cmd->add_option("--model", f.model, "Model algorithm id");
    cmd->add_flag("--tune", f.tune, "Tune hyperparameters before fitting");
  }
  cmd->add_option("--smote-k", f.smote_k, "SMOTE neighbour count");
  cmd->add_option("--smogn-threshold", f.smogn_threshold, "SMOGN relevance threshold");
  cmd->add_option("--smogn-noise", f.smogn_noise, "SMOGN noise fraction");
  cmd->add_flag("--fit-on-all", f.fit_on_all,
                "Fit preprocessing and resample on all rows, then split");
  cmd->add_option("--set", f.sets, "Override any config key: key=value");
}

palml::RunConfig build_config(const RunFlags& f) {
  palml::RunConfig c = f.config.empty() ? palml::RunConfig{} : palml::load_config(f.config);
  const auto apply = [&c](const char* key, const std::string& v) {
    if (!v.empty()) palml::apply_config_value(c, key, v);
  };
  apply("task", f.task);
  apply("input", f.input);
  apply("out", f.out);
  apply("seed", f.seed);
  apply("normalizer", f.normalizer);
  apply("model", f.model);
  apply("smote.k", f.smote_k);
  apply("smogn.threshold", f.smogn_threshold);
  apply("smogn.noise", f.smogn_noise);
  if (f.fit_on_all) c.fit_on_all = true;
  if (f.tune) c.tune = true;
  for (const std::string& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw palml::Error(palml::ErrorCode::kInvalidConfig, "--set expects key=value, got '" + s + "'");
    }
    palml::apply_config_value(c, s.substr(0, eq), s.substr(eq + 1));
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"palml: plasma-activated liquid inactivation modelling"};
  app.require_subcommand(1);

  palml::SynthConfig synth;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic surrogate dataset");
  synth_cmd->add_option("--out", synth_out, "Output CSV path")->required();
  synth_cmd->add_option("--rows", synth.rows, "Row count");
  synth_cmd->add_option("--seed", synth.seed, "Seed");
  synth_cmd->add_option("--noise", synth.noise, "Latent noise level");

  RunFlags summarize_flags;
  auto* summarize_cmd = app.add_subcommand("summarize", "Descriptive statistics and correlations");
  add_run_flags(summarize_cmd, summarize_flags, false);

  RunFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "Train, cross-validate and evaluate a model");
  add_run_flags(run_cmd, run_flags, true);

  RunFlags tune_flags;
  auto* tune_cmd = app.add_subcommand("tune", "Genetic hyperparameter search");
  add_run_flags(tune_cmd, tune_flags, true);

  std::string artifact;
  std::string predict_input;
  std::string predict_out;
  auto* predict_cmd = app.add_subcommand("predict", "Predict with a saved model");
  predict_cmd->add_option("--model", artifact, "model.json written by run")->required();
  predict_cmd->add_option("--input", predict_input, "CSV with the predictor columns")->required();
  predict_cmd->add_option("--out", predict_out, "Output CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth_cmd) {
      palml::cmd_synth(synth, synth_out);
    } else if (*summarize_cmd) {
      palml::cmd_summarize(build_config(summarize_flags));
    } else if (*run_cmd) {
      palml::cmd_run(build_config(run_flags), std::cerr);
    } else if (*tune_cmd) {
      palml::cmd_tune(build_config(tune_flags), std::cerr);
    } else if (*predict_cmd) {
      palml::cmd_predict(artifact, predict_input, predict_out, std::cerr);
    }
  } catch (const palml::Error& e) {
    std::cerr << "palml: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "palml: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
