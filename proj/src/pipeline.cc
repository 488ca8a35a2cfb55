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

#include "palml/pipeline.h"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "palml/csv.h"
#include "palml/evaluate.h"
#include "palml/random.h"
#include "palml/resample.h"
#include "palml/tune.h"

namespace palml {
namespace {

using Clock = std::chrono::steady_clock;

// Stream ids under RunConfig::seed.
enum StreamId : std::uint64_t { kSplitStream = 1, kResampleStream = 2, kFoldStream = 3 };

std::string strip_code(const Error& e) {
  std::string what = e.what();
  const std::string prefix = std::string(to_string(e.code())) + ": ";
  if (what.rfind(prefix, 0) == 0) what.erase(0, prefix.size());
  return what;
}

// Runs one pipeline stage, tagging errors with the stage name and recording
// the elapsed time.
template <typename F>
auto stage(const char* name, nlohmann::json& timing, F&& fn) -> decltype(fn()) {
  const auto start = Clock::now();
  struct Record {
    const char* name;
    nlohmann::json& timing;
    Clock::time_point start;
    ~Record() {
      timing[name] = std::chrono::duration<double>(Clock::now() - start).count();
    }
  } record{name, timing, start};
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), std::string("stage ") + name + ": " + strip_code(e));
  }
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

std::string num(double v) { return csv::format_number(v); }

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

std::string class_name(int c) {
  return std::string(to_string(static_cast<MiClass>(c)));
}

std::string lower(std::string s) {
  for (char& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

nlohmann::json counts_json(std::span<const int> labels) {
  const auto counts = class_counts(labels);
  nlohmann::json j = nlohmann::json::object();
  for (int c = 0; c < kNumMiClasses; ++c) j[lower(class_name(c))] = counts[static_cast<std::size_t>(c)];
  return j;
}

std::vector<RawRecord> pick(std::span<const RawRecord> records,
                            std::span<const std::size_t> rows) {
  std::vector<RawRecord> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(records[r]);
  return out;
}

std::vector<std::string> sorted_warnings(const Diagnostics& diag) {
  const auto w = diag.warnings();
  const std::set<std::string> unique(w.begin(), w.end());
  return {unique.begin(), unique.end()};
}

// State shared by run and tune up to the resampled training matrix.
struct Prepared {
  std::vector<RawRecord> records;
  Split split;
  Preprocessor preprocessor;
  FeatureMatrix train;
  FeatureMatrix test;
  std::size_t train_rows_before_resample = 0;
  std::vector<int> train_labels_before_resample;
  nlohmann::json resample_info = nlohmann::json::object();
};

Prepared prepare(const RunConfig& config, nlohmann::json& timing,
                 Diagnostics& diag) {
  Prepared p;
  const bool clf = config.task == Task::kClassification;
  p.records = stage("load", timing, [&] { return read_dataset_file(config.input); });
  const std::vector<int> labels =
      stage("label", timing, [&] { return label_records(p.records); });
  const TargetKind kind = clf ? TargetKind::kOrdinalClass : TargetKind::kNumeric;
  const auto resample = [&](FeatureMatrix& m) {
    const Resampler r = config.effective_resampler();
    const std::uint64_t seed = derive_seed(config.seed, {kResampleStream});
    if (r == Resampler::kSmote) {
      SmoteConfig cfg = config.smote;
      cfg.seed = seed;
      SmoteResult res = smote_balance(m.values, m.classes, cfg, &diag);
      p.resample_info = {{"method", "smote"},
                         {"k", cfg.k_neighbors},
                         {"synthetic_rows", res.origins.size()}};
      m.values = std::move(res.x);
      m.classes = std::move(res.y);
    } else if (r == Resampler::kSmogn) {
      SmognConfig cfg = config.smogn;
      cfg.seed = seed;
      SmognResult res = smogn_resample(m.values, m.targets, cfg, &diag);
      p.resample_info = {{"method", "smogn"},
                         {"k", cfg.k_neighbors},
                         {"relevance_threshold", cfg.relevance_threshold},
                         {"rare_rows", res.num_rare},
                         {"synthetic_rows", res.origins.size()}};
      m.values = std::move(res.x);
      m.targets = std::move(res.y);
    } else {
      p.resample_info = {{"method", "none"}};
    }
  };
  const auto split = [&](std::size_t n, std::span<const int> strata) {
    return train_test_split(n, config.test_fraction,
                            clf ? strata : std::span<const int>(),
                            derive_seed(config.seed, {kSplitStream}));
  };

  if (config.fit_on_all) {
    // Resample-first order: encode and resample every row, then split the result.
    // Split indices then refer to rows of the resampled matrix, whose first
    // rows are the originals.
    FeatureMatrix all;
    stage("preprocess", timing, [&] {
      p.preprocessor = fit_preprocessor(p.records, config.effective_normalizer());
      all = assemble_matrix(p.records, p.preprocessor, kind, &diag);
    });
    p.train_rows_before_resample = all.rows();
    p.train_labels_before_resample = labels;
    stage("resample", timing, [&] { resample(all); });
    p.split = stage("split", timing, [&] { return split(all.rows(), all.classes); });
    p.train = all.subset(p.split.train);
    p.test = all.subset(p.split.test);
    return p;
  }

  p.split = stage("split", timing, [&] { return split(p.records.size(), labels); });
  stage("preprocess", timing, [&] {
    const auto train_records = pick(p.records, p.split.train);
    const auto test_records = pick(p.records, p.split.test);
    p.preprocessor = fit_preprocessor(train_records, config.effective_normalizer());
    p.train = assemble_matrix(train_records, p.preprocessor, kind, &diag);
    p.test = assemble_matrix(test_records, p.preprocessor, kind, &diag);
  });
  p.train_rows_before_resample = p.train.rows();
  p.train_labels_before_resample = label_records(pick(p.records, p.split.train));
  stage("resample", timing, [&] { resample(p.train); });
  return p;
}

GaConfig ga_config(const RunConfig& config) {
  GaConfig ga = config.ga;
  ga.seed = config.seed;
  return ga;
}

void write_history(const std::filesystem::path& path, const TuneResult& result) {
  auto out = open_output(path);
  out << "generation,best,mean,std,evaluations\n";
  for (const auto& h : result.history) {
    out << h.generation << ',' << num(h.best) << ',' << num(h.mean) << ','
        << num(h.std) << ',' << h.evaluations << '\n';
  }
}

nlohmann::json tune_json(const TuneResult& result) {
  return {{"best_fitness", number_or_null(result.best_fitness)},
          {"evaluations", result.evaluations},
          {"generations", result.history.empty() ? 0 : result.history.size() - 1},
          {"best_spec", to_json(result.best_spec)}};
}

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

nlohmann::json to_json(const ModelArtifact& a) {
  return {{"format", kArtifactFormat},
          {"version", kArtifactVersion},
          {"preprocessor", to_json(a.preprocessor)},
          {"model", a.model.to_json()}};
}

ModelArtifact artifact_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("format") || j["format"] != kArtifactFormat) {
    throw Error(ErrorCode::kSchemaMismatch, "not a palml model artifact");
  }
  if (!j.contains("version") || !j["version"].is_number_integer()) {
    throw Error(ErrorCode::kSchemaMismatch, "artifact has no version");
  }
  const int version = j["version"].get<int>();
  if (version != kArtifactVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                "artifact version " + std::to_string(version) + ", expected " +
                    std::to_string(kArtifactVersion));
  }
  try {
    Preprocessor pre = preprocessor_from_json(j.at("preprocessor"));
    TrainedModel model = TrainedModel::from_json(j.at("model"));
    if (model.num_features() != pre.num_columns()) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "model width does not match the preprocessor layout");
    }
    return {std::move(pre), std::move(model)};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaMismatch, std::string("malformed artifact: ") + e.what());
  }
}

void write_predictions(std::ostream& out, const ModelArtifact& artifact,
                       std::span<const RawRecord> records,
                       Diagnostics* diagnostics) {
  const FeatureMatrix fm =
      assemble_matrix(records, artifact.preprocessor, TargetKind::kNone, diagnostics);
  const TrainedModel& model = artifact.model;
  if (model.task() == Task::kClassification) {
    out << "row,predicted_class,label";
    for (int c = 0; c < model.num_classes(); ++c) out << ",p_" << lower(class_name(c));
    out << '\n';
    for (std::size_t r = 0; r < fm.rows(); ++r) {
      const auto p = model.predict_proba(fm.values.row(r));
      const int cls = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
      out << r + 1 << ',' << cls << ',' << class_name(cls);
      for (double v : p) out << ',' << num(v);
      out << '\n';
    }
  } else {
    out << "row,predicted_mi\n";
    for (std::size_t r = 0; r < fm.rows(); ++r) {
      out << r + 1 << ',' << num(model.predict_value(fm.values.row(r))) << '\n';
    }
  }
}

std::vector<RawRecord> read_dataset_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open input file " + path);
  return parse_dataset(in);
}

void cmd_synth(const SynthConfig& config, const std::string& out_path) {
  const auto records = synthesize(config);
  const std::filesystem::path path(out_path);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto out = open_output(path);
  write_dataset(out, records);
}

void cmd_summarize(const RunConfig& config) {
  if (config.input.empty()) throw Error(ErrorCode::kInvalidConfig, "input: no input file given");
  const auto records = read_dataset_file(config.input);
  const DatasetSummary summary = summarize(records);
  const CorrelationMatrix corr = correlation_matrix(records);
  const std::vector<int> labels = label_records(records);

  const std::filesystem::path dir(config.out);
  std::filesystem::create_directories(dir);
  nlohmann::json fields = nlohmann::json::array();
  for (const auto& f : summary.fields) {
    fields.push_back({{"name", f.name}, {"count", f.count}, {"mean", f.mean},
                      {"std", f.std}, {"min", f.min}, {"max", f.max}});
  }
  write_json(dir / "summary.json",
             {{"rows", records.size()},
              {"std_convention", summary.convention == StdConvention::kPopulation
                                     ? "population" : "sample"},
              {"fields", std::move(fields)},
              {"class_counts", counts_json(labels)}});

  auto out = open_output(dir / "correlation.csv");
  out << "variable";
  for (const auto& n : corr.names) out << ',' << n;
  out << '\n';
  for (std::size_t i = 0; i < corr.size(); ++i) {
    out << corr.names[i];
    for (std::size_t j = 0; j < corr.size(); ++j) {
      const auto v = corr.at(i, j);
      out << ',' << (v ? num(*v) : "NA");
    }
    out << '\n';
  }
}

void cmd_run(const RunConfig& config, std::ostream& log) {
  validate(config);
  nlohmann::json timing = nlohmann::json::object();
  Diagnostics diag;
  const bool clf = config.task == Task::kClassification;
  Prepared p = prepare(config, timing, diag);
  log << "loaded " << p.records.size() << " rows; train " << p.split.train.size()
      << ", test " << p.split.test.size() << ", resampled train " << p.train.rows()
      << '\n';

  ModelSpec spec = config.model_spec();
  std::optional<TuneResult> tuned;
  if (config.tune) {
    tuned = stage("tune", timing, [&] {
      return evolve(config.search_space(), ga_config(config), p.train, &diag);
    });
    spec = tuned->best_spec;
    log << "tuned " << to_string(spec.algorithm) << ": best fitness "
        << num(tuned->best_fitness) << " after " << tuned->evaluations
        << " evaluations\n";
  }

  const FoldPlan plan = stage("folds", timing, [&] {
    const std::uint64_t seed = derive_seed(config.seed, {kFoldStream});
    return config.effective_cv_strategy() == CvStrategy::kRepeatedStratifiedKFold
               ? make_stratified_plan(p.train.classes, config.cv_k,
                                      config.effective_cv_repeats(), seed)
               : make_kfold_plan(p.train.rows(), config.cv_k,
                                 config.effective_cv_repeats(), seed);
  });
  const CvResult cv =
      stage("cross-validate", timing, [&] { return cross_validate(spec, p.train, plan, &diag); });
  log << "cross-validation (" << plan.folds.size() << " folds): "
      << (clf ? "accuracy " : "r2 ") << num(cv.primary_score()) << '\n';

  const TrainedModel model = stage("fit", timing, [&] { return train_model(spec, p.train, &diag); });

  const std::filesystem::path dir(config.out);
  nlohmann::json metrics = {
      {"format", "palml-metrics"},
      {"task", std::string(to_string(config.task))},
      {"seed", config.seed},
      {"normalizer", std::string(to_string(config.effective_normalizer()))},
      {"fit_on_all", config.fit_on_all},
      {"resample", p.resample_info},
      {"rows", {{"input", p.records.size()},
                {"train", p.split.train.size()},
                {"test", p.split.test.size()},
                {"train_resampled", p.train.rows()}}},
      {"model", to_json(spec)},
      {"cv", {{"strategy", std::string(to_string(plan.strategy))},
              {"k", plan.k},
              {"repeats", plan.repeats},
              {"result", to_json(cv)}}},
  };
  if (tuned) metrics["tuning"] = tune_json(*tuned);

  stage("evaluate", timing, [&] {
    std::filesystem::create_directories(dir);
    auto pva = open_output(dir / "pred_vs_actual.csv");
    if (clf) {
      const Matrix proba = model.predict_proba(p.test.values);
      std::vector<int> pred(proba.rows());
      for (std::size_t r = 0; r < proba.rows(); ++r) pred[r] = model.predict_class(p.test.values.row(r));
      const ClassificationReport test = classification_metrics(pred, p.test.classes, proba, kNumMiClasses);
      const Matrix train_proba = model.predict_proba(p.train.values);
      const ClassificationReport train = classification_metrics(
          model.predict_classes(p.train.values), p.train.classes, train_proba, kNumMiClasses);
      metrics["class_counts"] = {{"input", counts_json(label_records(p.records))},
                                 {"train", counts_json(p.train_labels_before_resample)},
                                 {"train_resampled", counts_json(p.train.classes)},
                                 {"test", counts_json(p.test.classes)}};
      metrics["test"] = to_json(test);
      metrics["train"] = to_json(train);

      auto cm = open_output(dir / "confusion.csv");
      cm << "actual";
      for (int c = 0; c < kNumMiClasses; ++c) cm << ',' << lower(class_name(c));
      cm << '\n';
      for (int a = 0; a < kNumMiClasses; ++a) {
        cm << lower(class_name(a));
        for (int q = 0; q < kNumMiClasses; ++q) cm << ',' << test.confusion.at(a, q);
        cm << '\n';
      }
      auto roc = open_output(dir / "roc.csv");
      roc << "class,threshold,fpr,tpr\n";
      for (const RocCurve& curve : test.roc) {
        if (!curve.defined) continue;
        for (const RocPoint& pt : curve.points) {
          roc << lower(class_name(curve.cls)) << ',' << num(pt.threshold) << ','
              << num(pt.fpr) << ',' << num(pt.tpr) << '\n';
        }
      }
      pva << "row,actual,predicted";
      for (int c = 0; c < kNumMiClasses; ++c) pva << ",p_" << lower(class_name(c));
      pva << '\n';
      for (std::size_t r = 0; r < pred.size(); ++r) {
        pva << p.split.test[r] + 1 << ',' << class_name(p.test.classes[r]) << ','
            << class_name(pred[r]);
        for (double v : proba.row(r)) pva << ',' << num(v);
        pva << '\n';
      }
      log << "test accuracy " << num(test.accuracy) << ", macro F1 " << num(test.f1)
          << ", AUC " << num(test.auc) << '\n';
    } else {
      const std::vector<double> pred = model.predict_values(p.test.values);
      const RegressionReport test = regression_metrics(pred, p.test.targets);
      const RegressionReport train =
          regression_metrics(model.predict_values(p.train.values), p.train.targets);
      metrics["test"] = to_json(test);
      metrics["train"] = to_json(train);
      pva << "row,actual,predicted\n";
      for (std::size_t r = 0; r < pred.size(); ++r) {
        pva << p.split.test[r] + 1 << ',' << num(p.test.targets[r]) << ',' << num(pred[r]) << '\n';
      }
      log << "test r2 " << num(test.r2) << ", MAE " << num(test.mae) << ", RMSE "
          << num(test.rmse) << '\n';
    }

    const FeatureImportance fi = feature_importance(model, p.train.columns);
    nlohmann::json imp = {{"defined", fi.defined}};
    auto out = open_output(dir / "importance.csv");
    out << "predictor,importance\n";
    if (fi.defined) {
      nlohmann::json scores = nlohmann::json::object();
      for (std::size_t i = 0; i < kNumPredictors; ++i) {
        const std::string name(predictor_name(static_cast<Predictor>(i)));
        scores[name] = fi.scores[i];
        out << name << ',' << num(fi.scores[i]) << '\n';
      }
      imp["scores"] = std::move(scores);
    } else {
      imp["reason"] = fi.reason;
      for (std::size_t i = 0; i < kNumPredictors; ++i) {
        out << predictor_name(static_cast<Predictor>(i)) << ",NA\n";
      }
    }
    metrics["importance"] = std::move(imp);
  });

  stage("write", timing, [&] {
    const ModelArtifact artifact{p.preprocessor, model};
    write_json(dir / "model.json", to_json(artifact));
    {
      auto out = open_output(dir / "fitted_predictions.csv");
      write_predictions(out, artifact, p.records, nullptr);
    }
    if (tuned) write_history(dir / "history.csv", *tuned);
    metrics["warnings"] = sorted_warnings(diag);
    write_json(dir / "metrics.json", metrics);
  });
  write_json(dir / "timing.json", timing);
  for (const auto& w : sorted_warnings(diag)) log << "warning: " << w << '\n';
}

void cmd_tune(const RunConfig& config, std::ostream& log) {
  validate(config);
  const SearchSpace space = config.search_space();
  validate(space);
  validate(config.ga);
  nlohmann::json timing = nlohmann::json::object();
  Diagnostics diag;
  Prepared p = prepare(config, timing, diag);
  const TuneResult result = stage("tune", timing, [&] {
    return evolve(space, ga_config(config), p.train, &diag);
  });
  const std::filesystem::path dir(config.out);
  std::filesystem::create_directories(dir);
  nlohmann::json j = tune_json(result);
  auto history = nlohmann::json::array();
  for (const auto& h : result.history) {
    history.push_back({{"generation", h.generation},
                       {"best", number_or_null(h.best)},
                       {"mean", number_or_null(h.mean)},
                       {"std", h.std},
                       {"evaluations", h.evaluations}});
  }
  j["history"] = std::move(history);
  write_json(dir / "tune.json", j);
  write_history(dir / "history.csv", result);
  write_json(dir / "timing.json", timing);
  log << "best fitness " << num(result.best_fitness) << " after "
      << result.evaluations << " evaluations\n";
}

void cmd_predict(const std::string& artifact_path, const std::string& input_path,
                 const std::string& out_path, std::ostream& diagnostics) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_all(artifact_path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaMismatch,
                artifact_path + " is not valid JSON: " + e.what());
  }
  const ModelArtifact artifact = artifact_from_json(j);

  const std::string text = read_all(input_path);
  std::ostringstream out;
  if (!csv::trim(text).empty()) {
    std::istringstream in(text);
    std::vector<RawRecord> records;
    try {
      records = parse_predictor_rows(in);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kMissingColumn) throw;
      throw Error(ErrorCode::kSchemaMismatch, strip_code(e));
    }
    Diagnostics diag;
    write_predictions(out, artifact, records, &diag);
    for (const auto& w : diag.warnings()) diagnostics << "warning: " << w << '\n';
  }
  if (out_path.empty() || out_path == "-") {
    std::cout << out.str();
  } else {
    const std::filesystem::path path(out_path);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto file = open_output(path);
    file << out.str();
  }
}

}  // namespace palml
