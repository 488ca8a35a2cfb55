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

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "palml/dataset.h"
#include "palml/evaluate.h"
#include "palml/models.h"
#include "palml/parallel.h"
#include "palml/random.h"

namespace palml {
namespace {

void shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[uniform_index(rng, i)]);
  }
}

std::vector<std::size_t> complement(std::size_t n,
                                    const std::vector<std::size_t>& sorted) {
  std::vector<std::size_t> out;
  out.reserve(n - sorted.size());
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (j < sorted.size() && sorted[j] == i) {
      ++j;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

void check_k(std::size_t n, std::size_t k, std::size_t repeats) {
  if (k < 2) throw Error(ErrorCode::kInvalidConfig, "k must be at least 2");
  if (repeats < 1) throw Error(ErrorCode::kInvalidConfig, "repeats must be at least 1");
  if (k > n) {
    throw Error(ErrorCode::kTooSmall, "k=" + std::to_string(k) + " exceeds " +
                                          std::to_string(n) + " rows");
  }
}

// Groups row indices by label, in ascending label order.
std::map<int, std::vector<std::size_t>> by_class(std::span<const int> labels) {
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
  return groups;
}

}  // namespace

std::string_view to_string(CvStrategy s) {
  return s == CvStrategy::kKFold ? "kfold" : "repeated_stratified_kfold";
}

CvStrategy parse_cv_strategy(std::string_view name) {
  if (name == "kfold") return CvStrategy::kKFold;
  if (name == "repeated_stratified_kfold" || name == "stratified") {
    return CvStrategy::kRepeatedStratifiedKFold;
  }
  throw Error(ErrorCode::kInvalidConfig,
              "unknown cv strategy '" + std::string(name) + "'");
}

Split train_test_split(std::size_t n, double test_fraction,
                       std::span<const int> stratify_labels,
                       std::uint64_t seed) {
  if (n < 5) {
    throw Error(ErrorCode::kTooSmall,
                "need at least 5 rows to split, got " + std::to_string(n));
  }
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "test fraction must be in (0, 1)");
  }
  if (!stratify_labels.empty() && stratify_labels.size() != n) {
    throw Error(ErrorCode::kLengthMismatch, "stratify labels do not match rows");
  }
  const auto n_test = static_cast<std::size_t>(
      std::llround(test_fraction * static_cast<double>(n)));
  Rng rng = make_rng(seed);
  Split split;
  if (stratify_labels.empty()) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    shuffle(idx, rng);
    split.test.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
  } else {
    auto groups = by_class(stratify_labels);
    // Largest-remainder apportionment of the test quota.
    std::vector<std::size_t> quota;
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    std::size_t g = 0;
    for (const auto& [label, rows] : groups) {
      const double exact = test_fraction * static_cast<double>(rows.size());
      quota.push_back(static_cast<std::size_t>(std::floor(exact)));
      assigned += quota.back();
      remainders.emplace_back(exact - std::floor(exact), g++);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < n_test && i < remainders.size(); ++i, ++assigned) {
      ++quota[remainders[i].second];
    }
    g = 0;
    for (auto& [label, rows] : groups) {
      shuffle(rows, rng);
      split.test.insert(split.test.end(), rows.begin(),
                        rows.begin() + static_cast<std::ptrdiff_t>(quota[g++]));
    }
  }
  std::sort(split.test.begin(), split.test.end());
  split.train = complement(n, split.test);
  return split;
}

FoldPlan make_kfold_plan(std::size_t n, std::size_t k, std::size_t repeats,
                         std::uint64_t seed) {
  check_k(n, k, repeats);
  FoldPlan plan{CvStrategy::kKFold, k, repeats, seed, {}};
  for (std::size_t r = 0; r < repeats; ++r) {
    Rng rng = make_rng(seed, {r});
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    shuffle(idx, rng);
    std::size_t start = 0;
    for (std::size_t f = 0; f < k; ++f) {
      const std::size_t size = n / k + (f < n % k ? 1 : 0);
      Fold fold{r, f, {}, {idx.begin() + static_cast<std::ptrdiff_t>(start),
                           idx.begin() + static_cast<std::ptrdiff_t>(start + size)}};
      std::sort(fold.validation.begin(), fold.validation.end());
      fold.train = complement(n, fold.validation);
      plan.folds.push_back(std::move(fold));
      start += size;
    }
  }
  return plan;
}

FoldPlan make_stratified_plan(std::span<const int> labels, std::size_t k,
                              std::size_t repeats, std::uint64_t seed) {
  const std::size_t n = labels.size();
  check_k(n, k, repeats);
  auto groups = by_class(labels);
  for (const auto& [label, rows] : groups) {
    if (rows.size() < k) {
      throw Error(ErrorCode::kClassTooSmall,
                  "class " + std::to_string(label) + " has " +
                      std::to_string(rows.size()) + " rows, fewer than k=" +
                      std::to_string(k));
    }
  }
  FoldPlan plan{CvStrategy::kRepeatedStratifiedKFold, k, repeats, seed, {}};
  for (std::size_t r = 0; r < repeats; ++r) {
    Rng rng = make_rng(seed, {r});
    std::vector<std::vector<std::size_t>> validation(k);
    std::size_t pos = 0;
    for (auto& [label, rows] : groups) {
      std::vector<std::size_t> order = rows;
      shuffle(order, rng);
      for (std::size_t i : order) validation[pos++ % k].push_back(i);
    }
    for (std::size_t f = 0; f < k; ++f) {
      Fold fold{r, f, {}, std::move(validation[f])};
      std::sort(fold.validation.begin(), fold.validation.end());
      fold.train = complement(n, fold.validation);
      plan.folds.push_back(std::move(fold));
    }
  }
  return plan;
}

double CvResult::validation_mean(std::string_view metric) const {
  for (const auto& m : validation) {
    if (m.name == metric) return m.mean;
  }
  throw Error(ErrorCode::kInvalidConfig, "no metric named " + std::string(metric));
}

double CvResult::primary_score() const {
  return validation_mean(task == Task::kClassification ? "accuracy" : "r2");
}

namespace {

// Mean and sample std over the finite values of each metric.
std::vector<MetricSummary> summarize_folds(
    const std::vector<FoldScores>& folds,
    std::vector<std::pair<std::string, double>> FoldScores::*member) {
  std::vector<MetricSummary> out;
  if (folds.empty()) return out;
  const auto& first = folds.front().*member;
  for (std::size_t m = 0; m < first.size(); ++m) {
    std::vector<double> values;
    for (const auto& f : folds) {
      const double v = (f.*member)[m].second;
      if (std::isfinite(v)) values.push_back(v);
    }
    MetricSummary s{first[m].first, std::numeric_limits<double>::quiet_NaN(), 0.0};
    if (!values.empty()) {
      s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
               static_cast<double>(values.size());
      if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::pair<std::string, double>> score(const TrainedModel& model,
                                                  const FeatureMatrix& data) {
  if (model.task() == Task::kClassification) {
    const Matrix proba = model.predict_proba(data.values);
    std::vector<int> pred(proba.rows());
    for (std::size_t r = 0; r < proba.rows(); ++r) {
      const auto row = proba.row(r);
      pred[r] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    }
    return metric_values(
        classification_metrics(pred, data.classes, proba, model.num_classes()));
  }
  return metric_values(regression_metrics(model.predict_values(data.values), data.targets));
}

}  // namespace

CvResult cross_validate(const ModelSpec& spec, const FeatureMatrix& data,
                        const FoldPlan& plan, Diagnostics* diagnostics) {
  for (const auto& f : plan.folds) {
    for (const auto* part : {&f.train, &f.validation}) {
      if (!part->empty() && part->back() >= data.rows()) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "fold plan refers to rows beyond the matrix");
      }
    }
  }
  CvResult result;
  result.task = spec.task;
  result.folds.resize(plan.folds.size());
  parallel_for(plan.folds.size(), [&](std::size_t i) {
    const Fold& fold = plan.folds[i];
    try {
      const auto start = std::chrono::steady_clock::now();
      ModelSpec fold_spec = spec;
      fold_spec.seed = derive_seed(spec.seed, {fold.repeat, fold.index});
      const FeatureMatrix train = data.subset(fold.train);
      const FeatureMatrix validation = data.subset(fold.validation);
      const TrainedModel model = train_model(fold_spec, train, diagnostics);
      FoldScores& out = result.folds[i];
      out.repeat = fold.repeat;
      out.fold = fold.index;
      out.train = score(model, train);
      out.validation = score(model, validation);
      out.elapsed_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    } catch (const Error& e) {
      std::string what = e.what();
      const std::string prefix = std::string(to_string(e.code())) + ": ";
      if (what.rfind(prefix, 0) == 0) what.erase(0, prefix.size());
      throw Error(e.code(), "fold " + std::to_string(fold.repeat) + "." +
                                std::to_string(fold.index) + ": " + what);
    }
  });
  result.train = summarize_folds(result.folds, &FoldScores::train);
  result.validation = summarize_folds(result.folds, &FoldScores::validation);
  for (const auto& f : result.folds) result.elapsed_seconds += f.elapsed_seconds;
  return result;
}

nlohmann::json to_json(const CvResult& r) {
  auto summary = [](const std::vector<MetricSummary>& ms) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& m : ms) {
      j[m.name] = {{"mean", std::isfinite(m.mean) ? nlohmann::json(m.mean) : nlohmann::json(nullptr)},
                   {"std", m.std}};
    }
    return j;
  };
  auto folds = nlohmann::json::array();
  for (const auto& f : r.folds) {
    nlohmann::json train = nlohmann::json::object();
    nlohmann::json val = nlohmann::json::object();
    for (const auto& [k, v] : f.train) train[k] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
    for (const auto& [k, v] : f.validation) val[k] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
    folds.push_back({{"repeat", f.repeat}, {"fold", f.fold}, {"train", train}, {"validation", val}});
  }
  return {{"task", std::string(to_string(r.task))},
          {"num_folds", r.folds.size()},
          {"train", summary(r.train)},
          {"validation", summary(r.validation)},
          {"folds", std::move(folds)}};
}

}  // namespace palml
