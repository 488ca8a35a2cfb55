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

// Splitting, cross-validation and scoring.

#ifndef PALML_EVALUATE_H_
#define PALML_EVALUATE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "palml/errors.h"
#include "palml/matrix.h"
#include "palml/model_spec.h"
#include "palml/preprocess.h"

namespace palml {

// ---------------------------------------------------------------------------
// Splits

struct Split {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

// |test| = round(test_fraction * n). With labels the test quota is shared
// among classes by largest remainder (ties to the lower class), so each
// class keeps its proportion within one row. Throws TooSmall for n < 5.
Split train_test_split(std::size_t n, double test_fraction,
                       std::span<const int> stratify_labels,
                       std::uint64_t seed);

enum class CvStrategy { kKFold, kRepeatedStratifiedKFold };

std::string_view to_string(CvStrategy s);
CvStrategy parse_cv_strategy(std::string_view name);

struct Fold {
  std::size_t repeat = 0;
  std::size_t index = 0;
  std::vector<std::size_t> train;       // ascending
  std::vector<std::size_t> validation;  // ascending
};

struct FoldPlan {
  CvStrategy strategy = CvStrategy::kKFold;
  std::size_t k = 10;
  std::size_t repeats = 1;
  std::uint64_t seed = 0;
  std::vector<Fold> folds;  // repeat-major
};

// Shuffled contiguous chunks; the first n % k folds get one extra row.
FoldPlan make_kfold_plan(std::size_t n, std::size_t k, std::size_t repeats,
                         std::uint64_t seed);

// Each class is shuffled, classes are concatenated in label order and
// position i goes to fold i mod k. Throws ClassTooSmall when a present class
// has fewer than k rows.
FoldPlan make_stratified_plan(std::span<const int> labels, std::size_t k,
                              std::size_t repeats, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Metrics

class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int num_classes = 0)
      : num_classes_(num_classes),
        counts_(static_cast<std::size_t>(num_classes * num_classes), 0) {}

  int num_classes() const { return num_classes_; }
  // Rows are actual classes, columns predicted classes.
  std::size_t at(int actual, int predicted) const {
    return counts_[static_cast<std::size_t>(actual * num_classes_ + predicted)];
  }
  void add(int actual, int predicted) {
    ++counts_[static_cast<std::size_t>(actual * num_classes_ + predicted)];
  }
  std::size_t total() const;
  std::size_t trace() const;

 private:
  int num_classes_;
  std::vector<std::size_t> counts_;
};

struct ClassStats {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  bool present = false;  // appears in actual or predicted labels
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  double jaccard = 0.0;
};

struct RocPoint {
  double threshold;
  double fpr;
  double tpr;
};

struct RocCurve {
  int cls = 0;
  bool defined = false;  // needs both positives and negatives
  std::vector<RocPoint> points;
  double auc = 0.0;
};

struct ClassificationReport {
  double accuracy = 0.0;
  double f1 = 0.0;         // macro
  double recall = 0.0;     // macro
  double precision = 0.0;  // macro
  double jaccard = 0.0;    // macro
  double auc = 0.0;        // macro one-vs-rest; NaN when no class is defined
  double kappa = 0.0;
  double mcc = 0.0;
  double elapsed_seconds = 0.0;
  ConfusionMatrix confusion;
  std::vector<ClassStats> per_class;
  std::vector<RocCurve> roc;
};

// proba has one row per sample and num_classes columns whose rows sum to 1
// (BadProba otherwise). Rates with a zero denominator count as 0; kappa and
// MCC with a zero denominator are 1 for all-correct predictions, else 0.
ClassificationReport classification_metrics(std::span<const int> predicted,
                                            std::span<const int> actual,
                                            const Matrix& proba,
                                            int num_classes);

// One-vs-rest ROC of scores for `cls`, sweeping every distinct score.
RocCurve roc_curve(std::span<const int> actual, std::span<const double> scores,
                   int cls);

// Macro one-vs-rest AUC over classes with both positives and negatives.
// Scores need not be probabilities.
double roc_auc_ovr(std::span<const int> actual, const Matrix& scores);

struct RegressionReport {
  double r2 = 0.0;
  double mae = 0.0;
  double mse = 0.0;
  double rmse = 0.0;
  double max_error = 0.0;
  double elapsed_seconds = 0.0;
};

// Throws LengthMismatch, TooSmall (< 2 rows) and ZeroVariance (constant
// actual values).
RegressionReport regression_metrics(std::span<const double> predicted,
                                    std::span<const double> actual);

// Ordered (name, value) pairs used for aggregation and serialization.
std::vector<std::pair<std::string, double>> metric_values(
    const ClassificationReport& r);
std::vector<std::pair<std::string, double>> metric_values(
    const RegressionReport& r);

nlohmann::json to_json(const ClassificationReport& r);
nlohmann::json to_json(const RegressionReport& r);

// ---------------------------------------------------------------------------
// Cross-validation

struct MetricSummary {
  std::string name;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation over folds
};

struct FoldScores {
  std::size_t repeat = 0;
  std::size_t fold = 0;
  std::vector<std::pair<std::string, double>> train;
  std::vector<std::pair<std::string, double>> validation;
  double elapsed_seconds = 0.0;  // fit + predict
};

struct CvResult {
  Task task = Task::kClassification;
  std::vector<FoldScores> folds;
  std::vector<MetricSummary> train;
  std::vector<MetricSummary> validation;
  double elapsed_seconds = 0.0;  // summed over folds

  // Mean validation accuracy (classification) or R^2 (regression).
  double primary_score() const;
  double validation_mean(std::string_view metric) const;
};

// Trains one model per fold with seed derive_seed(spec.seed, {repeat, fold}).
// Folds run in parallel; results do not depend on the thread count. Training
// errors are rethrown with the fold id prepended.
CvResult cross_validate(const ModelSpec& spec, const FeatureMatrix& data,
                        const FoldPlan& plan,
                        Diagnostics* diagnostics = nullptr);

nlohmann::json to_json(const CvResult& r);

// ---------------------------------------------------------------------------
// One-way ANOVA

inline constexpr double kSignificanceLevel = 0.001;

struct AnovaResult {
  double f = 0.0;
  double p = 1.0;
  double df_between = 0.0;
  double df_within = 0.0;
  bool significant() const { return p < kSignificanceLevel; }
};

// Needs >= 2 groups of >= 2 values (TooSmall otherwise). Throws
// DegenerateGroups when every group has zero variance.
AnovaResult anova_one_way(const std::vector<std::vector<double>>& groups);

// Regularized incomplete beta I_x(a, b).
double regularized_incomplete_beta(double a, double b, double x);

// Survival function of the F distribution.
double f_distribution_sf(double f, double d1, double d2);

}  // namespace palml

#endif  // PALML_EVALUATE_H_
