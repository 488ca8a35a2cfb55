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

// Uniform train/predict interface over the classifier and regressor zoo.
//
// Classifiers:  dt rf extra_trees bagging adaboost gboost knn gnb bnb logreg
// Regressors:   ols ridge lasso enet knn dt rf extra_trees bagging adaboost
//               gboost
//
// Class labels are ordinal integers 0..num_classes-1. Training is
// deterministic for a fixed ModelSpec::seed; ensemble members draw from
// streams derived from (seed, member index), so results do not depend on the
// thread count.

#ifndef PALML_MODELS_H_
#define PALML_MODELS_H_

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "palml/dataset.h"
#include "palml/errors.h"
#include "palml/matrix.h"
#include "palml/model_spec.h"
#include "palml/preprocess.h"

namespace palml {

namespace detail {
class Model;
}  // namespace detail

// A fitted, immutable predictor. Cheap to copy (shared state).
class TrainedModel {
 public:
  TrainedModel(ModelSpec spec, std::size_t num_features, int num_classes,
               std::shared_ptr<const detail::Model> impl);

  const ModelSpec& spec() const { return spec_; }
  Task task() const { return spec_.task; }
  Algorithm algorithm() const { return spec_.algorithm; }
  std::size_t num_features() const { return num_features_; }
  int num_classes() const { return num_classes_; }

  // Classification. Probabilities are non-negative and sum to 1; the class
  // is the argmax with ties resolved toward the lower label.
  std::vector<double> predict_proba(std::span<const double> x) const;
  int predict_class(std::span<const double> x) const;
  Matrix predict_proba(const Matrix& x) const;
  std::vector<int> predict_classes(const Matrix& x) const;

  // Regression.
  double predict_value(std::span<const double> x) const;
  std::vector<double> predict_values(const Matrix& x) const;

  // Raw per-column weights: impurity decrease for trees, |coefficient| for
  // linear models. nullopt where undefined (knn, gnb, bnb).
  std::optional<std::vector<double>> column_importance() const;

  // Per-iteration training loss for boosted models (first entry is the
  // initial constant model); empty otherwise.
  std::vector<double> training_loss() const;

  nlohmann::json to_json() const;
  static TrainedModel from_json(const nlohmann::json& j);

 private:
  void check_width(std::size_t width) const;

  ModelSpec spec_;
  std::size_t num_features_ = 0;
  int num_classes_ = 0;
  std::shared_ptr<const detail::Model> impl_;
};

// num_classes = 0 infers max(label) + 1. Throws SingleClass when fewer than
// two distinct labels are present, SpecInvalid on a bad spec.
TrainedModel train_classifier(const ModelSpec& spec, const Matrix& x,
                              std::span<const int> y, int num_classes = 0,
                              Diagnostics* diagnostics = nullptr);

TrainedModel train_regressor(const ModelSpec& spec, const Matrix& x,
                             std::span<const double> y,
                             Diagnostics* diagnostics = nullptr);

// Dispatches on spec.task using the matrix targets.
TrainedModel train_model(const ModelSpec& spec, const FeatureMatrix& data,
                         Diagnostics* diagnostics = nullptr);

struct FeatureImportance {
  bool defined = false;
  std::string reason;  // why it is undefined
  std::array<double, kNumPredictors> scores{};  // sum to 1 when defined
};

// Sums raw column weights within each source predictor (one-hot groups fold
// back into their predictor) and normalizes to 1.
FeatureImportance feature_importance(const TrainedModel& model,
                                     std::span<const ColumnInfo> columns);

}  // namespace palml

#endif  // PALML_MODELS_H_
