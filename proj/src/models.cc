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

#include "palml/models.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "model_impl.h"

namespace palml {
namespace detail {

void softmax(std::span<const double> scores, std::span<double> out) {
  const double m = *std::max_element(scores.begin(), scores.end());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::isinf(scores[i]) && scores[i] < 0 ? 0.0 : std::exp(scores[i] - m);
    total += out[i];
  }
  for (double& p : out) p /= total;
}

nlohmann::json matrix_to_json(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()},
          {"data", std::vector<double>(m.data().begin(), m.data().end())}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != rows * cols) {
    throw Error(ErrorCode::kSchemaMismatch, "matrix payload has wrong size");
  }
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(r * cols), cols,
                m.row(r).begin());
  }
  return m;
}

namespace {

std::unique_ptr<Model> dispatch_train(const TrainInput& in) {
  switch (in.spec.algorithm) {
    case Algorithm::kDecisionTree:
    case Algorithm::kRandomForest:
    case Algorithm::kExtraTrees:
    case Algorithm::kBagging:
      return train_forest(in);
    case Algorithm::kAdaBoost:
      return train_adaboost(in);
    case Algorithm::kGradientBoosting:
      return train_gboost(in);
    case Algorithm::kKnn:
      return train_knn(in);
    case Algorithm::kGaussianNb:
      return train_gaussian_nb(in);
    case Algorithm::kBernoulliNb:
      return train_bernoulli_nb(in);
    case Algorithm::kLogisticRegression:
      return train_logistic(in);
    case Algorithm::kOls:
    case Algorithm::kRidge:
    case Algorithm::kLasso:
    case Algorithm::kElasticNet:
      return train_linear(in);
  }
  throw Error(ErrorCode::kSpecInvalid, "unknown algorithm");
}

std::unique_ptr<Model> dispatch_load(Algorithm a, Task task,
                                     const nlohmann::json& j) {
  switch (a) {
    case Algorithm::kDecisionTree:
    case Algorithm::kRandomForest:
    case Algorithm::kExtraTrees:
    case Algorithm::kBagging:
      return load_forest(j, task);
    case Algorithm::kAdaBoost:
      return load_adaboost(j, task);
    case Algorithm::kGradientBoosting:
      return load_gboost(j, task);
    case Algorithm::kKnn:
      return load_knn(j, task);
    case Algorithm::kGaussianNb:
      return load_gaussian_nb(j);
    case Algorithm::kBernoulliNb:
      return load_bernoulli_nb(j);
    case Algorithm::kLogisticRegression:
      return load_logistic(j);
    case Algorithm::kOls:
    case Algorithm::kRidge:
    case Algorithm::kLasso:
    case Algorithm::kElasticNet:
      return load_linear(j);
  }
  throw Error(ErrorCode::kSchemaMismatch, "unknown algorithm");
}

void check_features(const Matrix& x, std::size_t num_targets) {
  if (x.rows() == 0 || x.cols() == 0) {
    throw Error(ErrorCode::kEmptyDataset, "training matrix is empty");
  }
  if (num_targets != x.rows()) {
    throw Error(ErrorCode::kLengthMismatch,
                "got " + std::to_string(num_targets) + " targets for " +
                    std::to_string(x.rows()) + " rows");
  }
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      if (!std::isfinite(x(r, c))) {
        throw Error(ErrorCode::kNonFinite, "non-finite feature value", r,
                    "x" + std::to_string(c));
      }
    }
  }
}

}  // namespace
}  // namespace detail

TrainedModel::TrainedModel(ModelSpec spec, std::size_t num_features,
                           int num_classes,
                           std::shared_ptr<const detail::Model> impl)
    : spec_(std::move(spec)),
      num_features_(num_features),
      num_classes_(num_classes),
      impl_(std::move(impl)) {}

void TrainedModel::check_width(std::size_t width) const {
  if (width != num_features_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected " + std::to_string(num_features_) + " columns, got " +
                    std::to_string(width));
  }
}

std::vector<double> TrainedModel::predict_proba(std::span<const double> x) const {
  check_width(x.size());
  if (task() != Task::kClassification) {
    throw Error(ErrorCode::kUnsupported, "regressor has no class probabilities");
  }
  std::vector<double> out(static_cast<std::size_t>(num_classes_));
  impl_->predict_proba(x, out);
  return out;
}

int TrainedModel::predict_class(std::span<const double> x) const {
  const std::vector<double> p = predict_proba(x);
  // max_element returns the first maximum, i.e. the lower label on ties.
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

Matrix TrainedModel::predict_proba(const Matrix& x) const {
  check_width(x.cols());
  Matrix out(x.rows(), static_cast<std::size_t>(num_classes_));
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto p = predict_proba(x.row(r));
    std::copy(p.begin(), p.end(), out.row(r).begin());
  }
  return out;
}

std::vector<int> TrainedModel::predict_classes(const Matrix& x) const {
  check_width(x.cols());
  std::vector<int> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict_class(x.row(r));
  return out;
}

double TrainedModel::predict_value(std::span<const double> x) const {
  check_width(x.size());
  if (task() != Task::kRegression) {
    throw Error(ErrorCode::kUnsupported, "classifier has no numeric prediction");
  }
  return impl_->predict_value(x);
}

std::vector<double> TrainedModel::predict_values(const Matrix& x) const {
  check_width(x.cols());
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict_value(x.row(r));
  return out;
}

std::optional<std::vector<double>> TrainedModel::column_importance() const {
  return impl_->column_importance();
}

std::vector<double> TrainedModel::training_loss() const {
  return impl_->training_loss();
}

nlohmann::json TrainedModel::to_json() const {
  return {{"spec", palml::to_json(spec_)},
          {"num_features", num_features_},
          {"num_classes", num_classes_},
          {"state", impl_->to_json()}};
}

TrainedModel TrainedModel::from_json(const nlohmann::json& j) {
  try {
    ModelSpec spec = model_spec_from_json(j.at("spec"));
    auto impl = detail::dispatch_load(spec.algorithm, spec.task, j.at("state"));
    return TrainedModel(std::move(spec), j.at("num_features").get<std::size_t>(),
                        j.at("num_classes").get<int>(), std::move(impl));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaMismatch,
                std::string("malformed model state: ") + e.what());
  }
}

TrainedModel train_classifier(const ModelSpec& spec, const Matrix& x,
                              std::span<const int> y, int num_classes,
                              Diagnostics* diagnostics) {
  if (spec.task != Task::kClassification) {
    throw Error(ErrorCode::kSpecInvalid, "train_classifier needs a classification spec");
  }
  validate(spec);
  detail::check_features(x, y.size());
  std::set<int> distinct;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < 0) throw Error(ErrorCode::kInvalidValue, "negative class label", i, "label");
    distinct.insert(y[i]);
  }
  if (num_classes == 0) num_classes = *distinct.rbegin() + 1;
  if (*distinct.rbegin() >= num_classes) {
    throw Error(ErrorCode::kInvalidValue,
                "class label " + std::to_string(*distinct.rbegin()) +
                    " outside 0.." + std::to_string(num_classes - 1));
  }
  if (distinct.size() < 2) {
    throw Error(ErrorCode::kSingleClass,
                "training labels contain only class " +
                    std::to_string(*distinct.begin()));
  }
  detail::TrainInput in{spec, x, y, {}, num_classes, diagnostics};
  return TrainedModel(spec, x.cols(), num_classes, detail::dispatch_train(in));
}

TrainedModel train_regressor(const ModelSpec& spec, const Matrix& x,
                             std::span<const double> y,
                             Diagnostics* diagnostics) {
  if (spec.task != Task::kRegression) {
    throw Error(ErrorCode::kSpecInvalid, "train_regressor needs a regression spec");
  }
  validate(spec);
  detail::check_features(x, y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i])) {
      throw Error(ErrorCode::kNonFinite, "non-finite target", i, "target");
    }
  }
  detail::TrainInput in{spec, x, {}, y, 0, diagnostics};
  return TrainedModel(spec, x.cols(), 0, detail::dispatch_train(in));
}

TrainedModel train_model(const ModelSpec& spec, const FeatureMatrix& data,
                         Diagnostics* diagnostics) {
  if (spec.task == Task::kClassification) {
    if (data.target_kind != TargetKind::kOrdinalClass) {
      throw Error(ErrorCode::kSpecInvalid, "matrix has no class targets");
    }
    return train_classifier(spec, data.values, data.classes,
                            static_cast<int>(kNumMiClasses), diagnostics);
  }
  if (data.target_kind != TargetKind::kNumeric) {
    throw Error(ErrorCode::kSpecInvalid, "matrix has no numeric targets");
  }
  return train_regressor(spec, data.values, data.targets, diagnostics);
}

FeatureImportance feature_importance(const TrainedModel& model,
                                     std::span<const ColumnInfo> columns) {
  FeatureImportance out;
  if (columns.size() != model.num_features()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "column metadata covers " + std::to_string(columns.size()) +
                    " of " + std::to_string(model.num_features()) + " columns");
  }
  const auto raw = model.column_importance();
  if (!raw) {
    out.reason = std::string("importance is not defined for ") +
                 std::string(to_string(model.algorithm()));
    return out;
  }
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out.scores[static_cast<std::size_t>(columns[c].source)] += (*raw)[c];
  }
  double total = 0.0;
  for (double s : out.scores) total += s;
  if (!(total > 0.0) || !std::isfinite(total)) {
    out.scores.fill(0.0);
    out.reason = "model assigns zero weight to every column";
    return out;
  }
  for (double& s : out.scores) s /= total;
  out.defined = true;
  return out;
}

}  // namespace palml
