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

#ifndef PALML_SRC_MODEL_IMPL_H_
#define PALML_SRC_MODEL_IMPL_H_

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "palml/errors.h"
#include "palml/matrix.h"
#include "palml/model_spec.h"

namespace palml::detail {

class Model {
 public:
  virtual ~Model() = default;

  virtual void predict_proba(std::span<const double> /*x*/,
                             std::span<double> /*out*/) const {
    throw Error(ErrorCode::kUnsupported, "model does not predict classes");
  }
  virtual double predict_value(std::span<const double> /*x*/) const {
    throw Error(ErrorCode::kUnsupported, "model does not predict values");
  }
  virtual std::optional<std::vector<double>> column_importance() const {
    return std::nullopt;
  }
  virtual std::vector<double> training_loss() const { return {}; }
  virtual nlohmann::json to_json() const = 0;
};

struct TrainInput {
  const ModelSpec& spec;
  const Matrix& x;
  std::span<const int> classes;   // classification
  std::span<const double> values; // regression
  int num_classes = 0;
  Diagnostics* diagnostics = nullptr;

  bool classification() const { return spec.task == Task::kClassification; }
};

// Tree ensembles (dt, rf, extra_trees, bagging).
std::unique_ptr<Model> train_forest(const TrainInput& in);
std::unique_ptr<Model> load_forest(const nlohmann::json& j, Task task);

std::unique_ptr<Model> train_adaboost(const TrainInput& in);
std::unique_ptr<Model> load_adaboost(const nlohmann::json& j, Task task);

std::unique_ptr<Model> train_gboost(const TrainInput& in);
std::unique_ptr<Model> load_gboost(const nlohmann::json& j, Task task);

// ols, ridge, lasso, enet.
std::unique_ptr<Model> train_linear(const TrainInput& in);
std::unique_ptr<Model> load_linear(const nlohmann::json& j);

std::unique_ptr<Model> train_logistic(const TrainInput& in);
std::unique_ptr<Model> load_logistic(const nlohmann::json& j);

std::unique_ptr<Model> train_knn(const TrainInput& in);
std::unique_ptr<Model> load_knn(const nlohmann::json& j, Task task);

std::unique_ptr<Model> train_gaussian_nb(const TrainInput& in);
std::unique_ptr<Model> load_gaussian_nb(const nlohmann::json& j);

std::unique_ptr<Model> train_bernoulli_nb(const TrainInput& in);
std::unique_ptr<Model> load_bernoulli_nb(const nlohmann::json& j);

// Normalizes exp(scores - max) into out.
void softmax(std::span<const double> scores, std::span<double> out);

// Matrix <-> JSON as a flat row-major array plus shape.
nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

}  // namespace palml::detail

#endif  // PALML_SRC_MODEL_IMPL_H_
