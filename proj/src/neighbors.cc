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
#include <numeric>

#include "model_impl.h"

namespace palml::detail {
namespace {

// Brute-force Euclidean k-nearest neighbours; distance ties go to the lower
// training index.
class Knn final : public Model {
 public:
  Knn(Task task, std::size_t k, int num_classes, Matrix x,
      std::vector<double> targets)
      : task_(task),
        k_(k),
        num_classes_(num_classes),
        x_(std::move(x)),
        targets_(std::move(targets)) {}

  std::vector<std::size_t> neighbours(std::span<const double> q) const {
    std::vector<std::pair<double, std::size_t>> d(x_.rows());
    for (std::size_t i = 0; i < x_.rows(); ++i) {
      d[i] = {squared_distance(x_.row(i), q), i};
    }
    const std::size_t k = std::min(k_, d.size());
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = d[i].second;
    return out;
  }

  void predict_proba(std::span<const double> x,
                     std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
    const auto nn = neighbours(x);
    for (std::size_t i : nn) out[static_cast<std::size_t>(targets_[i])] += 1.0;
    for (double& p : out) p /= static_cast<double>(nn.size());
  }

  double predict_value(std::span<const double> x) const override {
    const auto nn = neighbours(x);
    double sum = 0.0;
    for (std::size_t i : nn) sum += targets_[i];
    return sum / static_cast<double>(nn.size());
  }

  nlohmann::json to_json() const override {
    return {{"k", k_},
            {"num_classes", num_classes_},
            {"x", matrix_to_json(x_)},
            {"targets", targets_}};
  }

  static std::unique_ptr<Model> load(const nlohmann::json& j, Task task) {
    return std::make_unique<Knn>(task, j.at("k").get<std::size_t>(),
                                 j.at("num_classes").get<int>(),
                                 matrix_from_json(j.at("x")),
                                 j.at("targets").get<std::vector<double>>());
  }

 private:
  Task task_;
  std::size_t k_;
  int num_classes_;
  Matrix x_;
  std::vector<double> targets_;
};

}  // namespace

std::unique_ptr<Model> train_knn(const TrainInput& in) {
  auto k = static_cast<std::size_t>(in.spec.param_or("k", 5));
  if (k > in.x.rows()) {
    warn_to(in.diagnostics, "knn: k=" + std::to_string(k) + " exceeds " +
                                std::to_string(in.x.rows()) +
                                " training rows; using all rows");
    k = in.x.rows();
  }
  std::vector<double> targets;
  if (in.classification()) {
    targets.assign(in.classes.begin(), in.classes.end());
  } else {
    targets.assign(in.values.begin(), in.values.end());
  }
  return std::make_unique<Knn>(in.spec.task, k, in.num_classes, in.x,
                               std::move(targets));
}

std::unique_ptr<Model> load_knn(const nlohmann::json& j, Task task) {
  return Knn::load(j, task);
}

}  // namespace palml::detail
