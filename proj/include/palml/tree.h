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

// CART decision trees shared by every tree-based learner.
//
// Splits are axis-aligned `x[feature] <= threshold`. With exact thresholds
// the candidates are midpoints between consecutive distinct sorted values;
// with random thresholds (extra-trees) one uniform draw in [min, max) per
// examined feature. The best split maximizes the weighted impurity decrease;
// ties keep the first candidate in ascending column order and, within a
// column, the lowest threshold. Values closer than 1e-12 count as equal.

#ifndef PALML_TREE_H_
#define PALML_TREE_H_

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"
#include "palml/matrix.h"
#include "palml/random.h"

namespace palml {

enum class Criterion { kGini, kSquaredError };

struct TreeParams {
  Criterion criterion = Criterion::kGini;
  int num_classes = 0;  // gini only
  std::size_t max_depth = 0;  // 0: unlimited
  std::size_t min_samples_split = 2;
  std::size_t min_samples_leaf = 1;
  // Non-constant features examined per split; 0 examines all of them.
  std::size_t max_features = 0;
  bool random_thresholds = false;
};

struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double impurity = 0.0;
  double weight = 0.0;
  std::size_t samples = 0;
  // Class probabilities (gini) or {mean} (squared error).
  std::vector<double> value;

  bool is_leaf() const { return feature < 0; }
};

// Exactly one of the spans is used, chosen by the criterion.
struct TreeTargets {
  std::span<const int> classes;
  std::span<const double> values;
};

class DecisionTree {
 public:
  DecisionTree() = default;

  // Grows a tree on `rows` (indices into x; repeats allowed for bootstrap
  // samples). `weights` is indexed by row and may be empty (unit weights).
  static DecisionTree fit(const Matrix& x, const TreeTargets& targets,
                          std::span<const std::size_t> rows,
                          std::span<const double> weights,
                          const TreeParams& params, Rng& rng);

  // Index of the leaf reached by x.
  int apply(std::span<const double> x) const;
  const std::vector<double>& predict(std::span<const double> x) const {
    return nodes_[static_cast<std::size_t>(apply(x))].value;
  }

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t depth() const;

  // Total weighted impurity decrease per feature (not normalized).
  std::vector<double> impurity_decrease(std::size_t num_features) const;

  // Used by gradient boosting to install Newton-step leaf values.
  void set_leaf_value(int node, std::vector<double> value);

  nlohmann::json to_json() const;
  static DecisionTree from_json(const nlohmann::json& j);

 private:
  std::vector<TreeNode> nodes_;
};

// Examined-feature count for a max_features fraction: max(1, floor(f * p)).
std::size_t features_per_split(double fraction, std::size_t num_features);

}  // namespace palml

#endif  // PALML_TREE_H_
