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
#include <cmath>
#include <numeric>
#include <string>

#include "model_impl.h"
#include "palml/parallel.h"
#include "palml/random.h"
#include "palml/tree.h"

namespace palml::detail {
namespace {

TreeParams base_tree_params(const TrainInput& in) {
  TreeParams p;
  p.criterion =
      in.classification() ? Criterion::kGini : Criterion::kSquaredError;
  p.num_classes = in.num_classes;
  const ModelSpec& s = in.spec;
  if (const auto d = s.param("max_depth")) p.max_depth = static_cast<std::size_t>(*d);
  p.min_samples_split =
      static_cast<std::size_t>(s.param_or("min_samples_split", 2));
  p.min_samples_leaf =
      static_cast<std::size_t>(s.param_or("min_samples_leaf", 1));
  return p;
}

TreeTargets targets_of(const TrainInput& in) {
  return {in.classes, in.values};
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

// floor(fraction * n) rows without replacement (at least one), ascending.
std::vector<std::size_t> subsample_rows(std::size_t n, double fraction,
                                        Rng& rng) {
  const std::size_t m = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n))));
  std::vector<std::size_t> rows = all_rows(n);
  for (std::size_t i = 0; i < m; ++i) {
    std::swap(rows[i], rows[i + uniform_index(rng, n - i)]);
  }
  rows.resize(m);
  std::sort(rows.begin(), rows.end());
  return rows;
}

std::vector<std::size_t> bootstrap_rows(std::size_t n, Rng& rng) {
  std::vector<std::size_t> rows(n);
  for (auto& r : rows) r = uniform_index(rng, n);
  return rows;
}

// Per-tree impurity decreases normalized to 1, averaged over trees.
std::vector<double> averaged_importance(const std::vector<DecisionTree>& trees,
                                        std::size_t num_features) {
  std::vector<double> total(num_features, 0.0);
  for (const auto& tree : trees) {
    const std::vector<double> imp = tree.impurity_decrease(num_features);
    const double sum = std::accumulate(imp.begin(), imp.end(), 0.0);
    if (sum <= 0.0) continue;
    for (std::size_t j = 0; j < num_features; ++j) total[j] += imp[j] / sum;
  }
  for (double& v : total) v /= static_cast<double>(std::max<std::size_t>(1, trees.size()));
  return total;
}

nlohmann::json trees_to_json(const std::vector<DecisionTree>& trees) {
  auto arr = nlohmann::json::array();
  for (const auto& t : trees) arr.push_back(t.to_json());
  return arr;
}

std::vector<DecisionTree> trees_from_json(const nlohmann::json& arr) {
  std::vector<DecisionTree> trees;
  for (const auto& t : arr) trees.push_back(DecisionTree::from_json(t));
  return trees;
}

// ---------------------------------------------------------------------------
// Averaging ensembles: dt (one tree), rf, extra_trees, bagging.

class Forest final : public Model {
 public:
  Forest(Task task, std::size_t num_features, int num_classes,
         std::vector<DecisionTree> trees)
      : task_(task),
        num_features_(num_features),
        num_classes_(num_classes),
        trees_(std::move(trees)) {}

  void predict_proba(std::span<const double> x,
                     std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& tree : trees_) {
      const auto& v = tree.predict(x);
      for (std::size_t c = 0; c < out.size(); ++c) out[c] += v[c];
    }
    for (double& p : out) p /= static_cast<double>(trees_.size());
  }

  double predict_value(std::span<const double> x) const override {
    double sum = 0.0;
    for (const auto& tree : trees_) sum += tree.predict(x)[0];
    return sum / static_cast<double>(trees_.size());
  }

  std::optional<std::vector<double>> column_importance() const override {
    return averaged_importance(trees_, num_features_);
  }

  nlohmann::json to_json() const override {
    return {{"num_features", num_features_},
            {"num_classes", num_classes_},
            {"trees", trees_to_json(trees_)}};
  }

  static std::unique_ptr<Model> load(const nlohmann::json& j, Task task) {
    return std::make_unique<Forest>(task, j.at("num_features").get<std::size_t>(),
                                    j.at("num_classes").get<int>(),
                                    trees_from_json(j.at("trees")));
  }

 private:
  Task task_;
  std::size_t num_features_;
  int num_classes_;
  std::vector<DecisionTree> trees_;
};

// ---------------------------------------------------------------------------
// AdaBoost: SAMME for classification, AdaBoost.R2 (linear loss) for
// regression.

class AdaBoost final : public Model {
 public:
  AdaBoost(Task task, std::size_t num_features, int num_classes,
           std::vector<DecisionTree> trees, std::vector<double> weights)
      : task_(task),
        num_features_(num_features),
        num_classes_(num_classes),
        trees_(std::move(trees)),
        weights_(std::move(weights)) {}

  void predict_proba(std::span<const double> x,
                     std::span<double> out) const override {
    std::vector<double> scores(out.size(), 0.0);
    double total = 0.0;
    for (std::size_t m = 0; m < trees_.size(); ++m) {
      const auto& v = trees_[m].predict(x);
      const auto best = static_cast<std::size_t>(
          std::max_element(v.begin(), v.end()) - v.begin());
      scores[best] += weights_[m];
      total += weights_[m];
    }
    if (total > 0.0) {
      for (double& s : scores) s = s / total * static_cast<double>(out.size());
    }
    softmax(scores, out);
  }

  // Weighted median of the member predictions.
  double predict_value(std::span<const double> x) const override {
    std::vector<std::pair<double, double>> preds;
    double total = 0.0;
    for (std::size_t m = 0; m < trees_.size(); ++m) {
      preds.emplace_back(trees_[m].predict(x)[0], weights_[m]);
      total += weights_[m];
    }
    std::sort(preds.begin(), preds.end());
    double cum = 0.0;
    for (const auto& [value, w] : preds) {
      cum += w;
      if (cum >= 0.5 * total) return value;
    }
    return preds.back().first;
  }

  std::optional<std::vector<double>> column_importance() const override {
    std::vector<double> total(num_features_, 0.0);
    const double wsum = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    for (std::size_t m = 0; m < trees_.size(); ++m) {
      const auto imp = trees_[m].impurity_decrease(num_features_);
      const double s = std::accumulate(imp.begin(), imp.end(), 0.0);
      if (s <= 0.0 || wsum <= 0.0) continue;
      for (std::size_t j = 0; j < num_features_; ++j) {
        total[j] += weights_[m] / wsum * imp[j] / s;
      }
    }
    return total;
  }

  nlohmann::json to_json() const override {
    return {{"num_features", num_features_},
            {"num_classes", num_classes_},
            {"estimator_weights", weights_},
            {"trees", trees_to_json(trees_)}};
  }

  static std::unique_ptr<Model> load(const nlohmann::json& j, Task task) {
    return std::make_unique<AdaBoost>(
        task, j.at("num_features").get<std::size_t>(),
        j.at("num_classes").get<int>(), trees_from_json(j.at("trees")),
        j.at("estimator_weights").get<std::vector<double>>());
  }

 private:
  Task task_;
  std::size_t num_features_;
  int num_classes_;
  std::vector<DecisionTree> trees_;
  std::vector<double> weights_;
};

std::unique_ptr<Model> train_samme(const TrainInput& in) {
  const std::size_t n = in.x.rows();
  const auto rounds = static_cast<std::size_t>(in.spec.param_or("n_estimators", 50));
  const double lr = in.spec.param_or("learning_rate", 1.0);
  TreeParams tp = base_tree_params(in);
  tp.max_depth = static_cast<std::size_t>(in.spec.param_or("max_depth", 1));
  tp.min_samples_split = 2;
  tp.min_samples_leaf = 1;

  std::vector<bool> present(static_cast<std::size_t>(in.num_classes), false);
  for (int c : in.classes) present[static_cast<std::size_t>(c)] = true;
  const double k = static_cast<double>(std::count(present.begin(), present.end(), true));

  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  const std::vector<std::size_t> rows = all_rows(n);
  std::vector<DecisionTree> trees;
  std::vector<double> alphas;
  for (std::size_t m = 0; m < rounds; ++m) {
    Rng rng = make_rng(in.spec.seed, {m});
    DecisionTree tree = DecisionTree::fit(in.x, targets_of(in), rows, w, tp, rng);
    std::vector<bool> miss(n);
    double err = 0.0;
    double wsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& v = tree.predict(in.x.row(i));
      const int pred = static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
      miss[i] = pred != in.classes[i];
      if (miss[i]) err += w[i];
      wsum += w[i];
    }
    err /= wsum;
    if (err <= 0.0) {
      trees.push_back(std::move(tree));
      alphas.push_back(1.0);
      break;
    }
    if (err >= 1.0 - 1.0 / k) {
      if (trees.empty()) {
        trees.push_back(std::move(tree));
        alphas.push_back(1.0);
      }
      break;
    }
    const double alpha = lr * (std::log((1.0 - err) / err) + std::log(k - 1.0));
    trees.push_back(std::move(tree));
    alphas.push_back(alpha);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (miss[i]) w[i] *= std::exp(alpha);
      total += w[i];
    }
    for (double& wi : w) wi /= total;
  }
  return std::make_unique<AdaBoost>(in.spec.task, in.x.cols(), in.num_classes,
                                    std::move(trees), std::move(alphas));
}

std::unique_ptr<Model> train_adaboost_r2(const TrainInput& in) {
  const std::size_t n = in.x.rows();
  const auto rounds = static_cast<std::size_t>(in.spec.param_or("n_estimators", 50));
  const double lr = in.spec.param_or("learning_rate", 1.0);
  TreeParams tp = base_tree_params(in);
  tp.max_depth = static_cast<std::size_t>(in.spec.param_or("max_depth", 3));
  tp.min_samples_split = 2;
  tp.min_samples_leaf = 1;

  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<DecisionTree> trees;
  std::vector<double> weights;
  std::vector<double> cumulative(n);
  for (std::size_t m = 0; m < rounds; ++m) {
    Rng rng = make_rng(in.spec.seed, {m});
    // Weighted bootstrap.
    std::partial_sum(w.begin(), w.end(), cumulative.begin());
    std::vector<std::size_t> rows(n);
    for (auto& r : rows) {
      const double u = uniform01(rng) * cumulative.back();
      r = std::min<std::size_t>(
          n - 1, static_cast<std::size_t>(
                     std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                     cumulative.begin()));
    }
    DecisionTree tree = DecisionTree::fit(in.x, targets_of(in), rows, {}, tp, rng);

    std::vector<double> err(n);
    double max_err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      err[i] = std::abs(tree.predict(in.x.row(i))[0] - in.values[i]);
      max_err = std::max(max_err, err[i]);
    }
    if (max_err <= 0.0) {
      trees.push_back(std::move(tree));
      weights.push_back(1.0);
      break;
    }
    double avg_loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      err[i] /= max_err;
      avg_loss += w[i] * err[i];
    }
    if (avg_loss >= 0.5) {
      if (trees.empty()) {
        trees.push_back(std::move(tree));
        weights.push_back(1.0);
      }
      break;
    }
    const double beta = avg_loss / (1.0 - avg_loss);
    trees.push_back(std::move(tree));
    weights.push_back(lr * std::log(1.0 / beta));
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] *= std::pow(beta, (1.0 - err[i]) * lr);
      total += w[i];
    }
    if (total <= 0.0) break;
    for (double& wi : w) wi /= total;
  }
  return std::make_unique<AdaBoost>(in.spec.task, in.x.cols(), 0,
                                    std::move(trees), std::move(weights));
}

// ---------------------------------------------------------------------------
// Gradient boosting. Regression fits squared loss; classification fits one
// logistic model per class (one-vs-rest) with Newton-step leaf values.

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

class GradientBoosting final : public Model {
 public:
  GradientBoosting(Task task, std::size_t num_features, int num_classes,
                   double learning_rate, std::vector<double> init,
                   std::vector<std::vector<DecisionTree>> stages,
                   std::vector<double> loss)
      : task_(task),
        num_features_(num_features),
        num_classes_(num_classes),
        learning_rate_(learning_rate),
        init_(std::move(init)),
        stages_(std::move(stages)),
        loss_(std::move(loss)) {}

  std::vector<double> raw(std::span<const double> x) const {
    std::vector<double> f = init_;
    for (const auto& stage : stages_) {
      for (std::size_t k = 0; k < stage.size(); ++k) {
        f[k] += learning_rate_ * stage[k].predict(x)[0];
      }
    }
    return f;
  }

  void predict_proba(std::span<const double> x,
                     std::span<double> out) const override {
    const std::vector<double> f = raw(x);
    double total = 0.0;
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k] = sigmoid(f[k]);
      total += out[k];
    }
    for (double& p : out) p /= total;
  }

  double predict_value(std::span<const double> x) const override {
    return raw(x)[0];
  }

  std::optional<std::vector<double>> column_importance() const override {
    std::vector<DecisionTree> all;
    for (const auto& stage : stages_) all.insert(all.end(), stage.begin(), stage.end());
    return averaged_importance(all, num_features_);
  }

  std::vector<double> training_loss() const override { return loss_; }

  nlohmann::json to_json() const override {
    auto stages = nlohmann::json::array();
    for (const auto& s : stages_) stages.push_back(trees_to_json(s));
    return {{"num_features", num_features_},
            {"num_classes", num_classes_},
            {"learning_rate", learning_rate_},
            {"init", init_},
            {"training_loss", loss_},
            {"stages", std::move(stages)}};
  }

  static std::unique_ptr<Model> load(const nlohmann::json& j, Task task) {
    std::vector<std::vector<DecisionTree>> stages;
    for (const auto& s : j.at("stages")) stages.push_back(trees_from_json(s));
    return std::make_unique<GradientBoosting>(
        task, j.at("num_features").get<std::size_t>(),
        j.at("num_classes").get<int>(), j.at("learning_rate").get<double>(),
        j.at("init").get<std::vector<double>>(), std::move(stages),
        j.at("training_loss").get<std::vector<double>>());
  }

 private:
  Task task_;
  std::size_t num_features_;
  int num_classes_;
  double learning_rate_;
  std::vector<double> init_;
  std::vector<std::vector<DecisionTree>> stages_;
  std::vector<double> loss_;
};

}  // namespace

std::unique_ptr<Model> train_forest(const TrainInput& in) {
  const ModelSpec& s = in.spec;
  const std::size_t n = in.x.rows();
  const std::size_t p = in.x.cols();
  TreeParams tp = base_tree_params(in);

  std::size_t num_trees = 1;
  bool resample = false;
  double subsample = 1.0;
  switch (s.algorithm) {
    case Algorithm::kDecisionTree:
      tp.max_features = features_per_split(s.param_or("max_features", 1.0), p);
      break;
    case Algorithm::kRandomForest:
    case Algorithm::kExtraTrees: {
      num_trees = static_cast<std::size_t>(s.param_or("n_estimators", 100));
      if (const auto f = s.param("max_features")) {
        tp.max_features = features_per_split(*f, p);
      } else {
        tp.max_features = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::sqrt(static_cast<double>(p))));
      }
      if (s.algorithm == Algorithm::kRandomForest) {
        resample = true;
        subsample = s.param_or("subsample", 1.0);
        if (s.params.count("learning_rate")) {
          warn_to(in.diagnostics,
                  "rf: learning_rate has no effect on random forests; ignored");
        }
      } else {
        tp.random_thresholds = true;
      }
      break;
    }
    case Algorithm::kBagging:
      num_trees = static_cast<std::size_t>(s.param_or("n_estimators", 10));
      resample = true;
      subsample = s.param_or("subsample", 1.0);
      break;
    default:
      throw Error(ErrorCode::kSpecInvalid, "not a forest algorithm");
  }

  std::vector<DecisionTree> trees(num_trees);
  parallel_for(num_trees, [&](std::size_t t) {
    Rng rng = make_rng(s.seed, {t});
    std::vector<std::size_t> rows;
    if (!resample) {
      rows = all_rows(n);
    } else if (subsample < 1.0) {
      rows = subsample_rows(n, subsample, rng);
    } else {
      rows = bootstrap_rows(n, rng);
    }
    trees[t] = DecisionTree::fit(in.x, targets_of(in), rows, {}, tp, rng);
  });
  return std::make_unique<Forest>(s.task, p, in.num_classes, std::move(trees));
}

std::unique_ptr<Model> load_forest(const nlohmann::json& j, Task task) {
  return Forest::load(j, task);
}

std::unique_ptr<Model> train_adaboost(const TrainInput& in) {
  return in.classification() ? train_samme(in) : train_adaboost_r2(in);
}

std::unique_ptr<Model> load_adaboost(const nlohmann::json& j, Task task) {
  return AdaBoost::load(j, task);
}

std::unique_ptr<Model> train_gboost(const TrainInput& in) {
  const ModelSpec& s = in.spec;
  const std::size_t n = in.x.rows();
  const std::size_t p = in.x.cols();
  const auto rounds = static_cast<std::size_t>(s.param_or("n_estimators", 100));
  const double lr = s.param_or("learning_rate", 0.1);
  const double subsample = s.param_or("subsample", 1.0);
  TreeParams tp = base_tree_params(in);
  tp.criterion = Criterion::kSquaredError;
  tp.max_features = features_per_split(s.param_or("max_features", 1.0), p);

  const bool clf = in.classification();
  const std::size_t outputs = clf ? static_cast<std::size_t>(in.num_classes) : 1;
  // Per-output target: class indicator or the value itself.
  std::vector<std::vector<double>> target(outputs, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (clf) {
      target[static_cast<std::size_t>(in.classes[i])][i] = 1.0;
    } else {
      target[0][i] = in.values[i];
    }
  }

  std::vector<double> init(outputs);
  for (std::size_t k = 0; k < outputs; ++k) {
    const double m = std::accumulate(target[k].begin(), target[k].end(), 0.0) /
                     static_cast<double>(n);
    if (clf) {
      const double q = std::clamp(m, 1e-6, 1.0 - 1e-6);
      init[k] = std::log(q / (1.0 - q));
    } else {
      init[k] = m;
    }
  }
  std::vector<std::vector<double>> f(outputs);
  for (std::size_t k = 0; k < outputs; ++k) f[k].assign(n, init[k]);

  auto loss = [&] {
    double total = 0.0;
    for (std::size_t k = 0; k < outputs; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        if (clf) {
          // log(1 + e^-z) for positives, log(1 + e^z) for negatives.
          const double z = target[k][i] > 0.5 ? f[k][i] : -f[k][i];
          total += z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
        } else {
          const double r = target[k][i] - f[k][i];
          total += r * r;
        }
      }
    }
    return total / static_cast<double>(n * outputs);
  };

  std::vector<double> history{loss()};
  std::vector<std::vector<DecisionTree>> stages;
  std::vector<double> residual(n);
  for (std::size_t m = 0; m < rounds; ++m) {
    Rng rng = make_rng(s.seed, {m});
    const std::vector<std::size_t> rows =
        subsample < 1.0 ? subsample_rows(n, subsample, rng) : all_rows(n);
    std::vector<DecisionTree> stage(outputs);
    for (std::size_t k = 0; k < outputs; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        residual[i] = clf ? target[k][i] - sigmoid(f[k][i]) : target[k][i] - f[k][i];
      }
      TreeTargets tt{{}, residual};
      DecisionTree tree = DecisionTree::fit(in.x, tt, rows, {}, tp, rng);
      if (clf) {
        // Newton step per leaf: sum(r) / sum(p (1 - p)).
        std::vector<double> num(tree.nodes().size(), 0.0);
        std::vector<double> den(tree.nodes().size(), 0.0);
        for (std::size_t r : rows) {
          const auto leaf = static_cast<std::size_t>(tree.apply(in.x.row(r)));
          const double pr = sigmoid(f[k][r]);
          num[leaf] += residual[r];
          den[leaf] += pr * (1.0 - pr);
        }
        for (std::size_t node = 0; node < tree.nodes().size(); ++node) {
          if (!tree.nodes()[node].is_leaf()) continue;
          const double v = den[node] > 1e-12 ? num[node] / den[node] : 0.0;
          tree.set_leaf_value(static_cast<int>(node), {v});
        }
      }
      stage[k] = std::move(tree);
    }
    for (std::size_t k = 0; k < outputs; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        f[k][i] += lr * stage[k].predict(in.x.row(i))[0];
      }
    }
    stages.push_back(std::move(stage));
    history.push_back(loss());
  }
  return std::make_unique<GradientBoosting>(s.task, p, in.num_classes, lr,
                                            std::move(init), std::move(stages),
                                            std::move(history));
}

std::unique_ptr<Model> load_gboost(const nlohmann::json& j, Task task) {
  return GradientBoosting::load(j, task);
}

}  // namespace palml::detail
