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

#include "palml/model_spec.h"

#include <array>
#include <cmath>
#include <limits>

#include "palml/csv.h"
#include "palml/errors.h"

namespace palml {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr std::array<Algorithm, 14> kAllAlgorithms = {
    Algorithm::kDecisionTree, Algorithm::kRandomForest,
    Algorithm::kExtraTrees,   Algorithm::kBagging,
    Algorithm::kAdaBoost,     Algorithm::kGradientBoosting,
    Algorithm::kKnn,          Algorithm::kGaussianNb,
    Algorithm::kBernoulliNb,  Algorithm::kLogisticRegression,
    Algorithm::kOls,          Algorithm::kRidge,
    Algorithm::kLasso,        Algorithm::kElasticNet,
};

ParamSchema count(std::string name, double min, std::optional<double> def) {
  return {std::move(name), ParamType::kInteger, min, 1e9, true, def};
}
ParamSchema fraction(std::string name, std::optional<double> def) {
  return {std::move(name), ParamType::kReal, 0.0, 1.0, false, def};
}
ParamSchema nonneg(std::string name, double def) {
  return {std::move(name), ParamType::kReal, 0.0, kInf, true, def};
}
ParamSchema positive(std::string name, double def) {
  return {std::move(name), ParamType::kReal, 0.0, kInf, false, def};
}

std::vector<ParamSchema> tree_params() {
  return {
      count("max_depth", 1, std::nullopt),  // unlimited
      count("min_samples_split", 1, 2),
      count("min_samples_leaf", 1, 1),
  };
}

std::vector<ParamSchema> build_schema(Algorithm a, Task t) {
  const bool clf = t == Task::kClassification;
  std::vector<ParamSchema> s;
  switch (a) {
    case Algorithm::kDecisionTree:
      s = tree_params();
      s.push_back(fraction("max_features", 1.0));
      break;
    case Algorithm::kRandomForest:
      s = tree_params();
      s.push_back(count("n_estimators", 1, 100));
      // Classification default is the sqrt(p) rule.
      s.push_back(fraction("max_features",
                           clf ? std::nullopt : std::optional<double>(1.0)));
      s.push_back(fraction("subsample", 1.0));
      s.push_back(positive("learning_rate", 0.1));  // accepted, unused
      break;
    case Algorithm::kExtraTrees:
      s = tree_params();
      s.push_back(count("n_estimators", 1, 100));
      s.push_back(fraction("max_features",
                           clf ? std::nullopt : std::optional<double>(1.0)));
      break;
    case Algorithm::kBagging:
      s = tree_params();
      s.push_back(count("n_estimators", 1, 10));
      s.push_back(fraction("subsample", 1.0));
      break;
    case Algorithm::kAdaBoost:
      s.push_back(count("n_estimators", 1, 50));
      s.push_back(positive("learning_rate", 1.0));
      s.push_back(count("max_depth", 1, clf ? 1 : 3));
      break;
    case Algorithm::kGradientBoosting:
      s = tree_params();
      s[0].default_value = 3;
      s.push_back(count("n_estimators", 1, 100));
      s.push_back(positive("learning_rate", 0.1));
      s.push_back(fraction("subsample", 1.0));
      s.push_back(fraction("max_features", 1.0));
      break;
    case Algorithm::kKnn:
      s.push_back(count("k", 1, 5));
      break;
    case Algorithm::kGaussianNb:
      break;
    case Algorithm::kBernoulliNb:
      s.push_back(positive("alpha", 1.0));
      break;
    case Algorithm::kLogisticRegression:
      s.push_back(nonneg("alpha", 1.0));
      break;
    case Algorithm::kOls:
      break;
    case Algorithm::kRidge:
    case Algorithm::kLasso:
      s.push_back(nonneg("alpha", 1.0));
      break;
    case Algorithm::kElasticNet:
      s.push_back(nonneg("alpha", 1.0));
      s.push_back({"l1_ratio", ParamType::kReal, 0.0, 1.0, true, 0.5});
      break;
  }
  return s;
}

}  // namespace

std::string_view to_string(Task t) {
  return t == Task::kClassification ? "classification" : "regression";
}

Task parse_task(std::string_view name) {
  if (name == "classification") return Task::kClassification;
  if (name == "regression") return Task::kRegression;
  throw Error(ErrorCode::kInvalidConfig,
              "unknown task '" + std::string(name) +
                  "' (expected classification|regression)");
}

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kDecisionTree: return "dt";
    case Algorithm::kRandomForest: return "rf";
    case Algorithm::kExtraTrees: return "extra_trees";
    case Algorithm::kBagging: return "bagging";
    case Algorithm::kAdaBoost: return "adaboost";
    case Algorithm::kGradientBoosting: return "gboost";
    case Algorithm::kKnn: return "knn";
    case Algorithm::kGaussianNb: return "gnb";
    case Algorithm::kBernoulliNb: return "bnb";
    case Algorithm::kLogisticRegression: return "logreg";
    case Algorithm::kOls: return "ols";
    case Algorithm::kRidge: return "ridge";
    case Algorithm::kLasso: return "lasso";
    case Algorithm::kElasticNet: return "enet";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view id) {
  for (Algorithm a : kAllAlgorithms) {
    if (to_string(a) == id) return a;
  }
  throw Error(ErrorCode::kSpecInvalid, "unknown algorithm '" + std::string(id) + "'");
}

bool supports(Algorithm a, Task t) {
  switch (a) {
    case Algorithm::kGaussianNb:
    case Algorithm::kBernoulliNb:
    case Algorithm::kLogisticRegression:
      return t == Task::kClassification;
    case Algorithm::kOls:
    case Algorithm::kRidge:
    case Algorithm::kLasso:
    case Algorithm::kElasticNet:
      return t == Task::kRegression;
    default:
      return true;
  }
}

std::vector<Algorithm> algorithms_for(Task t) {
  std::vector<Algorithm> out;
  for (Algorithm a : kAllAlgorithms) {
    if (supports(a, t)) out.push_back(a);
  }
  return out;
}

const std::vector<ParamSchema>& param_schema(Algorithm a, Task t) {
  static const auto table = [] {
    std::map<std::pair<int, int>, std::vector<ParamSchema>> m;
    for (Algorithm alg : kAllAlgorithms) {
      for (Task task : {Task::kClassification, Task::kRegression}) {
        m[{static_cast<int>(alg), static_cast<int>(task)}] =
            build_schema(alg, task);
      }
    }
    return m;
  }();
  return table.at({static_cast<int>(a), static_cast<int>(t)});
}

const ParamSchema* find_param(Algorithm a, Task t, std::string_view name) {
  for (const auto& p : param_schema(a, t)) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

std::optional<double> ModelSpec::param(std::string_view name) const {
  if (const auto it = params.find(std::string(name)); it != params.end()) {
    return it->second;
  }
  if (const ParamSchema* p = find_param(algorithm, task, name)) {
    return p->default_value;
  }
  return std::nullopt;
}

double ModelSpec::param_or(std::string_view name, double fallback) const {
  return param(name).value_or(fallback);
}

void validate(const ModelSpec& spec) {
  if (!supports(spec.algorithm, spec.task)) {
    throw Error(ErrorCode::kSpecInvalid,
                std::string(to_string(spec.algorithm)) + " does not support " +
                    std::string(to_string(spec.task)));
  }
  for (const auto& [name, value] : spec.params) {
    const ParamSchema* p = find_param(spec.algorithm, spec.task, name);
    const std::string where =
        std::string(to_string(spec.algorithm)) + "." + name;
    if (p == nullptr) {
      throw Error(ErrorCode::kSpecInvalid, "unknown hyperparameter " + where);
    }
    if (!std::isfinite(value)) {
      throw Error(ErrorCode::kSpecInvalid, where + " is not finite");
    }
    if (p->type == ParamType::kInteger && std::floor(value) != value) {
      throw Error(ErrorCode::kSpecInvalid, where + " must be an integer");
    }
    const bool above = p->min_inclusive ? value >= p->min : value > p->min;
    if (!above || value > p->max) {
      throw Error(ErrorCode::kSpecInvalid,
                  where + " = " + csv::format_number(value) + " out of range " +
                      (p->min_inclusive ? "[" : "(") + csv::format_number(p->min) +
                      ", " + csv::format_number(p->max) + "]");
    }
  }
}

ModelSpec tuned_forest_classifier(std::uint64_t seed) {
  ModelSpec s;
  s.task = Task::kClassification;
  s.algorithm = Algorithm::kRandomForest;
  s.params = {{"learning_rate", 0.1},   {"max_depth", 10},
              {"max_features", 0.3},    {"min_samples_leaf", 7},
              {"min_samples_split", 10}, {"n_estimators", 100},
              {"subsample", 0.85}};
  s.seed = seed;
  return s;
}

ModelSpec tuned_forest_regressor(std::uint64_t seed) {
  ModelSpec s;
  s.task = Task::kRegression;
  s.algorithm = Algorithm::kRandomForest;
  s.params = {{"learning_rate", 0.01},  {"max_depth", 8},
              {"max_features", 0.5},    {"min_samples_leaf", 8},
              {"min_samples_split", 12}, {"n_estimators", 100},
              {"subsample", 0.75}};
  s.seed = seed;
  return s;
}

nlohmann::json to_json(const ModelSpec& spec) {
  return {
      {"task", std::string(to_string(spec.task))},
      {"algorithm", std::string(to_string(spec.algorithm))},
      {"params", spec.params},
      {"seed", spec.seed},
  };
}

ModelSpec model_spec_from_json(const nlohmann::json& j) {
  try {
    ModelSpec s;
    s.task = parse_task(j.at("task").get<std::string>());
    s.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    s.params = j.at("params").get<std::map<std::string, double>>();
    s.seed = j.at("seed").get<std::uint64_t>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaMismatch,
                std::string("malformed model spec: ") + e.what());
  }
}

}  // namespace palml
