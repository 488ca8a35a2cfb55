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
#include <numeric>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "palml/tree.h"
#include "test_util.h"

namespace palml {
namespace {

using testing::error_code_of;
using testing::surrogate_matrix;

ModelSpec spec(Task task, Algorithm a, std::map<std::string, double> params = {},
               std::uint64_t seed = 0) {
  return ModelSpec{task, a, std::move(params), seed};
}

double accuracy(const std::vector<int>& pred, std::span<const int> actual) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hit += pred[i] == actual[i];
  return static_cast<double>(hit) / static_cast<double>(pred.size());
}

TEST(ModelSpec, ValidationRejectsBadParams) {
  EXPECT_NO_THROW(validate(tuned_forest_classifier()));
  EXPECT_NO_THROW(validate(tuned_forest_regressor()));
  EXPECT_EQ(error_code_of([] {
              validate(spec(Task::kClassification, Algorithm::kRandomForest, {{"depth", 3}}));
            }),
            ErrorCode::kSpecInvalid);
  EXPECT_EQ(error_code_of([] {
              validate(spec(Task::kClassification, Algorithm::kRandomForest, {{"max_depth", 2.5}}));
            }),
            ErrorCode::kSpecInvalid);
  EXPECT_EQ(error_code_of([] {
              validate(spec(Task::kClassification, Algorithm::kRandomForest, {{"max_features", 0.0}}));
            }),
            ErrorCode::kSpecInvalid);
  EXPECT_EQ(error_code_of([] { validate(spec(Task::kRegression, Algorithm::kGaussianNb)); }),
            ErrorCode::kSpecInvalid);
  EXPECT_EQ(error_code_of([] { validate(spec(Task::kClassification, Algorithm::kLasso)); }),
            ErrorCode::kSpecInvalid);
}

TEST(ModelSpec, JsonRoundTrip) {
  const ModelSpec s = tuned_forest_regressor(17);
  EXPECT_EQ(model_spec_from_json(to_json(s)), s);
  for (Task t : {Task::kClassification, Task::kRegression}) {
    for (Algorithm a : algorithms_for(t)) EXPECT_EQ(parse_algorithm(to_string(a)), a);
  }
}

TEST(DecisionTree, LearnsXor) {
  Matrix x(0, 2);
  for (auto row : {std::vector<double>{0, 0}, {0, 1}, {1, 0}, {1, 1}}) x.append_row(row);
  const std::vector<int> y = {0, 1, 1, 0};
  const TrainedModel m = train_classifier(
      spec(Task::kClassification, Algorithm::kDecisionTree, {{"max_depth", 2}}), x, y);
  EXPECT_EQ(m.predict_classes(x), y);
}

TEST(GaussianNb, SeparatesDistantBlobs) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  auto sample = [&](std::size_t count, Matrix& x, std::vector<int>& y) {
    x = Matrix(0, 2);
    y.clear();
    for (std::size_t i = 0; i < count; ++i) {
      const int c = static_cast<int>(i % 2);
      const double center = c == 0 ? -5.0 : 5.0;
      x.append_row(std::vector<double>{center + n(rng), center + n(rng)});
      y.push_back(c);
    }
  };
  Matrix xtr, xte;
  std::vector<int> ytr, yte;
  sample(200, xtr, ytr);
  sample(1000, xte, yte);
  const TrainedModel m = train_classifier(spec(Task::kClassification, Algorithm::kGaussianNb), xtr, ytr);
  EXPECT_GE(accuracy(m.predict_classes(xte), yte), 0.99);
}

TEST(Knn, OneNeighbourRecallsTrainingPoint) {
  const FeatureMatrix fm = surrogate_matrix(1, 60, TargetKind::kOrdinalClass);
  const TrainedModel m =
      train_classifier(spec(Task::kClassification, Algorithm::kKnn, {{"k", 1}}), fm.values, fm.classes, 4);
  for (std::size_t r = 0; r < fm.rows(); ++r) {
    const auto p = m.predict_proba(fm.values.row(r));
    EXPECT_EQ(m.predict_class(fm.values.row(r)), fm.classes[r]);
    EXPECT_EQ(p[static_cast<std::size_t>(fm.classes[r])], 1.0);
  }
}

TEST(Knn, LargeKIsClampedWithWarning) {
  const FeatureMatrix fm = surrogate_matrix(1, 20, TargetKind::kNumeric);
  Diagnostics diag;
  const TrainedModel m = train_regressor(spec(Task::kRegression, Algorithm::kKnn, {{"k", 50}}),
                                         fm.values, fm.targets, &diag);
  const double mean = std::accumulate(fm.targets.begin(), fm.targets.end(), 0.0) / 20.0;
  EXPECT_NEAR(m.predict_value(fm.values.row(0)), mean, 1e-12);
  EXPECT_GE(diag.size(), 1u);
}

TEST(Ols, RecoversLine) {
  Matrix x(0, 1);
  std::vector<double> y;
  for (int i = 0; i < 10; ++i) {
    x.append_row(std::vector<double>{static_cast<double>(i)});
    y.push_back(2.0 * i + 1.0);
  }
  const TrainedModel m = train_regressor(spec(Task::kRegression, Algorithm::kOls), x, y);
  EXPECT_NEAR(m.predict_value(std::vector<double>{0.0}), 1.0, 1e-9);
  EXPECT_NEAR(m.predict_value(std::vector<double>{1.0}) - m.predict_value(std::vector<double>{0.0}),
              2.0, 1e-9);
  const auto pred = m.predict_values(x);
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(pred[i], y[i], 1e-9);
}

TEST(Ols, RankDeficientUsesMinimumNorm) {
  Matrix x(0, 2);
  std::vector<double> y;
  for (int i = 0; i < 8; ++i) {
    x.append_row(std::vector<double>{static_cast<double>(i), static_cast<double>(i)});
    y.push_back(4.0 * i - 2.0);
  }
  const TrainedModel m = train_regressor(spec(Task::kRegression, Algorithm::kOls), x, y);
  const auto pred = m.predict_values(x);
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(pred[i], y[i], 1e-8);
  // Weight is split evenly across the duplicated column.
  const auto w = *m.column_importance();
  EXPECT_NEAR(w[0], 2.0, 1e-8);
  EXPECT_NEAR(w[1], 2.0, 1e-8);
}

TEST(Ridge, SmallAlphaMatchesOls) {
  const FeatureMatrix fm = surrogate_matrix(3, 150, TargetKind::kNumeric);
  Matrix x(0, 8);
  for (std::size_t r = 0; r < fm.rows(); ++r) x.append_row(fm.values.row(r).subspan(0, 8));
  const auto ols = train_regressor(spec(Task::kRegression, Algorithm::kOls), x, fm.targets);
  const auto ridge = train_regressor(spec(Task::kRegression, Algorithm::kRidge, {{"alpha", 1e-10}}),
                                     x, fm.targets);
  const auto a = *ols.column_importance();
  const auto b = *ridge.column_importance();
  for (std::size_t c = 0; c < a.size(); ++c) EXPECT_NEAR(a[c], b[c], 1e-6);
}

TEST(Lasso, LargeAlphaZeroesAllSlopes) {
  const FeatureMatrix fm = surrogate_matrix(3, 100, TargetKind::kNumeric);
  const auto m = train_regressor(spec(Task::kRegression, Algorithm::kLasso, {{"alpha", 1e6}}),
                                 fm.values, fm.targets);
  const auto weights = *m.column_importance();
  for (double w : weights) EXPECT_EQ(w, 0.0);
  const double mean = std::accumulate(fm.targets.begin(), fm.targets.end(), 0.0) /
                      static_cast<double>(fm.targets.size());
  EXPECT_NEAR(m.predict_value(fm.values.row(0)), mean, 1e-12);
  const auto fi = feature_importance(m, fm.columns);
  EXPECT_FALSE(fi.defined);
  EXPECT_FALSE(fi.reason.empty());
}

TEST(Lasso, ZeroAlphaMatchesOls) {
  Matrix x(0, 2);
  std::vector<double> y;
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    const double a = n(rng), b = n(rng);
    x.append_row(std::vector<double>{a, b});
    y.push_back(3.0 * a - b + 0.5 + 0.1 * n(rng));
  }
  const auto ols = train_regressor(spec(Task::kRegression, Algorithm::kOls), x, y);
  const auto lasso = train_regressor(spec(Task::kRegression, Algorithm::kLasso, {{"alpha", 0.0}}), x, y);
  const auto pa = ols.predict_values(x);
  const auto pb = lasso.predict_values(x);
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_NEAR(pa[i], pb[i], 1e-4);
}

TEST(GradientBoosting, TrainingLossNonIncreasing) {
  const FeatureMatrix fr = surrogate_matrix(4, 200, TargetKind::kNumeric);
  const auto reg = train_regressor(spec(Task::kRegression, Algorithm::kGradientBoosting,
                                        {{"n_estimators", 30}}),
                                   fr.values, fr.targets);
  const FeatureMatrix fc = surrogate_matrix(4, 200, TargetKind::kOrdinalClass);
  const auto clf = train_classifier(spec(Task::kClassification, Algorithm::kGradientBoosting,
                                         {{"n_estimators", 30}}),
                                    fc.values, fc.classes, 4);
  for (const TrainedModel* m : {&reg, &clf}) {
    const auto loss = m->training_loss();
    ASSERT_EQ(loss.size(), 31u);
    for (std::size_t i = 1; i < loss.size(); ++i) EXPECT_LE(loss[i], loss[i - 1] + 1e-12);
  }
}

TEST(RandomForest, TunedPresetsTrain) {
  const FeatureMatrix fc = surrogate_matrix(5, 1152, TargetKind::kOrdinalClass);
  ASSERT_EQ(fc.values.cols(), 60u);
  Diagnostics diag;
  const auto clf = train_model(tuned_forest_classifier(), fc, &diag);
  EXPECT_EQ(clf.num_classes(), 4);
  EXPECT_GE(diag.size(), 1u);  // learning_rate is inert
  const FeatureMatrix fr = surrogate_matrix(5, 1152, TargetKind::kNumeric);
  const auto reg = train_model(tuned_forest_regressor(), fr);
  EXPECT_TRUE(std::isfinite(reg.predict_value(fr.values.row(0))));
}

TEST(RandomForest, ImportanceFindsTheOnlySignal) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix x(0, 3);
  std::vector<double> y;
  for (int i = 0; i < 300; ++i) {
    const double a = u(rng), b = u(rng), c = u(rng);
    x.append_row(std::vector<double>{a, b, c});
    y.push_back(std::sin(6.0 * a));
  }
  const auto m = train_regressor(spec(Task::kRegression, Algorithm::kRandomForest,
                                      {{"n_estimators", 30}}),
                                 x, y);
  const auto imp = *m.column_importance();
  const double total = imp[0] + imp[1] + imp[2];
  EXPECT_GT(imp[0] / total, 0.8);
}

TEST(FeatureImportance, SingleFeatureGetsEverything) {
  Matrix x(0, 1);
  std::vector<int> y;
  for (int i = 0; i < 20; ++i) {
    x.append_row(std::vector<double>{static_cast<double>(i)});
    y.push_back(i < 10 ? 0 : 1);
  }
  const auto m = train_classifier(spec(Task::kClassification, Algorithm::kDecisionTree), x, y);
  const std::vector<ColumnInfo> cols = {{Predictor::kContactTime, ColumnKind::kNumeric, std::nullopt}};
  const auto fi = feature_importance(m, cols);
  ASSERT_TRUE(fi.defined);
  EXPECT_DOUBLE_EQ(fi.scores[static_cast<std::size_t>(Predictor::kContactTime)], 1.0);
}

TEST(FeatureImportance, UndefinedForKnnAndNaiveBayes) {
  const FeatureMatrix fm = surrogate_matrix(1, 80, TargetKind::kOrdinalClass);
  for (Algorithm a : {Algorithm::kKnn, Algorithm::kGaussianNb, Algorithm::kBernoulliNb}) {
    const auto m = train_model(spec(Task::kClassification, a), fm);
    const auto fi = feature_importance(m, fm.columns);
    EXPECT_FALSE(fi.defined) << to_string(a);
    EXPECT_FALSE(fi.reason.empty());
  }
}

TEST(Models, Errors) {
  const FeatureMatrix fm = surrogate_matrix(1, 40, TargetKind::kOrdinalClass);
  const std::vector<int> one_class(fm.rows(), 2);
  EXPECT_EQ(error_code_of([&] {
              train_classifier(spec(Task::kClassification, Algorithm::kDecisionTree), fm.values, one_class);
            }),
            ErrorCode::kSingleClass);
  const auto m = train_model(spec(Task::kClassification, Algorithm::kDecisionTree), fm);
  EXPECT_EQ(error_code_of([&] { m.predict_proba(std::vector<double>{1.0, 2.0}); }),
            ErrorCode::kDimensionMismatch);
  EXPECT_EQ(error_code_of([&] { m.predict_value(fm.values.row(0)); }), ErrorCode::kUnsupported);
  std::vector<double> bad(fm.rows(), 1.0);
  bad[3] = NAN;
  EXPECT_EQ(error_code_of([&] {
              train_regressor(spec(Task::kRegression, Algorithm::kOls), fm.values, bad);
            }),
            ErrorCode::kNonFinite);
  EXPECT_EQ(error_code_of([&] {
              train_classifier(spec(Task::kClassification, Algorithm::kRandomForest, {{"n_estimators", 0}}),
                               fm.values, fm.classes);
            }),
            ErrorCode::kSpecInvalid);
}

struct Case {
  Task task;
  Algorithm algorithm;
  std::string name() const {
    return std::string(task == Task::kClassification ? "clf_" : "reg_") +
           std::string(to_string(algorithm));
  }
  friend std::ostream& operator<<(std::ostream& os, const Case& c) { return os << c.name(); }
};

// Contract checks shared by every algorithm.
class EveryAlgorithm : public ::testing::TestWithParam<Case> {};

TEST_P(EveryAlgorithm, DeterministicSerializableConsistent) {
  const auto [task, algorithm] = GetParam();
  const bool clf = task == Task::kClassification;
  const FeatureMatrix fm =
      surrogate_matrix(8, 160, clf ? TargetKind::kOrdinalClass : TargetKind::kNumeric);
  std::map<std::string, double> params;
  if (find_param(algorithm, task, "n_estimators")) params["n_estimators"] = 15;
  const ModelSpec s = spec(task, algorithm, params, 3);
  const TrainedModel a = train_model(s, fm);
  const TrainedModel b = train_model(s, fm);
  const TrainedModel c = TrainedModel::from_json(nlohmann::json::parse(a.to_json().dump()));
  if (clf) {
    const Matrix pa = a.predict_proba(fm.values);
    EXPECT_EQ(pa, b.predict_proba(fm.values));
    EXPECT_EQ(pa, c.predict_proba(fm.values));
    for (std::size_t r = 0; r < pa.rows(); ++r) {
      const auto row = pa.row(r);
      double sum = 0.0;
      for (double p : row) {
        ASSERT_GE(p, 0.0);
        sum += p;
      }
      ASSERT_NEAR(sum, 1.0, 1e-9);
      const int argmax = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
      ASSERT_EQ(a.predict_class(fm.values.row(r)), argmax);
    }
  } else {
    const auto pa = a.predict_values(fm.values);
    EXPECT_EQ(pa, b.predict_values(fm.values));
    EXPECT_EQ(pa, c.predict_values(fm.values));
    for (double v : pa) ASSERT_TRUE(std::isfinite(v));
  }
  const auto fi = feature_importance(a, fm.columns);
  if (fi.defined) {
    double sum = 0.0;
    for (double v : fi.scores) {
      EXPECT_GE(v, 0.0);
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

std::vector<Case> all_cases() {
  std::vector<Case> out;
  for (Task t : {Task::kClassification, Task::kRegression}) {
    for (Algorithm a : algorithms_for(t)) out.push_back({t, a});
  }
  return out;
}

INSTANTIATE_TEST_SUITE_P(All, EveryAlgorithm, ::testing::ValuesIn(all_cases()),
                         [](const ::testing::TestParamInfo<Case>& info) {
                           return info.param.name();
                         });

// Row order does not matter to the deterministic learners.
TEST(Models, PermutationInvariance) {
  const FeatureMatrix fm = surrogate_matrix(9, 120, TargetKind::kNumeric);
  std::vector<std::size_t> perm(fm.rows());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(1));
  const FeatureMatrix shuffled = fm.subset(perm);
  for (Algorithm a : {Algorithm::kKnn, Algorithm::kOls, Algorithm::kRidge}) {
    const auto p1 = train_model(spec(Task::kRegression, a), fm).predict_values(fm.values);
    const auto p2 = train_model(spec(Task::kRegression, a), shuffled).predict_values(fm.values);
    for (std::size_t i = 0; i < p1.size(); ++i) ASSERT_NEAR(p1[i], p2[i], 1e-8) << to_string(a);
  }
  const FeatureMatrix fc = surrogate_matrix(9, 120, TargetKind::kOrdinalClass);
  const FeatureMatrix sc = fc.subset(perm);
  const auto q1 = train_model(spec(Task::kClassification, Algorithm::kGaussianNb), fc).predict_proba(fc.values);
  const auto q2 = train_model(spec(Task::kClassification, Algorithm::kGaussianNb), sc).predict_proba(fc.values);
  for (std::size_t i = 0; i < q1.data().size(); ++i) ASSERT_NEAR(q1.data()[i], q2.data()[i], 1e-9);
}

TEST(Models, ForestNotWorseThanSingleTree) {
  const FeatureMatrix train = surrogate_matrix(10, 600, TargetKind::kOrdinalClass);
  SynthConfig cfg;
  cfg.seed = 10;
  cfg.rows = 600;
  const auto records = synthesize(cfg);
  SynthConfig other;
  other.seed = 11;
  other.rows = 400;
  const auto test_records = synthesize(other);
  const Preprocessor pre = fit_preprocessor(records, NormMethod::kZScore);
  const FeatureMatrix test = assemble_matrix(test_records, pre, TargetKind::kOrdinalClass);
  const auto dt = train_model(spec(Task::kClassification, Algorithm::kDecisionTree), train);
  const auto rf = train_model(spec(Task::kClassification, Algorithm::kRandomForest), train);
  EXPECT_GE(accuracy(rf.predict_classes(train.values), train.classes),
            accuracy(dt.predict_classes(train.values), train.classes) - 0.02);
  EXPECT_GE(accuracy(rf.predict_classes(test.values), test.classes),
            accuracy(dt.predict_classes(test.values), test.classes));
}

TEST(Tree, MidpointThresholdsAndDepthLimit) {
  Matrix x(0, 1);
  std::vector<double> y;
  for (double v : {1.0, 2.0, 4.0, 8.0}) {
    x.append_row(std::vector<double>{v});
    y.push_back(v < 3.0 ? 0.0 : 10.0);
  }
  std::vector<std::size_t> rows = {0, 1, 2, 3};
  TreeParams p;
  p.criterion = Criterion::kSquaredError;
  p.max_depth = 1;
  Rng rng(0);
  const DecisionTree t = DecisionTree::fit(x, TreeTargets{{}, y}, rows, {}, p, rng);
  ASSERT_EQ(t.nodes().size(), 3u);
  EXPECT_EQ(t.nodes()[0].threshold, 3.0);
  EXPECT_EQ(t.depth(), 1u);
  EXPECT_EQ(DecisionTree::from_json(t.to_json()).nodes().size(), 3u);
}

}  // namespace
}  // namespace palml
