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
#include <limits>
#include <numeric>
#include <string>

#include "palml/evaluate.h"

namespace palml {
namespace {

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(a) + " predictions for " + std::to_string(b) +
                    " actual values");
  }
}

// JSON has no NaN; undefined values become null.
nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

std::size_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t t = 0;
  for (int c = 0; c < num_classes_; ++c) t += at(c, c);
  return t;
}

RocCurve roc_curve(std::span<const int> actual, std::span<const double> scores,
                   int cls) {
  check_lengths(scores.size(), actual.size());
  RocCurve curve;
  curve.cls = cls;
  std::vector<std::size_t> order(actual.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  double pos = 0.0;
  for (int a : actual) pos += a == cls ? 1.0 : 0.0;
  const double neg = static_cast<double>(actual.size()) - pos;
  curve.defined = pos > 0.0 && neg > 0.0;

  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  double tp = 0.0;
  double fp = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (actual[order[i]] == cls) {
      tp += 1.0;
    } else {
      fp += 1.0;
    }
    // Emit a point only after the last row of a run of equal scores.
    if (i + 1 < order.size() && scores[order[i + 1]] == scores[order[i]]) continue;
    curve.points.push_back({scores[order[i]], ratio(fp, neg), ratio(tp, pos)});
  }
  if (curve.defined) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
      const auto& a = curve.points[i - 1];
      const auto& b = curve.points[i];
      area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
    }
    curve.auc = area;
  } else {
    curve.auc = std::numeric_limits<double>::quiet_NaN();
  }
  return curve;
}

double roc_auc_ovr(std::span<const int> actual, const Matrix& scores) {
  check_lengths(scores.rows(), actual.size());
  double sum = 0.0;
  int defined = 0;
  for (std::size_t c = 0; c < scores.cols(); ++c) {
    const std::vector<double> col = scores.column(c);
    const RocCurve curve = roc_curve(actual, col, static_cast<int>(c));
    if (!curve.defined) continue;
    sum += curve.auc;
    ++defined;
  }
  return defined > 0 ? sum / defined : std::numeric_limits<double>::quiet_NaN();
}

ClassificationReport classification_metrics(std::span<const int> predicted,
                                            std::span<const int> actual,
                                            const Matrix& proba,
                                            int num_classes) {
  check_lengths(predicted.size(), actual.size());
  check_lengths(proba.rows(), actual.size());
  if (actual.empty()) throw Error(ErrorCode::kTooSmall, "no rows to score");
  if (proba.cols() != static_cast<std::size_t>(num_classes)) {
    throw Error(ErrorCode::kDimensionMismatch,
                "probability matrix has " + std::to_string(proba.cols()) +
                    " columns for " + std::to_string(num_classes) + " classes");
  }
  for (std::size_t r = 0; r < proba.rows(); ++r) {
    double s = 0.0;
    for (double p : proba.row(r)) {
      if (!(p >= -1e-12)) {
        throw Error(ErrorCode::kBadProba, "negative or NaN probability in row " +
                                              std::to_string(r));
      }
      s += p;
    }
    if (std::abs(s - 1.0) > 1e-6) {
      throw Error(ErrorCode::kBadProba,
                  "probabilities in row " + std::to_string(r) + " sum to " +
                      std::to_string(s));
    }
  }

  ClassificationReport rep;
  rep.confusion = ConfusionMatrix(num_classes);
  for (std::size_t i = 0; i < actual.size(); ++i) {
    for (int label : {actual[i], predicted[i]}) {
      if (label < 0 || label >= num_classes) {
        throw Error(ErrorCode::kInvalidValue,
                    "class label " + std::to_string(label) + " out of range");
      }
    }
    rep.confusion.add(actual[i], predicted[i]);
  }
  const auto n = static_cast<double>(actual.size());
  const ConfusionMatrix& cm = rep.confusion;
  rep.accuracy = static_cast<double>(cm.trace()) / n;

  std::vector<double> row_sum(static_cast<std::size_t>(num_classes), 0.0);
  std::vector<double> col_sum(static_cast<std::size_t>(num_classes), 0.0);
  for (int a = 0; a < num_classes; ++a) {
    for (int p = 0; p < num_classes; ++p) {
      row_sum[static_cast<std::size_t>(a)] += static_cast<double>(cm.at(a, p));
      col_sum[static_cast<std::size_t>(p)] += static_cast<double>(cm.at(a, p));
    }
  }

  int present = 0;
  for (int c = 0; c < num_classes; ++c) {
    const auto cu = static_cast<std::size_t>(c);
    ClassStats s;
    s.tp = cm.at(c, c);
    s.fn = static_cast<std::size_t>(row_sum[cu]) - s.tp;
    s.fp = static_cast<std::size_t>(col_sum[cu]) - s.tp;
    s.tn = actual.size() - s.tp - s.fn - s.fp;
    s.present = row_sum[cu] > 0.0 || col_sum[cu] > 0.0;
    const auto tp = static_cast<double>(s.tp);
    const auto fp = static_cast<double>(s.fp);
    const auto fn = static_cast<double>(s.fn);
    s.recall = ratio(tp, tp + fn);
    s.precision = ratio(tp, tp + fp);
    s.f1 = ratio(2.0 * tp, 2.0 * tp + fp + fn);
    s.jaccard = ratio(tp, tp + fp + fn);
    if (s.present) {
      ++present;
      rep.recall += s.recall;
      rep.precision += s.precision;
      rep.f1 += s.f1;
      rep.jaccard += s.jaccard;
    }
    rep.per_class.push_back(s);
  }
  rep.recall /= present;
  rep.precision /= present;
  rep.f1 /= present;
  rep.jaccard /= present;

  const bool all_correct = cm.trace() == actual.size();
  double pe = 0.0;
  double sum_pt = 0.0;
  double sum_p2 = 0.0;
  double sum_t2 = 0.0;
  for (std::size_t c = 0; c < row_sum.size(); ++c) {
    pe += row_sum[c] * col_sum[c];
    sum_pt += row_sum[c] * col_sum[c];
    sum_p2 += col_sum[c] * col_sum[c];
    sum_t2 += row_sum[c] * row_sum[c];
  }
  pe /= n * n;
  rep.kappa = 1.0 - pe > 1e-15 ? (rep.accuracy - pe) / (1.0 - pe)
                               : (all_correct ? 1.0 : 0.0);
  const double correct = static_cast<double>(cm.trace());
  const double den = std::sqrt((n * n - sum_p2) * (n * n - sum_t2));
  rep.mcc = den > 0.0 ? (correct * n - sum_pt) / den : (all_correct ? 1.0 : 0.0);

  double auc_sum = 0.0;
  int auc_defined = 0;
  for (int c = 0; c < num_classes; ++c) {
    const std::vector<double> col = proba.column(static_cast<std::size_t>(c));
    RocCurve curve = roc_curve(actual, col, c);
    if (curve.defined) {
      auc_sum += curve.auc;
      ++auc_defined;
    }
    rep.roc.push_back(std::move(curve));
  }
  rep.auc = auc_defined > 0 ? auc_sum / auc_defined
                            : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

RegressionReport regression_metrics(std::span<const double> predicted,
                                    std::span<const double> actual) {
  check_lengths(predicted.size(), actual.size());
  if (actual.size() < 2) {
    throw Error(ErrorCode::kTooSmall, "regression metrics need at least 2 rows");
  }
  const auto n = static_cast<double>(actual.size());
  const double mean = std::accumulate(actual.begin(), actual.end(), 0.0) / n;
  double ss_tot = 0.0;
  double ss_res = 0.0;
  RegressionReport rep;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double e = actual[i] - predicted[i];
    ss_res += e * e;
    ss_tot += (actual[i] - mean) * (actual[i] - mean);
    rep.mae += std::abs(e);
    rep.max_error = std::max(rep.max_error, std::abs(e));
  }
  if (ss_tot <= 0.0) {
    throw Error(ErrorCode::kZeroVariance, "actual values are constant; R^2 undefined");
  }
  rep.r2 = 1.0 - ss_res / ss_tot;
  rep.mae /= n;
  rep.mse = ss_res / n;
  rep.rmse = std::sqrt(rep.mse);
  return rep;
}

std::vector<std::pair<std::string, double>> metric_values(
    const ClassificationReport& r) {
  return {{"accuracy", r.accuracy}, {"f1", r.f1},       {"recall", r.recall},
          {"precision", r.precision}, {"jaccard", r.jaccard}, {"auc", r.auc},
          {"kappa", r.kappa},       {"mcc", r.mcc}};
}

std::vector<std::pair<std::string, double>> metric_values(
    const RegressionReport& r) {
  return {{"r2", r.r2},
          {"mae", r.mae},
          {"mse", r.mse},
          {"rmse", r.rmse},
          {"max_error", r.max_error}};
}

nlohmann::json to_json(const ClassificationReport& r) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, v] : metric_values(r)) j[name] = number_or_null(v);
  auto per_class = nlohmann::json::array();
  for (std::size_t c = 0; c < r.per_class.size(); ++c) {
    const ClassStats& s = r.per_class[c];
    per_class.push_back({{"class", c},
                         {"tp", s.tp},
                         {"fp", s.fp},
                         {"fn", s.fn},
                         {"tn", s.tn},
                         {"recall", s.recall},
                         {"precision", s.precision},
                         {"f1", s.f1},
                         {"jaccard", s.jaccard},
                         {"auc", c < r.roc.size() ? number_or_null(r.roc[c].auc)
                                                  : nlohmann::json(nullptr)}});
  }
  j["per_class"] = std::move(per_class);
  auto cm = nlohmann::json::array();
  for (int a = 0; a < r.confusion.num_classes(); ++a) {
    auto row = nlohmann::json::array();
    for (int p = 0; p < r.confusion.num_classes(); ++p) row.push_back(r.confusion.at(a, p));
    cm.push_back(std::move(row));
  }
  j["confusion"] = std::move(cm);
  return j;
}

nlohmann::json to_json(const RegressionReport& r) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, v] : metric_values(r)) j[name] = number_or_null(v);
  return j;
}

}  // namespace palml
