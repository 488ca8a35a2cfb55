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
#include <numbers>

#include "model_impl.h"

namespace palml::detail {
namespace {

// Rows are classes, columns features.
class GaussianNb final : public Model {
 public:
  GaussianNb(std::vector<double> log_prior, Matrix mean, Matrix var)
      : log_prior_(std::move(log_prior)),
        mean_(std::move(mean)),
        var_(std::move(var)) {}

  void predict_proba(std::span<const double> x,
                     std::span<double> out) const override {
    std::vector<double> scores(out.size());
    for (std::size_t c = 0; c < out.size(); ++c) {
      double s = log_prior_[c];
      if (std::isinf(s)) {
        scores[c] = s;
        continue;
      }
      for (std::size_t j = 0; j < mean_.cols(); ++j) {
        const double v = var_(c, j);
        const double d = x[j] - mean_(c, j);
        s -= 0.5 * (std::log(2.0 * std::numbers::pi * v) + d * d / v);
      }
      scores[c] = s;
    }
    softmax(scores, out);
  }

  nlohmann::json to_json() const override {
    return {{"log_prior", log_prior_},
            {"mean", matrix_to_json(mean_)},
            {"var", matrix_to_json(var_)}};
  }

  static std::unique_ptr<Model> load(const nlohmann::json& j) {
    std::vector<double> prior;
    for (const auto& v : j.at("log_prior")) {
      prior.push_back(v.is_null() ? -INFINITY : v.get<double>());
    }
    return std::make_unique<GaussianNb>(std::move(prior),
                                        matrix_from_json(j.at("mean")),
                                        matrix_from_json(j.at("var")));
  }

 private:
  std::vector<double> log_prior_;
  Matrix mean_;
  Matrix var_;
};

// Features binarized at x > 0, Laplace/Lidstone smoothing alpha.
class BernoulliNb final : public Model {
 public:
  BernoulliNb(std::vector<double> log_prior, Matrix log_p, Matrix log_q)
      : log_prior_(std::move(log_prior)),
        log_p_(std::move(log_p)),
        log_q_(std::move(log_q)) {}

  void predict_proba(std::span<const double> x,
                     std::span<double> out) const override {
    std::vector<double> scores(out.size());
    for (std::size_t c = 0; c < out.size(); ++c) {
      double s = log_prior_[c];
      if (std::isinf(s)) {
        scores[c] = s;
        continue;
      }
      for (std::size_t j = 0; j < log_p_.cols(); ++j) {
        s += x[j] > 0.0 ? log_p_(c, j) : log_q_(c, j);
      }
      scores[c] = s;
    }
    softmax(scores, out);
  }

  nlohmann::json to_json() const override {
    return {{"log_prior", log_prior_},
            {"log_p", matrix_to_json(log_p_)},
            {"log_q", matrix_to_json(log_q_)}};
  }

  static std::unique_ptr<Model> load(const nlohmann::json& j) {
    std::vector<double> prior;
    for (const auto& v : j.at("log_prior")) {
      prior.push_back(v.is_null() ? -INFINITY : v.get<double>());
    }
    return std::make_unique<BernoulliNb>(std::move(prior),
                                         matrix_from_json(j.at("log_p")),
                                         matrix_from_json(j.at("log_q")));
  }

 private:
  std::vector<double> log_prior_;
  Matrix log_p_;
  Matrix log_q_;
};

std::vector<double> class_counts_of(const TrainInput& in) {
  std::vector<double> counts(static_cast<std::size_t>(in.num_classes), 0.0);
  for (int c : in.classes) counts[static_cast<std::size_t>(c)] += 1.0;
  return counts;
}

std::vector<double> log_priors(const std::vector<double>& counts, double n) {
  std::vector<double> out(counts.size());
  for (std::size_t c = 0; c < counts.size(); ++c) {
    out[c] = counts[c] > 0.0 ? std::log(counts[c] / n) : -INFINITY;
  }
  return out;
}

}  // namespace

std::unique_ptr<Model> train_gaussian_nb(const TrainInput& in) {
  const std::size_t n = in.x.rows();
  const std::size_t p = in.x.cols();
  const auto k = static_cast<std::size_t>(in.num_classes);
  const std::vector<double> counts = class_counts_of(in);

  Matrix mean(k, p, 0.0);
  Matrix var(k, p, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(in.classes[i]);
    for (std::size_t j = 0; j < p; ++j) mean(c, j) += in.x(i, j);
  }
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t j = 0; j < p; ++j) {
      if (counts[c] > 0.0) mean(c, j) /= counts[c];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(in.classes[i]);
    for (std::size_t j = 0; j < p; ++j) {
      const double d = in.x(i, j) - mean(c, j);
      var(c, j) += d * d;
    }
  }
  // Smoothing: 1e-9 times the largest feature variance over all rows.
  double max_var = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += in.x(i, j);
    m /= static_cast<double>(n);
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) v += (in.x(i, j) - m) * (in.x(i, j) - m);
    max_var = std::max(max_var, v / static_cast<double>(n));
  }
  const double epsilon = std::max(1e-9 * max_var, 1e-12);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t j = 0; j < p; ++j) {
      var(c, j) = (counts[c] > 0.0 ? var(c, j) / counts[c] : 1.0) + epsilon;
    }
  }
  return std::make_unique<GaussianNb>(log_priors(counts, static_cast<double>(n)),
                                      std::move(mean), std::move(var));
}

std::unique_ptr<Model> load_gaussian_nb(const nlohmann::json& j) {
  return GaussianNb::load(j);
}

std::unique_ptr<Model> train_bernoulli_nb(const TrainInput& in) {
  const std::size_t n = in.x.rows();
  const std::size_t p = in.x.cols();
  const auto k = static_cast<std::size_t>(in.num_classes);
  const double alpha = in.spec.param_or("alpha", 1.0);
  const std::vector<double> counts = class_counts_of(in);

  Matrix ones(k, p, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(in.classes[i]);
    for (std::size_t j = 0; j < p; ++j) {
      if (in.x(i, j) > 0.0) ones(c, j) += 1.0;
    }
  }
  Matrix log_p(k, p);
  Matrix log_q(k, p);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t j = 0; j < p; ++j) {
      const double prob = (ones(c, j) + alpha) / (counts[c] + 2.0 * alpha);
      log_p(c, j) = std::log(prob);
      log_q(c, j) = std::log1p(-prob);
    }
  }
  return std::make_unique<BernoulliNb>(log_priors(counts, static_cast<double>(n)),
                                       std::move(log_p), std::move(log_q));
}

std::unique_ptr<Model> load_bernoulli_nb(const nlohmann::json& j) {
  return BernoulliNb::load(j);
}

}  // namespace palml::detail
