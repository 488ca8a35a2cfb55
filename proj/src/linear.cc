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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "model_impl.h"

namespace palml::detail {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd to_eigen(const Matrix& x) {
  MatrixXd m(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = x(r, c);
    }
  }
  return m;
}

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

class Linear final : public Model {
 public:
  Linear(std::vector<double> coef, double intercept)
      : coef_(std::move(coef)), intercept_(intercept) {}

  double predict_value(std::span<const double> x) const override {
    double y = intercept_;
    for (std::size_t j = 0; j < coef_.size(); ++j) y += coef_[j] * x[j];
    return y;
  }

  std::optional<std::vector<double>> column_importance() const override {
    std::vector<double> out(coef_.size());
    for (std::size_t j = 0; j < coef_.size(); ++j) out[j] = std::abs(coef_[j]);
    return out;
  }

  nlohmann::json to_json() const override {
    return {{"coef", coef_}, {"intercept", intercept_}};
  }

 private:
  std::vector<double> coef_;
  double intercept_;
};

// Minimizes (1/2n)||y - Xw||^2 + alpha*l1*|w|_1 + alpha*(1-l1)/2*||w||^2 on
// centered data by cyclic coordinate descent.
VectorXd coordinate_descent(const MatrixXd& x, const VectorXd& y, double alpha,
                            double l1_ratio) {
  const auto n = static_cast<double>(x.rows());
  const Eigen::Index p = x.cols();
  VectorXd w = VectorXd::Zero(p);
  VectorXd resid = y;
  const VectorXd norms = x.colwise().squaredNorm().transpose();
  const double l1 = alpha * l1_ratio * n;
  const double l2 = alpha * (1.0 - l1_ratio) * n;
  for (int sweep = 0; sweep < 10000; ++sweep) {
    double max_delta = 0.0;
    double max_w = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (norms(j) <= 0.0) continue;
      const double old = w(j);
      const double rho = x.col(j).dot(resid) + norms(j) * old;
      const double next = soft_threshold(rho, l1) / (norms(j) + l2);
      if (next != old) {
        resid -= x.col(j) * (next - old);
        w(j) = next;
      }
      max_delta = std::max(max_delta, std::abs(next - old));
      max_w = std::max(max_w, std::abs(next));
    }
    if (max_w == 0.0 || max_delta / max_w < 1e-6) break;
  }
  return w;
}

}  // namespace

std::unique_ptr<Model> train_linear(const TrainInput& in) {
  const MatrixXd x = to_eigen(in.x);
  const VectorXd y = Eigen::Map<const VectorXd>(in.values.data(),
                                                static_cast<Eigen::Index>(in.values.size()));
  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const double y_mean = y.mean();
  const MatrixXd xc = x.rowwise() - x_mean;
  const VectorXd yc = y.array() - y_mean;

  VectorXd w;
  const ModelSpec& s = in.spec;
  switch (s.algorithm) {
    case Algorithm::kOls: {
      // Normal equations when X has full column rank, else the minimum-norm
      // pseudo-inverse solution (full one-hot groups are rank deficient
      // after centering).
      Eigen::ColPivHouseholderQR<MatrixXd> qr(xc);
      if (qr.rank() == xc.cols()) {
        w = (xc.transpose() * xc).ldlt().solve(xc.transpose() * yc);
      } else {
        w = Eigen::CompleteOrthogonalDecomposition<MatrixXd>(xc).solve(yc);
      }
      break;
    }
    case Algorithm::kRidge: {
      MatrixXd a = xc.transpose() * xc;
      a.diagonal().array() += s.param_or("alpha", 1.0);
      w = a.ldlt().solve(xc.transpose() * yc);
      break;
    }
    case Algorithm::kLasso:
      w = coordinate_descent(xc, yc, s.param_or("alpha", 1.0), 1.0);
      break;
    case Algorithm::kElasticNet:
      w = coordinate_descent(xc, yc, s.param_or("alpha", 1.0),
                             s.param_or("l1_ratio", 0.5));
      break;
    default:
      throw Error(ErrorCode::kSpecInvalid, "not a linear regressor");
  }
  if (!w.allFinite()) {
    throw Error(ErrorCode::kNonFinite, "linear solve produced non-finite weights");
  }
  const double intercept = y_mean - x_mean.dot(w);
  return std::make_unique<Linear>(std::vector<double>(w.data(), w.data() + w.size()),
                                  intercept);
}

std::unique_ptr<Model> load_linear(const nlohmann::json& j) {
  return std::make_unique<Linear>(j.at("coef").get<std::vector<double>>(),
                                  j.at("intercept").get<double>());
}

namespace {

// Multinomial logistic regression. W is K x (p + 1); the last column is the
// unpenalized intercept.
class Logistic final : public Model {
 public:
  explicit Logistic(MatrixXd w) : w_(std::move(w)) {}

  void predict_proba(std::span<const double> x,
                     std::span<double> out) const override {
    const Eigen::Index p = w_.cols() - 1;
    std::vector<double> scores(static_cast<std::size_t>(w_.rows()));
    for (Eigen::Index k = 0; k < w_.rows(); ++k) {
      double z = w_(k, p);
      for (Eigen::Index j = 0; j < p; ++j) z += w_(k, j) * x[static_cast<std::size_t>(j)];
      scores[static_cast<std::size_t>(k)] = z;
    }
    softmax(scores, out);
  }

  std::optional<std::vector<double>> column_importance() const override {
    const Eigen::Index p = w_.cols() - 1;
    std::vector<double> out(static_cast<std::size_t>(p), 0.0);
    for (Eigen::Index j = 0; j < p; ++j) {
      out[static_cast<std::size_t>(j)] = w_.col(j).cwiseAbs().sum();
    }
    return out;
  }

  nlohmann::json to_json() const override {
    std::vector<double> flat;
    for (Eigen::Index k = 0; k < w_.rows(); ++k) {
      for (Eigen::Index j = 0; j < w_.cols(); ++j) flat.push_back(w_(k, j));
    }
    return {{"rows", w_.rows()}, {"cols", w_.cols()}, {"weights", flat}};
  }

  static std::unique_ptr<Model> load(const nlohmann::json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto flat = j.at("weights").get<std::vector<double>>();
    if (flat.size() != static_cast<std::size_t>(rows * cols)) {
      throw Error(ErrorCode::kSchemaMismatch, "logreg weight count mismatch");
    }
    MatrixXd w(rows, cols);
    for (Eigen::Index k = 0; k < rows; ++k) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        w(k, c) = flat[static_cast<std::size_t>(k * cols + c)];
      }
    }
    return std::make_unique<Logistic>(std::move(w));
  }

 private:
  MatrixXd w_;
};

}  // namespace

std::unique_ptr<Model> train_logistic(const TrainInput& in) {
  const Eigen::Index n = static_cast<Eigen::Index>(in.x.rows());
  const Eigen::Index p = static_cast<Eigen::Index>(in.x.cols());
  const Eigen::Index k = in.num_classes;
  const double alpha = in.spec.param_or("alpha", 1.0);

  MatrixXd xa(n, p + 1);
  xa.leftCols(p) = to_eigen(in.x);
  xa.col(p).setOnes();
  MatrixXd onehot = MatrixXd::Zero(n, k);
  for (Eigen::Index i = 0; i < n; ++i) onehot(i, in.classes[static_cast<std::size_t>(i)]) = 1.0;

  // Mean cross-entropy plus alpha / (2n) * ||W without intercept||^2.
  auto objective = [&](const MatrixXd& w, MatrixXd* grad) {
    MatrixXd z = xa * w.transpose();  // n x k
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double m = z.row(i).maxCoeff();
      z.row(i).array() = (z.row(i).array() - m).exp();
      const double s = z.row(i).sum();
      z.row(i) /= s;
      for (Eigen::Index c = 0; c < k; ++c) {
        if (onehot(i, c) > 0.0) loss -= std::log(std::max(z(i, c), 1e-300));
      }
    }
    const double nd = static_cast<double>(n);
    loss /= nd;
    const MatrixXd wp = w.leftCols(p);
    loss += alpha / (2.0 * nd) * wp.squaredNorm();
    if (grad != nullptr) {
      *grad = (z - onehot).transpose() * xa / nd;
      grad->leftCols(p) += alpha / nd * wp;
    }
    return loss;
  };

  MatrixXd w = MatrixXd::Zero(k, p + 1);
  MatrixXd grad;
  double loss = objective(w, &grad);
  double step = 1.0;
  for (int iter = 0; iter < 2000; ++iter) {
    const double gnorm2 = grad.squaredNorm();
    if (gnorm2 < 1e-14) break;
    MatrixXd next;
    double next_loss = loss;
    bool accepted = false;
    for (int tries = 0; tries < 50; ++tries) {
      next = w - step * grad;
      next_loss = objective(next, nullptr);
      if (next_loss <= loss - 0.5 * step * gnorm2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    w = std::move(next);
    const double prev = loss;
    loss = objective(w, &grad);
    step = std::min(step * 2.0, 64.0);
    if (std::abs(prev - loss) < 1e-9 * std::max(1.0, std::abs(prev))) break;
  }
  return std::make_unique<Logistic>(std::move(w));
}

std::unique_ptr<Model> load_logistic(const nlohmann::json& j) {
  return Logistic::load(j);
}

}  // namespace palml::detail
