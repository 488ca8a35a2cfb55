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

#include "palml/tree.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "palml/errors.h"

namespace palml {
namespace {

constexpr double kTol = 1e-12;

struct SplitCandidate {
  int feature = -1;
  double threshold = 0.0;
  double score = -std::numeric_limits<double>::infinity();
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const TreeTargets& targets,
              std::span<const double> weights, const TreeParams& params,
              Rng& rng)
      : x_(x), targets_(targets), weights_(weights), params_(params), rng_(rng) {
    if (params_.criterion == Criterion::kGini) {
      left_.resize(static_cast<std::size_t>(params_.num_classes));
      total_.resize(static_cast<std::size_t>(params_.num_classes));
    }
    features_.resize(x.cols());
    std::iota(features_.begin(), features_.end(), 0);
    // Column-major copy: split scans walk one feature at a time.
    xt_.resize(x.rows() * x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
      for (std::size_t c = 0; c < x.cols(); ++c) xt_[c * x.rows() + r] = x(r, c);
    }
    // Columns with at most two distinct values overall (one-hot blocks) are
    // two-valued in every node and never need sorting.
    two_valued_.assign(x.cols(), true);
    for (std::size_t c = 0; c < x.cols(); ++c) {
      const double* col = xt_.data() + c * x.rows();
      double other = col[0];
      for (std::size_t r = 1; r < x.rows(); ++r) {
        if (col[r] == col[0] || col[r] == other) continue;
        if (other != col[0]) {
          two_valued_[c] = false;
          break;
        }
        other = col[r];
      }
    }
  }

  std::vector<TreeNode> build(std::vector<std::size_t> rows) {
    rows_ = std::move(rows);
    grow(0, rows_.size(), 0);
    return std::move(nodes_);
  }

 private:
  double value(std::size_t r, std::size_t f) const {
    return xt_[f * x_.rows() + r];
  }

  double weight(std::size_t r) const {
    return weights_.empty() ? 1.0 : weights_[r];
  }

  // Fills node statistics; returns per-unit-weight impurity.
  void describe(TreeNode& node, std::size_t begin, std::size_t end) {
    node.samples = end - begin;
    double w = 0.0;
    if (params_.criterion == Criterion::kGini) {
      std::vector<double> counts(static_cast<std::size_t>(params_.num_classes), 0.0);
      for (std::size_t i = begin; i < end; ++i) {
        const std::size_t r = rows_[i];
        counts[static_cast<std::size_t>(targets_.classes[r])] += weight(r);
        w += weight(r);
      }
      double sq = 0.0;
      for (double& c : counts) {
        sq += c * c;
        c = w > 0.0 ? c / w : 0.0;
      }
      node.impurity = w > 0.0 ? std::max(0.0, 1.0 - sq / (w * w)) : 0.0;
      node.value = std::move(counts);
    } else {
      double sum = 0.0;
      double sumsq = 0.0;
      for (std::size_t i = begin; i < end; ++i) {
        const std::size_t r = rows_[i];
        const double y = targets_.values[r];
        const double wr = weight(r);
        w += wr;
        sum += wr * y;
        sumsq += wr * y * y;
      }
      const double mu = w > 0.0 ? sum / w : 0.0;
      node.impurity = w > 0.0 ? std::max(0.0, sumsq / w - mu * mu) : 0.0;
      node.value = {mu};
    }
    node.weight = w;
  }

  int grow(std::size_t begin, std::size_t end, std::size_t depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    describe(nodes_.back(), begin, end);
    const std::size_t n = end - begin;
    const TreeNode& node = nodes_.back();
    const bool stop =
        (params_.max_depth > 0 && depth >= params_.max_depth) ||
        n < params_.min_samples_split || n < 2 * params_.min_samples_leaf ||
        node.impurity <= kTol;
    if (stop) return id;

    const SplitCandidate best = find_split(begin, end);
    if (best.feature < 0) return id;

    const auto f = static_cast<std::size_t>(best.feature);
    const auto mid_it = std::partition(
        rows_.begin() + static_cast<std::ptrdiff_t>(begin),
        rows_.begin() + static_cast<std::ptrdiff_t>(end),
        [&](std::size_t r) { return value(r, f) <= best.threshold; });
    const auto mid = static_cast<std::size_t>(mid_it - rows_.begin());

    const int left = grow(begin, mid, depth + 1);
    const int right = grow(mid, end, depth + 1);
    TreeNode& self = nodes_[static_cast<std::size_t>(id)];
    self.feature = best.feature;
    self.threshold = best.threshold;
    self.left = left;
    self.right = right;
    return id;
  }

  // Draws features without replacement until max_features non-constant ones
  // are found (or all are exhausted); returns them in ascending order.
  std::vector<std::size_t> candidate_features(std::size_t begin,
                                              std::size_t end) {
    const std::size_t p = features_.size();
    const std::size_t want = params_.max_features == 0
                                 ? p
                                 : std::min(params_.max_features, p);
    std::vector<std::size_t> chosen;
    bounds_.clear();
    for (std::size_t i = 0; i < p && chosen.size() < want; ++i) {
      if (want < p) {
        const std::size_t j = i + uniform_index(rng_, p - i);
        std::swap(features_[i], features_[j]);
      }
      const std::size_t f = features_[i];
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t k = begin; k < end; ++k) {
        const double v = value(rows_[k], f);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi - lo <= kTol) continue;
      chosen.push_back(f);
      bounds_.emplace_back(lo, hi);
    }
    // Sort features ascending, keeping bounds aligned.
    std::vector<std::size_t> order(chosen.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return chosen[a] < chosen[b]; });
    std::vector<std::size_t> sorted;
    std::vector<std::pair<double, double>> sorted_bounds;
    for (std::size_t o : order) {
      sorted.push_back(chosen[o]);
      sorted_bounds.push_back(bounds_[o]);
    }
    bounds_ = std::move(sorted_bounds);
    return sorted;
  }

  SplitCandidate find_split(std::size_t begin, std::size_t end) {
    SplitCandidate best;
    const std::vector<std::size_t> features = candidate_features(begin, end);
    // The parent term is constant per node, so candidates are compared by
    // the children's "purity" score alone:
    //   gini: sum_c l_c^2 / w_l + sum_c r_c^2 / w_r
    //   mse:  s_l^2 / w_l + s_r^2 / w_r
    for (std::size_t fi = 0; fi < features.size(); ++fi) {
      const std::size_t f = features[fi];
      if (params_.random_thresholds) {
        const auto [lo, hi] = bounds_[fi];
        const double t = lo + uniform01(rng_) * (hi - lo);
        const double score = score_threshold(begin, end, f, t);
        if (score > best.score + kTol) best = {static_cast<int>(f), t, score};
      } else if (two_valued_[f]) {
        // One candidate only (one-hot columns); no sort needed.
        const auto [lo, hi] = bounds_[fi];
        double t = lo + (hi - lo) / 2.0;
        if (t >= hi) t = lo;
        const double score = score_threshold(begin, end, f, t);
        if (score > best.score + kTol) best = {static_cast<int>(f), t, score};
      } else {
        scan_feature(begin, end, f, best);
      }
    }
    return best;
  }

  double score_threshold(std::size_t begin, std::size_t end, std::size_t f,
                         double t) {
    std::size_t n_left = 0;
    reset_totals();
    for (std::size_t k = begin; k < end; ++k) {
      const std::size_t r = rows_[k];
      const bool go_left = value(r, f) <= t;
      n_left += go_left ? 1 : 0;
      add(r, go_left);
    }
    const std::size_t n_right = (end - begin) - n_left;
    if (n_left < params_.min_samples_leaf || n_right < params_.min_samples_leaf ||
        n_left == 0 || n_right == 0) {
      return -std::numeric_limits<double>::infinity();
    }
    return children_score();
  }

  void scan_feature(std::size_t begin, std::size_t end, std::size_t f,
                    SplitCandidate& best) {
    sorted_.clear();
    for (std::size_t k = begin; k < end; ++k) {
      const std::size_t r = rows_[k];
      sorted_.emplace_back(value(r, f), r);
    }
    std::sort(sorted_.begin(), sorted_.end());
    reset_totals();
    for (const auto& [v, r] : sorted_) add(r, /*left=*/false);
    const std::size_t n = sorted_.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      move_left(sorted_[i].second);
      const std::size_t n_left = i + 1;
      if (n_left < params_.min_samples_leaf) continue;
      if (n - n_left < params_.min_samples_leaf) break;
      const double a = sorted_[i].first;
      const double b = sorted_[i + 1].first;
      if (b - a <= kTol) continue;
      const double score = children_score();
      if (score > best.score + kTol) {
        double t = a + (b - a) / 2.0;
        if (t >= b) t = a;
        best = {static_cast<int>(f), t, score};
      }
    }
  }

  // Running statistics for the left/right partition.
  void reset_totals() {
    std::fill(left_.begin(), left_.end(), 0.0);
    std::fill(total_.begin(), total_.end(), 0.0);
    w_left_ = w_total_ = s_left_ = s_total_ = 0.0;
  }

  void add(std::size_t r, bool left) {
    const double w = weight(r);
    w_total_ += w;
    if (left) w_left_ += w;
    if (params_.criterion == Criterion::kGini) {
      const auto c = static_cast<std::size_t>(targets_.classes[r]);
      total_[c] += w;
      if (left) left_[c] += w;
    } else {
      const double s = w * targets_.values[r];
      s_total_ += s;
      if (left) s_left_ += s;
    }
  }

  void move_left(std::size_t r) {
    const double w = weight(r);
    w_left_ += w;
    if (params_.criterion == Criterion::kGini) {
      left_[static_cast<std::size_t>(targets_.classes[r])] += w;
    } else {
      s_left_ += w * targets_.values[r];
    }
  }

  double children_score() const {
    const double w_right = w_total_ - w_left_;
    if (w_left_ <= 0.0 || w_right <= 0.0) {
      return -std::numeric_limits<double>::infinity();
    }
    if (params_.criterion == Criterion::kGini) {
      double l = 0.0;
      double rr = 0.0;
      for (std::size_t c = 0; c < total_.size(); ++c) {
        const double right = total_[c] - left_[c];
        l += left_[c] * left_[c];
        rr += right * right;
      }
      return l / w_left_ + rr / w_right;
    }
    const double s_right = s_total_ - s_left_;
    return s_left_ * s_left_ / w_left_ + s_right * s_right / w_right;
  }

  const Matrix& x_;
  const TreeTargets& targets_;
  std::span<const double> weights_;
  const TreeParams& params_;
  Rng& rng_;

  std::vector<double> xt_;
  std::vector<bool> two_valued_;
  std::vector<std::size_t> rows_;
  std::vector<std::size_t> features_;
  std::vector<std::pair<double, double>> bounds_;
  std::vector<std::pair<double, std::size_t>> sorted_;
  std::vector<TreeNode> nodes_;

  std::vector<double> left_;
  std::vector<double> total_;
  double w_left_ = 0.0;
  double w_total_ = 0.0;
  double s_left_ = 0.0;
  double s_total_ = 0.0;
};

}  // namespace

std::size_t features_per_split(double fraction, std::size_t num_features) {
  const auto k = static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(num_features) + 1e-9));
  return std::clamp<std::size_t>(k, 1, std::max<std::size_t>(1, num_features));
}

DecisionTree DecisionTree::fit(const Matrix& x, const TreeTargets& targets,
                               std::span<const std::size_t> rows,
                               std::span<const double> weights,
                               const TreeParams& params, Rng& rng) {
  if (rows.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "cannot grow a tree on zero rows");
  }
  if (params.criterion == Criterion::kGini && params.num_classes < 1) {
    throw Error(ErrorCode::kSpecInvalid, "gini tree needs num_classes >= 1");
  }
  TreeBuilder builder(x, targets, weights, params, rng);
  DecisionTree tree;
  tree.nodes_ = builder.build(std::vector<std::size_t>(rows.begin(), rows.end()));
  return tree;
}

int DecisionTree::apply(std::span<const double> x) const {
  int id = 0;
  while (true) {
    const TreeNode& node = nodes_[static_cast<std::size_t>(id)];
    if (node.is_leaf()) return id;
    id = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left
                                                                     : node.right;
  }
}

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> d(nodes_.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const TreeNode& n = nodes_[i];
    deepest = std::max(deepest, d[i]);
    if (!n.is_leaf()) {
      d[static_cast<std::size_t>(n.left)] = d[i] + 1;
      d[static_cast<std::size_t>(n.right)] = d[i] + 1;
    }
  }
  return deepest;
}

std::vector<double> DecisionTree::impurity_decrease(
    std::size_t num_features) const {
  std::vector<double> out(num_features, 0.0);
  for (const TreeNode& n : nodes_) {
    if (n.is_leaf()) continue;
    const TreeNode& l = nodes_[static_cast<std::size_t>(n.left)];
    const TreeNode& r = nodes_[static_cast<std::size_t>(n.right)];
    const double gain = n.weight * n.impurity - l.weight * l.impurity -
                        r.weight * r.impurity;
    out[static_cast<std::size_t>(n.feature)] += std::max(0.0, gain);
  }
  return out;
}

void DecisionTree::set_leaf_value(int node, std::vector<double> value) {
  nodes_.at(static_cast<std::size_t>(node)).value = std::move(value);
}

nlohmann::json DecisionTree::to_json() const {
  auto nodes = nlohmann::json::array();
  for (const TreeNode& n : nodes_) {
    nodes.push_back({n.feature, n.threshold, n.left, n.right, n.impurity,
                     n.weight, n.samples, n.value});
  }
  return {{"nodes", std::move(nodes)}};
}

DecisionTree DecisionTree::from_json(const nlohmann::json& j) {
  DecisionTree tree;
  for (const auto& a : j.at("nodes")) {
    TreeNode n;
    n.feature = a.at(0).get<int>();
    n.threshold = a.at(1).get<double>();
    n.left = a.at(2).get<int>();
    n.right = a.at(3).get<int>();
    n.impurity = a.at(4).get<double>();
    n.weight = a.at(5).get<double>();
    n.samples = a.at(6).get<std::size_t>();
    n.value = a.at(7).get<std::vector<double>>();
    tree.nodes_.push_back(std::move(n));
  }
  const auto count = static_cast<int>(tree.nodes_.size());
  for (const TreeNode& n : tree.nodes_) {
    if (!n.is_leaf() && (n.left <= 0 || n.right <= 0 || n.left >= count ||
                         n.right >= count)) {
      throw Error(ErrorCode::kSchemaMismatch, "tree node references are invalid");
    }
  }
  if (tree.nodes_.empty()) {
    throw Error(ErrorCode::kSchemaMismatch, "tree has no nodes");
  }
  return tree;
}

}  // namespace palml
