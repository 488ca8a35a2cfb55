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

#include "palml/stats.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "palml/errors.h"

namespace palml {

double mean(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::kEmptyDataset, "mean of empty set");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double standard_deviation(std::span<const double> values,
                          StdConvention convention) {
  const double mu = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - mu) * (v - mu);
  const double n = static_cast<double>(values.size());
  if (convention == StdConvention::kSample) {
    return values.size() < 2 ? 0.0 : std::sqrt(ss / (n - 1.0));
  }
  return std::sqrt(ss / n);
}

double quantile(std::span<const double> values, double p) {
  if (values.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "quantile of empty set");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double interquartile_range(std::span<const double> values) {
  return quantile(values, 0.75) - quantile(values, 0.25);
}

}  // namespace palml
