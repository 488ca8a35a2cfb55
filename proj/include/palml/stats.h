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

#ifndef PALML_STATS_H_
#define PALML_STATS_H_

#include <span>

namespace palml {

enum class StdConvention { kPopulation, kSample };

double mean(std::span<const double> values);

// Divisor N for kPopulation, N-1 for kSample (0 when fewer than 2 values).
double standard_deviation(std::span<const double> values,
                          StdConvention convention = StdConvention::kPopulation);

// Quantile by linear interpolation between order statistics
// (h = (n-1)p, the "type 7" rule). `values` need not be sorted.
double quantile(std::span<const double> values, double p);

inline double median(std::span<const double> values) {
  return quantile(values, 0.5);
}

// Q3 - Q1 under the same interpolation rule.
double interquartile_range(std::span<const double> values);

}  // namespace palml

#endif  // PALML_STATS_H_
