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

// Oversampling of the training partition: SMOTE for the ordinal class
// target, SMOGN (SMOTER interpolation or Gaussian noise, chosen per draw by
// neighbor distance) for the continuous target.
//
// Both resamplers only ever see the rows they are handed; callers pass the
// training partition and never test rows. Original rows are emitted first and
// unchanged, followed by the synthetic rows.

#ifndef PALML_RESAMPLE_H_
#define PALML_RESAMPLE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "palml/errors.h"
#include "palml/matrix.h"

namespace palml {

struct SmoteConfig {
  std::size_t k_neighbors = 5;
  std::uint64_t seed = 0;
};

// Where a synthetic row came from: indices into the input rows.
struct SyntheticOrigin {
  std::size_t source = 0;
  std::size_t neighbor = 0;  // == source for the noise branch
  double gap = 0.0;          // interpolation coefficient u
  bool noise = false;
};

struct SmoteResult {
  Matrix x;
  std::vector<int> y;
  std::vector<SyntheticOrigin> origins;  // one per synthetic row, in order
  std::size_t num_original = 0;
};

// Oversamples every class up to the majority count. k is reduced to
// (class size - 1) for small classes, with a warning.
SmoteResult smote_balance(const Matrix& x, std::span<const int> y,
                          const SmoteConfig& cfg,
                          Diagnostics* diagnostics = nullptr);

struct SmognConfig {
  std::size_t k_neighbors = 5;
  double relevance_threshold = 0.8;
  double noise_fraction = 0.05;
  double safe_distance_quantile = 0.5;
  // Synthetic rows per rare row; 0 chooses round((common - rare) / rare),
  // at least 1.
  std::size_t synthetic_per_rare = 0;
  std::uint64_t seed = 0;
};

// Relevance in [0, 1]: min(1, |y - median| / (1.5 * IQR)). A zero IQR marks
// nothing as rare (all zeros).
std::vector<double> relevance(std::span<const double> y);

struct SmognResult {
  Matrix x;
  std::vector<double> y;
  std::vector<SyntheticOrigin> origins;
  std::size_t num_original = 0;
  std::size_t num_rare = 0;
  bool nothing_rare = false;
};

SmognResult smogn_resample(const Matrix& x, std::span<const double> y,
                           const SmognConfig& cfg,
                           Diagnostics* diagnostics = nullptr);

void validate(const SmoteConfig& cfg);
void validate(const SmognConfig& cfg);

}  // namespace palml

#endif  // PALML_RESAMPLE_H_
