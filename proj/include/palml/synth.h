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

// Synthetic surrogate dataset with planted structure.
//
// Inactivation is driven mostly by plasma treatment time, contact time and
// liquid type, with weaker contributions from the remaining predictors, an
// interaction between time and contact, and Gaussian noise. The outcome is
// the fraction of the initial load that is inactivated times that load, so
// class labels depend on the fraction only.

#ifndef PALML_SYNTH_H_
#define PALML_SYNTH_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "palml/dataset.h"

namespace palml {

struct SynthConfig {
  std::size_t rows = 1152;
  std::uint64_t seed = 0;
  double noise = 0.6;  // std of the latent-score noise
};

// Token vocabularies in NominalField order: 7 treatment types, 8 gases,
// 15 liquids, 22 strains.
const std::array<std::vector<std::string>, kNumNominal>& synth_vocabularies();

std::vector<RawRecord> synthesize(const SynthConfig& config);

}  // namespace palml

#endif  // PALML_SYNTH_H_
