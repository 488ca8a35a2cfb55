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

#include "palml/synth.h"

#include <algorithm>
#include <cmath>

#include "palml/errors.h"
#include "palml/random.h"

namespace palml {
namespace {

double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(std::log(lo) + uniform01(rng) * (std::log(hi) - std::log(lo)));
}

double round_to(double v, double step) { return std::round(v / step) * step; }

// Per-token effects on the latent score, fixed so that every seed shares the
// same ground truth.
constexpr std::array<double, 7> kTreatmentEffect = {0.3, -0.2, 0.1, 0.0, -0.3, 0.2, -0.1};
constexpr std::array<double, 8> kGasEffect = {0.0, 0.2, -0.2, 0.3, -0.1, 0.1, -0.3, 0.0};
constexpr std::array<double, 15> kLiquidEffect = {
    1.4, -1.4, 0.8, -0.8, 1.1, -1.1, 0.4, -0.4, 0.0, 1.7, -1.7, 0.6, -0.6, 0.2, -0.2};
constexpr std::array<double, 22> kStrainEffect = {
    0.2, -0.2, 0.1, -0.1, 0.3, -0.3, 0.0, 0.15, -0.15, 0.25, -0.25,
    0.05, -0.05, 0.2, -0.2, 0.1, -0.1, 0.0, 0.3, -0.3, 0.05, -0.05};

}  // namespace

const std::array<std::vector<std::string>, kNumNominal>& synth_vocabularies() {
  static const std::array<std::vector<std::string>, kNumNominal> vocab = {{
      {"dbd", "plasma_jet", "gliding_arc", "corona", "microwave", "spark",
       "surface_dbd"},
      {"air", "argon", "helium", "oxygen", "nitrogen", "argon_oxygen",
       "helium_oxygen", "nitrogen_oxygen"},
      {"distilled_water", "tap_water", "saline", "pbs", "hydrogen_peroxide",
       "nitrate_solution", "lactic_acid", "acetic_acid", "glucose",
       "deionized_water", "culture_medium", "sodium_chloride", "ringer",
       "buffer", "ethanol_solution"},
      {"e_coli", "s_aureus", "p_aeruginosa", "l_monocytogenes", "b_subtilis",
       "c_albicans", "s_enterica", "e_faecalis", "k_pneumoniae", "a_baumannii",
       "s_epidermidis", "b_cereus", "a_niger", "s_mutans", "p_fluorescens",
       "c_jejuni", "v_parahaemolyticus", "m_luteus", "s_cerevisiae",
       "e_cloacae", "p_mirabilis", "y_enterocolitica"},
  }};
  return vocab;
}

std::vector<RawRecord> synthesize(const SynthConfig& config) {
  if (config.rows == 0) throw Error(ErrorCode::kInvalidConfig, "synth rows must be positive");
  if (!(config.noise >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "synth noise must be >= 0");
  const auto& vocab = synth_vocabularies();
  std::vector<RawRecord> out;
  out.reserve(config.rows);
  for (std::size_t i = 0; i < config.rows; ++i) {
    Rng rng = make_rng(config.seed, {i});
    RawRecord r;
    std::array<std::size_t, kNumNominal> token{};
    for (std::size_t f = 0; f < kNumNominal; ++f) {
      token[f] = uniform_index(rng, vocab[f].size());
      r.nominal[f] = vocab[f][token[f]];
    }
    const double gap = round_to(std::min(81.0, log_uniform(rng, 1.0, 60.0) - 1.0), 0.5);
    const double time = std::round(log_uniform(rng, 10.0, 3600.0));
    const double volume = round_to(log_uniform(rng, 0.25, 500.0), 0.25);
    const double load = round_to(std::clamp(6.6 + 0.9 * standard_normal(rng), 2.0, 9.0), 0.01);
    const double ratio = std::round(log_uniform(rng, 1.0, 1000.0));
    const double contact = round_to(log_uniform(rng, 1.0, 600.0), 0.5);
    const double temp = std::round(std::clamp(23.5 + 8.0 * standard_normal(rng), -20.0, 50.0));
    const double storage = uniform01(rng) < 0.7 ? 0.0 : std::round(log_uniform(rng, 1.0, 100.0));

    r.at(NumericField::kDischargeGap) = std::max(0.0, gap);
    r.at(NumericField::kPlasmaTreatmentTime) = time;
    r.at(NumericField::kTreatmentVolume) = volume;
    r.at(NumericField::kInitialLoad) = load;
    r.at(NumericField::kPalMoRatio) = ratio;
    r.at(NumericField::kContactTime) = contact;
    r.at(NumericField::kIncubationTemp) = temp;
    r.at(NumericField::kPostStorage) = storage;

    const double ft = (std::log(time) - std::log(190.0)) / 1.1;
    const double fc = (std::log(contact) - std::log(24.0)) / 1.1;
    double score = 1.6 * ft + 1.6 * fc + 0.6 * ft * fc +
                   kLiquidEffect[token[static_cast<std::size_t>(NominalField::kLiquidType)]] +
                   kTreatmentEffect[token[static_cast<std::size_t>(NominalField::kPlasmaTreatmentType)]] +
                   kGasEffect[token[static_cast<std::size_t>(NominalField::kGasType)]] +
                   kStrainEffect[token[static_cast<std::size_t>(NominalField::kMicrobialStrain)]] +
                   0.15 * std::log10(ratio) - 0.01 * (gap - 13.0) -
                   0.2 * std::log1p(storage) / std::log(100.0);
    score += config.noise * standard_normal(rng);
    const double fraction = 1.0 / (1.0 + std::exp(-0.7 * score));
    r.mi_log_reduction = std::min(load, round_to(fraction * load, 0.01));
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace palml
