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

// Observation records for plasma-activated liquid experiments: CSV parsing,
// validation, ordinal labeling of microbial inactivation and descriptive
// statistics.

#ifndef PALML_DATASET_H_
#define PALML_DATASET_H_

#include <array>
#include <cstddef>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "palml/stats.h"

namespace palml {

// The 12 predictors in file/schema order.
enum class Predictor {
  kPlasmaTreatmentType,
  kGasType,
  kDischargeGap,
  kPlasmaTreatmentTime,
  kLiquidType,
  kTreatmentVolume,
  kMicrobialStrain,
  kInitialLoad,
  kPalMoRatio,
  kContactTime,
  kIncubationTemp,
  kPostStorage,
};
inline constexpr std::size_t kNumPredictors = 12;

// Numeric predictors, in schema order.
enum class NumericField {
  kDischargeGap,
  kPlasmaTreatmentTime,
  kTreatmentVolume,
  kInitialLoad,
  kPalMoRatio,
  kContactTime,
  kIncubationTemp,
  kPostStorage,
};
inline constexpr std::size_t kNumNumeric = 8;

// Nominal predictors, in schema order.
enum class NominalField {
  kPlasmaTreatmentType,
  kGasType,
  kLiquidType,
  kMicrobialStrain,
};
inline constexpr std::size_t kNumNominal = 4;

Predictor to_predictor(NumericField field);
Predictor to_predictor(NominalField field);

// Short display name ("plasma_treatment_time").
std::string_view predictor_name(Predictor p);
std::optional<Predictor> predictor_from_name(std::string_view name);

// Column names of the input file. Index i < 12 is Predictor(i); index 12 is
// the outcome.
struct PredictorSchema {
  std::array<std::string, kNumPredictors + 1> columns;

  static PredictorSchema standard();
  const std::string& column(Predictor p) const {
    return columns[static_cast<std::size_t>(p)];
  }
  const std::string& outcome() const { return columns[kNumPredictors]; }
};

struct RawRecord {
  std::array<std::string, kNumNominal> nominal;  // trimmed, case-folded
  std::array<double, kNumNumeric> numeric{};
  // NaN for rows read without an outcome column (prediction input).
  double mi_log_reduction = 0.0;

  double& at(NumericField f) { return numeric[static_cast<std::size_t>(f)]; }
  double at(NumericField f) const {
    return numeric[static_cast<std::size_t>(f)];
  }
  std::string& at(NominalField f) {
    return nominal[static_cast<std::size_t>(f)];
  }
  const std::string& at(NominalField f) const {
    return nominal[static_cast<std::size_t>(f)];
  }

  friend bool operator==(const RawRecord&, const RawRecord&) = default;
};

inline constexpr double kLoadTolerance = 1e-9;

// Parses the curated CSV (comma separated, optional quoting, header row).
// All-or-nothing: the first defect raises an Error naming row and column.
std::vector<RawRecord> parse_dataset(
    std::istream& in,
    const PredictorSchema& schema = PredictorSchema::standard());

// Same, but the outcome column is optional and ignored; records carry NaN
// as mi_log_reduction. Used for prediction input.
std::vector<RawRecord> parse_predictor_rows(
    std::istream& in,
    const PredictorSchema& schema = PredictorSchema::standard());

// Writes records back out in the schema's column order.
void write_dataset(std::ostream& out, std::span<const RawRecord> records,
                   const PredictorSchema& schema = PredictorSchema::standard());

// Ordinal microbial-inactivation class.
enum class MiClass { kNone = 0, kWeak = 1, kStrong = 2, kComplete = 3 };
inline constexpr int kNumMiClasses = 4;

std::string_view to_string(MiClass c);

// MI <= 0.1n -> None; 0.1n < MI < 0.5n -> Weak; 0.5n <= MI < 0.9n -> Strong;
// MI >= 0.9n -> Complete. Throws InvalidLoad for n <= 0.
MiClass label_mi(double mi, double initial_load);

std::vector<int> label_records(std::span<const RawRecord> records);
std::array<std::size_t, kNumMiClasses> class_counts(std::span<const int> labels);

struct FieldSummary {
  std::string name;
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// One entry per numeric predictor followed by the outcome.
struct DatasetSummary {
  StdConvention convention = StdConvention::kPopulation;
  std::vector<FieldSummary> fields;
};

DatasetSummary summarize(std::span<const RawRecord> records,
                         StdConvention convention = StdConvention::kPopulation);

// Pearson correlations over the 8 numeric predictors and the outcome.
// Entries involving a zero-variance column are nullopt.
struct CorrelationMatrix {
  std::vector<std::string> names;
  std::vector<std::optional<double>> values;  // row-major, size n*n

  std::size_t size() const { return names.size(); }
  std::optional<double> at(std::size_t i, std::size_t j) const {
    return values[i * names.size() + j];
  }
};

CorrelationMatrix correlation_matrix(std::span<const RawRecord> records);

// Pearson correlation of two equal-length columns; nullopt when either has
// zero variance.
std::optional<double> pearson(std::span<const double> x,
                              std::span<const double> y);

}  // namespace palml

#endif  // PALML_DATASET_H_
