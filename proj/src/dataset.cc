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

#include "palml/dataset.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "palml/csv.h"
#include "palml/errors.h"

namespace palml {
namespace {

constexpr std::array<Predictor, kNumNumeric> kNumericPredictors = {
    Predictor::kDischargeGap,    Predictor::kPlasmaTreatmentTime,
    Predictor::kTreatmentVolume, Predictor::kInitialLoad,
    Predictor::kPalMoRatio,      Predictor::kContactTime,
    Predictor::kIncubationTemp,  Predictor::kPostStorage,
};

constexpr std::array<Predictor, kNumNominal> kNominalPredictors = {
    Predictor::kPlasmaTreatmentType,
    Predictor::kGasType,
    Predictor::kLiquidType,
    Predictor::kMicrobialStrain,
};

constexpr std::array<std::string_view, kNumPredictors> kPredictorNames = {
    "plasma_treatment_type", "gas_type",         "discharge_gap",
    "plasma_treatment_time", "liquid_type",      "treatment_volume",
    "microbial_strain",      "initial_microbial_load",
    "pal_mo_volume_ratio",   "contact_time",     "incubation_temperature",
    "post_storage_time",
};

// Domain checks on numeric fields. Returns a description of the violated
// bound, or nullptr.
const char* check_numeric(NumericField f, double v) {
  switch (f) {
    case NumericField::kDischargeGap:
    case NumericField::kPlasmaTreatmentTime:
    case NumericField::kContactTime:
    case NumericField::kPostStorage:
      return v >= 0.0 ? nullptr : "must be >= 0";
    case NumericField::kTreatmentVolume:
    case NumericField::kInitialLoad:
      return v > 0.0 ? nullptr : "must be > 0";
    case NumericField::kPalMoRatio:
      return v >= 1.0 ? nullptr : "must be >= 1";
    case NumericField::kIncubationTemp:
      return nullptr;
  }
  return nullptr;
}

std::vector<RawRecord> parse_impl(std::istream& in,
                                  const PredictorSchema& schema,
                                  bool with_outcome) {
  const std::vector<csv::Row> rows = csv::read_all(in);
  if (rows.empty()) {
    throw Error(ErrorCode::kMissingColumn, "input has no header row");
  }

  // Map schema columns to header positions, case-insensitively.
  const csv::Row& header = rows.front();
  std::vector<std::string> folded;
  folded.reserve(header.size());
  for (const auto& h : header) folded.push_back(csv::fold_case(csv::trim(h)));

  const std::size_t wanted = with_outcome ? kNumPredictors + 1 : kNumPredictors;
  std::array<std::size_t, kNumPredictors + 1> position{};
  for (std::size_t c = 0; c < wanted; ++c) {
    const std::string name = csv::fold_case(schema.columns[c]);
    const auto it = std::find(folded.begin(), folded.end(), name);
    if (it == folded.end()) {
      throw Error(ErrorCode::kMissingColumn,
                  "column '" + schema.columns[c] + "' not found in header");
    }
    position[c] = static_cast<std::size_t>(it - folded.begin());
  }

  std::vector<RawRecord> records;
  records.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const csv::Row& row = rows[r];
    const std::size_t data_row = r;  // 1-based data row number
    if (row.size() != header.size()) {
      throw Error(ErrorCode::kMalformedRow,
                  "expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(row.size()),
                  data_row, "");
    }
    RawRecord rec;
    for (std::size_t i = 0; i < kNumNominal; ++i) {
      const auto p = static_cast<std::size_t>(kNominalPredictors[i]);
      const std::string_view field = csv::trim(row[position[p]]);
      if (field.empty()) {
        throw Error(ErrorCode::kMissingValue, "empty nominal value", data_row,
                    schema.columns[p]);
      }
      rec.nominal[i] = csv::fold_case(field);
    }
    auto read_number = [&](std::size_t column) {
      const std::string_view field = csv::trim(row[position[column]]);
      if (field.empty()) {
        throw Error(ErrorCode::kMissingValue, "empty numeric value", data_row,
                    schema.columns[column]);
      }
      const auto v = csv::parse_number(field);
      if (!v) {
        throw Error(ErrorCode::kUnparsableNumeric,
                    "cannot parse '" + std::string(field) + "'", data_row,
                    schema.columns[column]);
      }
      return *v;
    };
    for (std::size_t i = 0; i < kNumNumeric; ++i) {
      const auto p = static_cast<std::size_t>(kNumericPredictors[i]);
      const double v = read_number(p);
      if (const char* why = check_numeric(static_cast<NumericField>(i), v)) {
        throw Error(ErrorCode::kInvalidValue, why, data_row, schema.columns[p]);
      }
      rec.numeric[i] = v;
    }
    if (with_outcome) {
      const double mi = read_number(kNumPredictors);
      if (mi < 0.0) {
        throw Error(ErrorCode::kInvalidValue, "must be >= 0", data_row,
                    schema.outcome());
      }
      if (mi > rec.at(NumericField::kInitialLoad) + kLoadTolerance) {
        throw Error(ErrorCode::kInvalidValue,
                    "log reduction exceeds the initial microbial load",
                    data_row, schema.outcome());
      }
      rec.mi_log_reduction = mi;
    } else {
      rec.mi_log_reduction = std::numeric_limits<double>::quiet_NaN();
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace

Predictor to_predictor(NumericField field) {
  return kNumericPredictors[static_cast<std::size_t>(field)];
}

Predictor to_predictor(NominalField field) {
  return kNominalPredictors[static_cast<std::size_t>(field)];
}

std::string_view predictor_name(Predictor p) {
  return kPredictorNames[static_cast<std::size_t>(p)];
}

std::optional<Predictor> predictor_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNumPredictors; ++i) {
    if (kPredictorNames[i] == name) return static_cast<Predictor>(i);
  }
  return std::nullopt;
}

PredictorSchema PredictorSchema::standard() {
  return PredictorSchema{{
      "plasma_treatment_type",
      "gas_type",
      "discharge_gap_mm",
      "plasma_treatment_time_s",
      "liquid_type",
      "treatment_volume_ml",
      "microbial_strain",
      "initial_load_log",
      "pal_mo_ratio",
      "contact_time_min",
      "incubation_temp_c",
      "post_storage_h",
      "mi_log_reduction",
  }};
}

std::vector<RawRecord> parse_dataset(std::istream& in,
                                     const PredictorSchema& schema) {
  return parse_impl(in, schema, /*with_outcome=*/true);
}

std::vector<RawRecord> parse_predictor_rows(std::istream& in,
                                            const PredictorSchema& schema) {
  return parse_impl(in, schema, /*with_outcome=*/false);
}

void write_dataset(std::ostream& out, std::span<const RawRecord> records,
                   const PredictorSchema& schema) {
  for (std::size_t c = 0; c < schema.columns.size(); ++c) {
    out << (c ? "," : "") << csv::escape(schema.columns[c]);
  }
  out << '\n';
  for (const RawRecord& rec : records) {
    for (std::size_t p = 0; p < kNumPredictors; ++p) {
      if (p) out << ',';
      const auto pred = static_cast<Predictor>(p);
      const auto nom = std::find(kNominalPredictors.begin(),
                                 kNominalPredictors.end(), pred);
      if (nom != kNominalPredictors.end()) {
        out << csv::escape(rec.nominal[nom - kNominalPredictors.begin()]);
      } else {
        const auto num = std::find(kNumericPredictors.begin(),
                                   kNumericPredictors.end(), pred);
        out << csv::format_number(rec.numeric[num - kNumericPredictors.begin()]);
      }
    }
    out << ',' << csv::format_number(rec.mi_log_reduction) << '\n';
  }
}

std::string_view to_string(MiClass c) {
  switch (c) {
    case MiClass::kNone: return "None";
    case MiClass::kWeak: return "Weak";
    case MiClass::kStrong: return "Strong";
    case MiClass::kComplete: return "Complete";
  }
  return "?";
}

MiClass label_mi(double mi, double initial_load) {
  if (!(initial_load > 0.0)) {
    throw Error(ErrorCode::kInvalidLoad,
                "initial microbial load must be > 0, got " +
                    csv::format_number(initial_load));
  }
  const double n = initial_load;
  if (mi <= 0.1 * n) return MiClass::kNone;
  if (mi < 0.5 * n) return MiClass::kWeak;
  if (mi < 0.9 * n) return MiClass::kStrong;
  return MiClass::kComplete;
}

std::vector<int> label_records(std::span<const RawRecord> records) {
  std::vector<int> labels;
  labels.reserve(records.size());
  for (const auto& rec : records) {
    labels.push_back(static_cast<int>(
        label_mi(rec.mi_log_reduction, rec.at(NumericField::kInitialLoad))));
  }
  return labels;
}

std::array<std::size_t, kNumMiClasses> class_counts(
    std::span<const int> labels) {
  std::array<std::size_t, kNumMiClasses> counts{};
  for (int l : labels) {
    if (l >= 0 && l < kNumMiClasses) ++counts[static_cast<std::size_t>(l)];
  }
  return counts;
}

namespace {

// Columns of the numeric block plus the outcome, with display names.
std::vector<std::pair<std::string, std::vector<double>>> numeric_columns(
    std::span<const RawRecord> records) {
  std::vector<std::pair<std::string, std::vector<double>>> cols;
  for (std::size_t i = 0; i < kNumNumeric; ++i) {
    std::vector<double> v;
    v.reserve(records.size());
    for (const auto& rec : records) v.push_back(rec.numeric[i]);
    cols.emplace_back(std::string(predictor_name(kNumericPredictors[i])),
                      std::move(v));
  }
  std::vector<double> mi;
  mi.reserve(records.size());
  for (const auto& rec : records) mi.push_back(rec.mi_log_reduction);
  cols.emplace_back("microbial_inactivation", std::move(mi));
  return cols;
}

}  // namespace

DatasetSummary summarize(std::span<const RawRecord> records,
                         StdConvention convention) {
  if (records.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "cannot summarize an empty dataset");
  }
  DatasetSummary summary;
  summary.convention = convention;
  for (auto& [name, values] : numeric_columns(records)) {
    FieldSummary f;
    f.name = name;
    f.count = values.size();
    f.mean = mean(values);
    f.std = standard_deviation(values, convention);
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    f.min = *lo;
    f.max = *hi;
    summary.fields.push_back(std::move(f));
  }
  return summary;
}

std::optional<double> pearson(std::span<const double> x,
                              std::span<const double> y) {
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationMatrix correlation_matrix(std::span<const RawRecord> records) {
  if (records.size() < 2) {
    throw Error(ErrorCode::kTooFewRows,
                "correlation needs at least 2 records");
  }
  const auto cols = numeric_columns(records);
  CorrelationMatrix m;
  const std::size_t n = cols.size();
  for (const auto& c : cols) m.names.push_back(c.first);
  m.values.assign(n * n, std::nullopt);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      std::optional<double> r = pearson(cols[i].second, cols[j].second);
      if (i == j && r) r = 1.0;
      m.values[i * n + j] = r;
      m.values[j * n + i] = r;
    }
  }
  return m;
}

}  // namespace palml
