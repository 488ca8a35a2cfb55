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

#ifndef PALML_PREPROCESS_H_
#define PALML_PREPROCESS_H_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "palml/dataset.h"
#include "palml/errors.h"
#include "palml/matrix.h"

namespace palml {

enum class NormMethod { kZScore, kMinMax, kMaxAbs, kRobust };

std::string_view to_string(NormMethod m);
NormMethod parse_norm_method(std::string_view name);

// Affine column scaler: apply(x) = (x - center) / scale.
//   zscore: center = mean,   scale = population std
//   minmax: center = min,    scale = max - min
//   maxabs: center = 0,      scale = max |x|
//   robust: center = median, scale = IQR
// A constant column gets scale 0 and maps every value to 0.
struct Normalizer {
  NormMethod method = NormMethod::kZScore;
  double center = 0.0;
  double scale = 1.0;

  bool degenerate() const { return scale == 0.0; }
  double apply(double x) const {
    return degenerate() ? 0.0 : (x - center) / scale;
  }
  double inverse(double z) const { return z * scale + center; }
};

Normalizer fit_normalizer(std::span<const double> column, NormMethod method);
std::vector<double> apply_normalizer(const Normalizer& n,
                                     std::span<const double> values);

class OneHotEncoder {
 public:
  OneHotEncoder() = default;
  explicit OneHotEncoder(std::vector<std::string> vocabulary);

  const std::vector<std::string>& vocabulary() const { return vocab_; }
  std::size_t size() const { return vocab_.size(); }
  std::optional<std::size_t> index_of(std::string_view token) const;

 private:
  std::vector<std::string> vocab_;
};

// Vocabulary in first-appearance order.
OneHotEncoder fit_one_hot(std::span<const std::string> tokens);

// Unit indicator for a known token; all zeros plus a warning otherwise.
std::vector<double> apply_one_hot(const OneHotEncoder& enc,
                                  std::string_view token,
                                  Diagnostics* diagnostics = nullptr);

enum class ColumnKind { kNumeric, kOneHot };

struct ColumnInfo {
  Predictor source;
  ColumnKind kind;
  std::optional<std::string> category;  // one-hot columns only

  friend bool operator==(const ColumnInfo&, const ColumnInfo&) = default;
};

enum class TargetKind { kNone, kOrdinalClass, kNumeric };

struct FeatureMatrix {
  Matrix values;
  std::vector<ColumnInfo> columns;
  TargetKind target_kind = TargetKind::kNone;
  std::vector<int> classes;     // when target_kind == kOrdinalClass
  std::vector<double> targets;  // when target_kind == kNumeric

  std::size_t rows() const { return values.rows(); }
  FeatureMatrix subset(std::span<const std::size_t> rows) const;
};

// Fitted transformers for all 12 predictors.
struct Preprocessor {
  NormMethod method = NormMethod::kZScore;
  std::array<Normalizer, kNumNumeric> normalizers{};
  std::array<OneHotEncoder, kNumNominal> encoders{};

  // 8 numeric columns, then one-hot blocks in schema order.
  std::vector<ColumnInfo> column_layout() const;
  std::size_t num_columns() const;
};

Preprocessor fit_preprocessor(std::span<const RawRecord> records,
                              NormMethod method);

// Encodes records into the design matrix. Targets are attached per kind;
// kNone leaves them empty (prediction input may lack an outcome).
FeatureMatrix assemble_matrix(std::span<const RawRecord> records,
                              const Preprocessor& pre, TargetKind target_kind,
                              Diagnostics* diagnostics = nullptr);

nlohmann::json to_json(const Preprocessor& pre);
Preprocessor preprocessor_from_json(const nlohmann::json& j);

}  // namespace palml

#endif  // PALML_PREPROCESS_H_
