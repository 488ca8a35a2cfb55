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

#include "palml/preprocess.h"

#include <algorithm>
#include <cmath>

#include "palml/stats.h"

namespace palml {

std::string_view to_string(NormMethod m) {
  switch (m) {
    case NormMethod::kZScore: return "zscore";
    case NormMethod::kMinMax: return "minmax";
    case NormMethod::kMaxAbs: return "maxabs";
    case NormMethod::kRobust: return "robust";
  }
  return "?";
}

NormMethod parse_norm_method(std::string_view name) {
  for (auto m : {NormMethod::kZScore, NormMethod::kMinMax, NormMethod::kMaxAbs,
                 NormMethod::kRobust}) {
    if (to_string(m) == name) return m;
  }
  throw Error(ErrorCode::kInvalidConfig,
              "unknown normalizer '" + std::string(name) +
                  "' (expected zscore|minmax|maxabs|robust)");
}

Normalizer fit_normalizer(std::span<const double> column, NormMethod method) {
  if (column.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "cannot fit a normalizer on no rows");
  }
  for (double v : column) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kNonFinite, "normalizer input is not finite");
    }
  }
  Normalizer n;
  n.method = method;
  switch (method) {
    case NormMethod::kZScore:
      n.center = mean(column);
      n.scale = standard_deviation(column, StdConvention::kPopulation);
      break;
    case NormMethod::kMinMax: {
      const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
      n.center = *lo;
      n.scale = *hi - *lo;
      break;
    }
    case NormMethod::kMaxAbs: {
      double m = 0.0;
      for (double v : column) m = std::max(m, std::abs(v));
      const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
      n.center = 0.0;
      n.scale = *lo == *hi ? 0.0 : m;
      break;
    }
    case NormMethod::kRobust:
      n.center = median(column);
      n.scale = interquartile_range(column);
      break;
  }
  return n;
}

std::vector<double> apply_normalizer(const Normalizer& n,
                                     std::span<const double> values) {
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kNonFinite, "normalizer input is not finite");
    }
    out.push_back(n.apply(v));
  }
  return out;
}

OneHotEncoder::OneHotEncoder(std::vector<std::string> vocabulary)
    : vocab_(std::move(vocabulary)) {}

std::optional<std::size_t> OneHotEncoder::index_of(
    std::string_view token) const {
  const auto it = std::find(vocab_.begin(), vocab_.end(), token);
  if (it == vocab_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - vocab_.begin());
}

OneHotEncoder fit_one_hot(std::span<const std::string> tokens) {
  if (tokens.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "cannot fit an encoder on no rows");
  }
  std::vector<std::string> vocab;
  for (const auto& t : tokens) {
    if (std::find(vocab.begin(), vocab.end(), t) == vocab.end()) {
      vocab.push_back(t);
    }
  }
  return OneHotEncoder(std::move(vocab));
}

std::vector<double> apply_one_hot(const OneHotEncoder& enc,
                                  std::string_view token,
                                  Diagnostics* diagnostics) {
  std::vector<double> out(enc.size(), 0.0);
  if (const auto idx = enc.index_of(token)) {
    out[*idx] = 1.0;
  } else {
    warn_to(diagnostics, "UnknownCategory: '" + std::string(token) +
                             "' was not seen during fitting; encoded as zeros");
  }
  return out;
}

FeatureMatrix FeatureMatrix::subset(std::span<const std::size_t> rows) const {
  FeatureMatrix out;
  out.values = values.select_rows(rows);
  out.columns = columns;
  out.target_kind = target_kind;
  if (!classes.empty()) {
    out.classes.reserve(rows.size());
    for (std::size_t r : rows) out.classes.push_back(classes[r]);
  }
  if (!targets.empty()) {
    out.targets.reserve(rows.size());
    for (std::size_t r : rows) out.targets.push_back(targets[r]);
  }
  return out;
}

std::vector<ColumnInfo> Preprocessor::column_layout() const {
  std::vector<ColumnInfo> cols;
  for (std::size_t i = 0; i < kNumNumeric; ++i) {
    cols.push_back({to_predictor(static_cast<NumericField>(i)),
                    ColumnKind::kNumeric, std::nullopt});
  }
  for (std::size_t i = 0; i < kNumNominal; ++i) {
    const Predictor p = to_predictor(static_cast<NominalField>(i));
    for (const auto& token : encoders[i].vocabulary()) {
      cols.push_back({p, ColumnKind::kOneHot, token});
    }
  }
  return cols;
}

std::size_t Preprocessor::num_columns() const {
  std::size_t n = kNumNumeric;
  for (const auto& e : encoders) n += e.size();
  return n;
}

Preprocessor fit_preprocessor(std::span<const RawRecord> records,
                              NormMethod method) {
  if (records.empty()) {
    throw Error(ErrorCode::kEmptyDataset,
                "cannot fit preprocessing on an empty dataset");
  }
  Preprocessor pre;
  pre.method = method;
  std::vector<double> column(records.size());
  for (std::size_t i = 0; i < kNumNumeric; ++i) {
    for (std::size_t r = 0; r < records.size(); ++r) {
      column[r] = records[r].numeric[i];
    }
    pre.normalizers[i] = fit_normalizer(column, method);
  }
  std::vector<std::string> tokens(records.size());
  for (std::size_t i = 0; i < kNumNominal; ++i) {
    for (std::size_t r = 0; r < records.size(); ++r) {
      tokens[r] = records[r].nominal[i];
    }
    pre.encoders[i] = fit_one_hot(tokens);
  }
  return pre;
}

FeatureMatrix assemble_matrix(std::span<const RawRecord> records,
                              const Preprocessor& pre, TargetKind target_kind,
                              Diagnostics* diagnostics) {
  FeatureMatrix fm;
  fm.columns = pre.column_layout();
  fm.target_kind = target_kind;
  const std::size_t width = fm.columns.size();
  fm.values = Matrix(records.size(), width);
  for (std::size_t r = 0; r < records.size(); ++r) {
    const RawRecord& rec = records[r];
    auto row = fm.values.row(r);
    for (std::size_t i = 0; i < kNumNumeric; ++i) {
      if (!std::isfinite(rec.numeric[i])) {
        throw Error(ErrorCode::kNonFinite, "numeric predictor is not finite");
      }
      row[i] = pre.normalizers[i].apply(rec.numeric[i]);
    }
    std::size_t offset = kNumNumeric;
    for (std::size_t i = 0; i < kNumNominal; ++i) {
      const auto& enc = pre.encoders[i];
      if (const auto idx = enc.index_of(rec.nominal[i])) {
        row[offset + *idx] = 1.0;
      } else {
        warn_to(diagnostics,
                "UnknownCategory: row " + std::to_string(r + 1) + " " +
                    std::string(predictor_name(
                        to_predictor(static_cast<NominalField>(i)))) +
                    "='" + rec.nominal[i] +
                    "' was not seen during fitting; encoded as zeros");
      }
      offset += enc.size();
    }
  }
  switch (target_kind) {
    case TargetKind::kOrdinalClass:
      fm.classes = label_records(records);
      break;
    case TargetKind::kNumeric:
      fm.targets.reserve(records.size());
      for (const auto& rec : records) fm.targets.push_back(rec.mi_log_reduction);
      break;
    case TargetKind::kNone:
      break;
  }
  return fm;
}

nlohmann::json to_json(const Preprocessor& pre) {
  nlohmann::json j;
  j["method"] = std::string(to_string(pre.method));
  auto& norms = j["normalizers"] = nlohmann::json::array();
  for (std::size_t i = 0; i < kNumNumeric; ++i) {
    const auto& n = pre.normalizers[i];
    norms.push_back({
        {"predictor",
         std::string(predictor_name(to_predictor(static_cast<NumericField>(i))))},
        {"center", n.center},
        {"scale", n.scale},
    });
  }
  auto& encs = j["encoders"] = nlohmann::json::array();
  for (std::size_t i = 0; i < kNumNominal; ++i) {
    encs.push_back({
        {"predictor",
         std::string(predictor_name(to_predictor(static_cast<NominalField>(i))))},
        {"vocabulary", pre.encoders[i].vocabulary()},
    });
  }
  auto& layout = j["columns"] = nlohmann::json::array();
  for (const auto& c : pre.column_layout()) {
    layout.push_back({
        {"source", std::string(predictor_name(c.source))},
        {"kind", c.kind == ColumnKind::kNumeric ? "numeric" : "onehot"},
        {"category", c.category ? nlohmann::json(*c.category) : nlohmann::json()},
    });
  }
  return j;
}

Preprocessor preprocessor_from_json(const nlohmann::json& j) {
  try {
    Preprocessor pre;
    pre.method = parse_norm_method(j.at("method").get<std::string>());
    const auto& norms = j.at("normalizers");
    const auto& encs = j.at("encoders");
    if (norms.size() != kNumNumeric || encs.size() != kNumNominal) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "preprocessor artifact does not cover all 12 predictors");
    }
    for (std::size_t i = 0; i < kNumNumeric; ++i) {
      pre.normalizers[i].method = pre.method;
      pre.normalizers[i].center = norms[i].at("center").get<double>();
      pre.normalizers[i].scale = norms[i].at("scale").get<double>();
    }
    for (std::size_t i = 0; i < kNumNominal; ++i) {
      pre.encoders[i] = OneHotEncoder(
          encs[i].at("vocabulary").get<std::vector<std::string>>());
    }
    return pre;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaMismatch,
                std::string("malformed preprocessor artifact: ") + e.what());
  }
}

}  // namespace palml
