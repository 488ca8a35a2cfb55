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

#include "palml/errors.h"

#include <utility>

namespace palml {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kUnparsableNumeric: return "UnparsableNumeric";
    case ErrorCode::kMissingValue: return "MissingValue";
    case ErrorCode::kInvalidValue: return "InvalidValue";
    case ErrorCode::kInvalidLoad: return "InvalidLoad";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kTooFewRows: return "TooFewRows";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kSpecInvalid: return "SpecInvalid";
    case ErrorCode::kSingleClass: return "SingleClass";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kUnsupported: return "Unsupported";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kBadProba: return "BadProba";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kTooSmall: return "TooSmall";
    case ErrorCode::kClassTooSmall: return "ClassTooSmall";
    case ErrorCode::kDegenerateGroups: return "DegenerateGroups";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

Error::Error(ErrorCode code, const std::string& message, std::size_t row,
             std::string column)
    : std::runtime_error(std::string(to_string(code)) + ": " + message +
                         " (row " + std::to_string(row) + ", column " +
                         column + ")"),
      code_(code),
      row_(row),
      column_(std::move(column)) {}

void Diagnostics::warn(std::string message) {
  std::lock_guard<std::mutex> lock(mu_);
  warnings_.push_back(std::move(message));
}

std::vector<std::string> Diagnostics::warnings() const {
  std::lock_guard<std::mutex> lock(mu_);
  return warnings_;
}

std::size_t Diagnostics::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return warnings_.size();
}

}  // namespace palml
