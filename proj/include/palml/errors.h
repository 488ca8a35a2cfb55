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

#ifndef PALML_ERRORS_H_
#define PALML_ERRORS_H_

#include <cstddef>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace palml {

enum class ErrorCode {
  // dataset
  kMissingColumn,
  kMalformedRow,
  kUnparsableNumeric,
  kMissingValue,
  kInvalidValue,
  kInvalidLoad,
  kEmptyDataset,
  kTooFewRows,
  // resample
  kTooFewSamples,
  // models
  kSpecInvalid,
  kSingleClass,
  kDimensionMismatch,
  kNonFinite,
  kUnsupported,
  // evaluate
  kLengthMismatch,
  kBadProba,
  kZeroVariance,
  kTooSmall,
  kClassTooSmall,
  kDegenerateGroups,
  // cli / artifacts
  kSchemaMismatch,
  kVersionMismatch,
  kInvalidConfig,
  kIo,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library. Dataset errors additionally carry the
// 1-based data row and the column name they refer to (row 0 = not applicable).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  Error(ErrorCode code, const std::string& message, std::size_t row,
        std::string column);

  ErrorCode code() const { return code_; }
  std::size_t row() const { return row_; }
  const std::string& column() const { return column_; }

 private:
  ErrorCode code_;
  std::size_t row_ = 0;
  std::string column_;
};

// Collects non-fatal warnings (unknown categories, reduced neighbor counts,
// ignored hyperparameters). Safe to share between threads.
class Diagnostics {
 public:
  Diagnostics() = default;
  Diagnostics(const Diagnostics&) = delete;
  Diagnostics& operator=(const Diagnostics&) = delete;

  void warn(std::string message);
  std::vector<std::string> warnings() const;
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::vector<std::string> warnings_;
};

// Convenience for optional sinks.
inline void warn_to(Diagnostics* sink, std::string message) {
  if (sink != nullptr) sink->warn(std::move(message));
}

}  // namespace palml

#endif  // PALML_ERRORS_H_
