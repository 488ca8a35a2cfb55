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

#ifndef PALML_CSV_H_
#define PALML_CSV_H_

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace palml::csv {

using Row = std::vector<std::string>;

// RFC 4180-style reader: comma separated, double-quoted fields may contain
// commas, quotes ("") and newlines. Handles LF and CRLF. Blank lines are
// skipped.
std::vector<Row> read_all(std::istream& in);

std::string_view trim(std::string_view s);
std::string fold_case(std::string_view s);

// Strict decimal parse of a trimmed field ("." separator). nullopt when the
// field is not a finite number.
std::optional<double> parse_number(std::string_view field);

// Shortest representation that round-trips to the same double.
std::string format_number(double v);

// Quotes the field when it contains a comma, quote or newline.
std::string escape(std::string_view field);

}  // namespace palml::csv

#endif  // PALML_CSV_H_
