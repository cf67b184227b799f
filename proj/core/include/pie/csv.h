/*
 * Copyright 2026 The PIE Lab Authors.
 *
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
#ifndef PIE_CSV_H_
#define PIE_CSV_H_

#include <cstdint>
#include <optional>
#include <string>
#include "absl/strings/string_view.h"
#include <vector>

#include "absl/status/statusor.h"

namespace pie {

// Minimal RFC 4180-style table: a required header row, comma separated,
// double-quoted fields may contain commas and doubled quotes. Lines starting
// with '#' before the header are treated as comments.
class CsvTable {
 public:
  static absl::StatusOr<CsvTable> Parse(absl::string_view text);
  static absl::StatusOr<CsvTable> ReadFile(const std::string& path);

  const std::vector<std::string>& header() const { return header_; }
  size_t num_rows() const { return rows_.size(); }
  const std::vector<std::string>& row(size_t i) const { return rows_[i]; }

  std::optional<size_t> ColumnIndex(absl::string_view name) const;
  absl::StatusOr<size_t> RequireColumn(absl::string_view name) const;

  // Typed accessors. Errors read "row <n>, column <name>: ...", with rows
  // numbered from 1 for the first data row.
  absl::StatusOr<double> GetDouble(size_t row, size_t column) const;
  absl::StatusOr<int64_t> GetInt(size_t row, size_t column) const;
  const std::string& GetString(size_t row, size_t column) const {
    return rows_[row][column];
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Shortest round-trip representation ("%.17g").
std::string FormatDouble(double value);

// Joins fields with commas, quoting any that need it.
std::string CsvLine(const std::vector<std::string>& fields);

}  // namespace pie

#endif  // PIE_CSV_H_
