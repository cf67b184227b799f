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
#include "pie/csv.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace pie {
namespace {

absl::StatusOr<std::vector<std::string>> SplitLine(absl::string_view line,
                                                   size_t line_number) {
  std::vector<std::string> fields;
  std::string current;
  bool in_quotes = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (in_quotes) {
    return absl::InvalidArgumentError(
        absl::StrCat("line ", line_number, ": unterminated quoted field"));
  }
  fields.push_back(std::move(current));
  return fields;
}

}  // namespace

absl::StatusOr<CsvTable> CsvTable::Parse(absl::string_view text) {
  CsvTable table;
  bool have_header = false;
  size_t line_number = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t end = text.find('\n', pos);
    if (end == absl::string_view::npos) end = text.size();
    absl::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (!have_header && line.front() == '#') continue;
    auto fields = SplitLine(line, line_number);
    if (!fields.ok()) return fields.status();
    if (!have_header) {
      table.header_ = *std::move(fields);
      have_header = true;
      continue;
    }
    if (fields->size() != table.header_.size()) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "row %d: expected %d fields, found %d", table.rows_.size() + 1,
          table.header_.size(), fields->size()));
    }
    table.rows_.push_back(*std::move(fields));
    if (end == text.size()) break;
  }
  if (!have_header) return absl::InvalidArgumentError("missing CSV header");
  return table;
}

absl::StatusOr<CsvTable> CsvTable::ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto table = Parse(buffer.str());
  if (!table.ok()) {
    return absl::Status(table.status().code(),
                        absl::StrCat(path, ": ", table.status().message()));
  }
  return table;
}

std::optional<size_t> CsvTable::ColumnIndex(absl::string_view name) const {
  for (size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  return std::nullopt;
}

absl::StatusOr<size_t> CsvTable::RequireColumn(absl::string_view name) const {
  if (auto index = ColumnIndex(name)) return *index;
  return absl::InvalidArgumentError(
      absl::StrCat("missing required column '", name, "'"));
}

absl::StatusOr<double> CsvTable::GetDouble(size_t row, size_t column) const {
  const std::string& text = rows_[row][column];
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "row %d, column %s: cannot parse '%s' as a number", row + 1,
        header_[column], text));
  }
  return value;
}

absl::StatusOr<int64_t> CsvTable::GetInt(size_t row, size_t column) const {
  const std::string& text = rows_[row][column];
  int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "row %d, column %s: cannot parse '%s' as an integer", row + 1,
        header_[column], text));
  }
  return value;
}

std::string FormatDouble(double value) { return absl::StrFormat("%.17g", value); }

std::string CsvLine(const std::vector<std::string>& fields) {
  std::string line;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) line.push_back(',');
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\n") == std::string::npos) {
      line += f;
      continue;
    }
    line.push_back('"');
    for (char c : f) {
      if (c == '"') line.push_back('"');
      line.push_back(c);
    }
    line.push_back('"');
  }
  return line;
}

}  // namespace pie
