// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tcf/csv.hpp"

#include <charconv>
#include <cmath>

#include "tcf/error.hpp"

namespace tcf::csv {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

Reader::Reader(const std::filesystem::path& path, std::vector<std::string> header)
    : path_(path), in_(path), fields_(header.size()) {
  if (!in_) throw IoError("cannot open " + path.string());
  std::vector<std::string> got;
  if (!next(got)) {
    throw FormatError(FormatError::Kind::kBadHeader, path.string() + ": empty file");
  }
  if (got != header) {
    std::string want;
    for (const auto& h : header) want += (want.empty() ? "" : ",") + h;
    throw FormatError(FormatError::Kind::kBadHeader,
                      path.string() + ": expected header '" + want + "'");
  }
}

bool Reader::next(std::vector<std::string>& row) {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    row = split(line);
    if (row.size() != fields_) {
      fail("expected " + std::to_string(fields_) + " fields, got " + std::to_string(row.size()));
    }
    return true;
  }
  return false;
}

void Reader::fail(const std::string& what) const {
  throw FormatError(FormatError::Kind::kBadValue,
                    path_.string() + ":" + std::to_string(line_) + ": " + what);
}

std::int64_t Reader::parse_int(const std::string& field, const char* name) const {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    fail(std::string("bad ") + name + " '" + field + "'");
  }
  return v;
}

double Reader::parse_double(const std::string& field, const char* name) const {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
    fail(std::string("bad ") + name + " '" + field + "'");
  }
  return v;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << contents;
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace tcf::csv
