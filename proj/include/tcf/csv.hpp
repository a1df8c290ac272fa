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

#pragma once

// Minimal comma-separated reader for the project's own files: no quoting, a
// fixed header, one record per line.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace tcf::csv {

std::vector<std::string> split(const std::string& line);

class Reader {
 public:
  Reader(const std::filesystem::path& path, std::vector<std::string> header);
  // False at end of file. Rows with the wrong field count raise FormatError.
  bool next(std::vector<std::string>& row);
  [[noreturn]] void fail(const std::string& what) const;
  std::int64_t parse_int(const std::string& field, const char* name) const;
  double parse_double(const std::string& field, const char* name) const;
  std::size_t line() const { return line_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::size_t fields_;
  std::size_t line_ = 0;
};

void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace tcf::csv
