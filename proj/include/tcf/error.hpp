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

#include <stdexcept>
#include <string>

namespace tcf {

// Base for every error raised by the library. Callers that only need a
// message catch std::exception; the CLI maps any tcf::Error to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

// Feature/checkpoint/CSV decoding failures. `kind` distinguishes the cases a
// caller may want to branch on without parsing the message.
class FormatError : public Error {
 public:
  enum class Kind { kBadMagic, kTruncated, kNonFinite, kBadHeader, kBadValue, kVersion };

  FormatError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace tcf
