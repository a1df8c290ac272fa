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

#include "tcf/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tcf/error.hpp"

namespace tcf {

Tensor2::Tensor2(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  if (rows == 0 || cols == 0) {
    throw ShapeError("Tensor2 needs rows >= 1 and cols >= 1, got " + std::to_string(rows) + "x" +
                     std::to_string(cols));
  }
}

Tensor2::Tensor2(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows == 0 || cols == 0) {
    throw ShapeError("Tensor2 needs rows >= 1 and cols >= 1, got " + std::to_string(rows) + "x" +
                     std::to_string(cols));
  }
  if (data_.size() != rows * cols) {
    throw ShapeError("Tensor2 " + std::to_string(rows) + "x" + std::to_string(cols) + " given " +
                     std::to_string(data_.size()) + " values");
  }
}

bool Tensor2::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void Tensor2::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ShapeError("max_abs_diff: sizes " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  }
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace tcf
