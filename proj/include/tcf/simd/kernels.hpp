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

// Inner-loop kernels shared by every layer. Each kernel exists as a scalar
// reference and, where the target supports it, an AVX2 or NEON variant. The
// active table is chosen once at startup from CPU detection and may be
// overridden with TCF_KERNELS=scalar|avx2|neon|auto or set_backend().
//
// Elementwise kernels (axpy, add, relu, relu_mask) produce bit-identical
// results across backends: lanes are independent and no FMA contraction is
// used. dot() reduces across lanes, so its SIMD variants agree with the
// scalar one only to rounding.

#include <cstddef>
#include <span>
#include <string_view>

namespace tcf::simd {

enum class Backend { kScalar, kAvx2, kNeon };

struct KernelTable {
  Backend backend;
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // y[i] += x[i]
  void (*add)(const double* x, double* y, std::size_t n);
  // y[i] = max(0, x[i])
  void (*relu)(const double* x, double* y, std::size_t n);
  // g[i] = act[i] > 0 ? g[i] : 0
  void (*relu_mask)(const double* act, double* g, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
};

const KernelTable& scalar_table();
// nullptr when the variant was not compiled in or the CPU lacks it.
const KernelTable* avx2_table();
const KernelTable* neon_table();

const KernelTable& active();
Backend active_backend();
// Throws tcf::Error when the requested backend is unavailable.
void set_backend(Backend b);
bool backend_available(Backend b);
std::string_view backend_name(Backend b);
Backend parse_backend(std::string_view name);

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), y.size());
}
inline void add(std::span<const double> x, std::span<double> y) {
  active().add(x.data(), y.data(), y.size());
}
inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}

}  // namespace tcf::simd
