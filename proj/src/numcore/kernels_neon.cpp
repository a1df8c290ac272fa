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

#include <arm_neon.h>

#include "tcf/simd/kernels.hpp"

namespace tcf::simd::detail {
namespace {

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    // vmulq + vaddq rather than vfmaq keeps results identical to scalar.
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void add_neon(const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += x[i];
}

void relu_neon(const double* x, double* y, std::size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vmaxq_f64(vld1q_f64(x + i), zero));
  for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_mask_neon(const double* act, double* g, std::size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const uint64x2_t keep = vcgtq_f64(vld1q_f64(act + i), zero);
    const uint64x2_t bits = vandq_u64(keep, vreinterpretq_u64_f64(vld1q_f64(g + i)));
    vst1q_f64(g + i, vreinterpretq_f64_u64(bits));
  }
  for (; i < n; ++i) {
    if (!(act[i] > 0.0)) g[i] = 0.0;
  }
}

double dot_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
  double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

}  // namespace

const KernelTable& neon_table_impl() {
  static const KernelTable table{Backend::kNeon, axpy_neon, add_neon,
                                 relu_neon, relu_mask_neon, dot_neon};
  return table;
}

}  // namespace tcf::simd::detail
