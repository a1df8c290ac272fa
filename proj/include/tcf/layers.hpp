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

#include <cstddef>
#include <span>
#include <vector>

#include "tcf/tensor.hpp"

namespace tcf {

// Temporal convolution geometry. Filters slide along the row (time) axis of a
// T x in_channels input without padding.
struct ConvSpec {
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::size_t filter_width = 1;
  std::size_t stride = 1;

  void validate() const;
  // floor((T - k) / s) + 1; throws ShapeError when T < k.
  std::size_t output_length(std::size_t input_length) const;
  std::size_t window_size() const { return filter_width * in_channels; }
};

// weights is C_out x (k * C_in), i.e. weights(o, j * C_in + c) is the tap for
// output channel o, filter offset j, input channel c.
struct ConvParams {
  Tensor2 weights;
  std::vector<double> bias;

  static ConvParams zeros(const ConvSpec& spec);
  void check_shape(const ConvSpec& spec) const;
};

struct ConvGrads {
  Tensor2 grad_x;
  ConvParams grad_params;
};

Tensor2 temporal_conv_forward(const Tensor2& x, const ConvParams& p, const ConvSpec& spec);

ConvGrads temporal_conv_backward(const Tensor2& x, const ConvParams& p, const ConvSpec& spec,
                                 const Tensor2& upstream_grad);

// Accumulating form used by the model: adds parameter gradients into `acc`
// and, when grad_x is non-null, input gradients into *grad_x (which must
// already be shaped like x).
void temporal_conv_backward_accumulate(const Tensor2& x, const ConvParams& p, const ConvSpec& spec,
                                       const Tensor2& upstream_grad, ConvParams& acc,
                                       Tensor2* grad_x);

Tensor2 relu(const Tensor2& x);
// Passes upstream where x > 0, zero elsewhere.
Tensor2 relu_backward(const Tensor2& x, const Tensor2& upstream_grad);
void relu_inplace(std::span<double> x);

// Mean over rows. Rows are summed in lexicographic row order, so the result is
// bit-identical for any permutation of the input rows.
std::vector<double> avg_pool_time(const Tensor2& x);
// Every row receives upstream / T.
Tensor2 avg_pool_time_backward(std::size_t rows, std::span<const double> upstream_grad);

// Fully connected layer: y = W x + b with W stored C_out x C_in.
std::vector<double> affine_forward(std::span<const double> x, const Tensor2& weights,
                                   std::span<const double> bias);

struct AffineGrads {
  std::vector<double> grad_x;
  Tensor2 grad_weights;
  std::vector<double> grad_bias;
};

AffineGrads affine_backward(std::span<const double> x, const Tensor2& weights,
                            std::span<const double> upstream_grad);

struct BceResult {
  double probability;
  double loss;
  double dloss_dlogit;
};

// Logistic output with binary cross-entropy, stable for any finite logit.
BceResult sigmoid_bce(double logit, int label);
double sigmoid(double logit);

}  // namespace tcf
