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

#include "tcf/layers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tcf/error.hpp"
#include "tcf/simd/kernels.hpp"

namespace tcf {
namespace {

std::string dims(std::size_t r, std::size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

// (k * C_in) x C_out, so each input tap scatters into a contiguous output row.
Tensor2 transpose(const Tensor2& w) {
  Tensor2 t(w.cols(), w.rows());
  for (std::size_t r = 0; r < w.rows(); ++r) {
    for (std::size_t c = 0; c < w.cols(); ++c) t(c, r) = w(r, c);
  }
  return t;
}

}  // namespace

void ConvSpec::validate() const {
  if (in_channels == 0 || out_channels == 0 || filter_width == 0 || stride == 0) {
    throw ShapeError("ConvSpec fields must be >= 1 (C_in=" + std::to_string(in_channels) +
                     ", C_out=" + std::to_string(out_channels) + ", k=" +
                     std::to_string(filter_width) + ", s=" + std::to_string(stride) + ")");
  }
}

std::size_t ConvSpec::output_length(std::size_t input_length) const {
  validate();
  if (input_length < filter_width) {
    throw ShapeError("sequence shorter than filter: T=" + std::to_string(input_length) +
                     " < k=" + std::to_string(filter_width));
  }
  return (input_length - filter_width) / stride + 1;
}

ConvParams ConvParams::zeros(const ConvSpec& spec) {
  spec.validate();
  return {Tensor2(spec.out_channels, spec.window_size()),
          std::vector<double>(spec.out_channels, 0.0)};
}

void ConvParams::check_shape(const ConvSpec& spec) const {
  if (weights.rows() != spec.out_channels || weights.cols() != spec.window_size()) {
    throw ShapeError("conv weights: expected " + dims(spec.out_channels, spec.window_size()) +
                     ", got " + dims(weights.rows(), weights.cols()));
  }
  if (bias.size() != spec.out_channels) {
    throw ShapeError("conv bias: expected " + std::to_string(spec.out_channels) + ", got " +
                     std::to_string(bias.size()));
  }
}

Tensor2 temporal_conv_forward(const Tensor2& x, const ConvParams& p, const ConvSpec& spec) {
  spec.validate();
  p.check_shape(spec);
  if (x.cols() != spec.in_channels) {
    throw ShapeError("conv input: expected " + std::to_string(spec.in_channels) +
                     " channels, got " + std::to_string(x.cols()));
  }
  const std::size_t out_len = spec.output_length(x.rows());
  const std::size_t window = spec.window_size();
  const Tensor2 wt = transpose(p.weights);
  const auto& k = simd::active();

  Tensor2 y(out_len, spec.out_channels);
  for (std::size_t t = 0; t < out_len; ++t) {
    std::span<double> out = y.row(t);
    std::copy(p.bias.begin(), p.bias.end(), out.begin());
    // Rows s*t .. s*t+k-1 are contiguous in x, so the window is one flat run.
    const double* xwin = x.flat().data() + spec.stride * t * spec.in_channels;
    for (std::size_t q = 0; q < window; ++q) {
      if (xwin[q] == 0.0) continue;
      k.axpy(xwin[q], wt.row(q).data(), out.data(), out.size());
    }
  }
  return y;
}

void temporal_conv_backward_accumulate(const Tensor2& x, const ConvParams& p, const ConvSpec& spec,
                                       const Tensor2& upstream_grad, ConvParams& acc,
                                       Tensor2* grad_x) {
  spec.validate();
  p.check_shape(spec);
  acc.check_shape(spec);
  const std::size_t out_len = spec.output_length(x.rows());
  if (upstream_grad.rows() != out_len || upstream_grad.cols() != spec.out_channels) {
    throw ShapeError("conv upstream grad: expected " + dims(out_len, spec.out_channels) +
                     ", got " + dims(upstream_grad.rows(), upstream_grad.cols()));
  }
  if (grad_x != nullptr && (grad_x->rows() != x.rows() || grad_x->cols() != x.cols())) {
    throw ShapeError("conv grad_x buffer: expected " + dims(x.rows(), x.cols()) + ", got " +
                     dims(grad_x->rows(), grad_x->cols()));
  }
  const std::size_t window = spec.window_size();
  const auto& k = simd::active();

  for (std::size_t t = 0; t < out_len; ++t) {
    std::span<const double> g = upstream_grad.row(t);
    k.add(g.data(), acc.bias.data(), g.size());
    const std::size_t offset = spec.stride * t * spec.in_channels;
    const double* xwin = x.flat().data() + offset;
    double* gxwin = grad_x != nullptr ? grad_x->flat().data() + offset : nullptr;
    for (std::size_t o = 0; o < spec.out_channels; ++o) {
      if (g[o] == 0.0) continue;
      k.axpy(g[o], xwin, acc.weights.row(o).data(), window);
      if (gxwin != nullptr) k.axpy(g[o], p.weights.row(o).data(), gxwin, window);
    }
  }
}

ConvGrads temporal_conv_backward(const Tensor2& x, const ConvParams& p, const ConvSpec& spec,
                                 const Tensor2& upstream_grad) {
  ConvGrads out{Tensor2(x.rows(), x.cols()), ConvParams::zeros(spec)};
  temporal_conv_backward_accumulate(x, p, spec, upstream_grad, out.grad_params, &out.grad_x);
  return out;
}

Tensor2 relu(const Tensor2& x) {
  Tensor2 y = x;
  relu_inplace(y.flat());
  return y;
}

void relu_inplace(std::span<double> x) { simd::active().relu(x.data(), x.data(), x.size()); }

Tensor2 relu_backward(const Tensor2& x, const Tensor2& upstream_grad) {
  if (x.rows() != upstream_grad.rows() || x.cols() != upstream_grad.cols()) {
    throw ShapeError("relu upstream grad: expected " + dims(x.rows(), x.cols()) + ", got " +
                     dims(upstream_grad.rows(), upstream_grad.cols()));
  }
  Tensor2 g = upstream_grad;
  simd::active().relu_mask(x.flat().data(), g.flat().data(), g.size());
  return g;
}

std::vector<double> avg_pool_time(const Tensor2& x) {
  if (x.empty()) throw ShapeError("avg_pool_time: empty input");
  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&x](std::size_t a, std::size_t b) {
    const auto ra = x.row(a);
    const auto rb = x.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });
  std::vector<double> out(x.cols(), 0.0);
  const auto& k = simd::active();
  for (std::size_t r : order) k.add(x.row(r).data(), out.data(), out.size());
  const double n = static_cast<double>(x.rows());
  for (double& v : out) v /= n;
  return out;
}

Tensor2 avg_pool_time_backward(std::size_t rows, std::span<const double> upstream_grad) {
  if (rows == 0 || upstream_grad.empty()) throw ShapeError("avg_pool_time_backward: empty shape");
  Tensor2 g(rows, upstream_grad.size());
  const double n = static_cast<double>(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < upstream_grad.size(); ++c) g(r, c) = upstream_grad[c] / n;
  }
  return g;
}

std::vector<double> affine_forward(std::span<const double> x, const Tensor2& weights,
                                   std::span<const double> bias) {
  if (weights.cols() != x.size() || weights.rows() != bias.size()) {
    throw ShapeError("affine: weights " + dims(weights.rows(), weights.cols()) + " vs input " +
                     std::to_string(x.size()) + " and bias " + std::to_string(bias.size()));
  }
  const Tensor2 wt = transpose(weights);
  std::vector<double> y(bias.begin(), bias.end());
  const auto& k = simd::active();
  for (std::size_t c = 0; c < x.size(); ++c) {
    if (x[c] == 0.0) continue;
    k.axpy(x[c], wt.row(c).data(), y.data(), y.size());
  }
  return y;
}

AffineGrads affine_backward(std::span<const double> x, const Tensor2& weights,
                            std::span<const double> upstream_grad) {
  if (weights.cols() != x.size() || weights.rows() != upstream_grad.size()) {
    throw ShapeError("affine backward: weights " + dims(weights.rows(), weights.cols()) +
                     " vs input " + std::to_string(x.size()) + " and upstream " +
                     std::to_string(upstream_grad.size()));
  }
  AffineGrads g{std::vector<double>(x.size(), 0.0), Tensor2(weights.rows(), weights.cols()),
                std::vector<double>(upstream_grad.begin(), upstream_grad.end())};
  const auto& k = simd::active();
  for (std::size_t o = 0; o < weights.rows(); ++o) {
    if (upstream_grad[o] == 0.0) continue;
    k.axpy(upstream_grad[o], x.data(), g.grad_weights.row(o).data(), x.size());
    k.axpy(upstream_grad[o], weights.row(o).data(), g.grad_x.data(), x.size());
  }
  return g;
}

double sigmoid(double logit) {
  if (logit >= 0.0) return 1.0 / (1.0 + std::exp(-logit));
  const double e = std::exp(logit);
  return e / (1.0 + e);
}

BceResult sigmoid_bce(double logit, int label) {
  if (label != 0 && label != 1) throw Error("sigmoid_bce: label must be 0 or 1");
  const double p = sigmoid(logit);
  const double y = static_cast<double>(label);
  // max(z, 0) - z*y + log(1 + exp(-|z|))
  const double loss = std::max(logit, 0.0) - logit * y + std::log1p(std::exp(-std::abs(logit)));
  return {p, loss, p - y};
}

}  // namespace tcf
