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

#include "tcf/gradcheck_suite.hpp"

#include <algorithm>
#include <random>
#include <utility>

#include "tcf/gradcheck.hpp"
#include "tcf/layers.hpp"

namespace tcf {

namespace {

Tensor2 uniform_tensor(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Tensor2 t(rows, cols);
  for (double& v : t.flat()) v = u(rng);
  return t;
}

std::vector<double> uniform_vector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

double dot_all(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Objective <r, conv(x)> over a random geometry.
double conv_instance(std::uint64_t seed, double eps) {
  std::mt19937_64 rng(seed);
  ConvSpec spec{pick(rng, 1, 3), pick(rng, 1, 3), pick(rng, 1, 5), pick(rng, 1, 3)};
  const std::size_t t = spec.filter_width + pick(rng, 0, 10);
  Tensor2 x = uniform_tensor(t, spec.in_channels, rng);
  ConvParams p{uniform_tensor(spec.out_channels, spec.window_size(), rng),
               uniform_vector(spec.out_channels, rng)};
  const Tensor2 r = uniform_tensor(spec.output_length(t), spec.out_channels, rng);
  const ConvGrads g = temporal_conv_backward(x, p, spec, r);
  auto f = [&] { return dot_all(temporal_conv_forward(x, p, spec).flat(), r.flat()); };
  return grad_check(f, {x.flat(), p.weights.flat(), std::span(p.bias)},
                    {g.grad_x.flat(), g.grad_params.weights.flat(), std::span(g.grad_params.bias)},
                    eps);
}

// Inputs kept at least 0.1 from the kink.
double relu_instance(std::uint64_t seed, double eps) {
  std::mt19937_64 rng(seed);
  Tensor2 x = uniform_tensor(pick(rng, 1, 8), pick(rng, 1, 8), rng);
  for (double& v : x.flat()) v = v < 0.0 ? v - 0.1 : v + 0.1;
  const Tensor2 r = uniform_tensor(x.rows(), x.cols(), rng);
  const Tensor2 g = relu_backward(x, r);
  auto f = [&] { return dot_all(relu(x).flat(), r.flat()); };
  return grad_check(f, {x.flat()}, {g.flat()}, eps);
}

double pool_instance(std::uint64_t seed, double eps) {
  std::mt19937_64 rng(seed);
  Tensor2 x = uniform_tensor(pick(rng, 1, 12), pick(rng, 1, 6), rng);
  const std::vector<double> r = uniform_vector(x.cols(), rng);
  const Tensor2 g = avg_pool_time_backward(x.rows(), r);
  auto f = [&] { return dot_all(avg_pool_time(x), r); };
  return grad_check(f, {x.flat()}, {g.flat()}, eps);
}

double affine_instance(std::uint64_t seed, double eps) {
  std::mt19937_64 rng(seed);
  const std::size_t in = pick(rng, 1, 8);
  const std::size_t out = pick(rng, 1, 8);
  std::vector<double> x = uniform_vector(in, rng);
  Tensor2 w = uniform_tensor(out, in, rng);
  std::vector<double> b = uniform_vector(out, rng);
  const std::vector<double> r = uniform_vector(out, rng);
  const AffineGrads g = affine_backward(x, w, r);
  auto f = [&] { return dot_all(affine_forward(x, w, b), r); };
  return grad_check(f, {std::span(x), w.flat(), std::span(b)},
                    {std::span(g.grad_x), g.grad_weights.flat(), std::span(g.grad_bias)}, eps);
}

double bce_instance(std::uint64_t seed, double eps) {
  std::mt19937_64 rng(seed);
  double z = std::uniform_real_distribution<double>(-6.0, 6.0)(rng);
  const int y = std::bernoulli_distribution(0.5)(rng) ? 1 : 0;
  const double g = sigmoid_bce(z, y).dloss_dlogit;
  auto f = [&] { return sigmoid_bce(z, y).loss; };
  return grad_check(f, {std::span(&z, 1)}, {std::span(&g, 1)}, eps);
}

EncoderConfig model_config() {
  EncoderConfig c;
  c.feature_dim = 4;
  c.max_frames = 9;
  c.conv_out_channels = 3;
  c.filter_width = 3;
  c.stride = 2;
  c.residual_filter_width = 1;
  c.residual_enabled = true;
  return c;
}

}  // namespace

double model_gradcheck(const EncoderConfig& config, EncoderKind kind, std::uint64_t seed,
                       double eps) {
  std::mt19937_64 rng(seed);
  std::vector<Tensor2> features;
  for (int i = 0; i < 3; ++i) features.push_back(uniform_tensor(config.max_frames, config.feature_dim, rng));

  // 2 users, 3 movies; covers leave-target-out, positives and negatives.
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const UserContext a{0, {0, 1}, u(rng), u(rng), std::nullopt};
  const UserContext b{1, {1, 2}, u(rng), u(rng), std::nullopt};
  const std::vector<LabeledExample> batch{{a, 0, 1}, {a, 2, 0}, {b, 2, 1}, {b, 0, 0}, {b, 1, 1}};

  ModelParams params = ModelParams::init(config, kind, seed);
  // Generic Glorot-scale values instead of the training init's damped output
  // layer and head.
  if (!params.mlp.empty()) {
    for (double& w : params.mlp.back().weights.flat()) w *= 10.0;
  }
  for (double& w : params.lr_weights) {
    const double mag = std::uniform_real_distribution<double>(0.5, 1.2)(rng);
    w = std::bernoulli_distribution(0.5)(rng) ? mag : -mag;
  }
  // Small positive biases keep relu units alive; a dead unit leaves gradient
  // components near 1e-8 that central differences at eps=1e-5 cannot resolve.
  for (auto& v : params.views()) {
    if (v.name.ends_with(".bias")) {
      for (double& x : v.values) x = std::uniform_real_distribution<double>(0.05, 0.3)(rng);
    }
  }
  const LossAndGrad lg = forward_loss(batch, params, config, features);
  std::vector<std::span<double>> blocks;
  std::vector<std::span<const double>> analytic;
  for (auto& v : params.views()) blocks.push_back(v.values);
  for (const auto& v : std::as_const(lg.grads).views()) analytic.push_back(v.values);
  auto f = [&] { return batch_loss(batch, params, config, features); };
  return grad_check(f, blocks, analytic, eps);
}

std::vector<GradcheckOutcome> run_gradcheck_suite(std::size_t instances, std::uint64_t base_seed,
                                                  double eps) {
  std::vector<GradcheckOutcome> out;
  auto run = [&](std::string name, auto&& one) {
    GradcheckOutcome o{std::move(name), instances, 0.0};
    for (std::size_t i = 0; i < instances; ++i) o.max_error = std::max(o.max_error, one(base_seed + i));
    out.push_back(std::move(o));
  };
  run("temporal_conv", [&](std::uint64_t s) { return conv_instance(s, eps); });
  run("relu", [&](std::uint64_t s) { return relu_instance(s, eps); });
  run("avg_pool_time", [&](std::uint64_t s) { return pool_instance(s, eps); });
  run("affine", [&](std::uint64_t s) { return affine_instance(s, eps); });
  run("sigmoid_bce", [&](std::uint64_t s) { return bce_instance(s, eps); });

  struct Variant {
    const char* name;
    EncoderKind kind;
    std::size_t res_width;
    bool skip;
    std::vector<std::size_t> mlp;
  };
  const Variant variants[] = {
      {"model conv, residual skip", EncoderKind::kConv, 1, true, {}},
      {"model conv, residual skip, 2-layer mlp", EncoderKind::kConv, 1, true, {5, 3}},
      {"model conv, width-2 residual", EncoderKind::kConv, 2, true, {4}},
      {"model conv, 1-frame conv without skip", EncoderKind::kConv, 1, false, {}},
      {"model conv, no residual layer", EncoderKind::kConv, 0, false, {3}},
      {"model avgpool, 2-layer mlp", EncoderKind::kAvgPool, 1, true, {5, 3}},
  };
  for (const Variant& v : variants) {
    EncoderConfig c = model_config();
    c.residual_filter_width = v.res_width;
    c.residual_enabled = v.skip;
    c.mlp_layer_widths = v.mlp;
    run(v.name, [&](std::uint64_t s) { return model_gradcheck(c, v.kind, s, eps); });
  }
  return out;
}

}  // namespace tcf
