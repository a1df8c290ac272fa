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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tcf/layers.hpp"
#include "tcf/tensor.hpp"

namespace tcf {

using MovieIndex = std::uint32_t;
using UserIndex = std::uint32_t;

enum class EncoderKind { kConv, kAvgPool };

std::string_view encoder_kind_name(EncoderKind kind);
EncoderKind parse_encoder_kind(std::string_view name);

// Video encoder geometry.
//
// residual_filter_width selects the second conv layer: 0 disables it
// (h2 = h1); 1 with residual_enabled gives h2 = relu(h1 + conv_res(h1)); any
// other combination applies the layer without a skip, h2 = relu(conv_res(h1)).
// The skip is never used for widths > 1 because the temporal lengths differ.
struct EncoderConfig {
  std::size_t feature_dim = 1024;
  std::size_t max_frames = 120;
  std::size_t conv_out_channels = 1024;
  std::size_t filter_width = 8;
  std::size_t stride = 2;
  std::size_t residual_filter_width = 1;
  bool residual_enabled = true;
  // Hidden layers are affine + relu, the last one is affine only. Empty means
  // the pooled features are the movie vector.
  std::vector<std::size_t> mlp_layer_widths;

  void validate(EncoderKind kind) const;
  ConvSpec conv1_spec() const;
  ConvSpec conv_res_spec() const;
  bool has_residual_layer() const { return residual_filter_width > 0; }
  bool uses_skip() const { return residual_enabled && residual_filter_width == 1; }
  std::size_t pooled_dim(EncoderKind kind) const;
  std::size_t movie_vector_dim(EncoderKind kind) const;
  // Timesteps after conv1 and after the residual layer.
  std::size_t conv1_length() const;
  std::size_t last_relu_length() const;

  friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

struct MlpLayer {
  Tensor2 weights;  // out x in
  std::vector<double> bias;
};

// A named view of one trainable tensor, used by the optimizer, gradient
// checks, and checkpointing.
struct ParamView {
  std::string name;
  std::vector<std::size_t> dims;
  std::span<double> values;
};

struct ConstParamView {
  std::string name;
  std::vector<std::size_t> dims;
  std::span<const double> values;
};

struct ModelParams {
  EncoderKind kind = EncoderKind::kConv;
  ConvParams conv1;     // empty for the avg-pool encoder
  ConvParams conv_res;  // empty when there is no residual layer
  // Filter widths, needed to present conv weights as C_out x k x C_in.
  std::size_t conv1_width = 0;
  std::size_t conv_res_width = 0;
  std::vector<MlpLayer> mlp;
  // Logistic head over (cf_score, frequency, recency).
  std::array<double, 3> lr_weights{0.0, 0.0, 0.0};
  double lr_bias = 0.0;

  static ModelParams zeros(const EncoderConfig& config, EncoderKind kind);
  // Uniform in +-sqrt(6 / (fan_in + fan_out)) for conv and mlp weights, with
  // the last mlp layer shrunk 10x; zero biases; head weights (0.1, 0, 0).
  static ModelParams init(const EncoderConfig& config, EncoderKind kind, std::uint64_t seed);

  // Fixed order: conv1, conv_res, mlp layers, logistic head.
  std::vector<ParamView> views();
  std::vector<ConstParamView> views() const;
  std::size_t parameter_count() const;
  void check_shape(const EncoderConfig& config) const;
  bool all_finite() const;
  void set_zero();
  // this += scale * other (shapes must match)
  void add_scaled(const ModelParams& other, double scale);
};

struct UserContext {
  UserIndex user_id = 0;
  std::vector<MovieIndex> attended_movies;
  double frequency = 0.0;
  double recency = 0.0;
  std::optional<std::vector<double>> demographics;
};

// Intermediate values of one encoder pass, kept for the backward pass.
struct EncoderTrace {
  EncoderKind kind = EncoderKind::kConv;
  Tensor2 h1;  // relu(conv1(x))
  Tensor2 h2;  // last relu layer, input to pooling
  std::vector<double> pooled;
  // mlp_inputs[i] is the input to mlp layer i; mlp_pre[i] its affine output.
  std::vector<std::vector<double>> mlp_inputs;
  std::vector<std::vector<double>> mlp_pre;
  std::vector<double> movie_vector;
};

std::vector<double> encode_movie_conv(const Tensor2& frames, const ModelParams& params,
                                      const EncoderConfig& config);
std::vector<double> encode_movie_avgpool(const Tensor2& frames, const ModelParams& params,
                                         const EncoderConfig& config);
std::vector<double> encode_movie(const Tensor2& frames, const ModelParams& params,
                                 const EncoderConfig& config);

EncoderTrace encode_with_trace(const Tensor2& frames, const ModelParams& params,
                               const EncoderConfig& config);

// Accumulates d(loss)/d(params) into grads given d(loss)/d(movie_vector).
void encoder_backward(const Tensor2& frames, const EncoderTrace& trace, const ModelParams& params,
                      const EncoderConfig& config, std::span<const double> grad_movie_vector,
                      ModelParams& grads);

// Activations of the last relu layer (T2 x C_out) of the conv encoder.
Tensor2 last_relu_activations(const Tensor2& frames, const ModelParams& params,
                              const EncoderConfig& config);

// Sum of the attended movies' vectors, leaving out `target`, followed by the
// demographics when present. An empty set yields zeros of length `dim`.
std::vector<double> build_user_vector(const UserContext& ctx,
                                      std::span<const std::vector<double>> movie_vectors,
                                      MovieIndex target, std::size_t dim);

double cf_score(std::span<const double> user_vector, std::span<const double> movie_vector);

double attendance_logit(double score, double frequency, double recency, const ModelParams& params);
double predict_attendance(double score, double frequency, double recency,
                          const ModelParams& params);

struct LabeledExample {
  UserContext context;
  MovieIndex movie = 0;
  int label = 0;
};

struct LossAndGrad {
  double mean_loss = 0.0;
  ModelParams grads;
};

// Mean binary cross-entropy of the batch and its gradient with respect to
// every parameter. `features` is indexed by MovieIndex and must hold the
// normalized trailer of every movie the batch references.
LossAndGrad forward_loss(std::span<const LabeledExample> batch, const ModelParams& params,
                         const EncoderConfig& config, std::span<const Tensor2> features);

// Loss only; same semantics as forward_loss.
double batch_loss(std::span<const LabeledExample> batch, const ModelParams& params,
                  const EncoderConfig& config, std::span<const Tensor2> features);

// Inclusive range of input frames that can influence last-relu timestep t.
std::pair<std::size_t, std::size_t> receptive_field(const EncoderConfig& config, std::size_t t);

}  // namespace tcf
