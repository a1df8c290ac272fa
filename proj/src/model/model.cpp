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

#include "tcf/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "tcf/error.hpp"
#include "tcf/simd/kernels.hpp"

namespace tcf {

std::string_view encoder_kind_name(EncoderKind kind) {
  return kind == EncoderKind::kConv ? "conv" : "avgpool";
}

EncoderKind parse_encoder_kind(std::string_view name) {
  if (name == "conv") return EncoderKind::kConv;
  if (name == "avgpool") return EncoderKind::kAvgPool;
  throw Error("unknown encoder kind '" + std::string(name) + "' (expected conv|avgpool)");
}

// ---------------------------------------------------------------------------
// EncoderConfig

void EncoderConfig::validate(EncoderKind kind) const {
  if (feature_dim == 0 || max_frames == 0) {
    throw ShapeError("encoder config: feature_dim and max_frames must be >= 1");
  }
  for (std::size_t w : mlp_layer_widths) {
    if (w == 0) throw ShapeError("encoder config: mlp layer widths must be >= 1");
  }
  if (kind == EncoderKind::kAvgPool) return;
  conv1_spec().validate();
  if (filter_width > max_frames) {
    throw ShapeError("encoder config: filter_width " + std::to_string(filter_width) +
                     " exceeds max_frames " + std::to_string(max_frames));
  }
  if (has_residual_layer() && residual_filter_width > conv1_length()) {
    throw ShapeError("encoder config: residual_filter_width " +
                     std::to_string(residual_filter_width) + " exceeds conv1 output length " +
                     std::to_string(conv1_length()));
  }
}

ConvSpec EncoderConfig::conv1_spec() const {
  return {feature_dim, conv_out_channels, filter_width, stride};
}

ConvSpec EncoderConfig::conv_res_spec() const {
  return {conv_out_channels, conv_out_channels, residual_filter_width, 1};
}

std::size_t EncoderConfig::pooled_dim(EncoderKind kind) const {
  return kind == EncoderKind::kConv ? conv_out_channels : feature_dim;
}

std::size_t EncoderConfig::movie_vector_dim(EncoderKind kind) const {
  return mlp_layer_widths.empty() ? pooled_dim(kind) : mlp_layer_widths.back();
}

std::size_t EncoderConfig::conv1_length() const { return conv1_spec().output_length(max_frames); }

std::size_t EncoderConfig::last_relu_length() const {
  const std::size_t t1 = conv1_length();
  return has_residual_layer() ? conv_res_spec().output_length(t1) : t1;
}

// ---------------------------------------------------------------------------
// ModelParams

namespace {

template <typename View, typename Params>
std::vector<View> collect_views(Params& p) {
  std::vector<View> out;
  auto conv = [&out](const std::string& name, auto& cp, std::size_t k) {
    if (cp.weights.empty()) return;
    out.push_back({name + ".weight", {cp.weights.rows(), k, cp.weights.cols() / k},
                   cp.weights.flat()});
    out.push_back({name + ".bias", {cp.bias.size()}, std::span(cp.bias)});
  };
  conv("conv1", p.conv1, p.conv1_width);
  conv("conv_res", p.conv_res, p.conv_res_width);
  for (std::size_t i = 0; i < p.mlp.size(); ++i) {
    auto& layer = p.mlp[i];
    const std::string prefix = "mlp." + std::to_string(i);
    out.push_back({prefix + ".weight", {layer.weights.rows(), layer.weights.cols()},
                   layer.weights.flat()});
    out.push_back({prefix + ".bias", {layer.bias.size()}, std::span(layer.bias)});
  }
  out.push_back({"head.weight", {3}, std::span(p.lr_weights)});
  out.push_back({"head.bias", {1}, std::span(&p.lr_bias, 1)});
  return out;
}

void glorot_fill(std::span<double> values, std::size_t fan_in, std::size_t fan_out,
                 std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> u(-limit, limit);
  for (double& v : values) v = u(rng);
}

}  // namespace

ModelParams ModelParams::zeros(const EncoderConfig& config, EncoderKind kind) {
  config.validate(kind);
  ModelParams p;
  p.kind = kind;
  if (kind == EncoderKind::kConv) {
    p.conv1 = ConvParams::zeros(config.conv1_spec());
    p.conv1_width = config.filter_width;
    if (config.has_residual_layer()) {
      p.conv_res = ConvParams::zeros(config.conv_res_spec());
      p.conv_res_width = config.residual_filter_width;
    }
  }
  std::size_t in = config.pooled_dim(kind);
  for (std::size_t w : config.mlp_layer_widths) {
    p.mlp.push_back({Tensor2(w, in), std::vector<double>(w, 0.0)});
    in = w;
  }
  return p;
}

namespace {
constexpr double kOutputInitScale = 0.1;
constexpr double kScoreWeightInit = 0.1;
}  // namespace

ModelParams ModelParams::init(const EncoderConfig& config, EncoderKind kind, std::uint64_t seed) {
  ModelParams p = zeros(config, kind);
  std::mt19937_64 rng(seed);
  if (kind == EncoderKind::kConv) {
    const ConvSpec c1 = config.conv1_spec();
    glorot_fill(p.conv1.weights.flat(), c1.filter_width * c1.in_channels,
                c1.filter_width * c1.out_channels, rng);
    if (config.has_residual_layer()) {
      const ConvSpec cr = config.conv_res_spec();
      glorot_fill(p.conv_res.weights.flat(), cr.filter_width * cr.in_channels,
                  cr.filter_width * cr.out_channels, rng);
    }
  }
  for (MlpLayer& layer : p.mlp) {
    glorot_fill(layer.weights.flat(), layer.weights.cols(), layer.weights.rows(), rng);
  }
  // A user vector sums up to dozens of movie vectors that share a large
  // positive offset from the pooled relus, so unscaled scores start in the
  // hundreds. A shrunken output layer and a small positive score weight keep
  // the first logits near zero while still passing gradient to the encoder.
  if (!p.mlp.empty()) {
    for (double& w : p.mlp.back().weights.flat()) w *= kOutputInitScale;
  }
  p.lr_weights = {kScoreWeightInit, 0.0, 0.0};
  return p;
}

std::vector<ParamView> ModelParams::views() { return collect_views<ParamView>(*this); }

std::vector<ConstParamView> ModelParams::views() const {
  return collect_views<ConstParamView>(*this);
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& v : views()) n += v.values.size();
  return n;
}

void ModelParams::check_shape(const EncoderConfig& config) const {
  if (kind == EncoderKind::kConv) {
    conv1.check_shape(config.conv1_spec());
    if (conv1_width != config.filter_width) {
      throw ShapeError("conv1 filter width " + std::to_string(conv1_width) + " vs config " +
                       std::to_string(config.filter_width));
    }
    if (config.has_residual_layer()) {
      conv_res.check_shape(config.conv_res_spec());
      if (conv_res_width != config.residual_filter_width) {
        throw ShapeError("conv_res filter width " + std::to_string(conv_res_width) +
                         " vs config " + std::to_string(config.residual_filter_width));
      }
    } else if (!conv_res.weights.empty()) {
      throw ShapeError("params carry a residual layer the config does not have");
    }
  } else if (!conv1.weights.empty() || !conv_res.weights.empty()) {
    throw ShapeError("avg-pool params must not carry conv layers");
  }
  if (mlp.size() != config.mlp_layer_widths.size()) {
    throw ShapeError("mlp: " + std::to_string(mlp.size()) + " layers vs config " +
                     std::to_string(config.mlp_layer_widths.size()));
  }
  std::size_t in = config.pooled_dim(kind);
  for (std::size_t i = 0; i < mlp.size(); ++i) {
    const std::size_t w = config.mlp_layer_widths[i];
    if (mlp[i].weights.rows() != w || mlp[i].weights.cols() != in || mlp[i].bias.size() != w) {
      throw ShapeError("mlp." + std::to_string(i) + ": expected " + std::to_string(w) + "x" +
                       std::to_string(in) + ", got " + std::to_string(mlp[i].weights.rows()) +
                       "x" + std::to_string(mlp[i].weights.cols()));
    }
    in = w;
  }
}

bool ModelParams::all_finite() const {
  for (const auto& v : views()) {
    for (double x : v.values) {
      if (!std::isfinite(x)) return false;
    }
  }
  return true;
}

void ModelParams::set_zero() {
  for (auto& v : views()) std::fill(v.values.begin(), v.values.end(), 0.0);
}

void ModelParams::add_scaled(const ModelParams& other, double scale) {
  auto dst = views();
  const auto src = other.views();
  if (dst.size() != src.size()) throw ShapeError("add_scaled: parameter sets differ");
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if (dst[i].values.size() != src[i].values.size() || dst[i].name != src[i].name) {
      throw ShapeError("add_scaled: tensor " + dst[i].name + " differs from " + src[i].name);
    }
    simd::axpy(scale, src[i].values, dst[i].values);
  }
}

// ---------------------------------------------------------------------------
// Encoders

namespace {

void check_frames(const Tensor2& frames, const EncoderConfig& config) {
  if (frames.rows() != config.max_frames || frames.cols() != config.feature_dim) {
    throw ShapeError("trailer features: expected " + std::to_string(config.max_frames) + "x" +
                     std::to_string(config.feature_dim) + ", got " +
                     std::to_string(frames.rows()) + "x" + std::to_string(frames.cols()));
  }
}

void run_mlp(const ModelParams& params, EncoderTrace& trace) {
  std::vector<double> h = trace.pooled;
  for (std::size_t i = 0; i < params.mlp.size(); ++i) {
    trace.mlp_inputs.push_back(h);
    std::vector<double> pre = affine_forward(h, params.mlp[i].weights, params.mlp[i].bias);
    h = pre;
    if (i + 1 < params.mlp.size()) relu_inplace(h);
    trace.mlp_pre.push_back(std::move(pre));
  }
  trace.movie_vector = std::move(h);
}

Tensor2 conv_stack(const Tensor2& frames, const ModelParams& params, const EncoderConfig& config,
                   Tensor2* h1_out) {
  Tensor2 h1 = relu(temporal_conv_forward(frames, params.conv1, config.conv1_spec()));
  Tensor2 h2;
  if (config.has_residual_layer()) {
    h2 = temporal_conv_forward(h1, params.conv_res, config.conv_res_spec());
    if (config.uses_skip()) simd::add(h1.flat(), h2.flat());
    relu_inplace(h2.flat());
  } else {
    h2 = h1;
  }
  if (h1_out != nullptr) *h1_out = std::move(h1);
  return h2;
}

}  // namespace

EncoderTrace encode_with_trace(const Tensor2& frames, const ModelParams& params,
                               const EncoderConfig& config) {
  check_frames(frames, config);
  EncoderTrace trace;
  trace.kind = params.kind;
  if (params.kind == EncoderKind::kConv) {
    trace.h2 = conv_stack(frames, params, config, &trace.h1);
    trace.pooled = avg_pool_time(trace.h2);
  } else {
    trace.pooled = avg_pool_time(frames);
  }
  run_mlp(params, trace);
  return trace;
}

std::vector<double> encode_movie_conv(const Tensor2& frames, const ModelParams& params,
                                      const EncoderConfig& config) {
  if (params.kind != EncoderKind::kConv) throw Error("encode_movie_conv: params are not conv");
  return encode_with_trace(frames, params, config).movie_vector;
}

std::vector<double> encode_movie_avgpool(const Tensor2& frames, const ModelParams& params,
                                         const EncoderConfig& config) {
  if (params.kind != EncoderKind::kAvgPool) {
    throw Error("encode_movie_avgpool: params are not avgpool");
  }
  return encode_with_trace(frames, params, config).movie_vector;
}

std::vector<double> encode_movie(const Tensor2& frames, const ModelParams& params,
                                 const EncoderConfig& config) {
  return encode_with_trace(frames, params, config).movie_vector;
}

Tensor2 last_relu_activations(const Tensor2& frames, const ModelParams& params,
                              const EncoderConfig& config) {
  if (params.kind != EncoderKind::kConv) {
    throw Error("last relu activations exist only for the conv encoder");
  }
  check_frames(frames, config);
  return conv_stack(frames, params, config, nullptr);
}

void encoder_backward(const Tensor2& frames, const EncoderTrace& trace, const ModelParams& params,
                      const EncoderConfig& config, std::span<const double> grad_movie_vector,
                      ModelParams& grads) {
  std::vector<double> g(grad_movie_vector.begin(), grad_movie_vector.end());
  for (std::size_t i = params.mlp.size(); i-- > 0;) {
    if (i + 1 < params.mlp.size()) {
      simd::active().relu_mask(trace.mlp_pre[i].data(), g.data(), g.size());
    }
    AffineGrads ag = affine_backward(trace.mlp_inputs[i], params.mlp[i].weights, g);
    simd::add(ag.grad_weights.flat(), grads.mlp[i].weights.flat());
    simd::add(ag.grad_bias, grads.mlp[i].bias);
    g = std::move(ag.grad_x);
  }
  if (params.kind == EncoderKind::kAvgPool) return;

  Tensor2 dh2 = avg_pool_time_backward(trace.h2.rows(), g);
  Tensor2 dh1;
  if (config.has_residual_layer()) {
    dh2 = relu_backward(trace.h2, dh2);
    dh1 = config.uses_skip() ? dh2 : Tensor2(trace.h1.rows(), trace.h1.cols());
    temporal_conv_backward_accumulate(trace.h1, params.conv_res, config.conv_res_spec(), dh2,
                                      grads.conv_res, &dh1);
  } else {
    dh1 = std::move(dh2);
  }
  dh1 = relu_backward(trace.h1, dh1);
  temporal_conv_backward_accumulate(frames, params.conv1, config.conv1_spec(), dh1, grads.conv1,
                                    nullptr);
}

// ---------------------------------------------------------------------------
// Scoring

std::vector<double> build_user_vector(const UserContext& ctx,
                                      std::span<const std::vector<double>> movie_vectors,
                                      MovieIndex target, std::size_t dim) {
  std::vector<double> u(dim, 0.0);
  for (MovieIndex m : ctx.attended_movies) {
    if (m == target) continue;
    if (m >= movie_vectors.size() || movie_vectors[m].empty()) {
      throw Error("user " + std::to_string(ctx.user_id) + ": no vector for attended movie " +
                  std::to_string(m));
    }
    if (movie_vectors[m].size() != dim) {
      throw ShapeError("movie " + std::to_string(m) + " vector has " +
                       std::to_string(movie_vectors[m].size()) + " dims, expected " +
                       std::to_string(dim));
    }
    simd::add(movie_vectors[m], u);
  }
  if (ctx.demographics) u.insert(u.end(), ctx.demographics->begin(), ctx.demographics->end());
  return u;
}

double cf_score(std::span<const double> user_vector, std::span<const double> movie_vector) {
  if (user_vector.size() != movie_vector.size()) {
    throw ShapeError("cf_score: user vector has " + std::to_string(user_vector.size()) +
                     " dims, movie vector " + std::to_string(movie_vector.size()));
  }
  return simd::dot(user_vector, movie_vector);
}

double attendance_logit(double score, double frequency, double recency,
                        const ModelParams& params) {
  return params.lr_weights[0] * score + params.lr_weights[1] * frequency +
         params.lr_weights[2] * recency + params.lr_bias;
}

double predict_attendance(double score, double frequency, double recency,
                          const ModelParams& params) {
  return sigmoid(attendance_logit(score, frequency, recency, params));
}

// ---------------------------------------------------------------------------
// Loss

namespace {

double run_batch(std::span<const LabeledExample> batch, const ModelParams& params,
                 const EncoderConfig& config, std::span<const Tensor2> features,
                 ModelParams* grads) {
  if (batch.empty()) throw Error("forward_loss: empty batch");
  config.validate(params.kind);
  params.check_shape(config);

  // Every movie the batch touches, in ascending index order so gradient
  // accumulation order is fixed.
  std::vector<MovieIndex> needed;
  for (const auto& ex : batch) {
    needed.push_back(ex.movie);
    for (MovieIndex m : ex.context.attended_movies) {
      if (m != ex.movie) needed.push_back(m);
    }
  }
  std::sort(needed.begin(), needed.end());
  needed.erase(std::unique(needed.begin(), needed.end()), needed.end());
  if (!needed.empty() && needed.back() >= features.size()) {
    throw Error("forward_loss: movie " + std::to_string(needed.back()) + " has no features");
  }

  const std::size_t dim = config.movie_vector_dim(params.kind);
  std::vector<EncoderTrace> traces(features.size());
  std::vector<std::vector<double>> vectors(features.size());
  for (MovieIndex m : needed) {
    traces[m] = encode_with_trace(features[m], params, config);
    vectors[m] = traces[m].movie_vector;
  }

  std::vector<std::vector<double>> dvec;
  if (grads != nullptr) {
    dvec.assign(features.size(), {});
    for (MovieIndex m : needed) dvec[m].assign(dim, 0.0);
  }

  const double inv_n = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  for (const auto& ex : batch) {
    const std::vector<double> u = build_user_vector(ex.context, vectors, ex.movie, dim);
    const std::vector<double>& v = vectors[ex.movie];
    const double score = cf_score(u, v);
    const double logit =
        attendance_logit(score, ex.context.frequency, ex.context.recency, params);
    const BceResult r = sigmoid_bce(logit, ex.label);
    total += r.loss;
    if (grads == nullptr) continue;

    const double dl = r.dloss_dlogit * inv_n;
    grads->lr_weights[0] += dl * score;
    grads->lr_weights[1] += dl * ex.context.frequency;
    grads->lr_weights[2] += dl * ex.context.recency;
    grads->lr_bias += dl;
    const double dscore = dl * params.lr_weights[0];
    if (dscore == 0.0) continue;
    simd::axpy(dscore, u, dvec[ex.movie]);
    for (MovieIndex m : ex.context.attended_movies) {
      if (m != ex.movie) simd::axpy(dscore, v, dvec[m]);
    }
  }

  if (grads != nullptr) {
    for (MovieIndex m : needed) {
      const auto& g = dvec[m];
      if (std::all_of(g.begin(), g.end(), [](double x) { return x == 0.0; })) continue;
      encoder_backward(features[m], traces[m], params, config, g, *grads);
    }
  }
  return total * inv_n;
}

}  // namespace

LossAndGrad forward_loss(std::span<const LabeledExample> batch, const ModelParams& params,
                         const EncoderConfig& config, std::span<const Tensor2> features) {
  LossAndGrad out{0.0, ModelParams::zeros(config, params.kind)};
  out.mean_loss = run_batch(batch, params, config, features, &out.grads);
  return out;
}

double batch_loss(std::span<const LabeledExample> batch, const ModelParams& params,
                  const EncoderConfig& config, std::span<const Tensor2> features) {
  return run_batch(batch, params, config, features, nullptr);
}

std::pair<std::size_t, std::size_t> receptive_field(const EncoderConfig& config, std::size_t t) {
  if (t >= config.last_relu_length()) {
    throw ShapeError("receptive_field: timestep " + std::to_string(t) + " out of range [0, " +
                     std::to_string(config.last_relu_length()) + ")");
  }
  const std::size_t k2 = std::max<std::size_t>(config.residual_filter_width, 1);
  const std::size_t s = config.stride;
  return {s * t, s * (t + k2 - 1) + config.filter_width - 1};
}

}  // namespace tcf
