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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "tcf/error.hpp"
#include "tcf/gradcheck.hpp"
#include "tcf/gradcheck_suite.hpp"
#include "tcf/model.hpp"
#include "test_util.hpp"

using namespace tcf;
using tcf::testing::random_tensor;
using tcf::testing::random_vector;

namespace {

EncoderConfig small_config() {
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

std::vector<Tensor2> random_features(std::size_t n, const EncoderConfig& c, std::mt19937_64& rng) {
  std::vector<Tensor2> f;
  for (std::size_t i = 0; i < n; ++i) f.push_back(random_tensor(c.max_frames, c.feature_dim, rng));
  return f;
}

// 2 users, 3 movies; covers leave-target-out, positives and negatives.
std::vector<LabeledExample> small_batch(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  UserContext a{0, {0, 1}, u(rng), u(rng), std::nullopt};
  UserContext b{1, {1, 2}, u(rng), u(rng), std::nullopt};
  return {{a, 0, 1}, {a, 2, 0}, {b, 2, 1}, {b, 0, 0}, {b, 1, 1}};
}

}  // namespace

TEST_CASE("reference geometry: 120 frames, k=8, s=2 gives 57 conv timesteps") {
  EncoderConfig c;
  c.feature_dim = 16;
  c.conv_out_channels = 4;
  CHECK(c.max_frames == 120);
  CHECK(c.conv1_length() == 57);
  CHECK(c.last_relu_length() == 57);
  const ModelParams p = ModelParams::init(c, EncoderKind::kConv, 1);
  std::mt19937_64 rng(1);
  const EncoderTrace tr = encode_with_trace(random_tensor(120, 16, rng), p, c);
  CHECK(tr.h1.rows() == 57);
  CHECK(tr.movie_vector.size() == 4);
}

TEST_CASE("encoder rejects features that do not match the config") {
  const EncoderConfig c = small_config();
  const ModelParams p = ModelParams::zeros(c, EncoderKind::kConv);
  CHECK_THROWS_AS(encode_movie_conv(Tensor2(8, 4), p, c), ShapeError);
  CHECK_THROWS_AS(encode_movie_conv(Tensor2(9, 5), p, c), ShapeError);
  CHECK_THROWS_AS(encode_movie_avgpool(Tensor2(9, 4), p, c), Error);
}

TEST_CASE("all-zero conv model encodes to zero") {
  EncoderConfig c = small_config();
  std::mt19937_64 rng(2);
  const ModelParams p = ModelParams::zeros(c, EncoderKind::kConv);
  const auto v = encode_movie_conv(random_tensor(9, 4, rng), p, c);
  CHECK(v == std::vector<double>(3, 0.0));
}

TEST_CASE("zero residual conv reproduces the single-layer encoder exactly") {
  EncoderConfig with = small_config();
  EncoderConfig without = with;
  without.residual_filter_width = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(seed);
    ModelParams p = ModelParams::init(with, EncoderKind::kConv, seed);
    p.conv_res.weights.fill(0.0);
    std::fill(p.conv_res.bias.begin(), p.conv_res.bias.end(), 0.0);
    ModelParams q = ModelParams::zeros(without, EncoderKind::kConv);
    q.conv1 = p.conv1;
    const Tensor2 x = random_tensor(9, 4, rng);
    CHECK(encode_movie_conv(x, p, with) == encode_movie_conv(x, q, without));
  }
}

TEST_CASE("1-frame residual conv is one shared affine map per timestep") {
  std::mt19937_64 rng(3);
  const ConvSpec spec{6, 6, 1, 1};
  const ConvParams p = testing::random_conv(spec, rng);
  const Tensor2 h = random_tensor(11, 6, rng);
  const Tensor2 y = temporal_conv_forward(h, p, spec);
  for (std::size_t t = 0; t < h.rows(); ++t) {
    const auto ref = affine_forward(h.row(t), p.weights, p.bias);
    CHECK(max_abs_diff(y.row(t), ref) < 1e-12);
  }
}

TEST_CASE("avg-pool encoder") {
  EncoderConfig c = small_config();
  const ModelParams p = ModelParams::zeros(c, EncoderKind::kAvgPool);
  const std::vector<double> f{0.5, -1.0, 2.0, 3.0};
  Tensor2 x(9, 4);
  for (std::size_t t = 0; t < 9; ++t) std::copy(f.begin(), f.end(), x.row(t).begin());
  CHECK(encode_movie_avgpool(x, p, c) == f);
  CHECK(encode_movie_avgpool(Tensor2(9, 4), p, c) == std::vector<double>(4, 0.0));

  c.mlp_layer_widths = {3};
  ModelParams q = ModelParams::zeros(c, EncoderKind::kAvgPool);
  q.mlp[0].bias = {1.0, 2.0, 3.0};
  CHECK(encode_movie_avgpool(Tensor2(9, 4), q, c) == q.mlp[0].bias);
}

TEST_CASE("avg-pool encoder is permutation invariant, conv encoder is not") {
  EncoderConfig c = small_config();
  c.max_frames = 20;
  c.mlp_layer_widths = {5, 3};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(seed);
    const Tensor2 x = random_tensor(20, 4, rng);
    const ModelParams pa = ModelParams::init(c, EncoderKind::kAvgPool, seed);
    const ModelParams pc = ModelParams::init(c, EncoderKind::kConv, seed);
    const auto va = encode_movie_avgpool(x, pa, c);
    const auto vc = encode_movie_conv(x, pc, c);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const std::size_t t = rng() % 19;
      Tensor2 y = x;
      std::swap_ranges(y.row(t).begin(), y.row(t).end(), y.row(t + 1).begin());
      CHECK(encode_movie_avgpool(y, pa, c) == va);
      worst = std::max(worst, max_abs_diff(encode_movie_conv(y, pc, c), vc));
    }
    CHECK(worst > 1e-8);
  }
}

TEST_CASE("user vector") {
  const std::vector<std::vector<double>> mv{{1, 2}, {3, 4}, {5, 6}};
  UserContext ctx{0, {1}, 0.0, 0.0, std::nullopt};
  CHECK(build_user_vector(ctx, mv, 0, 2) == mv[1]);
  ctx.attended_movies = {0};
  CHECK(build_user_vector(ctx, mv, 0, 2) == std::vector<double>{0, 0});
  ctx.attended_movies = {0, 2};
  CHECK(build_user_vector(ctx, mv, 1, 2) == std::vector<double>{6, 8});
  ctx.demographics = std::vector<double>{9.0};
  CHECK(build_user_vector(ctx, mv, 1, 2) == std::vector<double>{6, 8, 9});
  ctx.demographics.reset();
  ctx.attended_movies = {7};
  CHECK_THROWS_AS(build_user_vector(ctx, mv, 0, 2), Error);
}

TEST_CASE("user vector is additive over disjoint attendance sets") {
  std::mt19937_64 rng(5);
  std::vector<std::vector<double>> mv;
  for (int i = 0; i < 12; ++i) mv.push_back(random_vector(4, rng));
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<MovieIndex> ids(12);
    for (MovieIndex i = 0; i < 12; ++i) ids[i] = i;
    std::shuffle(ids.begin(), ids.end(), rng);
    const std::size_t cut = rng() % 12;
    UserContext a{0, {ids.begin(), ids.begin() + cut}, 0, 0, std::nullopt};
    UserContext b{0, {ids.begin() + cut, ids.end()}, 0, 0, std::nullopt};
    UserContext ab{0, ids, 0, 0, std::nullopt};
    const MovieIndex none = 99;
    const auto ua = build_user_vector(a, mv, none, 4);
    const auto ub = build_user_vector(b, mv, none, 4);
    const auto uab = build_user_vector(ab, mv, none, 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(uab[i] - (ua[i] + ub[i])) < 1e-12);
  }
}

TEST_CASE("cf_score and predict_attendance") {
  CHECK(cf_score(std::vector<double>{1, 0}, std::vector<double>{0, 3}) == 0.0);
  CHECK(cf_score(std::vector<double>{2, 0}, std::vector<double>{2, 0}) == 4.0);
  CHECK(cf_score(std::vector<double>{3, 6}, std::vector<double>{1, 2}) ==
        3.0 * cf_score(std::vector<double>{1, 2}, std::vector<double>{1, 2}));
  CHECK_THROWS_AS(cf_score(std::vector<double>{1}, std::vector<double>{1, 2}), ShapeError);

  ModelParams p;
  CHECK(predict_attendance(5.0, 1.0, 2.0, p) == 0.5);
  p.lr_weights = {0.7, -0.2, 0.1};
  p.lr_bias = 0.05;
  double last = 0.0;
  for (double s = -5.0; s <= 5.0; s += 0.5) {
    const double prob = predict_attendance(s, 0.3, 0.4, p);
    CHECK(prob > last);
    CHECK(prob < 1.0);
    last = prob;
  }
  const double logit = attendance_logit(1.5, 0.3, 0.4, p);
  CHECK(predict_attendance(1.5, 0.3, 0.4, p) == sigmoid_bce(logit, 1).probability);
}

TEST_CASE("forward_loss of the all-zero model is ln 2") {
  const EncoderConfig c = small_config();
  std::mt19937_64 rng(6);
  const auto features = random_features(3, c, rng);
  const auto batch = small_batch(rng);
  for (EncoderKind kind : {EncoderKind::kConv, EncoderKind::kAvgPool}) {
    const ModelParams p = ModelParams::zeros(c, kind);
    CHECK(std::abs(forward_loss(batch, p, c, features).mean_loss - std::log(2.0)) < 1e-12);
  }
  CHECK_THROWS_AS(forward_loss({}, ModelParams::zeros(c, EncoderKind::kConv), c, features), Error);
}

TEST_CASE("duplicating the batch leaves the mean loss unchanged") {
  const EncoderConfig c = small_config();
  std::mt19937_64 rng(7);
  const auto features = random_features(3, c, rng);
  auto batch = small_batch(rng);
  const ModelParams p = ModelParams::init(c, EncoderKind::kConv, 7);
  const double once = batch_loss(batch, p, c, features);
  auto twice = batch;
  twice.insert(twice.end(), batch.begin(), batch.end());
  CHECK(std::abs(batch_loss(twice, p, c, features) - once) < 1e-12);
}

TEST_CASE("full model gradients match central differences") {
  struct Variant {
    std::string name;
    std::size_t res_width;
    bool skip;
    std::vector<std::size_t> mlp;
  };
  const std::vector<Variant> variants{
      {"residual skip, identity mlp", 1, true, {}},
      {"residual skip, 2-layer mlp", 1, true, {5, 3}},
      {"width-2 residual without skip", 2, true, {4}},
      {"1-frame conv without skip", 1, false, {}},
      {"no residual layer", 0, false, {3}},
  };
  for (const auto& v : variants) {
    CAPTURE(v.name);
    EncoderConfig c = small_config();
    c.residual_filter_width = v.res_width;
    c.residual_enabled = v.skip;
    c.mlp_layer_widths = v.mlp;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      CHECK(model_gradcheck(c, EncoderKind::kConv, seed) < 1e-4);
    }
  }
  EncoderConfig c = small_config();
  c.mlp_layer_widths = {5, 3};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CHECK(model_gradcheck(c, EncoderKind::kAvgPool, seed) < 1e-4);
  }
}

TEST_CASE("receptive field arithmetic") {
  EncoderConfig c;
  c.feature_dim = 2;
  c.conv_out_channels = 2;
  CHECK(receptive_field(c, 0) == std::pair<std::size_t, std::size_t>{0, 7});
  CHECK(receptive_field(c, 10) == std::pair<std::size_t, std::size_t>{20, 27});
  c.residual_filter_width = 3;
  const auto [first, last] = receptive_field(c, 0);
  CHECK(last - first + 1 == 12);
  CHECK_THROWS_AS(receptive_field(c, c.last_relu_length()), ShapeError);
}

TEST_CASE("receptive field agrees with a perturbation oracle") {
  for (std::size_t res : {0u, 1u, 2u, 3u}) {
    CAPTURE(res);
    EncoderConfig c;
    c.feature_dim = 3;
    c.max_frames = 30;
    c.conv_out_channels = 2;
    c.filter_width = 4;
    c.stride = 2;
    c.residual_filter_width = res;
    std::mt19937_64 rng(res + 40);
    // Positive weights and inputs keep every relu active, so any frame that
    // reaches an output moves it.
    ModelParams p = ModelParams::zeros(c, EncoderKind::kConv);
    for (auto& v : p.views()) {
      for (double& w : v.values) w = std::uniform_real_distribution<double>(0.1, 1.0)(rng);
    }
    const Tensor2 x = random_tensor(30, 3, rng, 0.1, 1.0);
    const Tensor2 base = last_relu_activations(x, p, c);
    for (std::size_t t = 0; t < c.last_relu_length(); ++t) {
      const auto [first, last] = receptive_field(c, t);
      CHECK(last < c.max_frames);
      for (std::size_t f = 0; f < c.max_frames; ++f) {
        Tensor2 y = x;
        for (double& v : y.row(f)) v += 0.5;
        const Tensor2 out = last_relu_activations(y, p, c);
        const double d = max_abs_diff(out.row(t), base.row(t));
        if (f >= first && f <= last) {
          CHECK(d > 0.0);
        } else {
          CHECK(d == 0.0);
        }
      }
    }
  }
}

TEST_CASE("parameter views are named and ordered") {
  EncoderConfig c = small_config();
  c.mlp_layer_widths = {5};
  ModelParams p = ModelParams::zeros(c, EncoderKind::kConv);
  std::vector<std::string> names;
  for (const auto& v : p.views()) names.push_back(v.name);
  CHECK(names == std::vector<std::string>{"conv1.weight", "conv1.bias", "conv_res.weight",
                                          "conv_res.bias", "mlp.0.weight", "mlp.0.bias",
                                          "head.weight", "head.bias"});
  CHECK(p.views()[0].dims == std::vector<std::size_t>{3, 3, 4});
  CHECK(p.parameter_count() == 36 + 3 + 9 + 3 + 15 + 5 + 3 + 1);
}
