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
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fixture.hpp"
#include "tcf/error.hpp"
#include "tcf/eval.hpp"

using namespace tcf;
namespace fs = std::filesystem;

namespace {

double brute_force_auc(const std::vector<double>& s, const std::vector<int>& y) {
  double credit = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      pairs += 1.0;
      credit += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
    }
  }
  return credit / pairs;
}

// Scores on a coarse grid so ties occur and transforms stay exact.
void random_instance(std::mt19937_64& rng, std::vector<double>& s, std::vector<int>& y) {
  const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 500)(rng);
  const int levels = std::uniform_int_distribution<int>(2, 400)(rng);
  s.resize(n);
  y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = std::uniform_int_distribution<int>(-levels, levels)(rng) / 64.0;
    y[i] = std::bernoulli_distribution(0.3)(rng) ? 1 : 0;
  }
  y[0] = 1;
  y[1] = 0;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "tcf_test_eval";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("auc worked examples") {
  CHECK(auc(std::vector<double>{0.9, 0.1}, std::vector<int>{1, 0}) == 1.0);
  CHECK(auc(std::vector<double>{0.1, 0.9}, std::vector<int>{1, 0}) == 0.0);
  CHECK(auc(std::vector<double>{0.4, 0.4, 0.4, 0.4}, std::vector<int>{1, 0, 1, 0}) == 0.5);
  CHECK(auc(std::vector<double>{0.8, 0.8, 0.3}, std::vector<int>{1, 0, 0}) == 0.75);
}

TEST_CASE("auc rejects single-class and malformed input") {
  CHECK_THROWS_AS(auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), Error);
  CHECK_THROWS_AS(auc(std::vector<double>{0.1, 0.2}, std::vector<int>{0, 0}), Error);
  CHECK_THROWS_AS(auc(std::vector<double>{}, std::vector<int>{}), Error);
  CHECK_THROWS_AS(auc(std::vector<double>{0.1}, std::vector<int>{1, 0}), Error);
  CHECK_THROWS_AS(auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 2}), Error);
}

TEST_CASE("rank-statistic auc equals brute-force pair counting") {
  std::mt19937_64 rng(11);
  std::vector<double> s;
  std::vector<int> y;
  for (int trial = 0; trial < 200; ++trial) {
    random_instance(rng, s, y);
    CHECK(std::abs(auc(s, y) - brute_force_auc(s, y)) < 1e-12);
  }
}

TEST_CASE("auc is invariant under strictly increasing transforms") {
  std::mt19937_64 rng(12);
  std::vector<double> s;
  std::vector<int> y;
  for (int trial = 0; trial < 50; ++trial) {
    random_instance(rng, s, y);
    const double base = auc(s, y);
    std::vector<double> t(s.size());
    std::transform(s.begin(), s.end(), t.begin(), [](double v) { return std::exp(v); });
    CHECK(auc(t, y) == base);
    std::transform(s.begin(), s.end(), t.begin(), [](double v) { return 3.0 * v + 2.0; });
    CHECK(auc(t, y) == base);
  }
}

TEST_CASE("auc of negated scores is the complement without ties") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial * 7;
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = std::normal_distribution<double>()(rng);
      y[i] = static_cast<int>(i % 2);
    }
    std::vector<double> neg(n);
    std::transform(s.begin(), s.end(), neg.begin(), [](double v) { return -v; });
    CHECK(std::abs(auc(s, y) + auc(neg, y) - 1.0) < 1e-12);
  }
}

TEST_CASE("untrained models score near chance on synthetic data") {
  // Random conv filters are order-sensitive, so a single untrained conv
  // encoder can already lean towards one genre; only its seed mean is near
  // chance. The avg-pool encoder sees no genre signal at all.
  double conv_in = 0.0;
  double conv_cold = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    CAPTURE(seed);
    SynthConfig sc;
    sc.seed = seed;
    auto w = testing::make_world(sc, 40, seed, 16);
    w.model.filter_width = 8;
    w.model.mlp_layer_widths = {8};
    const ModelParams avg = ModelParams::init(w.model, EncoderKind::kAvgPool, seed);
    const EvalReport r = evaluate(avg, w.model, w.split, *w.index, w.features, 2000, seed);
    CHECK(r.in_matrix_auc >= 0.4);
    CHECK(r.in_matrix_auc <= 0.6);
    CHECK(r.cold_start_auc >= 0.4);
    CHECK(r.cold_start_auc <= 0.6);
    const ModelParams conv = ModelParams::init(w.model, EncoderKind::kConv, seed);
    const EvalReport c = evaluate(conv, w.model, w.split, *w.index, w.features, 2000, seed);
    conv_in += c.in_matrix_auc / 5.0;
    conv_cold += c.cold_start_auc / 5.0;
  }
  CHECK(conv_in >= 0.4);
  CHECK(conv_in <= 0.6);
  CHECK(conv_cold >= 0.4);
  CHECK(conv_cold <= 0.6);
}

TEST_CASE("evaluate is deterministic and keeps the 1:9 ratio") {
  auto w = testing::small_world();
  const ModelParams p = ModelParams::init(w.model, EncoderKind::kConv, 4);
  const EvalReport a = evaluate(p, w.model, w.split, *w.index, w.features, 200, 9);
  const EvalReport b = evaluate(p, w.model, w.split, *w.index, w.features, 200, 9);
  CHECK(a.in_matrix_auc == b.in_matrix_auc);
  CHECK(a.cold_start_auc == b.cold_start_auc);
  CHECK(a.in_matrix_pairs == 200);
  CHECK(a.in_matrix_positives == 20);
  CHECK(a.cold_start_pairs == 200);
  CHECK(a.cold_start_positives == 20);
  CHECK_THROWS_AS(evaluate(p, w.model, w.split, *w.index, w.features, 205, 9), Error);

  const fs::path f1 = scratch("report1.csv");
  const fs::path f2 = scratch("report2.csv");
  write_report_csv(f1, a);
  write_report_csv(f2, b);
  CHECK(slurp(f1) == slurp(f2));
  CHECK(slurp(f1).starts_with("pool,auc,pairs,positives,negatives\nin_matrix,"));
}

TEST_CASE("score_samples matches predict_attendance on a hand-built user vector") {
  auto w = testing::small_world();
  const ModelParams p = ModelParams::init(w.model, EncoderKind::kConv, 2);
  std::mt19937_64 rng(3);
  const auto samples = sample_eval_pairs(w.split, *w.index, EvalPool::kTest, 30, rng);
  const auto scores = score_samples(p, w.model, w.features, *w.index, samples);
  REQUIRE(scores.size() == samples.size());
  std::vector<std::vector<double>> vecs;
  for (const auto& f : w.features) vecs.push_back(encode_movie(f, p, w.model));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const UserContext ctx = w.index->context(samples[i].user, samples[i].movie);
    std::vector<double> u(vecs[0].size(), 0.0);
    for (MovieIndex m : ctx.attended_movies) {
      for (std::size_t k = 0; k < u.size(); ++k) u[k] += vecs[m][k];
    }
    double dot = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) dot += u[k] * vecs[samples[i].movie][k];
    const double expect = predict_attendance(dot, ctx.frequency, ctx.recency, p);
    CHECK(std::abs(scores[i] - expect) < 1e-12);
  }
}

TEST_CASE("ablation sweep covers the cartesian product and round-trips") {
  auto w = testing::small_world();
  SweepSpec sweep;
  sweep.filter_widths = {1, 2, 4, 8};
  sweep.residual_options = {std::nullopt, std::size_t{1}};
  sweep.seeds = {1, 2, 3};
  sweep.eval_pair_total = 100;
  TrainConfig tc;
  tc.batch_size = 8;
  tc.max_epochs = 1;
  tc.steps_per_epoch = 2;
  tc.validation_pairs = 50;
  const auto rows = ablation_sweep(sweep, w.model, tc, w.split, *w.index, w.features);
  REQUIRE(rows.size() == 24);
  CHECK(rows[0].filter_width == 1);
  CHECK(!rows[0].residual_width.has_value());
  CHECK(rows[3].residual_width == std::size_t{1});
  CHECK(rows[23].filter_width == 8);
  CHECK(rows[23].seed == 3);
  for (const auto& r : rows) {
    CHECK(r.in_matrix_auc >= 0.0);
    CHECK(r.in_matrix_auc <= 1.0);
    CHECK(r.cold_start_auc >= 0.0);
    CHECK(r.cold_start_auc <= 1.0);
  }

  const fs::path path = scratch("sweep.csv");
  write_sweep_csv(path, rows);
  CHECK(slurp(path).starts_with("filter_width,residual,seed,in_matrix_auc,cold_start_auc\n1,none,1,"));
  const auto back = read_sweep_csv(path);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].filter_width == rows[i].filter_width);
    CHECK(back[i].residual_width == rows[i].residual_width);
    CHECK(back[i].seed == rows[i].seed);
    CHECK(std::abs(back[i].in_matrix_auc - rows[i].in_matrix_auc) <= 5e-7);
    CHECK(std::abs(back[i].cold_start_auc - rows[i].cold_start_auc) <= 5e-7);
    CHECK(format_real(back[i].cold_start_auc) == format_real(rows[i].cold_start_auc));
  }
}

TEST_CASE("reals are printed with six decimals") {
  CHECK(format_real(0.5) == "0.500000");
  CHECK(format_real(1.0 / 3.0) == "0.333333");
  CHECK(format_real(-1e-9) == "0.000000");
}
