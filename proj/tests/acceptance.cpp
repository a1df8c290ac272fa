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

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixture.hpp"
#include "tcf/error.hpp"
#include "tcf/eval.hpp"
#include "tcf/explain.hpp"
#include "tcf/gradcheck_suite.hpp"
#include "tcf/train.hpp"

using namespace tcf;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

Tensor2 uniform(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Tensor2 t(rows, cols);
  for (double& v : t.flat()) v = u(rng);
  return t;
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "tcf_acceptance";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Desk-scale synthetic world: D=32, 200 movies, 2000 users, sigma 0.3.
testing::World desk_world(std::uint64_t seed) {
  SynthConfig sc;
  sc.seed = seed;
  auto w = testing::make_world(sc, 40, seed, 16);
  w.model.filter_width = 8;
  w.model.mlp_layer_widths = {8};
  return w;
}

TrainConfig desk_train(EncoderKind kind, std::uint64_t seed) {
  TrainConfig tc;
  tc.encoder_kind = kind;
  tc.seed = seed;
  return tc;
}

constexpr std::uint64_t kSeeds[] = {1, 2, 3, 4, 5};

// 1 -------------------------------------------------------------------------
Verdict shape_law() {
  Verdict v;
  EncoderConfig c;  // 120 frames, k=8, s=2
  c.feature_dim = 1024;
  c.conv_out_channels = 16;
  std::mt19937_64 rng(1);
  const ModelParams p = ModelParams::init(c, EncoderKind::kConv, 1);
  const Tensor2 frames = uniform(120, 1024, rng);
  const EncoderTrace t = encode_with_trace(frames, p, c);
  v.require(c.conv1_length() == 57, "conv1_length == 57");
  v.require(t.h1.rows() == 57, "h1 has 57 timesteps");
  v.require(t.h2.rows() == 57, "last relu has 57 timesteps");
  v.note("120 frames -> " + std::to_string(t.h1.rows()) + " timesteps");
  return v;
}

// 2 -------------------------------------------------------------------------
Verdict gradient_suite() {
  Verdict v;
  double worst = 0.0;
  for (const auto& o : run_gradcheck_suite(20, 1)) {
    v.require(o.instances >= 20, o.name + " instances");
    v.require(o.max_error < 1e-4, o.name + " max rel err " + fmt("%.2e", o.max_error));
    worst = std::max(worst, o.max_error);
  }
  v.note("11 checks x 20 instances, worst rel err " + fmt("%.2e", worst));
  return v;
}

// 3 -------------------------------------------------------------------------
Verdict auc_oracle() {
  Verdict v;
  std::mt19937_64 rng(3);
  double worst = 0.0;
  bool monotone = true;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 500)(rng);
    const int levels = std::uniform_int_distribution<int>(2, 300)(rng);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = std::uniform_int_distribution<int>(-levels, levels)(rng) / 32.0;
      y[i] = std::bernoulli_distribution(0.4)(rng) ? 1 : 0;
    }
    y[0] = 1;
    y[1] = 0;
    double credit = 0.0;
    double pairs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (y[i] != 1 || y[j] != 0) continue;
        pairs += 1.0;
        credit += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
      }
    }
    const double a = auc(s, y);
    worst = std::max(worst, std::abs(a - credit / pairs));
    std::vector<double> t(n);
    std::transform(s.begin(), s.end(), t.begin(), [](double x) { return std::exp(x); });
    monotone = monotone && auc(t, y) == a;
    std::transform(s.begin(), s.end(), t.begin(), [](double x) { return 2.0 * x + 5.0; });
    monotone = monotone && auc(t, y) == a;
  }
  v.require(worst < 1e-12, "rank vs brute force diff " + fmt("%.2e", worst));
  v.require(monotone, "exact invariance under exp and affine transforms");
  v.note("200 instances, max |diff| " + fmt("%.1e", worst));
  return v;
}

// 4 -------------------------------------------------------------------------
Verdict pooling_symmetry() {
  Verdict v;
  EncoderConfig c;
  c.feature_dim = 8;
  c.max_frames = 20;
  c.conv_out_channels = 8;
  c.filter_width = 4;
  c.mlp_layer_widths = {6};
  double min_conv_diff = 1e300;
  for (std::uint64_t seed : kSeeds) {
    std::mt19937_64 rng(seed);
    const Tensor2 x = uniform(c.max_frames, c.feature_dim, rng);
    std::vector<std::size_t> perm(c.max_frames);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    Tensor2 shuffled(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
      std::copy(x.row(perm[r]).begin(), x.row(perm[r]).end(), shuffled.row(r).begin());
    }
    const ModelParams avg = ModelParams::init(c, EncoderKind::kAvgPool, seed);
    v.require(encode_movie(x, avg, c) == encode_movie(shuffled, avg, c),
              "avg-pool permutation invariance, seed " + std::to_string(seed));

    const ModelParams conv = ModelParams::init(c, EncoderKind::kConv, seed);
    Tensor2 swapped = x;
    const std::size_t i = std::uniform_int_distribution<std::size_t>(0, c.max_frames - 2)(rng);
    std::swap_ranges(swapped.row(i).begin(), swapped.row(i).end(), swapped.row(i + 1).begin());
    const auto a = encode_movie(x, conv, c);
    const auto b = encode_movie(swapped, conv, c);
    double diff = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) diff = std::max(diff, std::abs(a[k] - b[k]));
    min_conv_diff = std::min(min_conv_diff, diff);
    v.require(diff > 1e-8, "conv changes under adjacent swap, seed " + std::to_string(seed));
  }
  v.note("avg-pool exact over 5 seeds; conv min max-abs diff " + fmt("%.2e", min_conv_diff));
  return v;
}

// 5 -------------------------------------------------------------------------
Verdict cold_start_separation() {
  Verdict v;
  double conv_mean = 0.0;
  double avg_mean = 0.0;
  std::string per_seed;
  for (std::uint64_t seed : kSeeds) {
    auto w = desk_world(seed);
    double cold[2];
    int i = 0;
    for (EncoderKind kind : {EncoderKind::kConv, EncoderKind::kAvgPool}) {
      const TrainResult r = train(desk_train(kind, seed), w.split, *w.index, w.features, w.model);
      cold[i++] = evaluate(r.params, w.model, w.split, *w.index, w.features, 2000, seed)
                      .cold_start_auc;
    }
    conv_mean += cold[0] / 5.0;
    avg_mean += cold[1] / 5.0;
    v.require(cold[0] > cold[1], "conv > avgpool on seed " + std::to_string(seed));
    per_seed += (per_seed.empty() ? "" : " ") + fmt("%.3f", cold[0]) + "/" + fmt("%.3f", cold[1]);
  }
  v.require(conv_mean >= 0.65, "conv mean cold AUC " + fmt("%.3f", conv_mean) + " >= 0.65");
  v.require(avg_mean <= 0.55, "avgpool mean cold AUC " + fmt("%.3f", avg_mean) + " <= 0.55");
  v.note("mean cold AUC conv " + fmt("%.3f", conv_mean) + ", avgpool " + fmt("%.3f", avg_mean) +
         " (conv/avg per seed: " + per_seed + ")");
  return v;
}

// 6 -------------------------------------------------------------------------
Verdict filter_size_trend() {
  Verdict v;
  std::vector<SweepRow> rows;
  for (std::uint64_t seed : kSeeds) {
    auto w = desk_world(seed);
    SweepSpec spec{{1, 8}, {std::size_t{1}}, {seed}, 2000};
    const auto part = ablation_sweep(spec, w.model, desk_train(EncoderKind::kConv, seed), w.split,
                                     *w.index, w.features);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  const fs::path csv = scratch_dir() / "sweep.csv";
  write_sweep_csv(csv, rows);
  const auto back = read_sweep_csv(csv);
  bool same = back.size() == rows.size();
  for (std::size_t i = 0; same && i < rows.size(); ++i) {
    same = back[i].filter_width == rows[i].filter_width &&
           back[i].residual_width == rows[i].residual_width && back[i].seed == rows[i].seed &&
           std::abs(back[i].cold_start_auc - rows[i].cold_start_auc) <= 5e-7 &&
           std::abs(back[i].in_matrix_auc - rows[i].in_matrix_auc) <= 5e-7;
  }
  v.require(same, "sweep.csv re-parses to the in-memory rows");
  double w1 = 0.0;
  double w8 = 0.0;
  for (const auto& r : rows) (r.filter_width == 1 ? w1 : w8) += r.cold_start_auc / 5.0;
  v.require(w8 - w1 >= 0.05, "width 8 - width 1 = " + fmt("%.3f", w8 - w1) + " >= 0.05");
  v.note("mean cold AUC width 1 " + fmt("%.3f", w1) + ", width 8 " + fmt("%.3f", w8) + ", " +
         std::to_string(rows.size()) + " rows in " + csv.string());
  return v;
}

// 7 -------------------------------------------------------------------------
Verdict explainability() {
  Verdict v;
  auto w = desk_world(7);
  const ModelParams p = ModelParams::init(w.model, EncoderKind::kConv, 7);
  const MovieIndex planted = 11;
  const std::size_t t0 = 5;
  const auto [first, last] = receptive_field(w.model, t0);
  for (std::size_t f = first; f <= last; ++f) {
    for (double& x : w.features[planted].row(f)) x *= 100.0;
  }
  const ChannelStats stats = channel_activation_stats(p, w.model, w.features);
  std::size_t hit_channels = 0;
  std::size_t top_channels = 0;
  double worst = 0.0;
  std::size_t total = 0;
  for (std::size_t ch = 0; ch < w.model.conv_out_channels; ++ch) {
    const auto hits = top_activating_windows(p, w.model, w.features, stats, ch, 100000);
    if (!hits.empty() && hits[0].movie == planted && hits[0].timestep == t0) ++top_channels;
    for (const auto& h : hits) {
      if (h.movie == planted && h.timestep == t0 && h.first_frame == first &&
          h.last_frame == last) {
        ++hit_channels;
        break;
      }
    }
    for (const auto& h : hits) {
      const Tensor2 fresh = last_relu_activations(w.features[h.movie], p, w.model);
      worst = std::max(worst, std::abs(fresh(h.timestep, ch) - h.activation));
      v.require(fresh(h.timestep, ch) >= stats.mean[ch] + 2.0 * stats.stddev[ch] - 1e-12,
                "hit above the 2-sigma threshold");
      v.require(h.last_frame < w.model.max_frames, "window inside the trailer");
    }
    total += hits.size();
  }
  v.require(hit_channels > 0, "planted window is a 2-sigma hit");
  v.require(worst <= 1e-12, "recomputation diff " + fmt("%.2e", worst));
  v.note("planted frames [" + std::to_string(first) + ", " + std::to_string(last) +
         "] are a 2-sigma hit in " + std::to_string(hit_channels) + "/" +
         std::to_string(w.model.conv_out_channels) + " channels (top hit in " +
         std::to_string(top_channels) + "); " + std::to_string(total) +
         " hits recomputed, max diff " + fmt("%.1e", worst));
  return v;
}

// 8 -------------------------------------------------------------------------
Verdict protocol_exactness() {
  Verdict v;
  auto w = desk_world(8);
  const SamplingIndex& index = *w.index;

  const std::size_t n = w.split.train.size() + w.split.validation.size() + w.split.test.size();
  auto close = [&](std::size_t got, double ratio) {
    return std::abs(static_cast<double>(got) - ratio * static_cast<double>(n)) <= 1.0;
  };
  v.require(close(w.split.train.size(), 0.8) && close(w.split.validation.size(), 0.1) &&
                close(w.split.test.size(), 0.1),
            "80/10/10 split within rounding");

  std::mt19937_64 rng(8);
  bool half = true;
  bool clean = true;
  for (int b = 0; b < 50; ++b) {
    const auto batch = sample_training_batch(w.split, index, 256, rng);
    std::size_t pos = 0;
    for (const Sample& s : batch) {
      pos += s.label;
      if (s.label == 0) clean = clean && !index.attended(s.user, s.movie) && !index.is_cold(s.movie);
    }
    half = half && batch.size() == 256 && pos == 128;
  }
  v.require(half, "training batches exactly half positive");

  bool ratio = true;
  for (EvalPool pool : {EvalPool::kValidation, EvalPool::kTest, EvalPool::kColdStart}) {
    const auto pairs = sample_eval_pairs(w.split, index, pool, 2000, rng);
    std::size_t pos = 0;
    for (const Sample& s : pairs) {
      pos += s.label;
      if (s.label == 0) {
        clean = clean && !index.attended(s.user, s.movie) &&
                index.is_cold(s.movie) == (pool == EvalPool::kColdStart);
      }
    }
    ratio = ratio && pairs.size() == 2000 && pos == 200;
  }
  v.require(ratio, "eval pools exactly 1:9");
  v.require(clean, "no negative collides with a user's positives");

  const auto again = make_splits(w.dataset.events, w.dataset.release_order(), w.dataset.release_ts,
                                 40, SplitRatios{}, 8);
  bool det = again.train == w.split.train && again.validation == w.split.validation &&
             again.test == w.split.test && again.cold_start == w.split.cold_start &&
             again.cold_start_movies == w.split.cold_start_movies;
  std::mt19937_64 r1(99);
  std::mt19937_64 r2(99);
  det = det && sample_training_batch(w.split, index, 64, r1) ==
                   sample_training_batch(w.split, index, 64, r2);
  det = det && sample_eval_pairs(w.split, index, EvalPool::kColdStart, 500, r1) ==
                   sample_eval_pairs(w.split, index, EvalPool::kColdStart, 500, r2);
  v.require(det, "splits and samplers bit-deterministic per seed");
  v.note(std::to_string(n) + " positives split " + std::to_string(w.split.train.size()) + "/" +
         std::to_string(w.split.validation.size()) + "/" + std::to_string(w.split.test.size()) +
         "; 50 batches and 3 eval pools checked");
  return v;
}

// 9 -------------------------------------------------------------------------
Verdict checkpoint_and_invariants() {
  Verdict v;
  auto w = testing::small_world();
  const ModelParams p = ModelParams::init(w.model, EncoderKind::kConv, 9);
  const fs::path a = scratch_dir() / "a.mck";
  const fs::path b = scratch_dir() / "b.mck";
  save_checkpoint(p, w.model, a);
  const Checkpoint ck = load_checkpoint(a);
  save_checkpoint(ck.params, ck.config, b);
  v.require(slurp(a) == slurp(b), "save -> load -> save byte-identical");
  v.require(ck.params.parameter_count() == p.parameter_count(), "parameter count preserved");

  TrainConfig tc;
  tc.batch_size = 16;
  tc.learning_rate = 0.0;
  tc.max_epochs = 3;
  tc.steps_per_epoch = 5;
  tc.validation_pairs = 100;
  const TrainResult r = train_from(p, tc, w.split, *w.index, w.features, w.model);
  bool unchanged = true;
  const auto before = p.views();
  const auto after = r.params.views();
  for (std::size_t i = 0; i < before.size(); ++i) {
    unchanged = unchanged && std::equal(before[i].values.begin(), before[i].values.end(),
                                        after[i].values.begin());
  }
  v.require(unchanged, "lr=0 leaves parameters unchanged");

  std::mt19937_64 rng(9);
  const auto batch = to_examples(sample_training_batch(w.split, *w.index, 32, rng), *w.index);
  double worst = 0.0;
  for (EncoderKind kind : {EncoderKind::kConv, EncoderKind::kAvgPool}) {
    const double loss =
        forward_loss(batch, ModelParams::zeros(w.model, kind), w.model, w.features).mean_loss;
    worst = std::max(worst, std::abs(loss - std::log(2.0)));
  }
  v.require(worst <= 1e-12, "zero-parameter loss = ln 2, diff " + fmt("%.1e", worst));
  v.note("checkpoint " + std::to_string(slurp(a).size()) + " bytes; |loss - ln 2| = " +
         fmt("%.1e", worst));
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    const char* title;
    std::function<Verdict()> run;
  };
  const Criterion criteria[] = {
      {"shape law: 120 frames, k=8, s=2 -> 57 timesteps", shape_law},
      {"gradient suite < 1e-4 on 20 instances per check", gradient_suite},
      {"AUC oracle and monotone invariance", auc_oracle},
      {"pooling symmetry", pooling_symmetry},
      {"cold-start separation conv vs avgpool", cold_start_separation},
      {"filter-size trend width 8 vs 1", filter_size_trend},
      {"explainability plant-and-recover", explainability},
      {"protocol exactness", protocol_exactness},
      {"checkpoint round trip, lr=0, ln 2", checkpoint_and_invariants},
  };
  int failures = 0;
  int index = 0;
  for (const Criterion& c : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.note(std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += v.pass ? 0 : 1;
    std::printf("[%s] %d. %s (%.1fs): %s\n", v.pass ? "PASS" : "FAIL", index, c.title, secs,
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/9 criteria passed\n", 9 - failures);
  return failures == 0 ? 0 : 1;
}
