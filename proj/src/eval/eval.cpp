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

#include "tcf/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>

#include "tcf/csv.hpp"
#include "tcf/error.hpp"

namespace tcf {

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  std::string s = buf;
  if (s == "-0.000000") s = "0.000000";
  return s;
}

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw Error("auc: " + std::to_string(scores.size()) + " scores vs " +
                std::to_string(labels.size()) + " labels");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of positive mid-ranks (1-based), ties share the average rank.
  double rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      const int y = labels[order[k]];
      if (y != 0 && y != 1) throw Error("auc: label must be 0 or 1, got " + std::to_string(y));
      if (y == 1) {
        rank_sum += mid;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = scores.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw Error("auc needs at least one positive and one negative");
  const double np = static_cast<double>(n_pos);
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

std::vector<double> score_samples(const ModelParams& params, const EncoderConfig& config,
                                  std::span<const Tensor2> features, const SamplingIndex& index,
                                  std::span<const Sample> samples) {
  std::vector<std::vector<double>> vectors(features.size());
  auto need = [&](MovieIndex m) {
    if (m >= features.size()) throw Error("no features for movie " + std::to_string(m));
    if (vectors[m].empty()) vectors[m] = encode_movie(features[m], params, config);
  };
  const std::size_t dim = config.movie_vector_dim(params.kind);
  std::vector<double> out;
  out.reserve(samples.size());
  for (const Sample& s : samples) {
    const UserContext ctx = index.context(s.user, s.movie);
    need(s.movie);
    for (MovieIndex m : ctx.attended_movies) need(m);
    const std::vector<double> u = build_user_vector(ctx, vectors, s.movie, dim);
    out.push_back(
        predict_attendance(cf_score(u, vectors[s.movie]), ctx.frequency, ctx.recency, params));
  }
  return out;
}

namespace {

double pool_auc(const ModelParams& params, const EncoderConfig& config,
                std::span<const Tensor2> features, const SamplingIndex& index,
                std::span<const Sample> samples, std::size_t& n_pos) {
  std::vector<int> labels;
  for (const Sample& s : samples) labels.push_back(s.label);
  n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  return auc(score_samples(params, config, features, index, samples), labels);
}

}  // namespace

EvalReport evaluate(const ModelParams& params, const EncoderConfig& config,
                    const DatasetSplit& split, const SamplingIndex& index,
                    std::span<const Tensor2> features, std::size_t eval_pair_total,
                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto test = sample_eval_pairs(split, index, EvalPool::kTest, eval_pair_total, rng);
  const auto cold = sample_eval_pairs(split, index, EvalPool::kColdStart, eval_pair_total, rng);
  EvalReport r;
  r.in_matrix_auc = pool_auc(params, config, features, index, test, r.in_matrix_positives);
  r.in_matrix_pairs = test.size();
  r.cold_start_auc = pool_auc(params, config, features, index, cold, r.cold_start_positives);
  r.cold_start_pairs = cold.size();
  return r;
}

void write_report_csv(const std::filesystem::path& path, const EvalReport& r) {
  std::ostringstream out;
  out << "pool,auc,pairs,positives,negatives\n";
  out << "in_matrix," << format_real(r.in_matrix_auc) << ',' << r.in_matrix_pairs << ','
      << r.in_matrix_positives << ',' << r.in_matrix_pairs - r.in_matrix_positives << '\n';
  out << "cold_start," << format_real(r.cold_start_auc) << ',' << r.cold_start_pairs << ','
      << r.cold_start_positives << ',' << r.cold_start_pairs - r.cold_start_positives << '\n';
  csv::write_file(path, out.str());
}

std::vector<SweepRow> ablation_sweep(const SweepSpec& sweep, const EncoderConfig& base_config,
                                     const TrainConfig& base_train, const DatasetSplit& split,
                                     const SamplingIndex& index,
                                     std::span<const Tensor2> features) {
  std::vector<SweepRow> rows;
  for (std::size_t width : sweep.filter_widths) {
    for (const auto& residual : sweep.residual_options) {
      for (std::uint64_t seed : sweep.seeds) {
        EncoderConfig mc = base_config;
        mc.filter_width = width;
        mc.residual_filter_width = residual.value_or(0);
        TrainConfig tc = base_train;
        tc.encoder_kind = EncoderKind::kConv;
        tc.seed = seed;
        const TrainResult trained = train(tc, split, index, features, mc);
        // The evaluation sample depends only on the seed, not the architecture.
        const EvalReport rep =
            evaluate(trained.params, mc, split, index, features, sweep.eval_pair_total, seed);
        rows.push_back({width, residual, seed, rep.in_matrix_auc, rep.cold_start_auc});
      }
    }
  }
  return rows;
}

void write_sweep_csv(const std::filesystem::path& path, std::span<const SweepRow> rows) {
  std::ostringstream out;
  out << "filter_width,residual,seed,in_matrix_auc,cold_start_auc\n";
  for (const SweepRow& r : rows) {
    out << r.filter_width << ','
        << (r.residual_width ? std::to_string(*r.residual_width) : std::string("none")) << ','
        << r.seed << ',' << format_real(r.in_matrix_auc) << ',' << format_real(r.cold_start_auc)
        << '\n';
  }
  csv::write_file(path, out.str());
}

std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path) {
  csv::Reader reader(path, {"filter_width", "residual", "seed", "in_matrix_auc", "cold_start_auc"});
  std::vector<SweepRow> rows;
  std::vector<std::string> f;
  while (reader.next(f)) {
    SweepRow r;
    r.filter_width = static_cast<std::size_t>(reader.parse_int(f[0], "filter_width"));
    if (f[1] != "none") r.residual_width = static_cast<std::size_t>(reader.parse_int(f[1], "residual"));
    r.seed = static_cast<std::uint64_t>(reader.parse_int(f[2], "seed"));
    r.in_matrix_auc = reader.parse_double(f[3], "in_matrix_auc");
    r.cold_start_auc = reader.parse_double(f[4], "cold_start_auc");
    rows.push_back(r);
  }
  return rows;
}

}  // namespace tcf
