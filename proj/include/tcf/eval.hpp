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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "tcf/data.hpp"
#include "tcf/model.hpp"
#include "tcf/train.hpp"

namespace tcf {

// Probability that a random positive outscores a random negative, ties
// counted as 1/2. Computed from mid-ranks in O(n log n).
double auc(std::span<const double> scores, std::span<const int> labels);

// Attendance probabilities for each sample. Movie vectors are computed once
// per distinct movie.
std::vector<double> score_samples(const ModelParams& params, const EncoderConfig& config,
                                  std::span<const Tensor2> features, const SamplingIndex& index,
                                  std::span<const Sample> samples);

struct EvalReport {
  double in_matrix_auc = 0.0;
  double cold_start_auc = 0.0;
  std::size_t in_matrix_pairs = 0;
  std::size_t in_matrix_positives = 0;
  std::size_t cold_start_pairs = 0;
  std::size_t cold_start_positives = 0;
};

// In-matrix AUC on test-pool pairs, cold-start AUC on cold-start pairs, each
// `eval_pair_total` pairs at 1:9.
EvalReport evaluate(const ModelParams& params, const EncoderConfig& config,
                    const DatasetSplit& split, const SamplingIndex& index,
                    std::span<const Tensor2> features, std::size_t eval_pair_total,
                    std::uint64_t seed);

void write_report_csv(const std::filesystem::path& path, const EvalReport& report);

struct SweepRow {
  std::size_t filter_width = 0;
  std::optional<std::size_t> residual_width;  // nullopt: no residual layer
  std::uint64_t seed = 0;
  double in_matrix_auc = 0.0;
  double cold_start_auc = 0.0;
};

struct SweepSpec {
  std::vector<std::size_t> filter_widths;
  std::vector<std::optional<std::size_t>> residual_options;
  std::vector<std::uint64_t> seeds;
  std::size_t eval_pair_total = 2000;
};

// Retrains from scratch for every (filter width, residual option, seed) on the
// same data; only the architecture and the model seed vary.
std::vector<SweepRow> ablation_sweep(const SweepSpec& sweep, const EncoderConfig& base_config,
                                     const TrainConfig& base_train, const DatasetSplit& split,
                                     const SamplingIndex& index,
                                     std::span<const Tensor2> features);

// `filter_width,residual,seed,in_matrix_auc,cold_start_auc`; residual is the
// width or "none"; reals carry 6 decimals.
void write_sweep_csv(const std::filesystem::path& path, std::span<const SweepRow> rows);
std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path);

std::string format_real(double v);

}  // namespace tcf
