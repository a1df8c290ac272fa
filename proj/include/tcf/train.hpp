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
#include <functional>
#include <span>
#include <vector>

#include "tcf/data.hpp"
#include "tcf/model.hpp"

namespace tcf {

struct TrainConfig {
  EncoderKind encoder_kind = EncoderKind::kConv;
  std::size_t batch_size = 256;
  double learning_rate = 0.01;
  std::size_t max_epochs = 30;
  std::size_t patience = 5;
  std::size_t steps_per_epoch = 50;
  std::size_t validation_pairs = 2000;
  std::uint64_t seed = 1;

  void validate() const;
};

struct EpochStats {
  double train_loss = 0.0;  // mean minibatch loss over the epoch
  double validation_auc = 0.0;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
  std::size_t best_epoch = 0;
  double best_validation_auc() const;
};

struct TrainResult {
  ModelParams params;  // from the best validation epoch
  TrainHistory history;
};

// Plain SGD: theta <- theta - lr * grad.
void sgd_step(ModelParams& params, const ModelParams& grads, double learning_rate);

// Minibatch SGD with early stopping on validation AUC. Stops after `patience`
// epochs without improvement or at max_epochs. Throws Error("diverged at step
// N") on a non-finite loss.
TrainResult train(const TrainConfig& config, const DatasetSplit& split,
                  const SamplingIndex& index, std::span<const Tensor2> features,
                  const EncoderConfig& model_config);

// Same loop starting from given parameters (used for lr=0 and resume checks).
TrainResult train_from(ModelParams initial, const TrainConfig& config, const DatasetSplit& split,
                       const SamplingIndex& index, std::span<const Tensor2> features,
                       const EncoderConfig& model_config);

// Checkpoint: "MCK1", u32 version, u32 tensor count, then per tensor a u16
// name length, the UTF-8 name, u8 rank, u32 dims and float64 values, all
// little-endian. The encoder config and kind are stored as "config.*"
// tensors ahead of the parameters.
void save_checkpoint(const ModelParams& params, const EncoderConfig& config,
                     const std::filesystem::path& path);

struct Checkpoint {
  ModelParams params;
  EncoderConfig config;
};

Checkpoint load_checkpoint(const std::filesystem::path& path);

void write_history_csv(const std::filesystem::path& path, const TrainHistory& history);

}  // namespace tcf
