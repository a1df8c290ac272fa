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

// Flat key=value run configuration shared by every subcommand.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tcf/data.hpp"
#include "tcf/model.hpp"
#include "tcf/synthgen.hpp"
#include "tcf/train.hpp"

namespace tcf::cli {

struct RunConfig {
  std::string out = "out";
  std::string data_dir;    // empty: same as out
  std::string split_file;  // empty: <out>/split.csv
  std::string checkpoint;  // empty: <out>/model.mck
  std::uint64_t seed = 1;

  SynthConfig synth;

  std::size_t n_cold = 40;
  SplitRatios ratios;
  double window_days = 365.0;
  std::size_t history_cap = 32;

  EncoderKind encoder = EncoderKind::kConv;
  EncoderConfig model = desk_model();
  TrainConfig train;

  std::size_t eval_pairs = 2000;

  std::vector<std::size_t> sweep_filter_widths{1, 2, 4, 8};
  std::vector<std::optional<std::size_t>> sweep_residual{std::nullopt, std::size_t{1}};
  std::vector<std::uint64_t> sweep_seeds{1, 2, 3};

  std::optional<std::size_t> explain_channel;  // empty: every channel
  std::size_t explain_max_hits = 20;

  std::size_t gradcheck_instances = 20;
  double gradcheck_tolerance = 1e-4;

  static EncoderConfig desk_model();

  // Throws Error describing the first inconsistent setting.
  void validate() const;

  std::filesystem::path data_path() const;
  std::filesystem::path split_path() const;
  std::filesystem::path checkpoint_path() const;
  TrainConfig train_config() const;
};

struct ConfigKey {
  std::string name;
  std::string help;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

const std::vector<ConfigKey>& config_keys();

// Throws Error for unknown keys or unparsable values.
void set_key(RunConfig& config, const std::string& key, const std::string& value);

// `key = value` lines; '#' starts a comment. Errors carry path:line.
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

// Every key with its current value, one per line, in table order.
std::string dump_config(const RunConfig& config);

}  // namespace tcf::cli
