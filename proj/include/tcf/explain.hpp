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

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tcf/model.hpp"

namespace tcf {

// Per-channel statistics of the last relu layer over every (movie, timestep)
// position. Standard deviations use the population formula.
struct ChannelStats {
  std::vector<double> mean;
  std::vector<double> stddev;
  std::size_t positions = 0;

  double threshold(std::size_t channel) const { return mean[channel] + 2.0 * stddev[channel]; }
};

struct ActivationHit {
  std::size_t channel = 0;
  MovieIndex movie = 0;
  std::size_t timestep = 0;
  std::size_t first_frame = 0;  // inclusive receptive field
  std::size_t last_frame = 0;
  double activation = 0.0;

  friend bool operator==(const ActivationHit&, const ActivationHit&) = default;
};

ChannelStats channel_activation_stats(const ModelParams& params, const EncoderConfig& config,
                                      std::span<const Tensor2> features);

// Positions with activation >= mean + 2 std for `channel`, strongest first
// (ties by movie, then timestep), at most max_hits. A dead channel (mean and
// std both zero) yields nothing.
std::vector<ActivationHit> top_activating_windows(const ModelParams& params,
                                                  const EncoderConfig& config,
                                                  std::span<const Tensor2> features,
                                                  const ChannelStats& stats, std::size_t channel,
                                                  std::size_t max_hits);

// CSV `channel,movie_id,timestep,first_frame,last_frame,activation`, with
// activations at round-trip precision. movie_ids maps MovieIndex to id.
void export_hits(std::span<const ActivationHit> hits, std::span<const std::string> movie_ids,
                 const std::filesystem::path& path);
std::vector<ActivationHit> read_hits(const std::filesystem::path& path,
                                     std::span<const std::string> movie_ids);

}  // namespace tcf
