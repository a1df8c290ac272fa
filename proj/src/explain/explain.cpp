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

#include "tcf/explain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_map>

#include "tcf/csv.hpp"
#include "tcf/error.hpp"

namespace tcf {

namespace {

void require_conv(const ModelParams& params) {
  if (params.kind != EncoderKind::kConv) {
    throw Error("channel activations need the conv encoder, got " +
                std::string(encoder_kind_name(params.kind)));
  }
}

}  // namespace

ChannelStats channel_activation_stats(const ModelParams& params, const EncoderConfig& config,
                                      std::span<const Tensor2> features) {
  require_conv(params);
  const std::size_t channels = config.conv_out_channels;
  ChannelStats stats;
  stats.mean.assign(channels, 0.0);
  stats.stddev.assign(channels, 0.0);

  // Two passes: exact mean first, then squared deviations from it.
  for (const Tensor2& frames : features) {
    const Tensor2 h = last_relu_activations(frames, params, config);
    for (std::size_t t = 0; t < h.rows(); ++t) {
      for (std::size_t c = 0; c < channels; ++c) stats.mean[c] += h(t, c);
    }
    stats.positions += h.rows();
  }
  if (stats.positions < 2) {
    throw Error("channel statistics need at least 2 positions, got " +
                std::to_string(stats.positions));
  }
  const double n = static_cast<double>(stats.positions);
  for (double& m : stats.mean) m /= n;

  for (const Tensor2& frames : features) {
    const Tensor2 h = last_relu_activations(frames, params, config);
    for (std::size_t t = 0; t < h.rows(); ++t) {
      for (std::size_t c = 0; c < channels; ++c) {
        const double d = h(t, c) - stats.mean[c];
        stats.stddev[c] += d * d;
      }
    }
  }
  for (double& s : stats.stddev) s = std::sqrt(s / n);
  return stats;
}

std::vector<ActivationHit> top_activating_windows(const ModelParams& params,
                                                  const EncoderConfig& config,
                                                  std::span<const Tensor2> features,
                                                  const ChannelStats& stats, std::size_t channel,
                                                  std::size_t max_hits) {
  require_conv(params);
  if (channel >= stats.mean.size() || channel >= config.conv_out_channels) {
    throw ShapeError("channel " + std::to_string(channel) + " out of range [0, " +
                     std::to_string(config.conv_out_channels) + ")");
  }
  std::vector<ActivationHit> hits;
  if (max_hits == 0) return hits;
  if (stats.mean[channel] == 0.0 && stats.stddev[channel] == 0.0) return hits;

  const double threshold = stats.threshold(channel);
  for (std::size_t m = 0; m < features.size(); ++m) {
    const Tensor2 h = last_relu_activations(features[m], params, config);
    for (std::size_t t = 0; t < h.rows(); ++t) {
      const double a = h(t, channel);
      if (a < threshold) continue;
      const auto [first, last] = receptive_field(config, t);
      hits.push_back({channel, static_cast<MovieIndex>(m), t, first, last, a});
    }
  }
  std::sort(hits.begin(), hits.end(), [](const ActivationHit& a, const ActivationHit& b) {
    if (a.activation != b.activation) return a.activation > b.activation;
    if (a.movie != b.movie) return a.movie < b.movie;
    return a.timestep < b.timestep;
  });
  if (hits.size() > max_hits) hits.resize(max_hits);
  return hits;
}

void export_hits(std::span<const ActivationHit> hits, std::span<const std::string> movie_ids,
                 const std::filesystem::path& path) {
  std::ostringstream out;
  out << "channel,movie_id,timestep,first_frame,last_frame,activation\n";
  char buf[40];
  for (const ActivationHit& h : hits) {
    if (h.movie >= movie_ids.size()) {
      throw Error("hit references unknown movie index " + std::to_string(h.movie));
    }
    std::snprintf(buf, sizeof(buf), "%.17g", h.activation);
    out << h.channel << ',' << movie_ids[h.movie] << ',' << h.timestep << ',' << h.first_frame
        << ',' << h.last_frame << ',' << buf << '\n';
  }
  csv::write_file(path, out.str());
}

std::vector<ActivationHit> read_hits(const std::filesystem::path& path,
                                     std::span<const std::string> movie_ids) {
  std::unordered_map<std::string, MovieIndex> lookup;
  for (std::size_t i = 0; i < movie_ids.size(); ++i) {
    lookup.emplace(movie_ids[i], static_cast<MovieIndex>(i));
  }
  csv::Reader reader(path, {"channel", "movie_id", "timestep", "first_frame", "last_frame",
                            "activation"});
  std::vector<ActivationHit> hits;
  std::vector<std::string> f;
  while (reader.next(f)) {
    const auto it = lookup.find(f[1]);
    if (it == lookup.end()) reader.fail("unknown movie_id '" + f[1] + "'");
    ActivationHit h;
    h.channel = static_cast<std::size_t>(reader.parse_int(f[0], "channel"));
    h.movie = it->second;
    h.timestep = static_cast<std::size_t>(reader.parse_int(f[2], "timestep"));
    h.first_frame = static_cast<std::size_t>(reader.parse_int(f[3], "first_frame"));
    h.last_frame = static_cast<std::size_t>(reader.parse_int(f[4], "last_frame"));
    h.activation = reader.parse_double(f[5], "activation");
    hits.push_back(h);
  }
  return hits;
}

}  // namespace tcf
