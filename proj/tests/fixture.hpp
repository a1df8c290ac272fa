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

// In-memory synthetic world, split and sampling index for end-to-end tests.

#include <optional>
#include <vector>

#include "tcf/data.hpp"
#include "tcf/model.hpp"
#include "tcf/synthgen.hpp"

namespace tcf::testing {

struct World {
  SyntheticWorld synthetic;
  Dataset dataset;
  DatasetSplit split;
  std::optional<SamplingIndex> index;
  std::vector<Tensor2> features;
  EncoderConfig model;
};

inline World make_world(const SynthConfig& sc, std::size_t n_cold, std::uint64_t split_seed,
                        std::size_t channels = 4) {
  World w;
  w.synthetic = gen_world(sc);
  const auto manifest = world_manifest(w.synthetic);
  w.dataset = Dataset::build(manifest, w.synthetic.records);
  w.split = make_splits(w.dataset.events, w.dataset.release_order(), w.dataset.release_ts, n_cold,
                        SplitRatios{}, split_seed);
  w.index.emplace(w.dataset, w.split);
  for (const auto& m : w.synthetic.movies) w.features.push_back(m.trailer.frames);
  w.model.feature_dim = sc.dim;
  w.model.max_frames = sc.n_frames;
  w.model.conv_out_channels = channels;
  w.model.filter_width = 4;
  w.model.stride = 2;
  w.model.residual_filter_width = 1;
  w.model.mlp_layer_widths = {3};
  return w;
}

// 24 movies, 60 users, 8-dim features over 12 frames.
inline World small_world(std::uint64_t seed = 3) {
  SynthConfig sc;
  sc.dim = 8;
  sc.n_frames = 12;
  sc.n_prototypes = 4;
  sc.n_movies = 24;
  sc.n_users = 60;
  sc.seed = seed;
  return make_world(sc, 8, seed);
}

}  // namespace tcf::testing
