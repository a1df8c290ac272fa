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

#include "tcf/synthgen.hpp"

#include <algorithm>
#include <cstdio>
#include <string>

#include "tcf/error.hpp"

namespace tcf {
namespace {

constexpr std::int64_t kDay = 86400;
constexpr std::int64_t kFirstRelease = 1'500'000'000;

bool is_rotation(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::vector<std::size_t> twice = a;
  twice.insert(twice.end(), a.begin(), a.end());
  return std::search(twice.begin(), twice.end(), b.begin(), b.end()) != twice.end();
}

std::string padded_id(char prefix, std::size_t i, std::size_t width) {
  std::string digits = std::to_string(i);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return prefix + digits;
}

}  // namespace

TemplateLibrary gen_template_library(std::size_t n_prototypes, std::size_t n_genre_pairs,
                                     std::size_t template_len, std::size_t dim,
                                     std::mt19937_64& rng) {
  if (n_prototypes < 2 || dim == 0) throw Error("template library needs >= 2 prototypes and dim >= 1");
  if (template_len < 4 || template_len % 2 != 0) {
    throw Error("template_len must be even and >= 4, got " + std::to_string(template_len));
  }
  TemplateLibrary lib;
  lib.prototypes = Tensor2(n_prototypes, dim);
  std::normal_distribution<double> unit(0.0, 1.0);
  for (double& v : lib.prototypes.flat()) v = static_cast<float>(unit(rng));

  const std::size_t half = template_len / 2;
  std::uniform_int_distribution<std::size_t> pick(0, n_prototypes - 1);
  for (std::size_t pair = 0; pair < n_genre_pairs; ++pair) {
    for (int attempt = 0;; ++attempt) {
      if (attempt == 1000) throw Error("could not build an order-only template pair");
      // Odd slots reuse the even-slot prototypes in another order, so both
      // parities see the same multiset.
      std::vector<std::size_t> even(half);
      for (auto& e : even) e = pick(rng);
      std::vector<std::size_t> odd = even;
      std::shuffle(odd.begin(), odd.end(), rng);
      std::vector<std::size_t> a(template_len);
      for (std::size_t i = 0; i < half; ++i) {
        a[2 * i] = even[i];
        a[2 * i + 1] = odd[i];
      }
      std::vector<std::size_t> b(a.rbegin(), a.rend());
      if (is_rotation(a, b)) continue;
      lib.templates.push_back(std::move(a));
      lib.templates.push_back(std::move(b));
      break;
    }
  }
  return lib;
}

FrameFeatureSequence gen_trailer(std::size_t genre, const TemplateLibrary& library,
                                 std::size_t n_frames, double noise_sigma, std::mt19937_64& rng,
                                 const std::string& movie_id) {
  if (genre >= library.num_genres()) throw Error("unknown genre " + std::to_string(genre));
  if (n_frames == 0) throw Error("n_frames must be >= 1");
  if (noise_sigma < 0.0) throw Error("noise_sigma must be >= 0");
  const auto& tmpl = library.templates[genre];
  const std::size_t dim = library.prototypes.cols();
  Tensor2 frames(n_frames, dim);
  std::normal_distribution<double> noise(0.0, noise_sigma > 0.0 ? noise_sigma : 1.0);
  for (std::size_t t = 0; t < n_frames; ++t) {
    const auto proto = library.prototypes.row(tmpl[t % tmpl.size()]);
    auto out = frames.row(t);
    for (std::size_t c = 0; c < dim; ++c) {
      const double n = noise_sigma > 0.0 ? noise(rng) : 0.0;
      out[c] = static_cast<float>(proto[c] + n);
    }
  }
  return {movie_id, std::move(frames)};
}

void SynthConfig::validate() const {
  if (n_genre_pairs == 0) throw Error("synth: n_genre_pairs must be >= 1");
  if (n_movies == 0 || n_users == 0) throw Error("synth: n_movies and n_users must be >= 1");
  if (template_len == 0 || n_frames % template_len != 0) {
    throw Error("synth: n_frames (" + std::to_string(n_frames) +
                ") must be a multiple of template_len (" + std::to_string(template_len) + ")");
  }
  if (p_lo < 0.0 || p_hi > 1.0 || p_lo > p_hi) throw Error("synth: need 0 <= p_lo <= p_hi <= 1");
}

void gen_population(SyntheticWorld& world, std::size_t n_users, double p_hi, double p_lo,
                    std::mt19937_64& rng) {
  const std::size_t n_genres = world.library.num_genres();
  if (n_genres % 2 != 0) throw Error("genres must come in pairs");
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<std::int64_t> delay(0, 14 * kDay - 1);
  const std::size_t width = std::to_string(n_users).size();
  for (std::size_t u = 0; u < n_users; ++u) {
    SyntheticUser user{padded_id('u', u, width), std::vector<double>(n_genres, p_lo)};
    for (std::size_t pair = 0; pair < n_genres / 2; ++pair) {
      user.genre_affinity[2 * pair + (coin(rng) ? 1 : 0)] = p_hi;
    }
    for (const SyntheticMovie& m : world.movies) {
      if (std::bernoulli_distribution(user.genre_affinity[m.genre])(rng)) {
        world.records.push_back({user.user_id, m.movie_id, m.release_ts + delay(rng)});
      }
    }
    world.users.push_back(std::move(user));
  }
}

SyntheticWorld gen_world(const SynthConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  SyntheticWorld world;
  world.noise_sigma = config.noise_sigma;
  world.library = gen_template_library(config.n_prototypes, config.n_genre_pairs,
                                       config.template_len, config.dim, rng);
  const std::size_t n_genres = world.library.num_genres();
  const std::size_t width = std::to_string(config.n_movies).size();
  for (std::size_t i = 0; i < config.n_movies; ++i) {
    SyntheticMovie m;
    m.movie_id = padded_id('m', i, width);
    m.genre = i % n_genres;
    m.release_ts = kFirstRelease + static_cast<std::int64_t>(i) * 3 * kDay;
    m.trailer = gen_trailer(m.genre, world.library, config.n_frames, config.noise_sigma, rng,
                            m.movie_id);
    world.movies.push_back(std::move(m));
  }
  gen_population(world, config.n_users, config.p_hi, config.p_lo, rng);
  return world;
}

std::vector<ManifestEntry> world_manifest(const SyntheticWorld& world) {
  std::vector<ManifestEntry> out;
  for (const auto& m : world.movies) {
    out.push_back({m.movie_id, m.release_ts, "features/" + m.movie_id + ".tfv"});
  }
  return out;
}

void write_world(const SyntheticWorld& world, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "features");
  for (const auto& m : world.movies) {
    write_feature_file(dir / "features" / (m.movie_id + ".tfv"), m.trailer.frames);
  }
  write_manifest(dir / "manifest.csv", world_manifest(world));
  write_attendance(dir / "attendance.csv", world.records);
}

}  // namespace tcf
