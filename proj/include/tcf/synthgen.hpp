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
#include <random>
#include <string>
#include <vector>

#include "tcf/data.hpp"
#include "tcf/tensor.hpp"

namespace tcf {

// Genres come in pairs (2i, 2i+1) whose templates use the same prototypes in a
// different order, so only temporal order separates them.
struct TemplateLibrary {
  Tensor2 prototypes;  // P x D
  std::vector<std::vector<std::size_t>> templates;  // templates[g], length L

  std::size_t num_genres() const { return templates.size(); }
  std::size_t template_len() const { return templates.empty() ? 0 : templates[0].size(); }
  static std::size_t partner(std::size_t genre) { return genre ^ 1u; }
};

TemplateLibrary gen_template_library(std::size_t n_prototypes, std::size_t n_genre_pairs,
                                     std::size_t template_len, std::size_t dim,
                                     std::mt19937_64& rng);

// Frame t is prototype[template[t mod L]] plus N(0, sigma^2) noise, rounded to
// float32 precision.
FrameFeatureSequence gen_trailer(std::size_t genre, const TemplateLibrary& library,
                                 std::size_t n_frames, double noise_sigma, std::mt19937_64& rng,
                                 const std::string& movie_id = {});

struct SyntheticMovie {
  std::string movie_id;
  std::size_t genre = 0;
  std::int64_t release_ts = 0;
  FrameFeatureSequence trailer;
};

struct SyntheticUser {
  std::string user_id;
  std::vector<double> genre_affinity;  // attendance probability per genre
};

struct SyntheticWorld {
  TemplateLibrary library;
  std::vector<SyntheticMovie> movies;  // ordered by release
  std::vector<SyntheticUser> users;
  std::vector<AttendanceRecord> records;
  double noise_sigma = 0.0;
};

struct SynthConfig {
  std::size_t dim = 32;
  std::size_t n_frames = 42;
  std::size_t template_len = 6;
  std::size_t n_genre_pairs = 2;
  std::size_t n_prototypes = 6;
  std::size_t n_movies = 200;
  std::size_t n_users = 2000;
  double p_hi = 0.8;
  double p_lo = 0.1;
  double noise_sigma = 0.3;
  std::uint64_t seed = 1;

  void validate() const;
};

// Each user prefers exactly one genre of every pair and attends a movie with
// p_hi when its genre is preferred and p_lo otherwise. Attendance happens
// within two weeks of release.
void gen_population(SyntheticWorld& world, std::size_t n_users, double p_hi, double p_lo,
                    std::mt19937_64& rng);

// Movies cycle through the genres in release order, so the newest movies
// cover every genre.
SyntheticWorld gen_world(const SynthConfig& config);

// Writes features/<id>.tfv, manifest.csv and attendance.csv under dir.
void write_world(const SyntheticWorld& world, const std::filesystem::path& dir);

std::vector<ManifestEntry> world_manifest(const SyntheticWorld& world);

}  // namespace tcf
