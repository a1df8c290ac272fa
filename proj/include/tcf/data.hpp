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
#include <span>
#include <string>
#include <vector>

#include "tcf/model.hpp"
#include "tcf/tensor.hpp"

namespace tcf {

// One trailer as per-frame dense features, T x D.
struct FrameFeatureSequence {
  std::string movie_id;
  Tensor2 frames;
};

// .tfv: "TFV1", u32 n_frames, u32 dim, then n_frames*dim float32, all
// little-endian, frame-major. Values are widened to double on load.
FrameFeatureSequence load_feature_file(const std::filesystem::path& path,
                                       const std::string& movie_id = {});
void write_feature_file(const std::filesystem::path& path, const Tensor2& frames);

// Truncates to the first max_frames rows or zero-pads at the end.
FrameFeatureSequence normalize_length(const FrameFeatureSequence& seq, std::size_t max_frames);

struct ManifestEntry {
  std::string movie_id;
  std::int64_t release_ts = 0;
  std::string feature_path;  // relative paths resolve against the manifest directory
};

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, std::span<const ManifestEntry> entries);

struct AttendanceRecord {
  std::string user_id;
  std::string movie_id;
  std::int64_t timestamp = 0;
};

std::vector<AttendanceRecord> load_attendance(const std::filesystem::path& path);
void write_attendance(const std::filesystem::path& path,
                      std::span<const AttendanceRecord> records);

// Attendance event with interned ids.
struct Event {
  UserIndex user = 0;
  MovieIndex movie = 0;
  std::int64_t timestamp = 0;
};

// Ids interned to dense indices: movies in manifest order, users sorted.
struct Dataset {
  std::vector<std::string> movie_ids;
  std::vector<std::int64_t> release_ts;
  std::vector<std::string> feature_paths;
  std::vector<std::string> user_ids;
  std::vector<Event> events;

  static Dataset build(std::span<const ManifestEntry> manifest,
                       std::span<const AttendanceRecord> records);
  std::size_t num_movies() const { return movie_ids.size(); }
  std::size_t num_users() const { return user_ids.size(); }
  // Movie indices sorted by release time, oldest first (ties by id).
  std::vector<MovieIndex> release_order() const;
  MovieIndex movie_index(const std::string& id) const;
  UserIndex user_index(const std::string& id) const;
};

// Reads every manifest feature file, checks its dim, and normalizes it to
// max_frames rows. Result is indexed by MovieIndex.
std::vector<Tensor2> load_features(const Dataset& dataset, const std::filesystem::path& base_dir,
                                   std::size_t feature_dim, std::size_t max_frames);

struct PositivePair {
  UserIndex user = 0;
  MovieIndex movie = 0;
  std::int64_t timestamp = 0;  // earliest attendance of this pair
  friend bool operator==(const PositivePair&, const PositivePair&) = default;
};

struct SplitRatios {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
};

struct DatasetSplit {
  std::vector<MovieIndex> cold_start_movies;  // newest first
  std::vector<PositivePair> train;
  std::vector<PositivePair> validation;
  std::vector<PositivePair> test;
  std::vector<PositivePair> cold_start;  // positives on cold-start movies
  // Prediction time: earliest cold-start release, or just after the last
  // event when there is no cold-start set.
  std::int64_t reference_time = 0;
  std::uint64_t rng_seed = 0;
};

// The n_cold newest movies become cold-start; the remaining de-duplicated
// positives are shuffled with `seed` and cut by `ratios`.
DatasetSplit make_splits(std::span<const Event> events, std::span<const MovieIndex> release_order,
                         std::span<const std::int64_t> release_ts, std::size_t n_cold,
                         SplitRatios ratios, std::uint64_t seed);

// CSV `user_id,movie_id,pool`; pool is train|validation|test|cold_start, and
// rows with an empty user_id and pool cold_movie list the cold-start set.
void write_split(const std::filesystem::path& path, const DatasetSplit& split,
                 const Dataset& dataset);
DatasetSplit read_split(const std::filesystem::path& path, const Dataset& dataset);

struct FrequencyRecency {
  double frequency = 0.0;
  double recency = 1.0;
};

// frequency = visits in [ref - window, ref) / window_days; recency = days
// since the latest such visit / window_days, or 1 with no visit.
FrequencyRecency compute_frequency_recency(UserIndex user, std::span<const Event> events,
                                           std::int64_t reference_time, double window_days);
FrequencyRecency frequency_recency_from_timestamps(std::span<const std::int64_t> timestamps,
                                                   std::int64_t reference_time,
                                                   double window_days);

struct Sample {
  UserIndex user = 0;
  MovieIndex movie = 0;
  int label = 0;
  friend bool operator==(const Sample&, const Sample&) = default;
};

enum class EvalPool { kValidation, kTest, kColdStart };

// Lookup tables shared by the samplers and the context builder.
class SamplingIndex {
 public:
  SamplingIndex(const Dataset& dataset, const DatasetSplit& split, double window_days = 365.0,
                std::size_t history_cap = 32);

  bool attended(UserIndex user, MovieIndex movie) const;
  std::span<const MovieIndex> in_matrix_movies() const { return in_matrix_; }
  std::span<const MovieIndex> cold_movies() const { return cold_; }
  std::size_t num_users() const { return positives_.size(); }
  bool is_cold(MovieIndex m) const { return is_cold_[m] != 0; }

  // Training-visible history: the user's train-pool movies, most recent first,
  // without `target`, capped at history_cap.
  UserContext context(UserIndex user, MovieIndex target) const;
  const FrequencyRecency& features(UserIndex user) const { return freq_rec_[user]; }

 private:
  std::vector<std::vector<MovieIndex>> positives_;  // sorted, every event
  std::vector<std::vector<MovieIndex>> history_;    // train pool, newest first
  std::vector<FrequencyRecency> freq_rec_;
  std::vector<MovieIndex> in_matrix_;
  std::vector<MovieIndex> cold_;
  std::vector<char> is_cold_;
  std::size_t history_cap_;
};

// batch_size/2 train positives, each followed by a negative for the same user
// drawn from in-matrix movies the user never attended.
std::vector<Sample> sample_training_batch(const DatasetSplit& split, const SamplingIndex& index,
                                          std::size_t batch_size, std::mt19937_64& rng);

// total/10 positives from the pool and 9*total/10 negatives; total must be a
// multiple of 10. Cold-start negatives use cold-start movies only.
std::vector<Sample> sample_eval_pairs(const DatasetSplit& split, const SamplingIndex& index,
                                      EvalPool which, std::size_t total, std::mt19937_64& rng);

std::vector<LabeledExample> to_examples(std::span<const Sample> samples,
                                        const SamplingIndex& index);

std::string_view eval_pool_name(EvalPool pool);

}  // namespace tcf
