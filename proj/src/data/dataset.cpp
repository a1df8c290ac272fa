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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include "tcf/csv.hpp"
#include "tcf/data.hpp"
#include "tcf/error.hpp"

namespace tcf {

Dataset Dataset::build(std::span<const ManifestEntry> manifest,
                       std::span<const AttendanceRecord> records) {
  Dataset d;
  std::unordered_map<std::string, MovieIndex> movie_lookup;
  for (const auto& e : manifest) {
    if (!movie_lookup.emplace(e.movie_id, static_cast<MovieIndex>(d.movie_ids.size())).second) {
      throw Error("manifest lists movie '" + e.movie_id + "' twice");
    }
    d.movie_ids.push_back(e.movie_id);
    d.release_ts.push_back(e.release_ts);
    d.feature_paths.push_back(e.feature_path);
  }

  std::vector<std::string> users;
  users.reserve(records.size());
  for (const auto& r : records) users.push_back(r.user_id);
  std::sort(users.begin(), users.end());
  users.erase(std::unique(users.begin(), users.end()), users.end());
  d.user_ids = std::move(users);
  std::unordered_map<std::string, UserIndex> user_lookup;
  for (std::size_t i = 0; i < d.user_ids.size(); ++i) {
    user_lookup.emplace(d.user_ids[i], static_cast<UserIndex>(i));
  }

  d.events.reserve(records.size());
  for (const auto& r : records) {
    const auto it = movie_lookup.find(r.movie_id);
    if (it == movie_lookup.end()) {
      throw Error("attendance references movie '" + r.movie_id + "' missing from the manifest");
    }
    d.events.push_back({user_lookup.at(r.user_id), it->second, r.timestamp});
  }
  return d;
}

std::vector<MovieIndex> Dataset::release_order() const {
  std::vector<MovieIndex> order(num_movies());
  std::iota(order.begin(), order.end(), MovieIndex{0});
  std::sort(order.begin(), order.end(), [this](MovieIndex a, MovieIndex b) {
    if (release_ts[a] != release_ts[b]) return release_ts[a] < release_ts[b];
    return movie_ids[a] < movie_ids[b];
  });
  return order;
}

MovieIndex Dataset::movie_index(const std::string& id) const {
  const auto it = std::find(movie_ids.begin(), movie_ids.end(), id);
  if (it == movie_ids.end()) throw Error("unknown movie '" + id + "'");
  return static_cast<MovieIndex>(it - movie_ids.begin());
}

UserIndex Dataset::user_index(const std::string& id) const {
  const auto it = std::lower_bound(user_ids.begin(), user_ids.end(), id);
  if (it == user_ids.end() || *it != id) throw Error("unknown user '" + id + "'");
  return static_cast<UserIndex>(it - user_ids.begin());
}

std::vector<Tensor2> load_features(const Dataset& dataset, const std::filesystem::path& base_dir,
                                   std::size_t feature_dim, std::size_t max_frames) {
  std::vector<Tensor2> out;
  out.reserve(dataset.num_movies());
  for (std::size_t m = 0; m < dataset.num_movies(); ++m) {
    std::filesystem::path p = dataset.feature_paths[m];
    if (p.is_relative()) p = base_dir / p;
    if (!std::filesystem::exists(p)) {
      throw IoError("feature file for movie '" + dataset.movie_ids[m] + "' not found: " +
                    p.string());
    }
    FrameFeatureSequence seq = load_feature_file(p, dataset.movie_ids[m]);
    if (seq.frames.cols() != feature_dim) {
      throw ShapeError(p.string() + ": dim " + std::to_string(seq.frames.cols()) +
                       " does not match feature_dim " + std::to_string(feature_dim));
    }
    out.push_back(normalize_length(seq, max_frames).frames);
  }
  return out;
}

DatasetSplit make_splits(std::span<const Event> events, std::span<const MovieIndex> release_order,
                         std::span<const std::int64_t> release_ts, std::size_t n_cold,
                         SplitRatios ratios, std::uint64_t seed) {
  if (n_cold > release_order.size()) {
    throw Error("n_cold=" + std::to_string(n_cold) + " exceeds the " +
                std::to_string(release_order.size()) + " movies available");
  }
  if (ratios.train < 0 || ratios.validation < 0 || ratios.test < 0 ||
      std::abs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-9) {
    throw Error("split ratios must be non-negative and sum to 1");
  }
  const std::size_t n_movies = release_order.size();
  std::vector<char> cold(n_movies, 0);
  DatasetSplit split;
  split.rng_seed = seed;
  for (std::size_t i = 0; i < n_cold; ++i) {
    const MovieIndex m = release_order[n_movies - 1 - i];
    cold[m] = 1;
    split.cold_start_movies.push_back(m);
  }

  // Earliest timestamp per (user, movie).
  std::map<std::pair<UserIndex, MovieIndex>, std::int64_t> first_seen;
  std::int64_t last_event = 0;
  for (const Event& e : events) {
    if (e.movie >= n_movies) throw Error("event references unknown movie index");
    auto [it, inserted] = first_seen.emplace(std::pair{e.user, e.movie}, e.timestamp);
    if (!inserted) it->second = std::min(it->second, e.timestamp);
    last_event = std::max(last_event, e.timestamp);
  }
  std::vector<PositivePair> in_matrix;
  for (const auto& [key, ts] : first_seen) {
    const PositivePair pair{key.first, key.second, ts};
    (cold[key.second] ? split.cold_start : in_matrix).push_back(pair);
  }

  std::mt19937_64 rng(seed);
  std::shuffle(in_matrix.begin(), in_matrix.end(), rng);
  const std::size_t n = in_matrix.size();
  const auto n_train = static_cast<std::size_t>(std::llround(ratios.train * static_cast<double>(n)));
  const auto n_val = std::min(
      n - n_train, static_cast<std::size_t>(std::llround(ratios.validation * static_cast<double>(n))));
  split.train.assign(in_matrix.begin(), in_matrix.begin() + n_train);
  split.validation.assign(in_matrix.begin() + n_train, in_matrix.begin() + n_train + n_val);
  split.test.assign(in_matrix.begin() + n_train + n_val, in_matrix.end());

  if (n_cold > 0) {
    split.reference_time = release_ts[split.cold_start_movies.back()];
  } else {
    split.reference_time = last_event + 1;
  }
  return split;
}

void write_split(const std::filesystem::path& path, const DatasetSplit& split,
                 const Dataset& dataset) {
  std::string out = "user_id,movie_id,pool\n";
  auto emit = [&](const std::vector<PositivePair>& pairs, const char* pool) {
    for (const auto& p : pairs) {
      out += dataset.user_ids[p.user] + "," + dataset.movie_ids[p.movie] + "," + pool + "\n";
    }
  };
  for (MovieIndex m : split.cold_start_movies) out += "," + dataset.movie_ids[m] + ",cold_movie\n";
  emit(split.train, "train");
  emit(split.validation, "validation");
  emit(split.test, "test");
  emit(split.cold_start, "cold_start");
  csv::write_file(path, out);
}

DatasetSplit read_split(const std::filesystem::path& path, const Dataset& dataset) {
  // Timestamps are not stored; recover each pair's earliest event.
  std::map<std::pair<UserIndex, MovieIndex>, std::int64_t> first_seen;
  std::int64_t last_event = 0;
  for (const Event& e : dataset.events) {
    auto [it, inserted] = first_seen.emplace(std::pair{e.user, e.movie}, e.timestamp);
    if (!inserted) it->second = std::min(it->second, e.timestamp);
    last_event = std::max(last_event, e.timestamp);
  }
  csv::Reader reader(path, {"user_id", "movie_id", "pool"});
  DatasetSplit split;
  std::vector<std::string> row;
  while (reader.next(row)) {
    const MovieIndex m = dataset.movie_index(row[1]);
    if (row[2] == "cold_movie") {
      split.cold_start_movies.push_back(m);
      continue;
    }
    const UserIndex u = dataset.user_index(row[0]);
    const auto it = first_seen.find({u, m});
    if (it == first_seen.end()) reader.fail("pair is not in the attendance records");
    const PositivePair pair{u, m, it->second};
    if (row[2] == "train") split.train.push_back(pair);
    else if (row[2] == "validation") split.validation.push_back(pair);
    else if (row[2] == "test") split.test.push_back(pair);
    else if (row[2] == "cold_start") split.cold_start.push_back(pair);
    else reader.fail("unknown pool '" + row[2] + "'");
  }
  split.reference_time = split.cold_start_movies.empty()
                             ? last_event + 1
                             : dataset.release_ts[split.cold_start_movies.back()];
  return split;
}

FrequencyRecency frequency_recency_from_timestamps(std::span<const std::int64_t> timestamps,
                                                   std::int64_t reference_time,
                                                   double window_days) {
  if (!(window_days > 0.0)) throw Error("frequency/recency window must be positive");
  constexpr double kDay = 86400.0;
  const double window_start = static_cast<double>(reference_time) - window_days * kDay;
  std::size_t count = 0;
  std::int64_t latest = 0;
  bool any = false;
  for (std::int64_t ts : timestamps) {
    if (ts >= reference_time || static_cast<double>(ts) < window_start) continue;
    ++count;
    if (!any || ts > latest) latest = ts;
    any = true;
  }
  FrequencyRecency out;
  out.frequency = static_cast<double>(count) / window_days;
  const double recency_days =
      any ? static_cast<double>(reference_time - latest) / kDay : window_days;
  out.recency = recency_days / window_days;
  return out;
}

FrequencyRecency compute_frequency_recency(UserIndex user, std::span<const Event> events,
                                           std::int64_t reference_time, double window_days) {
  std::vector<std::int64_t> ts;
  for (const Event& e : events) {
    if (e.user == user) ts.push_back(e.timestamp);
  }
  return frequency_recency_from_timestamps(ts, reference_time, window_days);
}

}  // namespace tcf
