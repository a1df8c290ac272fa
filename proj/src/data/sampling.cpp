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
#include <numeric>
#include <string>

#include "tcf/data.hpp"
#include "tcf/error.hpp"

namespace tcf {

std::string_view eval_pool_name(EvalPool pool) {
  switch (pool) {
    case EvalPool::kValidation: return "validation";
    case EvalPool::kTest: return "test";
    case EvalPool::kColdStart: return "cold_start";
  }
  return "unknown";
}

SamplingIndex::SamplingIndex(const Dataset& dataset, const DatasetSplit& split,
                             double window_days, std::size_t history_cap)
    : positives_(dataset.num_users()),
      history_(dataset.num_users()),
      freq_rec_(dataset.num_users()),
      is_cold_(dataset.num_movies(), 0),
      history_cap_(history_cap) {
  std::vector<std::vector<std::int64_t>> stamps(dataset.num_users());
  for (const Event& e : dataset.events) {
    positives_[e.user].push_back(e.movie);
    stamps[e.user].push_back(e.timestamp);
  }
  for (auto& p : positives_) {
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
  }
  for (std::size_t u = 0; u < stamps.size(); ++u) {
    freq_rec_[u] = frequency_recency_from_timestamps(stamps[u], split.reference_time, window_days);
  }

  std::vector<std::vector<PositivePair>> by_user(dataset.num_users());
  for (const PositivePair& p : split.train) by_user[p.user].push_back(p);
  for (std::size_t u = 0; u < by_user.size(); ++u) {
    auto& v = by_user[u];
    std::sort(v.begin(), v.end(), [](const PositivePair& a, const PositivePair& b) {
      if (a.timestamp != b.timestamp) return a.timestamp > b.timestamp;
      return a.movie < b.movie;
    });
    for (const auto& p : v) history_[u].push_back(p.movie);
  }

  for (MovieIndex m : split.cold_start_movies) is_cold_.at(m) = 1;
  for (MovieIndex m = 0; m < dataset.num_movies(); ++m) (is_cold_[m] ? cold_ : in_matrix_).push_back(m);
}

bool SamplingIndex::attended(UserIndex user, MovieIndex movie) const {
  const auto& p = positives_.at(user);
  return std::binary_search(p.begin(), p.end(), movie);
}

UserContext SamplingIndex::context(UserIndex user, MovieIndex target) const {
  UserContext ctx;
  ctx.user_id = user;
  for (MovieIndex m : history_.at(user)) {
    if (ctx.attended_movies.size() == history_cap_) break;
    if (m != target) ctx.attended_movies.push_back(m);
  }
  ctx.frequency = freq_rec_[user].frequency;
  ctx.recency = freq_rec_[user].recency;
  return ctx;
}

namespace {

MovieIndex draw_negative(const SamplingIndex& index, UserIndex user,
                         std::span<const MovieIndex> candidates, std::mt19937_64& rng) {
  if (candidates.empty()) throw Error("no candidate movies for negative sampling");
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  for (int attempt = 0; attempt < 64; ++attempt) {
    const MovieIndex m = candidates[pick(rng)];
    if (!index.attended(user, m)) return m;
  }
  // Dense users: fall back to an exact draw over the complement.
  std::vector<MovieIndex> open;
  for (MovieIndex m : candidates) {
    if (!index.attended(user, m)) open.push_back(m);
  }
  if (open.empty()) {
    throw Error("user " + std::to_string(user) + " attended every candidate movie");
  }
  return open[std::uniform_int_distribution<std::size_t>(0, open.size() - 1)(rng)];
}

}  // namespace

std::vector<Sample> sample_training_batch(const DatasetSplit& split, const SamplingIndex& index,
                                          std::size_t batch_size, std::mt19937_64& rng) {
  if (batch_size == 0 || batch_size % 2 != 0) {
    throw Error("batch_size must be a positive even number, got " + std::to_string(batch_size));
  }
  if (split.train.empty()) throw Error("training pool is empty");
  std::uniform_int_distribution<std::size_t> pick(0, split.train.size() - 1);
  std::vector<Sample> batch;
  batch.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size / 2; ++i) {
    const PositivePair& p = split.train[pick(rng)];
    batch.push_back({p.user, p.movie, 1});
    batch.push_back({p.user, draw_negative(index, p.user, index.in_matrix_movies(), rng), 0});
  }
  return batch;
}

std::vector<Sample> sample_eval_pairs(const DatasetSplit& split, const SamplingIndex& index,
                                      EvalPool which, std::size_t total, std::mt19937_64& rng) {
  if (total == 0 || total % 10 != 0) {
    throw Error("eval pair total must be a positive multiple of 10, got " + std::to_string(total));
  }
  const std::vector<PositivePair>& pool = which == EvalPool::kValidation ? split.validation
                                          : which == EvalPool::kTest     ? split.test
                                                                         : split.cold_start;
  if (pool.empty()) {
    throw Error("cannot sample from empty " + std::string(eval_pool_name(which)) + " pool");
  }
  const std::span<const MovieIndex> candidates =
      which == EvalPool::kColdStart ? index.cold_movies() : index.in_matrix_movies();

  const std::size_t n_pos = total / 10;
  std::vector<std::size_t> chosen;
  if (n_pos <= pool.size()) {
    std::vector<std::size_t> ids(pool.size());
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    for (std::size_t i = 0; i < n_pos; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, ids.size() - 1);
      std::swap(ids[i], ids[pick(rng)]);
    }
    chosen.assign(ids.begin(), ids.begin() + n_pos);
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (std::size_t i = 0; i < n_pos; ++i) chosen.push_back(pick(rng));
  }

  std::vector<Sample> out;
  out.reserve(total);
  for (std::size_t i : chosen) {
    const PositivePair& p = pool[i];
    out.push_back({p.user, p.movie, 1});
    for (int k = 0; k < 9; ++k) {
      out.push_back({p.user, draw_negative(index, p.user, candidates, rng), 0});
    }
  }
  return out;
}

std::vector<LabeledExample> to_examples(std::span<const Sample> samples,
                                        const SamplingIndex& index) {
  std::vector<LabeledExample> out;
  out.reserve(samples.size());
  for (const Sample& s : samples) out.push_back({index.context(s.user, s.movie), s.movie, s.label});
  return out;
}

}  // namespace tcf
