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

#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>

#include "tcf/error.hpp"
#include "tcf/eval.hpp"
#include "tcf/explain.hpp"
#include "tcf/gradcheck_suite.hpp"

namespace tcf::cli {

namespace fs = std::filesystem;

namespace {

void require_file(const fs::path& p, const char* what) {
  if (!fs::is_regular_file(p)) throw IoError(std::string(what) + " not found: " + p.string());
}

fs::path out_dir(const RunConfig& c) {
  fs::create_directories(c.out);
  return c.out;
}

Dataset load_dataset(const RunConfig& c) {
  const fs::path dir = c.data_path();
  require_file(dir / "manifest.csv", "manifest");
  require_file(dir / "attendance.csv", "attendance file");
  return Dataset::build(load_manifest(dir / "manifest.csv"),
                        load_attendance(dir / "attendance.csv"));
}

DatasetSplit make_split(const RunConfig& c, const Dataset& d) {
  return make_splits(d.events, d.release_order(), d.release_ts, c.n_cold, c.ratios, c.seed);
}

// An explicit split_file must exist; otherwise <out>/split.csv is reused or
// created from the config.
DatasetSplit resolve_split(const RunConfig& c, const Dataset& d) {
  const fs::path p = c.split_path();
  if (!c.split_file.empty()) require_file(p, "split file");
  if (fs::is_regular_file(p)) return read_split(p, d);
  DatasetSplit s = make_split(c, d);
  fs::create_directories(p.parent_path().empty() ? fs::path(".") : p.parent_path());
  write_split(p, s, d);
  std::cerr << "wrote split " << p.string() << "\n";
  return s;
}

void print_report(const EvalReport& r) {
  std::cout << "in_matrix_auc " << format_real(r.in_matrix_auc) << " (" << r.in_matrix_pairs
            << " pairs)\n"
            << "cold_start_auc " << format_real(r.cold_start_auc) << " (" << r.cold_start_pairs
            << " pairs)\n";
}

}  // namespace

int cmd_synth(const RunConfig& c) {
  SynthConfig sc = c.synth;
  sc.seed = c.seed;
  const SyntheticWorld world = gen_world(sc);
  const fs::path dir = out_dir(c);
  write_world(world, dir);
  std::cout << "wrote " << world.movies.size() << " movies, " << world.users.size() << " users, "
            << world.records.size() << " attendances to " << dir.string() << "\n";
  return 0;
}

int cmd_split(const RunConfig& c) {
  const Dataset d = load_dataset(c);
  const DatasetSplit s = make_split(c, d);
  const fs::path p = c.split_file.empty() ? out_dir(c) / "split.csv" : fs::path(c.split_file);
  write_split(p, s, d);
  std::cout << "train " << s.train.size() << ", validation " << s.validation.size() << ", test "
            << s.test.size() << ", cold_start " << s.cold_start.size() << " pairs; "
            << s.cold_start_movies.size() << " cold movies -> " << p.string() << "\n";
  return 0;
}

int cmd_train(const RunConfig& c) {
  const Dataset d = load_dataset(c);
  const auto features = load_features(d, c.data_path(), c.model.feature_dim, c.model.max_frames);
  const DatasetSplit split = resolve_split(c, d);
  const SamplingIndex index(d, split, c.window_days, c.history_cap);
  const TrainResult r = train(c.train_config(), split, index, features, c.model);
  for (std::size_t e = 0; e < r.history.epochs.size(); ++e) {
    std::cerr << "epoch " << e << " loss " << format_real(r.history.epochs[e].train_loss)
              << " validation_auc " << format_real(r.history.epochs[e].validation_auc) << "\n";
  }
  const fs::path dir = out_dir(c);
  save_checkpoint(r.params, c.model, c.checkpoint_path());
  write_history_csv(dir / "history.csv", r.history);
  std::cout << "best epoch " << r.history.best_epoch << " validation_auc "
            << format_real(r.history.best_validation_auc()) << " -> "
            << c.checkpoint_path().string() << "\n";
  return 0;
}

int cmd_eval(const RunConfig& c) {
  require_file(c.checkpoint_path(), "checkpoint");
  const Checkpoint ck = load_checkpoint(c.checkpoint_path());
  const Dataset d = load_dataset(c);
  const auto features = load_features(d, c.data_path(), ck.config.feature_dim, ck.config.max_frames);
  const DatasetSplit split = resolve_split(c, d);
  const SamplingIndex index(d, split, c.window_days, c.history_cap);
  const EvalReport r = evaluate(ck.params, ck.config, split, index, features, c.eval_pairs, c.seed);
  write_report_csv(out_dir(c) / "report.csv", r);
  print_report(r);
  return 0;
}

int cmd_sweep(const RunConfig& c) {
  const Dataset d = load_dataset(c);
  const auto features = load_features(d, c.data_path(), c.model.feature_dim, c.model.max_frames);
  const DatasetSplit split = resolve_split(c, d);
  const SamplingIndex index(d, split, c.window_days, c.history_cap);
  SweepSpec spec{c.sweep_filter_widths, c.sweep_residual, c.sweep_seeds, c.eval_pairs};
  const auto rows = ablation_sweep(spec, c.model, c.train_config(), split, index, features);
  write_sweep_csv(out_dir(c) / "sweep.csv", rows);

  std::map<std::pair<std::size_t, std::size_t>, std::pair<double, std::size_t>> mean;
  for (const auto& r : rows) {
    auto& m = mean[{r.filter_width, r.residual_width.value_or(0)}];
    m.first += r.cold_start_auc;
    m.second += 1;
  }
  for (const auto& [key, m] : mean) {
    std::cout << "filter_width " << key.first << " residual "
              << (key.second ? std::to_string(key.second) : std::string("none"))
              << " mean cold_start_auc " << format_real(m.first / static_cast<double>(m.second))
              << "\n";
  }
  return 0;
}

int cmd_explain(const RunConfig& c) {
  require_file(c.checkpoint_path(), "checkpoint");
  const Checkpoint ck = load_checkpoint(c.checkpoint_path());
  if (ck.params.kind != EncoderKind::kConv) {
    throw Error("explain needs a conv checkpoint: " + c.checkpoint_path().string());
  }
  const Dataset d = load_dataset(c);
  const auto features = load_features(d, c.data_path(), ck.config.feature_dim, ck.config.max_frames);
  const ChannelStats stats = channel_activation_stats(ck.params, ck.config, features);

  std::vector<std::size_t> channels;
  if (c.explain_channel) {
    if (*c.explain_channel >= ck.config.conv_out_channels) {
      throw Error("explain_channel " + std::to_string(*c.explain_channel) + " out of range for " +
                  std::to_string(ck.config.conv_out_channels) + " channels");
    }
    channels.push_back(*c.explain_channel);
  } else {
    for (std::size_t ch = 0; ch < ck.config.conv_out_channels; ++ch) channels.push_back(ch);
  }
  std::vector<ActivationHit> hits;
  for (std::size_t ch : channels) {
    const auto h = top_activating_windows(ck.params, ck.config, features, stats, ch,
                                          c.explain_max_hits);
    hits.insert(hits.end(), h.begin(), h.end());
    std::cout << "channel " << ch << ": " << h.size() << " hits\n";
  }
  const fs::path p = out_dir(c) / "hits.csv";
  export_hits(hits, d.movie_ids, p);
  std::cerr << "wrote " << hits.size() << " hits to " << p.string() << "\n";
  return 0;
}

int cmd_gradcheck(const RunConfig& c) {
  const auto outcomes = run_gradcheck_suite(c.gradcheck_instances, c.seed);
  bool ok = true;
  for (const auto& o : outcomes) {
    const bool pass = o.max_error < c.gradcheck_tolerance;
    ok = ok && pass;
    char line[160];
    std::snprintf(line, sizeof(line), "%-4s %-42s %3zu instances  max rel err %.3e\n",
                  pass ? "PASS" : "FAIL", o.name.c_str(), o.instances, o.max_error);
    std::cout << line;
  }
  return ok ? 0 : 1;
}

}  // namespace tcf::cli
