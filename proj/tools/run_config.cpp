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

#include "run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tcf/error.hpp"

namespace tcf::cli {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::uint64_t to_u64(const std::string& v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw Error("expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

std::size_t to_count(const std::string& v) { return static_cast<std::size_t>(to_u64(v)); }

double to_real(const std::string& v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out)) {
    throw Error("expected a real number, got '" + v + "'");
  }
  return out;
}

bool to_flag(const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw Error("expected true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T, typename F>
std::string join(const std::vector<T>& xs, F fmt) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += fmt(xs[i]);
  }
  return out;
}

std::string real_str(double v) {
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

std::string count_str(std::size_t v) { return std::to_string(v); }

// Helpers to keep the key table one line per entry.
ConfigKey count_key(std::string name, std::string help, std::size_t RunConfig::*field) {
  return {std::move(name), std::move(help),
          [field](const RunConfig& c) { return std::to_string(c.*field); },
          [field](RunConfig& c, const std::string& v) { c.*field = to_count(v); }};
}

template <typename S, typename M>
ConfigKey nested_count(std::string name, std::string help, S RunConfig::*outer, M S::*inner) {
  return {std::move(name), std::move(help),
          [=](const RunConfig& c) { return std::to_string((c.*outer).*inner); },
          [=](RunConfig& c, const std::string& v) { (c.*outer).*inner = to_count(v); }};
}

template <typename S>
ConfigKey nested_real(std::string name, std::string help, S RunConfig::*outer, double S::*inner) {
  return {std::move(name), std::move(help),
          [=](const RunConfig& c) { return real_str((c.*outer).*inner); },
          [=](RunConfig& c, const std::string& v) { (c.*outer).*inner = to_real(v); }};
}

ConfigKey path_key(std::string name, std::string help, std::string RunConfig::*field) {
  return {std::move(name), std::move(help), [field](const RunConfig& c) { return c.*field; },
          [field](RunConfig& c, const std::string& v) { c.*field = v; }};
}

std::vector<ConfigKey> build_keys() {
  using R = RunConfig;
  std::vector<ConfigKey> k;
  k.push_back(path_key("out", "output directory for every command", &R::out));
  k.push_back(path_key("data_dir", "dataset directory (manifest.csv, attendance.csv); empty = out",
                       &R::data_dir));
  k.push_back(path_key("split_file", "split CSV; empty = <out>/split.csv", &R::split_file));
  k.push_back(path_key("checkpoint", "model checkpoint; empty = <out>/model.mck", &R::checkpoint));
  k.push_back({"seed", "seed for generation, splitting, initialization and evaluation",
               [](const R& c) { return std::to_string(c.seed); },
               [](R& c, const std::string& v) { c.seed = to_u64(v); }});

  k.push_back(nested_count("synth_dim", "synthetic feature dimension", &R::synth, &SynthConfig::dim));
  k.push_back(nested_count("synth_frames", "frames per synthetic trailer (multiple of template length)",
                           &R::synth, &SynthConfig::n_frames));
  k.push_back(nested_count("synth_template_len", "frames per genre template", &R::synth,
                           &SynthConfig::template_len));
  k.push_back(nested_count("synth_genre_pairs", "genre pairs that differ only in order", &R::synth,
                           &SynthConfig::n_genre_pairs));
  k.push_back(nested_count("synth_prototypes", "prototype frame vectors", &R::synth,
                           &SynthConfig::n_prototypes));
  k.push_back(nested_count("synth_movies", "synthetic movies", &R::synth, &SynthConfig::n_movies));
  k.push_back(nested_count("synth_users", "synthetic users", &R::synth, &SynthConfig::n_users));
  k.push_back(nested_real("synth_p_hi", "attendance probability for a preferred genre", &R::synth,
                          &SynthConfig::p_hi));
  k.push_back(nested_real("synth_p_lo", "attendance probability otherwise", &R::synth,
                          &SynthConfig::p_lo));
  k.push_back(nested_real("synth_sigma", "per-frame Gaussian noise", &R::synth,
                          &SynthConfig::noise_sigma));

  k.push_back(count_key("n_cold", "newest movies held out as cold-start", &R::n_cold));
  k.push_back(nested_real("train_ratio", "share of positives for training", &R::ratios,
                          &SplitRatios::train));
  k.push_back(nested_real("validation_ratio", "share of positives for validation", &R::ratios,
                          &SplitRatios::validation));
  k.push_back(nested_real("test_ratio", "share of positives for testing", &R::ratios,
                          &SplitRatios::test));
  k.push_back({"window_days", "frequency/recency window in days",
               [](const R& c) { return real_str(c.window_days); },
               [](R& c, const std::string& v) { c.window_days = to_real(v); }});
  k.push_back(count_key("history_cap", "most recent attended movies per user vector",
                        &R::history_cap));

  k.push_back({"encoder", "movie encoder: conv or avgpool",
               [](const R& c) { return std::string(encoder_kind_name(c.encoder)); },
               [](R& c, const std::string& v) { c.encoder = parse_encoder_kind(v); }});
  k.push_back(nested_count("feature_dim", "input feature dimension D", &R::model,
                           &EncoderConfig::feature_dim));
  k.push_back(nested_count("max_frames", "frames per trailer after padding or truncation",
                           &R::model, &EncoderConfig::max_frames));
  k.push_back(nested_count("conv_out_channels", "channels of both conv layers", &R::model,
                           &EncoderConfig::conv_out_channels));
  k.push_back(nested_count("filter_width", "first conv filter width k", &R::model,
                           &EncoderConfig::filter_width));
  k.push_back(nested_count("stride", "first conv stride", &R::model, &EncoderConfig::stride));
  k.push_back(nested_count("residual_filter_width", "second conv width; 0 = no second layer",
                           &R::model, &EncoderConfig::residual_filter_width));
  k.push_back({"residual_enabled", "skip connection around a width-1 second layer",
               [](const R& c) { return std::string(c.model.residual_enabled ? "true" : "false"); },
               [](R& c, const std::string& v) { c.model.residual_enabled = to_flag(v); }});
  k.push_back({"mlp_layer_widths", "comma-separated mlp widths after pooling; empty = none",
               [](const R& c) { return join(c.model.mlp_layer_widths, count_str); },
               [](R& c, const std::string& v) {
                 c.model.mlp_layer_widths.clear();
                 for (const auto& s : split_list(v)) c.model.mlp_layer_widths.push_back(to_count(s));
               }});

  k.push_back(nested_count("batch_size", "examples per SGD step (even)", &R::train,
                           &TrainConfig::batch_size));
  k.push_back(nested_real("learning_rate", "SGD step size", &R::train, &TrainConfig::learning_rate));
  k.push_back(nested_count("max_epochs", "upper bound on epochs", &R::train,
                           &TrainConfig::max_epochs));
  k.push_back(nested_count("patience", "epochs without validation gain before stopping", &R::train,
                           &TrainConfig::patience));
  k.push_back(nested_count("steps_per_epoch", "SGD steps between validations", &R::train,
                           &TrainConfig::steps_per_epoch));
  k.push_back(nested_count("validation_pairs", "validation pairs scored per epoch (multiple of 10)",
                           &R::train, &TrainConfig::validation_pairs));

  k.push_back(count_key("eval_pairs", "pairs per evaluation pool at 1:9 (multiple of 10)",
                        &R::eval_pairs));

  k.push_back({"sweep_filter_widths", "filter widths retrained by sweep",
               [](const R& c) { return join(c.sweep_filter_widths, count_str); },
               [](R& c, const std::string& v) {
                 c.sweep_filter_widths.clear();
                 for (const auto& s : split_list(v)) c.sweep_filter_widths.push_back(to_count(s));
               }});
  k.push_back({"sweep_residual", "residual layer widths for sweep; none = no second layer",
               [](const R& c) {
                 return join(c.sweep_residual, [](const std::optional<std::size_t>& r) {
                   return r ? std::to_string(*r) : std::string("none");
                 });
               },
               [](R& c, const std::string& v) {
                 c.sweep_residual.clear();
                 for (const auto& s : split_list(v)) {
                   if (s == "none") {
                     c.sweep_residual.push_back(std::nullopt);
                   } else {
                     c.sweep_residual.push_back(to_count(s));
                   }
                 }
               }});
  k.push_back({"sweep_seeds", "model seeds per sweep configuration",
               [](const R& c) {
                 return join(c.sweep_seeds, [](std::uint64_t s) { return std::to_string(s); });
               },
               [](R& c, const std::string& v) {
                 c.sweep_seeds.clear();
                 for (const auto& s : split_list(v)) c.sweep_seeds.push_back(to_u64(s));
               }});

  k.push_back({"explain_channel", "channel to mine; all = every channel",
               [](const R& c) {
                 return c.explain_channel ? std::to_string(*c.explain_channel) : std::string("all");
               },
               [](R& c, const std::string& v) {
                 if (v == "all") {
                   c.explain_channel.reset();
                 } else {
                   c.explain_channel = to_count(v);
                 }
               }});
  k.push_back(count_key("explain_max_hits", "hits kept per channel", &R::explain_max_hits));
  k.push_back(count_key("gradcheck_instances", "seeded instances per gradient check",
                        &R::gradcheck_instances));
  k.push_back({"gradcheck_tolerance", "max relative error for a passing gradient check",
               [](const R& c) { return real_str(c.gradcheck_tolerance); },
               [](R& c, const std::string& v) { c.gradcheck_tolerance = to_real(v); }});
  return k;
}

}  // namespace

EncoderConfig RunConfig::desk_model() {
  EncoderConfig m;
  m.feature_dim = 32;
  m.max_frames = 42;
  m.conv_out_channels = 16;
  m.filter_width = 8;
  m.stride = 2;
  m.residual_filter_width = 1;
  m.residual_enabled = true;
  m.mlp_layer_widths = {8};
  return m;
}

void RunConfig::validate() const {
  if (out.empty()) throw Error("out must not be empty");
  synth.validate();
  model.validate(encoder);
  train_config().validate();
  const double sum = ratios.train + ratios.validation + ratios.test;
  if (ratios.train < 0 || ratios.validation < 0 || ratios.test < 0 || std::abs(sum - 1.0) > 1e-9) {
    throw Error("split ratios must be non-negative and sum to 1");
  }
  if (!(window_days > 0.0)) throw Error("window_days must be > 0");
  if (history_cap == 0) throw Error("history_cap must be >= 1");
  if (eval_pairs == 0 || eval_pairs % 10 != 0) {
    throw Error("eval_pairs must be a positive multiple of 10");
  }
  if (sweep_filter_widths.empty() || sweep_residual.empty() || sweep_seeds.empty()) {
    throw Error("sweep lists must not be empty");
  }
  if (explain_channel && *explain_channel >= model.conv_out_channels) {
    throw Error("explain_channel " + std::to_string(*explain_channel) + " >= conv_out_channels " +
                std::to_string(model.conv_out_channels));
  }
  if (gradcheck_instances == 0) throw Error("gradcheck_instances must be >= 1");
}

std::filesystem::path RunConfig::data_path() const {
  return data_dir.empty() ? std::filesystem::path(out) : std::filesystem::path(data_dir);
}

std::filesystem::path RunConfig::split_path() const {
  return split_file.empty() ? std::filesystem::path(out) / "split.csv" : std::filesystem::path(split_file);
}

std::filesystem::path RunConfig::checkpoint_path() const {
  return checkpoint.empty() ? std::filesystem::path(out) / "model.mck" : std::filesystem::path(checkpoint);
}

TrainConfig RunConfig::train_config() const {
  TrainConfig t = train;
  t.encoder_kind = encoder;
  t.seed = seed;
  return t;
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = build_keys();
  return keys;
}

void set_key(RunConfig& config, const std::string& key, const std::string& value) {
  for (const auto& k : config_keys()) {
    if (k.name != key) continue;
    try {
      k.set(config, value);
    } catch (const Error& e) {
      throw Error(key + ": " + e.what());
    }
    return;
  }
  throw Error("unknown config key '" + key + "'");
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path.string());
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = path.string() + ":" + std::to_string(n) + ": ";
    if (eq == std::string::npos) throw Error(where + "expected key = value");
    try {
      set_key(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const Error& e) {
      throw Error(where + e.what());
    }
  }
}

std::string dump_config(const RunConfig& config) {
  std::string out;
  for (const auto& k : config_keys()) out += k.name + " = " + k.get(config) + "\n";
  return out;
}

}  // namespace tcf::cli
