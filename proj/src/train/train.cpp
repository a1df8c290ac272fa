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

#include "tcf/train.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>

#include "tcf/csv.hpp"
#include "tcf/error.hpp"
#include "tcf/eval.hpp"

namespace tcf {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian");

void TrainConfig::validate() const {
  if (batch_size == 0 || batch_size % 2 != 0) {
    throw Error("batch_size must be even and positive, got " + std::to_string(batch_size));
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error("learning_rate must be > 0, got " + std::to_string(learning_rate));
  }
  if (patience < 1) throw Error("patience must be >= 1");
  if (max_epochs < 1) throw Error("max_epochs must be >= 1");
  if (steps_per_epoch < 1) throw Error("steps_per_epoch must be >= 1");
  if (validation_pairs == 0 || validation_pairs % 10 != 0) {
    throw Error("validation_pairs must be a positive multiple of 10, got " +
                std::to_string(validation_pairs));
  }
}

double TrainHistory::best_validation_auc() const {
  if (epochs.empty()) throw Error("empty training history");
  return epochs.at(best_epoch).validation_auc;
}

void sgd_step(ModelParams& params, const ModelParams& grads, double learning_rate) {
  params.add_scaled(grads, -learning_rate);
}

namespace {

// Keeps the validation sample independent of the batch stream.
constexpr std::uint64_t kValidationSalt = 0x9e3779b97f4a7c15ULL;

TrainResult run(ModelParams params, const TrainConfig& config, bool allow_zero_lr,
                const DatasetSplit& split, const SamplingIndex& index,
                std::span<const Tensor2> features, const EncoderConfig& model_config) {
  if (!allow_zero_lr) {
    config.validate();
  } else {
    TrainConfig probe = config;
    probe.learning_rate = 1.0;
    probe.validate();
    if (config.learning_rate < 0.0) throw Error("learning_rate must be >= 0");
  }
  params.check_shape(model_config);

  std::mt19937_64 val_rng(config.seed ^ kValidationSalt);
  const std::vector<Sample> val_samples =
      sample_eval_pairs(split, index, EvalPool::kValidation, config.validation_pairs, val_rng);
  std::vector<int> val_labels;
  val_labels.reserve(val_samples.size());
  for (const Sample& s : val_samples) val_labels.push_back(s.label);

  std::mt19937_64 rng(config.seed);
  TrainResult result{params, {}};
  std::size_t step = 0;
  std::size_t since_best = 0;
  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    double loss_sum = 0.0;
    for (std::size_t i = 0; i < config.steps_per_epoch; ++i) {
      const std::vector<Sample> batch =
          sample_training_batch(split, index, config.batch_size, rng);
      const std::vector<LabeledExample> examples = to_examples(batch, index);
      LossAndGrad lg = forward_loss(examples, params, model_config, features);
      ++step;
      if (!std::isfinite(lg.mean_loss)) throw Error("diverged at step " + std::to_string(step));
      loss_sum += lg.mean_loss;
      if (config.learning_rate != 0.0) sgd_step(params, lg.grads, config.learning_rate);
    }
    if (!params.all_finite()) throw Error("diverged at step " + std::to_string(step));

    const std::vector<double> scores =
        score_samples(params, model_config, features, index, val_samples);
    EpochStats stats;
    stats.train_loss = loss_sum / static_cast<double>(config.steps_per_epoch);
    stats.validation_auc = auc(scores, val_labels);
    result.history.epochs.push_back(stats);

    if (epoch == 0 || stats.validation_auc > result.history.best_validation_auc()) {
      result.history.best_epoch = epoch;
      result.params = params;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  return result;
}

}  // namespace

TrainResult train(const TrainConfig& config, const DatasetSplit& split,
                  const SamplingIndex& index, std::span<const Tensor2> features,
                  const EncoderConfig& model_config) {
  config.validate();
  return run(ModelParams::init(model_config, config.encoder_kind, config.seed), config, false,
             split, index, features, model_config);
}

TrainResult train_from(ModelParams initial, const TrainConfig& config, const DatasetSplit& split,
                       const SamplingIndex& index, std::span<const Tensor2> features,
                       const EncoderConfig& model_config) {
  return run(std::move(initial), config, true, split, index, features, model_config);
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

constexpr char kMagic[4] = {'M', 'C', 'K', '1'};
constexpr std::uint32_t kVersion = 1;

struct NamedTensor {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::vector<double> values;
};

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

void put_tensor(std::string& out, const std::string& name, std::span<const std::size_t> dims,
                std::span<const double> values) {
  if (name.size() > 0xffff) throw Error("tensor name too long: " + name);
  put<std::uint16_t>(out, static_cast<std::uint16_t>(name.size()));
  out += name;
  put<std::uint8_t>(out, static_cast<std::uint8_t>(dims.size()));
  for (std::size_t d : dims) put<std::uint32_t>(out, static_cast<std::uint32_t>(d));
  for (double v : values) put<double>(out, v);
}

void put_scalar(std::string& out, const std::string& name, double v) {
  const std::size_t dims[1] = {1};
  put_tensor(out, name, dims, std::span(&v, 1));
}

class Cursor {
 public:
  Cursor(const std::string& data, std::string path) : data_(data), path_(std::move(path)) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) {
      throw FormatError(FormatError::Kind::kTruncated,
                        path_ + ": truncated checkpoint at byte " + std::to_string(pos_));
    }
  }
  const std::string& data_;
  std::string path_;
  std::size_t pos_ = 0;
};

std::size_t as_count(const NamedTensor& t, const std::string& path) {
  if (t.values.size() != 1) {
    throw FormatError(FormatError::Kind::kBadValue, path + ": " + t.name + " must be a scalar");
  }
  const double v = t.values[0];
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e9) {
    throw FormatError(FormatError::Kind::kBadValue, path + ": bad value for " + t.name);
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

void save_checkpoint(const ModelParams& params, const EncoderConfig& config,
                     const std::filesystem::path& path) {
  params.check_shape(config);
  const auto views = params.views();
  std::string out(kMagic, 4);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(views.size() + 9));

  put_scalar(out, "config.kind", params.kind == EncoderKind::kConv ? 0.0 : 1.0);
  put_scalar(out, "config.feature_dim", static_cast<double>(config.feature_dim));
  put_scalar(out, "config.max_frames", static_cast<double>(config.max_frames));
  put_scalar(out, "config.conv_out_channels", static_cast<double>(config.conv_out_channels));
  put_scalar(out, "config.filter_width", static_cast<double>(config.filter_width));
  put_scalar(out, "config.stride", static_cast<double>(config.stride));
  put_scalar(out, "config.residual_filter_width",
             static_cast<double>(config.residual_filter_width));
  put_scalar(out, "config.residual_enabled", config.residual_enabled ? 1.0 : 0.0);
  std::vector<double> widths(config.mlp_layer_widths.begin(), config.mlp_layer_widths.end());
  const std::size_t wdims[1] = {widths.size()};
  put_tensor(out, "config.mlp_layer_widths", wdims, widths);

  for (const auto& v : views) put_tensor(out, v.name, v.dims, v.values);
  csv::write_file(path, out);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path.string());
  const std::string data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  const std::string where = path.string();
  Cursor cur(data, where);

  if (cur.bytes(4) != std::string(kMagic, 4)) {
    throw FormatError(FormatError::Kind::kBadMagic, where + ": not a checkpoint (bad magic)");
  }
  const auto version = cur.get<std::uint32_t>();
  if (version != kVersion) {
    throw FormatError(FormatError::Kind::kVersion,
                      where + ": unsupported checkpoint version " + std::to_string(version));
  }
  const auto count = cur.get<std::uint32_t>();
  std::vector<NamedTensor> tensors;
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedTensor t;
    t.name = cur.bytes(cur.get<std::uint16_t>());
    const auto rank = cur.get<std::uint8_t>();
    std::size_t n = 1;
    for (std::uint8_t r = 0; r < rank; ++r) {
      t.dims.push_back(cur.get<std::uint32_t>());
      n *= t.dims.back();
    }
    if (n > data.size() / 8) {
      throw FormatError(FormatError::Kind::kTruncated, where + ": truncated tensor " + t.name);
    }
    t.values.resize(n);
    for (double& v : t.values) {
      v = cur.get<double>();
      if (!std::isfinite(v)) {
        throw FormatError(FormatError::Kind::kNonFinite, where + ": non-finite value in " + t.name);
      }
    }
    tensors.push_back(std::move(t));
  }
  if (!cur.done()) {
    throw FormatError(FormatError::Kind::kBadHeader, where + ": trailing bytes after tensors");
  }

  auto find = [&](const std::string& name) -> const NamedTensor& {
    for (const auto& t : tensors) {
      if (t.name == name) return t;
    }
    throw FormatError(FormatError::Kind::kBadHeader, where + ": missing tensor " + name);
  };

  Checkpoint ck;
  const std::size_t kind = as_count(find("config.kind"), where);
  if (kind > 1) throw FormatError(FormatError::Kind::kBadValue, where + ": bad encoder kind");
  const EncoderKind ekind = kind == 0 ? EncoderKind::kConv : EncoderKind::kAvgPool;
  EncoderConfig& c = ck.config;
  c.feature_dim = as_count(find("config.feature_dim"), where);
  c.max_frames = as_count(find("config.max_frames"), where);
  c.conv_out_channels = as_count(find("config.conv_out_channels"), where);
  c.filter_width = as_count(find("config.filter_width"), where);
  c.stride = as_count(find("config.stride"), where);
  c.residual_filter_width = as_count(find("config.residual_filter_width"), where);
  c.residual_enabled = as_count(find("config.residual_enabled"), where) != 0;
  c.mlp_layer_widths.clear();
  for (double w : find("config.mlp_layer_widths").values) {
    NamedTensor one{"config.mlp_layer_widths", {1}, {w}};
    c.mlp_layer_widths.push_back(as_count(one, where));
  }

  try {
    ck.params = ModelParams::zeros(c, ekind);
  } catch (const Error& e) {
    throw FormatError(FormatError::Kind::kBadValue, where + ": invalid stored config: " + e.what());
  }
  std::size_t matched = 0;
  for (auto& view : ck.params.views()) {
    const NamedTensor& t = find(view.name);
    std::vector<std::uint32_t> want(view.dims.begin(), view.dims.end());
    if (t.dims != want) {
      throw FormatError(FormatError::Kind::kBadHeader, where + ": shape mismatch for " + view.name);
    }
    std::copy(t.values.begin(), t.values.end(), view.values.begin());
    ++matched;
  }
  if (matched + 9 != tensors.size()) {
    throw FormatError(FormatError::Kind::kBadHeader, where + ": unexpected extra tensors");
  }
  return ck;
}

void write_history_csv(const std::filesystem::path& path, const TrainHistory& history) {
  std::ostringstream out;
  out << "epoch,train_loss,validation_auc,best\n";
  for (std::size_t i = 0; i < history.epochs.size(); ++i) {
    out << i << ',' << format_real(history.epochs[i].train_loss) << ','
        << format_real(history.epochs[i].validation_auc) << ','
        << (i == history.best_epoch ? 1 : 0) << '\n';
  }
  csv::write_file(path, out.str());
}

}  // namespace tcf
