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

#include <exception>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "run_config.hpp"
#include "tcf/error.hpp"

namespace {

using tcf::cli::RunConfig;

std::string key_help(const tcf::cli::ConfigKey& key, const RunConfig& defaults) {
  return key.help + " [default: " + key.get(defaults) + "]";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "tcf: temporal-conv hybrid collaborative filtering.\n"
      "Settings come from built-in defaults, then --config (key = value lines), then flags."};
  app.require_subcommand(1);
  app.get_formatter()->column_width(34);

  std::string config_path;
  app.add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);

  const RunConfig defaults;
  std::map<std::string, std::string> overrides;
  for (const auto& key : tcf::cli::config_keys()) {
    app.add_option("--" + key.name, overrides[key.name], key_help(key, defaults))
        ->type_name("VALUE")
        ->group("Settings");
  }

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const RunConfig&);
  };
  const Command commands[] = {
      {"synth", "generate a synthetic corpus (manifest, .tfv features, attendance) into --out",
       tcf::cli::cmd_synth},
      {"split", "write the cold-start/train/validation/test split to <out>/split.csv",
       tcf::cli::cmd_split},
      {"train", "train a model; writes the checkpoint and history.csv", tcf::cli::cmd_train},
      {"eval", "evaluate a checkpoint; writes report.csv", tcf::cli::cmd_eval},
      {"sweep", "retrain over filter widths, residual options and seeds; writes sweep.csv",
       tcf::cli::cmd_sweep},
      {"explain", "mine top-activating trailer windows; writes hits.csv", tcf::cli::cmd_explain},
      {"gradcheck", "run the central-difference gradient suite", tcf::cli::cmd_gradcheck},
  };
  std::map<CLI::App*, const Command*> by_app;
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->fallthrough();
    by_app[sub] = &c;
  }

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig config;
    if (!config_path.empty()) tcf::cli::apply_config_file(config, config_path);
    for (const auto& key : tcf::cli::config_keys()) {
      if (app.get_option("--" + key.name)->count() > 0) {
        tcf::cli::set_key(config, key.name, overrides[key.name]);
      }
    }
    config.validate();
    for (const auto& [sub, command] : by_app) {
      if (sub->parsed()) return command->run(config);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
