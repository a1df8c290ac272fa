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

#include "run_config.hpp"

namespace tcf::cli {

// Each command validates its inputs, writes its outputs under config.out and
// returns the process exit code. Errors are thrown as tcf::Error.
int cmd_synth(const RunConfig& config);
int cmd_split(const RunConfig& config);
int cmd_train(const RunConfig& config);
int cmd_eval(const RunConfig& config);
int cmd_sweep(const RunConfig& config);
int cmd_explain(const RunConfig& config);
int cmd_gradcheck(const RunConfig& config);

}  // namespace tcf::cli
