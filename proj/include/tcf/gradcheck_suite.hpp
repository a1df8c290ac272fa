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
#include <string>
#include <vector>

#include "tcf/model.hpp"

namespace tcf {

struct GradcheckOutcome {
  std::string name;
  std::size_t instances = 0;
  double max_error = 0.0;
};

// Central-difference check of the full model on a small seeded instance:
// 3 movies, 2 users, 5 labeled pairs. Returns the max relative error.
double model_gradcheck(const EncoderConfig& config, EncoderKind kind, std::uint64_t seed,
                       double eps = 1e-5);

// Every layer (conv, relu, avg-pool, affine, sigmoid-BCE) and the composite
// model variants, `instances` seeded instances each, seeds base_seed onwards.
std::vector<GradcheckOutcome> run_gradcheck_suite(std::size_t instances, std::uint64_t base_seed,
                                                  double eps = 1e-5);

}  // namespace tcf
