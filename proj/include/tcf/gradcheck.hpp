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

#include <functional>
#include <span>
#include <vector>

namespace tcf {

// Central-difference gradient check. `params` are perturbed in place one
// coordinate at a time (and restored), `objective` is re-evaluated, and the
// numeric derivative (f(x+eps) - f(x-eps)) / (2 eps) is compared to the
// matching entry of `analytic`. Returns the largest relative error, using
// max(|a|, |n|, 1e-12) as the denominator.
double grad_check(const std::function<double()>& objective,
                  const std::vector<std::span<double>>& params,
                  const std::vector<std::span<const double>>& analytic, double eps);

// Convenience for a function of one flat vector.
double grad_check(const std::function<double(std::span<const double>)>& f,
                  std::span<const double> x, std::span<const double> analytic, double eps);

double relative_error(double analytic, double numeric);

}  // namespace tcf
