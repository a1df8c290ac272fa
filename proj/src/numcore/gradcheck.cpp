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

#include "tcf/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tcf/error.hpp"

namespace tcf {

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-12});
  return std::abs(analytic - numeric) / denom;
}

double grad_check(const std::function<double()>& objective,
                  const std::vector<std::span<double>>& params,
                  const std::vector<std::span<const double>>& analytic, double eps) {
  if (params.size() != analytic.size()) {
    throw ShapeError("grad_check: " + std::to_string(params.size()) + " parameter blocks but " +
                     std::to_string(analytic.size()) + " gradient blocks");
  }
  double worst = 0.0;
  for (std::size_t b = 0; b < params.size(); ++b) {
    if (params[b].size() != analytic[b].size()) {
      throw ShapeError("grad_check: block " + std::to_string(b) + " has " +
                       std::to_string(params[b].size()) + " values but gradient has " +
                       std::to_string(analytic[b].size()));
    }
    for (std::size_t i = 0; i < params[b].size(); ++i) {
      double& v = params[b][i];
      const double saved = v;
      v = saved + eps;
      const double up = objective();
      v = saved - eps;
      const double down = objective();
      v = saved;
      const double numeric = (up - down) / (2.0 * eps);
      worst = std::max(worst, relative_error(analytic[b][i], numeric));
    }
  }
  return worst;
}

double grad_check(const std::function<double(std::span<const double>)>& f,
                  std::span<const double> x, std::span<const double> analytic, double eps) {
  std::vector<double> work(x.begin(), x.end());
  std::span<double> view(work);
  return grad_check([&] { return f(view); }, {view}, {analytic}, eps);
}

}  // namespace tcf
