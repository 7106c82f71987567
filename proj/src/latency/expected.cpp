// Copyright 2026 The hwnas Authors
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

#include <cmath>

#include "hwnas/error.hpp"
#include "hwnas/latency.hpp"

namespace hwnas {

namespace {

void check_distribution(std::span<const double> p, std::span<const double> f) {
  if (p.size() != f.size() || p.empty()) {
    throw Error(ErrorCode::kLengthMismatch, "p has " + std::to_string(p.size()) + " entries, f has " +
                                                std::to_string(f.size()));
  }
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw Error(ErrorCode::kNotNormalized, "probabilities must be >= 0");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::kNotNormalized, "probabilities sum to " + std::to_string(sum));
  }
}

}  // namespace

double expected_stage_latency(std::span<const double> p, std::span<const double> f) {
  check_distribution(p, f);
  double e = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) e += p[j] * f[j];
  return e;
}

double expected_network_latency(std::span<const StageLatency> stages, double fixed_ms) {
  double total = fixed_ms;
  for (const auto& s : stages) total += expected_stage_latency(s.p, s.f);
  return total;
}

std::vector<double> latency_alpha_grad(std::span<const double> p, std::span<const double> f) {
  const double e = expected_stage_latency(p, f);
  std::vector<double> g(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) g[k] = p[k] * (f[k] - e);
  return g;
}

}  // namespace hwnas
