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

#include <algorithm>
#include <cmath>
#include <optional>

#include "hwnas/nn.hpp"

namespace hwnas {

namespace {

Tensor probe_output(ModuleInstance& m, const Tensor& x) {
  Tensor y = m.forward(x);
  m.clear_state();
  return y;
}

// sum_j r_j * (a_j - b_j) / step, with the division taken per output so an
// operator that passes the coordinate through unchanged yields r_j exactly.
double directional(const Tensor& a, const Tensor& b, const Tensor& r, double step) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += r[j] * ((a[j] - b[j]) / step);
  return s;
}

// Central difference at `slot`, or nullopt when the forward and backward
// one-sided differences disagree (the step straddles a non-differentiable
// point). The probe loss is piecewise linear in any single coordinate for
// every supported operator, so away from kinks the two sides agree to rounding.
// Steps are the representable differences actually applied to the slot.
std::optional<double> numeric_grad(ModuleInstance& m, Tensor& x, const Tensor& r, double* slot,
                                   double step, const Tensor& base) {
  const double saved = *slot;
  const double up = saved + step;
  const double down = saved - step;
  *slot = up;
  const Tensor plus = probe_output(m, x);
  *slot = down;
  const Tensor minus = probe_output(m, x);
  *slot = saved;
  const double forward = directional(plus, base, r, up - saved);
  const double backward = directional(base, minus, r, saved - down);
  if (std::abs(forward - backward) > 1e-6 * std::max({1.0, std::abs(forward), std::abs(backward)})) {
    return std::nullopt;
  }
  return directional(plus, minus, r, up - down);
}

}  // namespace

GradCheckReport grad_check(ModuleInstance& instance, const GradCheckOptions& options) {
  Rng rng(options.seed);
  Tensor x = Tensor::feature_map(options.batch, instance.input_shape());
  for (auto& v : x.data()) v = rng.uniform(-1.0, 1.0);
  Tensor r = Tensor::feature_map(options.batch, instance.output_shape());
  for (auto& v : r.data()) v = rng.uniform(-1.0, 1.0);

  auto params = instance.parameters();
  for (auto& [name, p] : params) p->zero_grad();
  instance.forward(x);
  const Tensor input_grad = instance.backward(r);
  const Tensor base = probe_output(instance, x);

  GradCheckReport report;
  auto compare = [&](double analytic, std::optional<double> numeric, const std::string& name) {
    if (!numeric) {
      ++report.skipped_kinks;
      return;
    }
    ++report.checked;
    const double denom = std::max({std::abs(analytic), std::abs(*numeric), 1e-6});
    const double err = std::abs(analytic - *numeric) / denom;
    if (err > report.max_rel_error || report.worst.empty()) {
      report.max_rel_error = err;
      report.worst = name;
    }
  };

  for (auto& [name, p] : params) {
    auto values = p->value.data();
    for (std::size_t i = 0; i < values.size(); ++i) {
      compare(p->grad[i], numeric_grad(instance, x, r, &values[i], options.step, base),
              name + "[" + std::to_string(i) + "]");
    }
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    compare(input_grad[i], numeric_grad(instance, x, r, &x[i], options.step, base),
            "input[" + std::to_string(i) + "]");
  }
  for (auto& [name, p] : params) p->zero_grad();
  return report;
}

}  // namespace hwnas
