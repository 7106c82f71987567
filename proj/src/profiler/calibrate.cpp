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

#include "common/format.hpp"
#include "hwnas/profiler.hpp"
#include "hwnas/rng.hpp"
#include "json.hpp"

namespace hwnas {

std::optional<double> pearson_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error(ErrorCode::kLengthMismatch, "pearson: series differ in length");
  const std::size_t n = x.size();
  if (n < 2) return std::nullopt;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

std::string CalibrationReport::to_csv() const {
  std::string out = "predicted_ms,measured_ms\n";
  for (const auto& p : points) out += format_double(p.predicted_ms) + ',' + format_double(p.measured_ms) + '\n';
  return out;
}

std::string CalibrationReport::to_json() const {
  nlohmann::ordered_json j;
  j["samples"] = points.size();
  j["mape_percent"] = mape;
  if (pearson) {
    j["pearson"] = *pearson;
  } else {
    j["pearson"] = nullptr;
  }
  j["correlation_defined"] = pearson.has_value();
  return j.dump(2) + "\n";
}

CalibrationReport calibrate(DeviceRunner& device, const SuperNet& net, const LatencyTable& lut, int num_samples,
                            std::uint64_t seed, int trials) {
  if (num_samples < 1) throw Error(ErrorCode::kInvalidArgument, "calibrate: num_samples must be positive");
  std::vector<std::vector<double>> stage_f;
  for (const auto& stage : net.stages) stage_f.push_back(candidate_latencies(lut, stage));
  const double fixed = fixed_latency(lut, net);

  Rng rng(seed);
  CalibrationReport report;
  std::vector<double> pred, meas;
  double ape = 0.0;
  for (int i = 0; i < num_samples; ++i) {
    std::vector<int> choices;
    std::vector<StageLatency> stages;
    for (std::size_t s = 0; s < net.stages.size(); ++s) {
      const std::size_t m = net.stages[s].candidates.size();
      const auto c = static_cast<std::size_t>(rng.below(m));
      choices.push_back(static_cast<int>(c));
      std::vector<double> p(m, 0.0);
      p[c] = 1.0;
      stages.push_back({std::move(p), stage_f[s]});
    }
    const double predicted = expected_network_latency(stages, fixed);
    auto samples = device.run(compose(net, choices), trials);
    if (samples.size() != static_cast<std::size_t>(trials)) {
      throw Error(ErrorCode::kDeviceError, "calibrate: wrong number of samples from " + device.name());
    }
    const double measured = median(std::move(samples));
    if (!(measured > 0.0)) throw Error(ErrorCode::kDeviceError, "calibrate: non-positive measured latency");
    report.points.push_back({predicted, measured});
    pred.push_back(predicted);
    meas.push_back(measured);
    ape += std::abs(predicted - measured) / measured;
  }
  report.mape = 100.0 * ape / num_samples;
  report.pearson = pearson_correlation(pred, meas);
  return report;
}

}  // namespace hwnas
