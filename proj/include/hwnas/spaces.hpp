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

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hwnas/graph.hpp"

namespace hwnas::spaces {

/// 3 stages of {MBConv e3 k3, MBConv e3 k5, Identity} between a 3x3 conv
/// stem and an average-pool + linear head.
SuperNet toy_classification(int channels = 8, int image = 12, int num_classes = 4);

/// Stem conv, then stages {ReLU, per-channel LeakyReLU}, {Conv k1, k3, k5}
/// and {UpsampleNearest, UpsampleBilinear, PointwiseConv + DepthToSpace},
/// then a 3x3 conv back to RGB at twice the resolution.
SuperNet toy_sr(int channels = 8, int image = 32);

/// Five MBConv stages at 256x256 input behind a 7x7/2 stem conv, sized so
/// whole networks take several milliseconds on the default simulated device.
/// Used for profiling and calibration, not training.
SuperNet mobile();

std::vector<std::string_view> names();
/// Throws Error(kInvalidArgument) for unknown names.
SuperNet by_name(std::string_view name);

}  // namespace hwnas::spaces
