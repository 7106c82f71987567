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
#include <numbers>
#include <numeric>

#include "hwnas/data.hpp"
#include "hwnas/error.hpp"

namespace hwnas {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t sz(int v) { return static_cast<std::size_t>(v); }

struct SplitSizes {
  std::size_t train, val, test;
};

SplitSizes split_sizes(std::size_t n) {
  const std::size_t train = n * 70 / 100;
  const std::size_t val = n * 15 / 100;
  return {train, val, n - train - val};
}

void check_spec(const DatasetSpec& spec) {
  if (spec.num_samples < 3 || !spec.image.valid()) {
    throw Error(ErrorCode::kInvalidArgument, "dataset needs >= 3 samples and a positive image shape");
  }
}

}  // namespace

Split gather(const Split& split, std::span<const std::size_t> indices) {
  Split out;
  const auto& d = split.inputs.dims();
  const std::size_t in_stride = d[1] * d[2] * d[3];
  out.inputs = Tensor({indices.size(), d[1], d[2], d[3]});
  const bool has_targets = split.targets.rank() == 4;
  std::size_t t_stride = 0;
  if (has_targets) {
    const auto& t = split.targets.dims();
    t_stride = t[1] * t[2] * t[3];
    out.targets = Tensor({indices.size(), t[1], t[2], t[3]});
  }
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::size_t src = indices[i];
    std::copy_n(split.inputs.raw() + src * in_stride, in_stride, out.inputs.raw() + i * in_stride);
    if (has_targets) {
      std::copy_n(split.targets.raw() + src * t_stride, t_stride, out.targets.raw() + i * t_stride);
    }
    if (!split.labels.empty()) out.labels.push_back(split.labels[src]);
  }
  return out;
}

namespace {

Dataset assemble(Task task, const TensorShape& in_shape, const TensorShape& target_shape,
                 int num_classes, const Split& all, std::vector<std::size_t> order) {
  Dataset ds;
  ds.task = task;
  ds.input_shape = in_shape;
  ds.target_shape = target_shape;
  ds.num_classes = num_classes;
  const auto sizes = split_sizes(order.size());
  std::span<const std::size_t> idx(order);
  ds.train = gather(all, idx.subspan(0, sizes.train));
  ds.val = gather(all, idx.subspan(sizes.train, sizes.val));
  ds.test = gather(all, idx.subspan(sizes.train + sizes.val));
  return ds;
}

}  // namespace

Dataset generate_classification_dataset(const DatasetSpec& spec) {
  check_spec(spec);
  const int classes = spec.separable ? 2 : spec.num_classes;
  if (classes < 2) throw Error(ErrorCode::kInvalidArgument, "need at least two classes");
  const std::size_t n = sz(spec.num_samples);
  const auto& img = spec.image;
  const std::size_t pixels = sz(img.height * img.width), per_sample = sz(img.channels) * pixels;
  Rng rng(spec.seed);

  Split all;
  all.inputs = Tensor::feature_map(n, img);
  all.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) all.labels[i] = static_cast<int>(i % sz(classes));

  std::vector<double> direction;
  if (spec.separable) {
    direction.resize(per_sample);
    double norm = 0.0;
    for (auto& v : direction) {
      v = rng.normal();
      norm += v * v;
    }
    for (auto& v : direction) v /= std::sqrt(norm);
  }

  for (std::size_t i = 0; i < n; ++i) {
    double* x = all.inputs.raw() + i * per_sample;
    const int k = all.labels[i];
    if (spec.separable) {
      // Noise with its component along `direction` replaced by +-margin.
      double proj = 0.0;
      for (std::size_t p = 0; p < per_sample; ++p) {
        x[p] = spec.noise * rng.normal();
        proj += x[p] * direction[p];
      }
      const double margin = k == 0 ? 1.0 : -1.0;
      for (std::size_t p = 0; p < per_sample; ++p) x[p] += (margin - proj) * direction[p];
      continue;
    }
    const double theta = std::numbers::pi * k / classes;
    const double freq = (k % 2 == 0 ? 1.5 : 2.5) / img.width;
    const double phase = rng.uniform(0.0, kTwoPi);
    const double ct = std::cos(theta), st = std::sin(theta);
    for (int c = 0; c < img.channels; ++c) {
      const double tint = 0.6 + 0.4 * std::cos(kTwoPi * (static_cast<double>(k) / classes +
                                                          static_cast<double>(c) / 3.0));
      for (int y = 0; y < img.height; ++y) {
        for (int xx = 0; xx < img.width; ++xx) {
          const double wave = std::sin(kTwoPi * freq * (xx * ct + y * st) + phase);
          x[sz(c) * pixels + sz(y * img.width + xx)] = tint * wave + spec.noise * rng.normal();
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span(order));
  return assemble(Task::kClassification, img, {classes, 1, 1}, classes, all, std::move(order));
}

Dataset generate_sr_dataset(const DatasetSpec& spec) {
  check_spec(spec);
  if (spec.sr_scale != 2) throw Error(ErrorCode::kInvalidArgument, "sr_scale must be 2");
  const int s = spec.sr_scale;
  const std::size_t n = sz(spec.num_samples);
  const TensorShape lr = spec.image;
  const TensorShape hr{lr.channels, lr.height * s, lr.width * s};
  Rng rng(spec.seed);

  Split all;
  all.inputs = Tensor::feature_map(n, lr);
  all.targets = Tensor::feature_map(n, hr);
  const std::size_t hr_plane = sz(hr.height * hr.width), lr_plane = sz(lr.height * lr.width);

  for (std::size_t i = 0; i < n; ++i) {
    double* t = all.targets.raw() + i * sz(hr.channels) * hr_plane;
    struct Wave {
      double fx, fy, phase, amp;
    };
    std::vector<Wave> waves(3);
    for (auto& w : waves) {
      const double angle = rng.uniform(0.0, kTwoPi);
      const double freq = rng.uniform(1.0, 6.0) / hr.width;
      w = {freq * std::cos(angle), freq * std::sin(angle), rng.uniform(0.0, kTwoPi), rng.uniform(0.05, 0.15)};
    }
    struct Rect {
      int y0, y1, x0, x1;
      double level;
    };
    std::vector<Rect> rects(2);
    for (auto& r : rects) {
      r.y0 = rng.uniform_int(0, hr.height - 2);
      r.x0 = rng.uniform_int(0, hr.width - 2);
      r.y1 = rng.uniform_int(r.y0 + 1, hr.height - 1);
      r.x1 = rng.uniform_int(r.x0 + 1, hr.width - 1);
      r.level = rng.uniform(-0.2, 0.2);
    }
    for (int c = 0; c < hr.channels; ++c) {
      const double tint = rng.uniform(0.8, 1.2);
      for (int y = 0; y < hr.height; ++y) {
        for (int x = 0; x < hr.width; ++x) {
          double v = 0.5;
          for (const auto& w : waves) v += tint * w.amp * std::sin(kTwoPi * (w.fx * x + w.fy * y) + w.phase);
          for (const auto& r : rects) {
            if (y >= r.y0 && y <= r.y1 && x >= r.x0 && x <= r.x1) v += r.level;
          }
          t[sz(c) * hr_plane + sz(y * hr.width + x)] = std::clamp(v, 0.0, 1.0);
        }
      }
    }
    double* in = all.inputs.raw() + i * sz(lr.channels) * lr_plane;
    const double inv = 1.0 / (s * s);
    for (int c = 0; c < lr.channels; ++c) {
      for (int y = 0; y < lr.height; ++y) {
        for (int x = 0; x < lr.width; ++x) {
          double acc = 0.0;
          for (int dy = 0; dy < s; ++dy) {
            for (int dx = 0; dx < s; ++dx) {
              acc += t[sz(c) * hr_plane + sz((y * s + dy) * hr.width + x * s + dx)];
            }
          }
          in[sz(c) * lr_plane + sz(y * lr.width + x)] = acc * inv;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span(order));
  return assemble(Task::kSuperResolution, lr, hr, 0, all, std::move(order));
}

Dataset generate_dataset(const DatasetSpec& spec) {
  return spec.task == Task::kClassification ? generate_classification_dataset(spec)
                                            : generate_sr_dataset(spec);
}

BatchSampler::BatchSampler(std::size_t n, std::size_t batch, std::uint64_t seed)
    : order_(n), batch_(std::min(batch, n)), rng_(seed) {
  if (n == 0 || batch == 0) throw Error(ErrorCode::kInvalidArgument, "empty sampler");
  std::iota(order_.begin(), order_.end(), 0);
  rng_.shuffle(std::span(order_));
}

std::vector<std::size_t> BatchSampler::next() {
  if (cursor_ + batch_ > order_.size()) {
    rng_.shuffle(std::span(order_));
    cursor_ = 0;
  }
  std::vector<std::size_t> out(order_.begin() + static_cast<std::ptrdiff_t>(cursor_),
                               order_.begin() + static_cast<std::ptrdiff_t>(cursor_ + batch_));
  cursor_ += batch_;
  return out;
}

}  // namespace hwnas
