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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hwnas/nn.hpp"
#include "hwnas/rng.hpp"
#include "hwnas/simd.hpp"
#include "test_util.hpp"

namespace hwnas {
namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-2.0, 2.0);
  return v;
}

/// Restores the startup backend when a test switches it.
class BackendGuard {
 public:
  BackendGuard() : saved_(simd::active_backend()) {}
  ~BackendGuard() { simd::set_active_backend(saved_); }

 private:
  simd::Backend saved_;
};

class SimdEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!simd::available(simd::Backend::kAvx2)) GTEST_SKIP() << "AVX2 not available on this machine";
  }
  const simd::KernelTable& scalar = simd::table(simd::Backend::kScalar);
  const simd::KernelTable& avx2() { return simd::table(simd::Backend::kAvx2); }
};

// Lengths cover the empty case, sub-vector tails and multi-register bodies.
const std::size_t kLengths[] = {0, 1, 3, 4, 5, 7, 8, 15, 16, 17, 64, 1023};

TEST_F(SimdEquivalence, Dot) {
  for (std::size_t n : kLengths) {
    const auto x = random_vector(n, 1 + n);
    const auto y = random_vector(n, 2 + n);
    const double a = scalar.dot(x.data(), y.data(), n);
    const double b = avx2().dot(x.data(), y.data(), n);
    EXPECT_NEAR(a, b, 1e-12 * (1.0 + static_cast<double>(n))) << n;
  }
}

TEST_F(SimdEquivalence, Axpy) {
  for (std::size_t n : kLengths) {
    const auto x = random_vector(n, 3 + n);
    auto y1 = random_vector(n, 4 + n);
    auto y2 = y1;
    scalar.axpy(0.37, x.data(), y1.data(), n);
    avx2().axpy(0.37, x.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y1[i], y2[i], 1e-15) << n << ":" << i;
  }
}

TEST_F(SimdEquivalence, ReluAndBackwardAreBitwiseEqual) {
  for (std::size_t n : kLengths) {
    const auto x = random_vector(n, 5 + n);
    const auto dy = random_vector(n, 6 + n);
    std::vector<double> y1(n), y2(n), d1(n), d2(n);
    scalar.relu(x.data(), y1.data(), n);
    avx2().relu(x.data(), y2.data(), n);
    scalar.relu_backward(x.data(), dy.data(), d1.data(), n);
    avx2().relu_backward(x.data(), dy.data(), d2.data(), n);
    EXPECT_EQ(y1, y2) << n;
    EXPECT_EQ(d1, d2) << n;
  }
}

TEST_F(SimdEquivalence, ScaleShift) {
  for (std::size_t n : kLengths) {
    const auto x = random_vector(n, 7 + n);
    std::vector<double> y1(n), y2(n);
    scalar.scale_shift(1.5, -0.25, x.data(), y1.data(), n);
    avx2().scale_shift(1.5, -0.25, x.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y1[i], y2[i], 1e-15);
  }
}

TEST_F(SimdEquivalence, LayersAgreeAcrossBackends) {
  BackendGuard guard;
  for (const auto& [op, shape] : testing::kind_fixtures()) {
    Rng init_a(11), init_b(11);
    ModuleInstance a(op, shape, init_a);
    ModuleInstance b(op, shape, init_b);
    Rng data(12);
    Tensor x = Tensor::feature_map(2, shape);
    for (auto& v : x.data()) v = data.uniform(-1.0, 1.0);

    simd::set_active_backend(simd::Backend::kScalar);
    const Tensor ya = a.forward(x);
    const Tensor ga = a.backward(ya);
    simd::set_active_backend(simd::Backend::kAvx2);
    const Tensor yb = b.forward(x);
    const Tensor gb = b.backward(yb);

    for (std::size_t i = 0; i < ya.size(); ++i) EXPECT_NEAR(ya[i], yb[i], 1e-12) << canonical_key(op, shape);
    for (std::size_t i = 0; i < ga.size(); ++i) EXPECT_NEAR(ga[i], gb[i], 1e-12) << canonical_key(op, shape);
  }
}

TEST(SimdDispatch, ScalarAlwaysAvailable) {
  EXPECT_TRUE(simd::available(simd::Backend::kScalar));
  EXPECT_EQ(simd::to_string(simd::Backend::kScalar), "scalar");
}

TEST(SimdDispatch, SwitchingBackendChangesKernels) {
  BackendGuard guard;
  simd::set_active_backend(simd::Backend::kScalar);
  EXPECT_EQ(simd::active_backend(), simd::Backend::kScalar);
  EXPECT_EQ(&simd::kernels(), &simd::table(simd::Backend::kScalar));
}

}  // namespace
}  // namespace hwnas
