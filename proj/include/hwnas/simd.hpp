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

#include <cstddef>
#include <string_view>

namespace hwnas::simd {

enum class Backend { kScalar, kAvx2 };

std::string_view to_string(Backend backend);

/// Inner-loop kernels used by the convolution, linear and activation layers.
/// Every backend computes the same function; vector backends may reorder
/// floating-point sums, so results agree to rounding rather than bitwise.
struct KernelTable {
  /// sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  /// y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  /// y[i] = max(x[i], 0)
  void (*relu)(const double* x, double* y, std::size_t n);
  /// dx[i] = x[i] > 0 ? dy[i] : 0
  void (*relu_backward)(const double* x, const double* dy, double* dx, std::size_t n);
  /// y[i] = a * x[i] + b
  void (*scale_shift)(double a, double b, const double* x, double* y, std::size_t n);
};

bool available(Backend backend);
const KernelTable& table(Backend backend);

/// Backend picked at startup: the widest available, unless the
/// HWNAS_SIMD environment variable names another ("scalar", "avx2").
Backend active_backend();
void set_active_backend(Backend backend);

/// Kernels of the active backend.
const KernelTable& kernels();

namespace detail {
const KernelTable& scalar_table();
#if defined(HWNAS_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
}  // namespace detail

}  // namespace hwnas::simd
