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

#include <atomic>
#include <cstdlib>
#include <string>

#include "hwnas/error.hpp"
#include "hwnas/simd.hpp"

namespace hwnas::simd {

namespace {

bool cpu_has_avx2() {
#if defined(HWNAS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend initial_backend() {
  if (const char* env = std::getenv("HWNAS_SIMD")) {
    const std::string name(env);
    if (name == "scalar") return Backend::kScalar;
    if (name == "avx2" && cpu_has_avx2()) return Backend::kAvx2;
  }
  return cpu_has_avx2() ? Backend::kAvx2 : Backend::kScalar;
}

std::atomic<const KernelTable*>& active_table() {
  static std::atomic<const KernelTable*> current{&table(initial_backend())};
  return current;
}

std::atomic<Backend>& active_kind() {
  static std::atomic<Backend> kind{initial_backend()};
  return kind;
}

}  // namespace

std::string_view to_string(Backend backend) {
  return backend == Backend::kAvx2 ? "avx2" : "scalar";
}

bool available(Backend backend) {
  return backend == Backend::kScalar || (backend == Backend::kAvx2 && cpu_has_avx2());
}

const KernelTable& table(Backend backend) {
#if defined(HWNAS_HAVE_AVX2)
  if (backend == Backend::kAvx2) {
    if (!cpu_has_avx2()) throw Error(ErrorCode::kInvalidArgument, "AVX2 not supported on this CPU");
    return detail::avx2_table();
  }
#else
  if (backend == Backend::kAvx2) throw Error(ErrorCode::kInvalidArgument, "built without AVX2 kernels");
#endif
  return detail::scalar_table();
}

Backend active_backend() { return active_kind().load(); }

void set_active_backend(Backend backend) {
  active_table().store(&table(backend));
  active_kind().store(backend);
}

const KernelTable& kernels() { return *active_table().load(std::memory_order_relaxed); }

}  // namespace hwnas::simd
