// Copyright 2026 The PRW Authors.
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
#include <cstring>

#include "kernels/kernels_internal.hpp"
#include "prw/kernels.hpp"

namespace prw::kernels {
namespace {

constexpr Table kScalarTable = {
    detail::vexp_scalar,      detail::exp_affine_scalar,
    detail::max_affine_scalar, detail::exp_sweep_scalar,
    detail::log_sweep_scalar,
};

#if defined(PRW_HAVE_AVX2)
constexpr Table kAvx2Table = {
    detail::vexp_avx2,      detail::exp_affine_avx2, detail::max_affine_avx2,
    detail::exp_sweep_avx2, detail::log_sweep_avx2,
};
#endif

Backend detect() {
  const char* env = std::getenv("PRW_KERNELS");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) {
    return Backend::kScalar;
  }
  if (backend_supported(Backend::kAvx2)) return Backend::kAvx2;
  return Backend::kScalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> b{detect()};
  return b;
}

}  // namespace

bool backend_supported(Backend b) {
  if (b == Backend::kScalar) return true;
#if defined(PRW_HAVE_AVX2)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend active_backend() { return current().load(); }

bool set_backend(Backend b) {
  if (!backend_supported(b)) return false;
  current().store(b);
  return true;
}

const char* backend_name(Backend b) {
  return b == Backend::kAvx2 ? "avx2" : "scalar";
}

const Table& table(Backend b) {
#if defined(PRW_HAVE_AVX2)
  if (b == Backend::kAvx2) return kAvx2Table;
#endif
  (void)b;
  return kScalarTable;
}

const Table& active() { return table(active_backend()); }

}  // namespace prw::kernels
