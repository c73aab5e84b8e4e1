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

#ifndef PRW_SRC_KERNELS_KERNELS_INTERNAL_HPP_
#define PRW_SRC_KERNELS_KERNELS_INTERNAL_HPP_

#include <cstddef>

#if defined(__GNUC__) || defined(__clang__)
#define PRW_RESTRICT __restrict__
#else
#define PRW_RESTRICT
#endif

namespace prw::kernels::detail {

void vexp_scalar(const double* x, std::size_t len, double* out) noexcept;
double exp_affine_scalar(const double* g, std::size_t n, std::size_t m,
                         const double* a, const double* b, double offset,
                         double* out) noexcept;
double max_affine_scalar(const double* g, std::size_t n, std::size_t m,
                         const double* a, const double* b) noexcept;
double exp_sweep_scalar(const double* k, std::size_t n, std::size_t m,
                        const double* r, const double* u, const double* v,
                        double* u_next, double* w) noexcept;
double log_sweep_scalar(const double* g, std::size_t n, std::size_t m,
                        double eta, const double* r, const double* log_r,
                        const double* alpha, const double* beta,
                        double* alpha_next, double* col,
                        double* scratch) noexcept;

#if defined(PRW_HAVE_AVX2)
void vexp_avx2(const double* x, std::size_t len, double* out) noexcept;
double exp_affine_avx2(const double* g, std::size_t n, std::size_t m,
                       const double* a, const double* b, double offset,
                       double* out) noexcept;
double max_affine_avx2(const double* g, std::size_t n, std::size_t m,
                       const double* a, const double* b) noexcept;
double exp_sweep_avx2(const double* k, std::size_t n, std::size_t m,
                      const double* r, const double* u, const double* v,
                      double* u_next, double* w) noexcept;
double log_sweep_avx2(const double* g, std::size_t n, std::size_t m,
                      double eta, const double* r, const double* log_r,
                      const double* alpha, const double* beta,
                      double* alpha_next, double* col,
                      double* scratch) noexcept;
#endif

}  // namespace prw::kernels::detail

#endif  // PRW_SRC_KERNELS_KERNELS_INTERNAL_HPP_
