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

#ifndef PRW_KERNELS_HPP_
#define PRW_KERNELS_HPP_

#include <cstddef>

// Dense row-major kernels behind the Sinkhorn sweeps. Every routine has a
// scalar reference and, on x86-64, an AVX2+FMA variant selected at runtime.
namespace prw::kernels {

enum class Backend { kScalar, kAvx2 };

// Backend used by the dispatching entry points below. Defaults to the best
// supported one; PRW_KERNELS=scalar in the environment forces the reference.
Backend active_backend();
// Returns false when the requested backend is not supported on this CPU.
bool set_backend(Backend b);
bool backend_supported(Backend b);
const char* backend_name(Backend b);

struct Table {
  // out[i] = exp(x[i]).
  void (*vexp)(const double* x, std::size_t len, double* out);
  // out[i,j] = exp(g[i,j] + a[i] + b[j] + offset); returns the sum of out.
  double (*exp_affine)(const double* g, std::size_t n, std::size_t m,
                       const double* a, const double* b, double offset,
                       double* out);
  // Max over i,j of g[i,j] + a[i] + b[j].
  double (*max_affine)(const double* g, std::size_t n, std::size_t m,
                       const double* a, const double* b);
  // Exp-domain sweep for the iterate (u, v) of kernel k. Writes
  // u_next = r / (k v) and w = k^T u_next, returns sum_i |u_i (k v)_i - r_i|.
  double (*exp_sweep)(const double* k, std::size_t n, std::size_t m,
                      const double* r, const double* u, const double* v,
                      double* u_next, double* w);
  // Log-domain sweep for duals (alpha, beta) of log-kernel g. With
  // s_i = log sum_j exp(g[i,j] - beta_j/eta) it writes
  // alpha_next_i = eta (s_i - log r_i) and the column sums of the half
  // iterate col[j] = sum_i r_i exp(g[i,j] - beta_j/eta - s_i), and returns
  // sum_i |exp(s_i - alpha_i/eta) - r_i|.
  double (*log_sweep)(const double* g, std::size_t n, std::size_t m,
                      double eta, const double* r, const double* log_r,
                      const double* alpha, const double* beta,
                      double* alpha_next, double* col, double* scratch);
  // scratch must hold 2 m doubles.
};

const Table& table(Backend b);
const Table& active();

}  // namespace prw::kernels

#endif  // PRW_KERNELS_HPP_
