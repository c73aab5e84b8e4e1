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

#include <cmath>
#include <limits>

#include "kernels/kernels_internal.hpp"

namespace prw::kernels::detail {

void vexp_scalar(const double* PRW_RESTRICT x, std::size_t len,
                 double* PRW_RESTRICT out) noexcept {
  for (std::size_t i = 0; i < len; ++i) out[i] = std::exp(x[i]);
}

double exp_affine_scalar(const double* PRW_RESTRICT g, std::size_t n,
                         std::size_t m, const double* PRW_RESTRICT a,
                         const double* PRW_RESTRICT b, double offset,
                         double* PRW_RESTRICT out) noexcept {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* gi = g + i * m;
    double* oi = out + i * m;
    const double ai = a[i] + offset;
    for (std::size_t j = 0; j < m; ++j) {
      oi[j] = std::exp(gi[j] + ai + b[j]);
      total += oi[j];
    }
  }
  return total;
}

double max_affine_scalar(const double* PRW_RESTRICT g, std::size_t n,
                         std::size_t m, const double* PRW_RESTRICT a,
                         const double* PRW_RESTRICT b) noexcept {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double* gi = g + i * m;
    for (std::size_t j = 0; j < m; ++j) {
      const double x = gi[j] + a[i] + b[j];
      if (x > best) best = x;
    }
  }
  return best;
}

double exp_sweep_scalar(const double* PRW_RESTRICT k, std::size_t n,
                        std::size_t m, const double* PRW_RESTRICT r,
                        const double* PRW_RESTRICT u,
                        const double* PRW_RESTRICT v,
                        double* PRW_RESTRICT u_next,
                        double* PRW_RESTRICT w) noexcept {
  for (std::size_t j = 0; j < m; ++j) w[j] = 0.0;
  double resid = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* ki = k + i * m;
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += ki[j] * v[j];
    resid += std::abs(u[i] * s - r[i]);
    const double ui = r[i] / s;
    u_next[i] = ui;
    for (std::size_t j = 0; j < m; ++j) w[j] += ui * ki[j];
  }
  return resid;
}

double log_sweep_scalar(const double* PRW_RESTRICT g, std::size_t n,
                        std::size_t m, double eta,
                        const double* PRW_RESTRICT r,
                        const double* PRW_RESTRICT log_r,
                        const double* PRW_RESTRICT alpha,
                        const double* PRW_RESTRICT beta,
                        double* PRW_RESTRICT alpha_next,
                        double* PRW_RESTRICT col,
                        double* PRW_RESTRICT scratch) noexcept {
  const double inv_eta = 1.0 / eta;
  double* nb = scratch;
  double* e = scratch + m;
  for (std::size_t j = 0; j < m; ++j) {
    nb[j] = -beta[j] * inv_eta;
    col[j] = 0.0;
  }
  double resid = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* gi = g + i * m;
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
      const double x = gi[j] + nb[j];
      if (x > mx) mx = x;
    }
    double se = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      e[j] = std::exp(gi[j] + nb[j] - mx);
      se += e[j];
    }
    const double s = mx + std::log(se);
    resid += std::abs(std::exp(s - alpha[i] * inv_eta) - r[i]);
    alpha_next[i] = eta * (s - log_r[i]);
    const double scale = r[i] / se;
    for (std::size_t j = 0; j < m; ++j) col[j] += scale * e[j];
  }
  return resid;
}

}  // namespace prw::kernels::detail
