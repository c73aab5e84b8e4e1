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

// Compiled with -mavx2 -mfma. Only intrinsics and C math calls here: any
// inline template instantiated in this file could be merged by the linker
// into callers built for the baseline ISA.

#include <immintrin.h>

#include <cmath>
#include <cstdint>

#include "kernels/kernels_internal.hpp"

namespace prw::kernels::detail {
namespace {

constexpr double kExpHi = 709.782712893384;
constexpr double kExpLo = -745.1332191019412;

// exp via Cody-Waite reduction by ln 2 and a degree-13 Taylor polynomial on
// [-ln2/2, ln2/2] (truncation below 1e-17), scaling split in two factors so
// subnormal results round once.
inline __m256d exp4(__m256d x) {
  const __m256d hi = _mm256_set1_pd(kExpHi);
  const __m256d lo = _mm256_set1_pd(kExpLo);
  __m256d xc = _mm256_min_pd(_mm256_max_pd(x, lo), hi);
  const __m256d fx = _mm256_round_pd(
      _mm256_mul_pd(xc, _mm256_set1_pd(1.4426950408889634073599)),
      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  xc = _mm256_fnmadd_pd(fx, _mm256_set1_pd(6.93145751953125e-1), xc);
  xc = _mm256_fnmadd_pd(fx, _mm256_set1_pd(1.42860682030941723212e-6), xc);
  __m256d y = _mm256_set1_pd(1.0 / 6227020800.0);
  y = _mm256_fmadd_pd(y, xc, _mm256_set1_pd(1.0 / 479001600.0));
  y = _mm256_fmadd_pd(y, xc, _mm256_set1_pd(1.0 / 39916800.0));
  y = _mm256_fmadd_pd(y, xc, _mm256_set1_pd(1.0 / 3628800.0));
  y = _mm256_fmadd_pd(y, xc, _mm256_set1_pd(1.0 / 362880.0));
  y = _mm256_fmadd_pd(y, xc, _mm256_set1_pd(1.0 / 40320.0));
  y = _mm256_fmadd_pd(y, xc, _mm256_set1_pd(1.0 / 5040.0));
  y = _mm256_fmadd_pd(y, xc, _mm256_set1_pd(1.0 / 720.0));
  y = _mm256_fmadd_pd(y, xc, _mm256_set1_pd(1.0 / 120.0));
  y = _mm256_fmadd_pd(y, xc, _mm256_set1_pd(1.0 / 24.0));
  y = _mm256_fmadd_pd(y, xc, _mm256_set1_pd(1.0 / 6.0));
  y = _mm256_fmadd_pd(y, xc, _mm256_set1_pd(0.5));
  y = _mm256_fmadd_pd(y, xc, _mm256_set1_pd(1.0));
  y = _mm256_fmadd_pd(y, xc, _mm256_set1_pd(1.0));

  const __m128i n = _mm256_cvtpd_epi32(fx);
  const __m128i n1 = _mm_srai_epi32(n, 1);
  const __m128i n2 = _mm_sub_epi32(n, n1);
  const __m256i bias = _mm256_set1_epi64x(1023);
  const __m256d p1 = _mm256_castsi256_pd(
      _mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(n1), bias), 52));
  const __m256d p2 = _mm256_castsi256_pd(
      _mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(n2), bias), 52));
  y = _mm256_mul_pd(_mm256_mul_pd(y, p1), p2);

  y = _mm256_blendv_pd(y, _mm256_setzero_pd(), _mm256_cmp_pd(x, lo, _CMP_LT_OQ));
  y = _mm256_blendv_pd(y, _mm256_set1_pd(HUGE_VAL),
                       _mm256_cmp_pd(x, hi, _CMP_GT_OQ));
  y = _mm256_blendv_pd(y, x, _mm256_cmp_pd(x, x, _CMP_UNORD_Q));
  return y;
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(s, _mm_unpackhi_pd(s, s)));
}

inline __m256i tail_mask(std::size_t rem) {
  return _mm256_set_epi64x(rem > 3 ? -1 : 0, rem > 2 ? -1 : 0,
                           rem > 1 ? -1 : 0, rem > 0 ? -1 : 0);
}

inline double abs1(double x) { return x < 0 ? -x : x; }

}  // namespace

void vexp_avx2(const double* PRW_RESTRICT x, std::size_t len,
               double* PRW_RESTRICT out) noexcept {
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    _mm256_storeu_pd(out + i, exp4(_mm256_loadu_pd(x + i)));
  }
  if (i < len) {
    const __m256i mask = tail_mask(len - i);
    _mm256_maskstore_pd(out + i, mask, exp4(_mm256_maskload_pd(x + i, mask)));
  }
}

double exp_affine_avx2(const double* PRW_RESTRICT g, std::size_t n,
                       std::size_t m, const double* PRW_RESTRICT a,
                       const double* PRW_RESTRICT b, double offset,
                       double* PRW_RESTRICT out) noexcept {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t mv = m & ~std::size_t{3};
  const __m256i mask = tail_mask(m - mv);
  const __m256d maskd = _mm256_castsi256_pd(mask);
  for (std::size_t i = 0; i < n; ++i) {
    const double* gi = g + i * m;
    double* oi = out + i * m;
    const __m256d ai = _mm256_set1_pd(a[i] + offset);
    std::size_t j = 0;
    for (; j < mv; j += 4) {
      const __m256d x = _mm256_add_pd(
          _mm256_add_pd(_mm256_loadu_pd(gi + j), ai), _mm256_loadu_pd(b + j));
      const __m256d e = exp4(x);
      _mm256_storeu_pd(oi + j, e);
      acc = _mm256_add_pd(acc, e);
    }
    if (j < m) {
      const __m256d x =
          _mm256_add_pd(_mm256_add_pd(_mm256_maskload_pd(gi + j, mask), ai),
                        _mm256_maskload_pd(b + j, mask));
      const __m256d e = _mm256_and_pd(exp4(x), maskd);
      _mm256_maskstore_pd(oi + j, mask, e);
      acc = _mm256_add_pd(acc, e);
    }
  }
  return hsum(acc);
}

double max_affine_avx2(const double* PRW_RESTRICT g, std::size_t n,
                       std::size_t m, const double* PRW_RESTRICT a,
                       const double* PRW_RESTRICT b) noexcept {
  const __m256d ninf = _mm256_set1_pd(-HUGE_VAL);
  __m256d best = ninf;
  const std::size_t mv = m & ~std::size_t{3};
  const __m256i mask = tail_mask(m - mv);
  const __m256d maskd = _mm256_castsi256_pd(mask);
  for (std::size_t i = 0; i < n; ++i) {
    const double* gi = g + i * m;
    const __m256d ai = _mm256_set1_pd(a[i]);
    std::size_t j = 0;
    for (; j < mv; j += 4) {
      const __m256d x = _mm256_add_pd(
          _mm256_add_pd(_mm256_loadu_pd(gi + j), ai), _mm256_loadu_pd(b + j));
      best = _mm256_max_pd(x, best);
    }
    if (j < m) {
      const __m256d x =
          _mm256_add_pd(_mm256_add_pd(_mm256_maskload_pd(gi + j, mask), ai),
                        _mm256_maskload_pd(b + j, mask));
      best = _mm256_max_pd(_mm256_blendv_pd(ninf, x, maskd), best);
    }
  }
  return hmax(best);
}

double exp_sweep_avx2(const double* PRW_RESTRICT k, std::size_t n,
                      std::size_t m, const double* PRW_RESTRICT r,
                      const double* PRW_RESTRICT u,
                      const double* PRW_RESTRICT v,
                      double* PRW_RESTRICT u_next,
                      double* PRW_RESTRICT w) noexcept {
  const std::size_t mv = m & ~std::size_t{3};
  const std::size_t m8 = m & ~std::size_t{7};
  const __m256i mask = tail_mask(m - mv);
  for (std::size_t j = 0; j < mv; j += 4) {
    _mm256_storeu_pd(w + j, _mm256_setzero_pd());
  }
  if (mv < m) _mm256_maskstore_pd(w + mv, mask, _mm256_setzero_pd());
  double resid = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const double* k0 = k + i * m;
    const double* k1 = k0 + m;
    const double* k2 = k1 + m;
    const double* k3 = k2 + m;
    __m256d a0 = _mm256_setzero_pd(), a1 = a0, b0 = a0, b1 = a0;
    __m256d c0 = a0, c1 = a0, d0 = a0, d1 = a0;
    std::size_t j = 0;
    for (; j < m8; j += 8) {
      const __m256d v0 = _mm256_loadu_pd(v + j);
      const __m256d v1 = _mm256_loadu_pd(v + j + 4);
      a0 = _mm256_fmadd_pd(_mm256_loadu_pd(k0 + j), v0, a0);
      a1 = _mm256_fmadd_pd(_mm256_loadu_pd(k0 + j + 4), v1, a1);
      b0 = _mm256_fmadd_pd(_mm256_loadu_pd(k1 + j), v0, b0);
      b1 = _mm256_fmadd_pd(_mm256_loadu_pd(k1 + j + 4), v1, b1);
      c0 = _mm256_fmadd_pd(_mm256_loadu_pd(k2 + j), v0, c0);
      c1 = _mm256_fmadd_pd(_mm256_loadu_pd(k2 + j + 4), v1, c1);
      d0 = _mm256_fmadd_pd(_mm256_loadu_pd(k3 + j), v0, d0);
      d1 = _mm256_fmadd_pd(_mm256_loadu_pd(k3 + j + 4), v1, d1);
    }
    for (; j < mv; j += 4) {
      const __m256d v0 = _mm256_loadu_pd(v + j);
      a0 = _mm256_fmadd_pd(_mm256_loadu_pd(k0 + j), v0, a0);
      b0 = _mm256_fmadd_pd(_mm256_loadu_pd(k1 + j), v0, b0);
      c0 = _mm256_fmadd_pd(_mm256_loadu_pd(k2 + j), v0, c0);
      d0 = _mm256_fmadd_pd(_mm256_loadu_pd(k3 + j), v0, d0);
    }
    if (j < m) {
      const __m256d v1 = _mm256_maskload_pd(v + j, mask);
      a1 = _mm256_fmadd_pd(_mm256_maskload_pd(k0 + j, mask), v1, a1);
      b1 = _mm256_fmadd_pd(_mm256_maskload_pd(k1 + j, mask), v1, b1);
      c1 = _mm256_fmadd_pd(_mm256_maskload_pd(k2 + j, mask), v1, c1);
      d1 = _mm256_fmadd_pd(_mm256_maskload_pd(k3 + j, mask), v1, d1);
    }
    const double s[4] = {hsum(_mm256_add_pd(a0, a1)),
                         hsum(_mm256_add_pd(b0, b1)),
                         hsum(_mm256_add_pd(c0, c1)),
                         hsum(_mm256_add_pd(d0, d1))};
    for (std::size_t q = 0; q < 4; ++q) {
      resid += abs1(u[i + q] * s[q] - r[i + q]);
      u_next[i + q] = r[i + q] / s[q];
    }
    const __m256d u0 = _mm256_set1_pd(u_next[i]);
    const __m256d u1 = _mm256_set1_pd(u_next[i + 1]);
    const __m256d u2 = _mm256_set1_pd(u_next[i + 2]);
    const __m256d u3 = _mm256_set1_pd(u_next[i + 3]);
    for (j = 0; j < mv; j += 4) {
      __m256d acc = _mm256_loadu_pd(w + j);
      acc = _mm256_fmadd_pd(u0, _mm256_loadu_pd(k0 + j), acc);
      acc = _mm256_fmadd_pd(u1, _mm256_loadu_pd(k1 + j), acc);
      acc = _mm256_fmadd_pd(u2, _mm256_loadu_pd(k2 + j), acc);
      acc = _mm256_fmadd_pd(u3, _mm256_loadu_pd(k3 + j), acc);
      _mm256_storeu_pd(w + j, acc);
    }
    if (j < m) {
      __m256d acc = _mm256_maskload_pd(w + j, mask);
      acc = _mm256_fmadd_pd(u0, _mm256_maskload_pd(k0 + j, mask), acc);
      acc = _mm256_fmadd_pd(u1, _mm256_maskload_pd(k1 + j, mask), acc);
      acc = _mm256_fmadd_pd(u2, _mm256_maskload_pd(k2 + j, mask), acc);
      acc = _mm256_fmadd_pd(u3, _mm256_maskload_pd(k3 + j, mask), acc);
      _mm256_maskstore_pd(w + j, mask, acc);
    }
  }
  for (; i < n; ++i) {
    const double* ki = k + i * m;
    __m256d s0 = _mm256_setzero_pd();
    __m256d s1 = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j < m8; j += 8) {
      s0 = _mm256_fmadd_pd(_mm256_loadu_pd(ki + j), _mm256_loadu_pd(v + j), s0);
      s1 = _mm256_fmadd_pd(_mm256_loadu_pd(ki + j + 4),
                           _mm256_loadu_pd(v + j + 4), s1);
    }
    for (; j < mv; j += 4) {
      s0 = _mm256_fmadd_pd(_mm256_loadu_pd(ki + j), _mm256_loadu_pd(v + j), s0);
    }
    if (j < m) {
      s1 = _mm256_fmadd_pd(_mm256_maskload_pd(ki + j, mask),
                           _mm256_maskload_pd(v + j, mask), s1);
    }
    const double s = hsum(_mm256_add_pd(s0, s1));
    resid += abs1(u[i] * s - r[i]);
    const double ui = r[i] / s;
    u_next[i] = ui;
    const __m256d uv = _mm256_set1_pd(ui);
    for (j = 0; j < mv; j += 4) {
      _mm256_storeu_pd(w + j, _mm256_fmadd_pd(uv, _mm256_loadu_pd(ki + j),
                                              _mm256_loadu_pd(w + j)));
    }
    if (j < m) {
      _mm256_maskstore_pd(
          w + j, mask,
          _mm256_fmadd_pd(uv, _mm256_maskload_pd(ki + j, mask),
                          _mm256_maskload_pd(w + j, mask)));
    }
  }
  return resid;
}

double log_sweep_avx2(const double* PRW_RESTRICT g, std::size_t n,
                      std::size_t m, double eta, const double* PRW_RESTRICT r,
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
  const std::size_t mv = m & ~std::size_t{3};
  const __m256i mask = tail_mask(m - mv);
  const __m256d maskd = _mm256_castsi256_pd(mask);
  const __m256d ninf = _mm256_set1_pd(-HUGE_VAL);
  double resid = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* gi = g + i * m;
    __m256d mx4 = ninf;
    std::size_t j = 0;
    for (; j < mv; j += 4) {
      mx4 = _mm256_max_pd(
          _mm256_add_pd(_mm256_loadu_pd(gi + j), _mm256_loadu_pd(nb + j)), mx4);
    }
    if (j < m) {
      const __m256d x = _mm256_add_pd(_mm256_maskload_pd(gi + j, mask),
                                      _mm256_maskload_pd(nb + j, mask));
      mx4 = _mm256_max_pd(_mm256_blendv_pd(ninf, x, maskd), mx4);
    }
    const double mx = hmax(mx4);
    const __m256d shift = _mm256_set1_pd(-mx);
    __m256d acc = _mm256_setzero_pd();
    for (j = 0; j < mv; j += 4) {
      const __m256d x = _mm256_add_pd(
          _mm256_add_pd(_mm256_loadu_pd(gi + j), _mm256_loadu_pd(nb + j)),
          shift);
      const __m256d ex = exp4(x);
      _mm256_storeu_pd(e + j, ex);
      acc = _mm256_add_pd(acc, ex);
    }
    if (j < m) {
      const __m256d x = _mm256_add_pd(
          _mm256_add_pd(_mm256_maskload_pd(gi + j, mask),
                        _mm256_maskload_pd(nb + j, mask)),
          shift);
      const __m256d ex = _mm256_and_pd(exp4(x), maskd);
      _mm256_maskstore_pd(e + j, mask, ex);
      acc = _mm256_add_pd(acc, ex);
    }
    const double se = hsum(acc);
    const double s = mx + std::log(se);
    resid += abs1(std::exp(s - alpha[i] * inv_eta) - r[i]);
    alpha_next[i] = eta * (s - log_r[i]);
    const __m256d scale = _mm256_set1_pd(r[i] / se);
    for (j = 0; j < mv; j += 4) {
      _mm256_storeu_pd(col + j, _mm256_fmadd_pd(scale, _mm256_loadu_pd(e + j),
                                                _mm256_loadu_pd(col + j)));
    }
    if (j < m) {
      _mm256_maskstore_pd(
          col + j, mask,
          _mm256_fmadd_pd(scale, _mm256_maskload_pd(e + j, mask),
                          _mm256_maskload_pd(col + j, mask)));
    }
  }
  return resid;
}

}  // namespace prw::kernels::detail
