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

#include "prw/sinkhorn.hpp"

#include <cmath>
#include <limits>

#include "prw/kernels.hpp"

namespace prw {
namespace {

struct Duals {
  Vector alpha, beta;
  std::int64_t iterations = 0;
  bool hit_max_iters = false;
  bool failed = false;
  // Normalized plan and log ||zeta||_1 when the exp form produced them.
  RowMatrix plan;
  double log_mass = 0.0;
};

double true_row_gap(const LogKernel& lk, const Vector& r, const Vector& alpha,
                    const Vector& beta) {
  const RowMatrix p = plan_from_duals(lk, alpha, beta);
  return (p.rowwise().sum() - r).lpNorm<1>();
}

bool stop_now(std::int64_t it, double resid, double theta) {
  return it > 0 && (resid <= theta || theta >= 2.0);
}

// Column log-sum-exp of g - alpha/eta, for columns whose half-iterate mass
// underflowed in the fused sweep.
double column_lse(const RowMatrix& g, Eigen::Index j, const Vector& alpha,
                  double eta) {
  double mx = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    mx = std::max(mx, g(i, j) - alpha(i) / eta);
  }
  double s = 0.0;
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    s += std::exp(g(i, j) - alpha(i) / eta - mx);
  }
  return mx + std::log(s);
}

Duals run_log(const PrwInstance& inst, const LogKernel& lk,
              const Vector& alpha0, const Vector& beta0,
              const SinkhornOptions& opts) {
  const auto n = static_cast<std::size_t>(inst.n());
  const auto m = static_cast<std::size_t>(inst.m());
  const double eta = lk.eta;
  const Vector& r = inst.r();
  const Vector& c = inst.c();
  const Vector log_r = r.array().log();
  const Vector log_c = c.array().log();
  const auto& kt = kernels::active();

  Duals out;
  out.alpha = alpha0;
  out.beta = beta0;
  Vector alpha_next(inst.n());
  Vector col(inst.m());
  Vector scratch(2 * inst.m());
  std::int64_t it = 0;
  while (true) {
    if (it > 0 && opts.theta >= 2.0 && !opts.observer) break;
    const double resid =
        kt.log_sweep(lk.g.data(), n, m, eta, r.data(), log_r.data(),
                     out.alpha.data(), out.beta.data(), alpha_next.data(),
                     col.data(), scratch.data());
    if (opts.observer) {
      opts.observer(it, out.alpha, out.beta,
                    it == 0 ? true_row_gap(lk, r, out.alpha, out.beta) : resid);
    }
    if (stop_now(it, resid, opts.theta)) break;
    if (it >= opts.max_iters) {
      out.hit_max_iters = true;
      break;
    }
    for (Eigen::Index j = 0; j < inst.m(); ++j) {
      if (col(j) >= 1e-300 && std::isfinite(col(j))) {
        out.beta(j) += eta * (std::log(col(j)) - log_c(j));
      } else {
        out.beta(j) = eta * (column_lse(lk.g, j, alpha_next, eta) - log_c(j));
      }
    }
    out.alpha = alpha_next;
    if (!out.alpha.allFinite() || !out.beta.allFinite()) {
      throw SolverError("log-domain Sinkhorn produced non-finite duals");
    }
    ++it;
  }
  out.iterations = it;
  return out;
}

bool positive_finite(const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(v(i) > 0.0) || !std::isfinite(v(i))) return false;
  }
  return true;
}

bool in_range(const Vector& v) {
  return v.minCoeff() >= 1e-200 && v.maxCoeff() <= 1e200;
}

// Scaling form u = r / (K v), v = c / (K^T u) with the warm start absorbed
// into K. Sets failed when a scaling becomes zero or non-finite.
Duals run_exp(const PrwInstance& inst, const LogKernel& lk,
                             const Vector& alpha0, const Vector& beta0,
                             const SinkhornOptions& opts) {
  const auto n = static_cast<std::size_t>(inst.n());
  const auto m = static_cast<std::size_t>(inst.m());
  const double eta = lk.eta;
  const Vector& r = inst.r();
  const Vector& c = inst.c();
  const auto& kt = kernels::active();

  Vector base_a = alpha0;
  Vector base_b = beta0;
  RowMatrix k(inst.n(), inst.m());
  auto absorb = [&]() {
    const Vector a = -base_a / eta;
    const Vector b = -base_b / eta;
    const double mx = kt.max_affine(lk.g.data(), n, m, a.data(), b.data());
    kt.exp_affine(lk.g.data(), n, m, a.data(), b.data(), -mx, k.data());
    base_a.array() += eta * mx;
  };
  absorb();
  Vector u = Vector::Ones(inst.n());
  Vector v = Vector::Ones(inst.m());
  Vector u_next(inst.n());
  Vector w(inst.m());
  auto duals_alpha = [&]() -> Vector {
    return base_a - eta * u.array().log().matrix();
  };
  auto duals_beta = [&]() -> Vector {
    return base_b - eta * v.array().log().matrix();
  };

  Duals out;
  out.failed = true;
  std::int64_t it = 0;
  while (true) {
    if (it > 0 && opts.theta >= 2.0 && !opts.observer) {
      out.failed = false;
      break;
    }
    const double resid = kt.exp_sweep(k.data(), n, m, r.data(), u.data(),
                                      v.data(), u_next.data(), w.data());
    if (opts.observer) {
      const Vector a = it == 0 ? alpha0 : duals_alpha();
      const Vector b = it == 0 ? beta0 : duals_beta();
      opts.observer(it, a, b, it == 0 ? true_row_gap(lk, r, a, b) : resid);
    }
    if (stop_now(it, resid, opts.theta) && std::isfinite(resid)) {
      out.failed = false;
      break;
    }
    if (it >= opts.max_iters) {
      out.hit_max_iters = true;
      out.failed = false;
      break;
    }
    if (!positive_finite(u_next) || !positive_finite(w)) break;
    u = u_next;
    v = c.cwiseQuotient(w);
    if (!positive_finite(v)) break;
    ++it;
    if (!in_range(u) || !in_range(v)) {
      base_a = duals_alpha();
      base_b = duals_beta();
      absorb();
      u.setOnes();
      v.setOnes();
    }
  }
  out.alpha = duals_alpha();
  out.beta = duals_beta();
  if (it == 0) {
    out.alpha = alpha0;
    out.beta = beta0;
  }
  out.iterations = it;
  if (!out.alpha.allFinite() || !out.beta.allFinite()) out.failed = true;
  if (!out.failed && it > 0) {
    out.plan = u.asDiagonal() * k * v.asDiagonal();
    const double total = out.plan.sum();
    out.plan /= total;
    out.log_mass = std::log(total);
    if (!std::isfinite(out.log_mass)) out.plan.resize(0, 0);
  }
  return out;
}

}  // namespace

const char* mode_name(SinkhornMode m) {
  return m == SinkhornMode::kExp ? "exp" : "log";
}

SinkhornResult sinkhorn(const PrwInstance& inst, const LogKernel& lk,
                        const StiefelPoint& u, const Vector& alpha0,
                        const Vector& beta0, const SinkhornOptions& opts) {
  if (alpha0.size() != inst.n() || beta0.size() != inst.m()) {
    throw InvalidInput("sinkhorn: dual lengths do not match the instance");
  }
  if (lk.g.rows() != inst.n() || lk.g.cols() != inst.m()) {
    throw InvalidInput("sinkhorn: kernel shape does not match the instance");
  }
  if (!(opts.theta > 0.0)) throw InvalidInput("sinkhorn: theta must be > 0");
  if (!alpha0.allFinite() || !beta0.allFinite()) {
    throw InvalidInput("sinkhorn: non-finite warm start");
  }

  SinkhornResult res;
  Duals d;
  d.failed = true;
  if (opts.mode == SinkhornMode::kExp) {
    d = run_exp(inst, lk, alpha0, beta0, opts);
    res.exp_iterations = d.iterations;
    res.mode_used = SinkhornMode::kExp;
    res.fell_back = d.failed;
  }
  if (d.failed) {
    d = run_log(inst, lk, alpha0, beta0, opts);
    res.mode_used = SinkhornMode::kLog;
    res.log_iterations = d.iterations;
  }
  res.iterations = res.exp_iterations + res.log_iterations;
  res.hit_max_iters = d.hit_max_iters;
  res.x.alpha = std::move(d.alpha);
  res.x.beta = std::move(d.beta);
  res.x.u = u;
  if (d.plan.size() > 0) {
    res.x.plan = std::move(d.plan);
    res.log_mass = d.log_mass;
  } else {
    res.x.plan = plan_from_duals(lk, res.x.alpha, res.x.beta, &res.log_mass);
  }
  const MarginalGaps gaps = marginal_gaps(res.x.plan, inst.r(), inst.c());
  res.x.row_gap = gaps.row;
  res.x.col_gap = gaps.col;
  return res;
}

SinkhornResult sinkhorn(const PrwInstance& inst, const MultiplierState& mult,
                        double eta, const StiefelPoint& u,
                        const Vector& alpha0, const Vector& beta0,
                        const SinkhornOptions& opts) {
  return sinkhorn(inst, make_log_kernel(inst, mult, eta, u), u, alpha0, beta0,
                  opts);
}

}  // namespace prw
