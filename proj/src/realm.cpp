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

#include "prw/realm.hpp"

#include <algorithm>
#include <cmath>

#include "prw/datasets.hpp"

namespace prw {
namespace {

void refresh(const PrwInstance& inst, const LogKernel& lk, DualIterate& x) {
  x.plan = plan_from_duals(lk, x.alpha, x.beta);
  const MarginalGaps g = marginal_gaps(x.plan, inst.r(), inst.c());
  x.row_gap = g.row;
  x.col_gap = g.col;
}

}  // namespace

RowMatrix complementarity_residual(const RowMatrix& phi, const RowMatrix& pi,
                                   double eta) {
  return (eta * pi.array()).min(phi.array()).matrix();
}

SinkhornMode select_mode(const PrwInstance& inst, const MultiplierState& mult,
                         double eta, const StiefelPoint& u,
                         const RealmConfig& cfg) {
  if (inst.marginal_inf() / eta >= cfg.switch_marginal) {
    return SinkhornMode::kLog;
  }
  const LogKernel lk = make_log_kernel(inst, mult, eta, u);
  // ||C(U) - eta log kappa||_var / eta = ||g||_var.
  if (var_norm(lk.g) >= cfg.switch_var) return SinkhornMode::kLog;
  return SinkhornMode::kExp;
}

RealmResult realm_solve(const PrwInstance& inst, const RealmConfig& cfg,
                        const DualIterate& x0) {
  if (!(cfg.eta1 > 0.0) || !(cfg.eta_min > 0.0) || cfg.eta_min > cfg.eta1) {
    throw InvalidInput("realm: need 0 < eta_min <= eta1");
  }
  if (!(cfg.gamma_eta > 0.0 && cfg.gamma_eta < 1.0) ||
      !(cfg.gamma_eps > 0.0 && cfg.gamma_eps < 1.0) ||
      !(cfg.gamma_w >= 0.0 && cfg.gamma_w < 1.0)) {
    throw InvalidInput("realm: gamma_eta, gamma_eps in (0,1), gamma_w in [0,1)");
  }
  const double eps2 = cfg.eps2.value_or(1e-6 * inst.marginal_inf());
  const double eps1 = cfg.eps1.value_or(2.0 * inst.cost_inf() * eps2);
  double eps2k = std::max(cfg.eps_init_factor * inst.marginal_inf(), eps2);
  double eps1k = std::max(2.0 * inst.cost_inf() * eps2k, eps1);

  MultiplierState mult = MultiplierState::ones(inst.n(), inst.m());
  double eta = cfg.eta1;
  if (eta <= cfg.eta_min) {
    eta = cfg.eta_min;
    eps1k = eps1;
    eps2k = eps2;
  }

  DualIterate x = x0;
  double w_prev;
  {
    const LogKernel lk = make_log_kernel(inst, mult, cfg.eta1, x.u);
    w_prev = phi(lk.cost_u, x.alpha, x.beta)
                 .array()
                 .min(cfg.eta1)
                 .matrix()
                 .norm();
  }

  RealmResult res;
  res.stop_reason = "max_outer";
  MultiplierState used_mult = mult;
  double used_eta = eta;
  for (int k = 1; k <= cfg.max_outer; ++k) {
    RealmIteration rec;
    rec.k = k;
    rec.eta = eta;
    rec.eps1 = eps1k;
    rec.eps2 = eps2k;

    IrbbsConfig sub = cfg.irbbs;
    sub.eps1 = eps1k;
    sub.eps2 = eps2k;
    if (cfg.auto_mode) {
      sub.mode = select_mode(inst, mult, eta, x.u, cfg);
      sub.theta_scale = sub.mode == SinkhornMode::kLog ? cfg.log_theta_scale
                                                       : cfg.exp_theta_scale;
    }
    sub.record_trace = cfg.keep_traces;
    rec.mode = sub.mode;
    rec.theta_scale = sub.theta_scale;

    IrbbsResult sr = irbbs_solve(inst, mult, eta, x, sub);
    res.n_grad += sr.n_grad;
    res.n_sinkhorn += sr.n_sinkhorn;
    res.n_sinkhorn_exp += sr.n_sinkhorn_exp;
    res.n_sinkhorn_log += sr.n_sinkhorn_log;
    rec.sub_converged = sr.converged;
    rec.sub_iterations = sr.iterations;
    rec.n_grad = sr.n_grad;
    rec.n_sinkhorn = sr.n_sinkhorn;
    if (cfg.keep_traces) res.traces.push_back(std::move(sr.trace));

    DualIterate xk = std::move(sr.x);
    double e1 = sr.e1;
    LogKernel lk = make_log_kernel(inst, mult, eta, xk.u);
    shift_normalize(lk, inst.r(), inst.c(), xk.alpha, xk.beta);
    double l_new = lagrangian(lk, inst.r(), inst.c(), xk.alpha, xk.beta);
    {
      LogKernel lk_prev = make_log_kernel(inst, mult, eta, x.u);
      const double l_prev =
          lagrangian(lk_prev, inst.r(), inst.c(), x.alpha, x.beta);
      rec.warm_lagrangian = l_prev;
      if (!(l_new <= l_prev + 1e-12 * std::max(1.0, std::abs(l_prev)))) {
        rec.monotone_fallback = true;
        xk = x;
        shift_normalize(lk_prev, inst.r(), inst.c(), xk.alpha, xk.beta);
        refresh(inst, lk_prev, xk);
        e1 = riemannian_grad(inst, xk.plan, xk.u).xi.norm();
        l_new = l_prev;
        lk = std::move(lk_prev);
      }
    }
    rec.e1 = e1;
    rec.e2 = xk.e2();
    rec.lagrangian = l_new;

    const RowMatrix log_pi = log_zeta(lk, xk.alpha, xk.beta);
    const double w =
        complementarity_residual(phi(lk.cost_u, xk.alpha, xk.beta),
                                 log_pi.array().exp().matrix(), eta)
            .norm();
    rec.w_norm = w;

    used_mult = mult;
    used_eta = eta;
    x = std::move(xk);
    res.iterations = k;
    res.e1 = e1;
    res.e2 = rec.e2;
    res.w_norm = w;

    const bool tol_ok = e1 <= eps1 && x.e2() <= eps2;
    if (tol_ok && w <= cfg.eps_c) {
      res.converged = true;
      res.stop_reason = "complementarity";
      res.history.push_back(rec);
      break;
    }
    if (tol_ok && eta <= cfg.eta_min) {
      res.converged = true;
      res.stop_reason = "eta_min";
      res.history.push_back(rec);
      break;
    }

    if (w <= cfg.gamma_w * w_prev &&
        res.multiplier_updates < cfg.max_multiplier_updates) {
      mult = MultiplierState::from_log(log_pi);
      ++res.multiplier_updates;
      rec.multiplier_updated = true;
    } else {
      eta = std::max(cfg.gamma_eta * eta, cfg.eta_min);
    }
    if (eta <= cfg.eta_min) {
      eps1k = eps1;
      eps2k = eps2;
    } else {
      eps1k = std::max(cfg.gamma_eps * eps1k, eps1);
      eps2k = std::max(cfg.gamma_eps * eps2k, eps2);
    }
    w_prev = w;
    res.history.push_back(rec);
  }

  res.mult = used_mult;
  res.eta = used_eta;
  res.certificate = certify(inst, res.mult, res.eta, x);
  res.prw_value = res.certificate.primal;
  res.x = std::move(x);
  return res;
}

RealmResult realm_solve(const PrwInstance& inst, const RealmConfig& cfg,
                        std::uint64_t init_seed) {
  const DualIterate x0 = initial_point(
      inst, MultiplierState::ones(inst.n(), inst.m()), cfg.eta1, init_seed);
  return realm_solve(inst, cfg, x0);
}

}  // namespace prw
