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

#include "prw/irbbs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace prw {
namespace {

double clamp_tau(double tau, const IrbbsConfig& cfg) {
  return std::clamp(tau, cfg.tau_min, cfg.tau_max);
}

double lagrangian_of(const SinkhornResult& s, const PrwInstance& inst,
                     double eta) {
  return inst.r().dot(s.x.alpha) + inst.c().dot(s.x.beta) + eta * s.log_mass;
}

void count_sinkhorn(IrbbsResult& res, const SinkhornResult& s) {
  res.n_sinkhorn += s.iterations;
  res.n_sinkhorn_exp += s.exp_iterations;
  res.n_sinkhorn_log += s.log_iterations;
  if (s.fell_back) ++res.fallbacks;
}

}  // namespace

double bb_stepsize(BbState& state, const Matrix& du, const Matrix& dxi,
                   const IrbbsConfig& cfg) {
  const double ip = std::abs((du.array() * dxi.array()).sum());
  const double nu = du.squaredNorm();
  const double nx = dxi.squaredNorm();
  if (!(ip > 0.0) || !(nx > 0.0) || !std::isfinite(ip / nx)) {
    return clamp_tau(state.last_tau, cfg);
  }
  const double bb1 = nu / ip;
  const double bb2 = ip / nx;
  double tau;
  if (state.calls == 0) {
    tau = bb2;
  } else if (bb2 / bb1 < state.psi) {
    tau = std::min({state.prev_bb2, bb2, std::max(cfg.tau_new, 0.0)});
    state.psi /= cfg.psi_factor;
  } else {
    tau = bb1;
    state.psi *= cfg.psi_factor;
  }
  ++state.calls;
  state.prev_bb2 = bb2;
  return clamp_tau(tau, cfg);
}

bool line_search_accept(double e_rho_new, double e_ref, double tau,
                        double xi_norm, double e2_new, double eta,
                        const IrbbsConfig& cfg) {
  const double rho = cfg.rho_factor * eta;
  return e_rho_new <= e_ref - cfg.delta1 * tau * xi_norm * xi_norm -
                          (0.5 * eta - rho) * e2_new * e2_new;
}

double next_theta(double theta_scale, double cost_inf, double e1,
                  double eps2) {
  if (std::isinf(theta_scale)) return 2.0;
  const double t = theta_scale / (2.0 * cost_inf) * e1;
  return std::max(t, eps2);
}

IrbbsResult irbbs_solve(const PrwInstance& inst, const MultiplierState& mult,
                        double eta, const DualIterate& x0,
                        const IrbbsConfig& cfg) {
  if (!(cfg.eps1 > 0.0) || !(cfg.eps2 > 0.0)) {
    throw InvalidInput("irbbs: eps1 and eps2 must be positive");
  }
  if (!(cfg.rho_factor >= 0.0 && cfg.rho_factor < 0.5)) {
    throw InvalidInput("irbbs: rho must lie in [0, eta/2)");
  }
  if (cfg.fixed_step && !(*cfg.fixed_step > 0.0)) {
    throw InvalidInput("irbbs: fixed step must be positive");
  }
  const double rho = cfg.rho_factor * eta;
  const double cinf = std::max(inst.cost_inf(), 1e-300);

  IrbbsResult res;
  SinkhornOptions sk;
  sk.mode = cfg.mode;
  sk.max_iters = cfg.sinkhorn_max_iters;
  sk.theta = cfg.theta0;
  SinkhornResult cur = sinkhorn(inst, mult, eta, x0.u, x0.alpha, x0.beta, sk);
  count_sinkhorn(res, cur);
  double cur_l = lagrangian_of(cur, inst, eta);
  if (!std::isfinite(cur_l)) {
    throw SolverError("irbbs: non-finite Lagrangian after the initial Sinkhorn");
  }
  double e_ref = cur_l + rho * cur.x.e2() * cur.x.e2();
  double q = 1.0;

  BbState bb;
  bb.psi = cfg.psi0;
  bb.last_tau = cfg.tau0;
  Matrix prev_u, prev_xi;

  double best_e1 = std::numeric_limits<double>::infinity();
  Vector best_alpha, best_beta;
  StiefelPoint best_u;
  double e1 = 0.0;

  for (std::int64_t t = 0;; ++t) {
    const TangentVector grad = riemannian_grad(inst, cur.x.plan, cur.x.u);
    ++res.n_grad;
    e1 = grad.xi.norm();
    if (e1 < best_e1) {
      best_e1 = e1;
      best_alpha = cur.x.alpha;
      best_beta = cur.x.beta;
      best_u = cur.x.u;
    }
    if (e1 <= cfg.eps1 && cur.x.row_gap <= cfg.eps2) {
      res.converged = true;
      break;
    }
    if (t >= cfg.max_outer) {
      res.hit_max_outer = true;
      break;
    }

    double tau0;
    if (cfg.fixed_step) {
      tau0 = *cfg.fixed_step;
    } else if (t == 0) {
      tau0 = clamp_tau(cfg.tau0, cfg);
    } else {
      tau0 = bb_stepsize(bb, cur.x.u.matrix() - prev_u, grad.xi - prev_xi, cfg);
    }
    sk.theta = next_theta(cfg.theta_scale, cinf, e1, cfg.eps2);

    IrbbsTraceEntry entry;
    entry.t = t;
    entry.e1 = e1;
    entry.e_ref = e_ref;
    entry.theta = sk.theta;
    entry.line_search = !cfg.fixed_step.has_value();

    SinkhornResult trial;
    double trial_l = 0.0;
    double trial_e = 0.0;
    double tau = tau0;
    bool have_trial = false;
    for (int s = 0;; ++s) {
      tau = tau0 * std::pow(cfg.sigma, s);
      bool degenerate = false;
      StiefelPoint u_new;
      try {
        u_new = retract_qr(cur.x.u, -tau * grad.xi);
      } catch (const DegenerateRetraction&) {
        degenerate = true;
      }
      if (!degenerate) {
        trial = sinkhorn(inst, mult, eta, u_new, cur.x.alpha, cur.x.beta, sk);
        count_sinkhorn(res, trial);
        entry.sinkhorn_iters += trial.iterations;
        trial_l = lagrangian_of(trial, inst, eta);
        if (!std::isfinite(trial_l)) {
          throw SolverError("irbbs: non-finite Lagrangian at iteration " +
                            std::to_string(t));
        }
        const double e2 = trial.x.e2();
        trial_e = trial_l + rho * e2 * e2;
        have_trial = true;
        if (cfg.fixed_step ||
            line_search_accept(trial_e, e_ref, tau, e1, e2, eta, cfg)) {
          break;
        }
      }
      if (s >= cfg.max_backtracks && have_trial) {
        entry.forced = true;
        ++res.forced_steps;
        break;
      }
      if (s >= 4 * cfg.max_backtracks) {
        throw SolverError("irbbs: retraction degenerate for every stepsize");
      }
      ++entry.backtracks;
      ++res.backtracks;
      ++res.n_grad;
    }
    bb.last_tau = tau;

    const double q_next = cfg.gamma * q + 1.0;
    e_ref = (cfg.gamma * q * e_ref + trial_e) / q_next;
    q = q_next;

    entry.tau = tau;
    entry.e2 = trial.x.e2();
    entry.lagrangian = trial_l;
    entry.e_rho = trial_e;
    entry.mode = trial.mode_used;
    if (cfg.record_trace) res.trace.push_back(entry);

    prev_u = cur.x.u.matrix();
    prev_xi = grad.xi;
    cur = std::move(trial);
    cur_l = trial_l;
    ++res.iterations;
  }

  if (res.hit_max_outer && best_e1 < e1) {
    const LogKernel lk = make_log_kernel(inst, mult, eta, best_u);
    cur.x.alpha = best_alpha;
    cur.x.beta = best_beta;
    cur.x.u = best_u;
    cur.x.plan = plan_from_duals(lk, best_alpha, best_beta, &cur.log_mass);
    const MarginalGaps g = marginal_gaps(cur.x.plan, inst.r(), inst.c());
    cur.x.row_gap = g.row;
    cur.x.col_gap = g.col;
    cur_l = lagrangian_of(cur, inst, eta);
    e1 = best_e1;
  }
  res.x = std::move(cur.x);
  res.e1 = e1;
  res.lagrangian = cur_l;
  return res;
}

}  // namespace prw
