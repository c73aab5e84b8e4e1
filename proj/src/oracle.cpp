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

#include "prw/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "prw/rng.hpp"

namespace prw {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double assignment_total(const RowMatrix& cost, const std::vector<int>& cols) {
  double s = 0.0;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    s += cost(static_cast<Eigen::Index>(i), cols[i]);
  }
  return s;
}

// Re-routes the perfect matching on tight edges so that row takes col,
// keeping earlier rows fixed. Alternating BFS from the current owner of col
// to the column row currently owns.
bool reroute(const std::vector<std::vector<char>>& tight, int row, int col,
             std::vector<int>& col_of_row, std::vector<int>& row_of_col) {
  const int n = static_cast<int>(col_of_row.size());
  const int target = col_of_row[row];
  const int start = row_of_col[col];
  std::vector<int> prev_col(n, -2);
  std::vector<int> queue{start};
  std::vector<char> seen_row(n, 0);
  seen_row[start] = 1;
  seen_row[row] = 1;
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const int i = queue[qi];
    for (int j = 0; j < n; ++j) {
      if (!tight[i][j] || j == col || prev_col[j] != -2) continue;
      const int owner = row_of_col[j];
      if (owner < row) continue;
      prev_col[j] = i;
      if (j == target) {
        int jj = j;
        while (true) {
          const int ii = prev_col[jj];
          const int next = col_of_row[ii];
          col_of_row[ii] = jj;
          row_of_col[jj] = ii;
          if (ii == start) break;
          jj = next;
        }
        col_of_row[row] = col;
        row_of_col[col] = row;
        return true;
      }
      if (!seen_row[owner]) {
        seen_row[owner] = 1;
        queue.push_back(owner);
      }
    }
  }
  return false;
}

}  // namespace

Assignment hungarian(const RowMatrix& cost) {
  if (cost.rows() != cost.cols()) {
    throw InvalidInput("hungarian: cost matrix must be square");
  }
  if (!cost.allFinite()) throw InvalidInput("hungarian: non-finite cost");
  const int n = static_cast<int>(cost.rows());
  Assignment out;
  if (n == 0) return out;

  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> col_of_row(n), row_of_col(n);
  for (int j = 1; j <= n; ++j) {
    col_of_row[p[j] - 1] = j - 1;
    row_of_col[j - 1] = p[j] - 1;
  }

  // Every optimal matching uses only edges with zero reduced cost, so the
  // lexicographic choice is a greedy search on that subgraph.
  const double scale = 1.0 + cost.cwiseAbs().maxCoeff();
  const double tol = 64.0 * std::numeric_limits<double>::epsilon() * scale * n;
  std::vector<std::vector<char>> tight(n, std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      tight[i][j] = std::abs(cost(i, j) - u[i + 1] - v[j + 1]) <= tol;
    }
    tight[i][col_of_row[i]] = 1;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < col_of_row[i]; ++j) {
      if (!tight[i][j] || row_of_col[j] < i) continue;
      if (reroute(tight, i, j, col_of_row, row_of_col)) break;
    }
  }
  out.col_of_row = std::move(col_of_row);
  out.total = assignment_total(cost, out.col_of_row);
  return out;
}

Assignment brute_force_assignment(const RowMatrix& cost) {
  if (cost.rows() != cost.cols()) {
    throw InvalidInput("brute_force_assignment: cost matrix must be square");
  }
  if (cost.rows() > 10) throw InvalidInput("brute_force_assignment: n > 10");
  std::vector<int> perm(static_cast<std::size_t>(cost.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  Assignment best;
  best.total = kInf;
  do {
    const double t = assignment_total(cost, perm);
    if (t < best.total) {
      best.total = t;
      best.col_of_row = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (perm.empty()) best.total = 0.0;
  return best;
}

PrimalValue prw_primal(const PrwInstance& inst, const StiefelPoint& u,
                       const PrimalOptions& opts) {
  const RowMatrix cu = projected_cost(inst, u);
  const double n = static_cast<double>(inst.n());
  const bool uniform =
      inst.n() == inst.m() &&
      (inst.r().array() - 1.0 / n).abs().maxCoeff() <= 1e-15 &&
      (inst.c().array() - 1.0 / n).abs().maxCoeff() <= 1e-15;
  PrimalValue out;
  if (uniform && !opts.force_certified) {
    const Assignment a = hungarian(cu);
    out.value = a.total / n;
    out.exact = true;
    out.plan = RowMatrix::Zero(inst.n(), inst.m());
    for (Eigen::Index i = 0; i < inst.n(); ++i) {
      out.plan(i, a.col_of_row[static_cast<std::size_t>(i)]) = 1.0 / n;
    }
    return out;
  }
  const double cmax = cu.maxCoeff();
  const double eta = cmax > 0.0 ? opts.eta_factor * cmax : 1.0;
  const MultiplierState ones = MultiplierState::ones(inst.n(), inst.m());
  SinkhornOptions sk;
  sk.mode = SinkhornMode::kLog;
  sk.max_iters = opts.max_iters;
  // Anneal eta from ||C(U)||_inf down to the target, warm-starting duals.
  Vector alpha = Vector::Zero(inst.n());
  Vector beta = Vector::Zero(inst.m());
  for (double e = std::max(cmax, eta); e > eta; e *= 0.5) {
    sk.theta = std::max(opts.theta, 1e-4);
    const SinkhornResult s =
        sinkhorn(inst, make_log_kernel(inst, ones, e, u), u, alpha, beta, sk);
    alpha = s.x.alpha;
    beta = s.x.beta;
  }
  const LogKernel lk = make_log_kernel(inst, ones, eta, u);
  sk.theta = opts.theta;
  SinkhornResult s = sinkhorn(inst, lk, u, alpha, beta, sk);
  shift_normalize(lk, inst.r(), inst.c(), s.x.alpha, s.x.beta);
  const RowMatrix plan = plan_from_duals(lk, s.x.alpha, s.x.beta);
  out.plan = round_plan(plan, inst.r(), inst.c());
  RowMatrix z = phi(lk.cost_u, s.x.alpha, s.x.beta);
  z.array() -= z.minCoeff();
  out.value = out.plan.cwiseProduct(lk.cost_u).sum();
  out.gap = out.plan.cwiseProduct(z).sum();
  return out;
}

FdReport fd_gradient_check(const PrwInstance& inst,
                           const MultiplierState& mult, double eta,
                           const StiefelPoint& u, double h, int directions,
                           std::uint64_t seed) {
  if (!(h > 0.0) || directions < 1) {
    throw InvalidInput("fd_gradient_check: need h > 0 and directions >= 1");
  }
  SinkhornOptions sk;
  sk.mode = SinkhornMode::kLog;
  sk.theta = 1e-14;
  sk.max_iters = 200000;
  const Vector a0 = Vector::Zero(inst.n());
  const Vector b0 = Vector::Zero(inst.m());
  auto solve = [&](const StiefelPoint& p) {
    const LogKernel lk = make_log_kernel(inst, mult, eta, p);
    SinkhornResult s = sinkhorn(inst, lk, p, a0, b0, sk);
    const double q = lagrangian(lk, inst.r(), inst.c(), s.x.alpha, s.x.beta);
    return std::make_pair(q, std::move(s));
  };

  const auto base = solve(u);
  const Matrix grad = riemannian_grad(inst, base.second.x.plan, u).xi;
  FdReport rep;
  rep.grad_norm = grad.norm();
  Rng rng(seed);
  for (int t = 0; t < directions; ++t) {
    Matrix g(u.d(), u.k());
    for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = rng.uniform(-1.0, 1.0);
    Matrix xi = project_tangent(u, g);
    xi /= xi.norm();
    const double qp = solve(retract_qr(u, h * xi)).first;
    const double qm = solve(retract_qr(u, -h * xi)).first;
    FdDirection dir;
    dir.finite_difference = (qp - qm) / (2.0 * h);
    dir.analytic = (grad.array() * xi.array()).sum();
    dir.rel_error = std::abs(dir.finite_difference - dir.analytic) /
                    std::max(rep.grad_norm, 1e-300);
    rep.max_rel_error = std::max(rep.max_rel_error, dir.rel_error);
    rep.directions.push_back(dir);
  }
  return rep;
}

}  // namespace prw
