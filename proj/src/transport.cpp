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

#include "prw/transport.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "prw/kernels.hpp"

namespace prw {
namespace {

void check_weights(const Vector& w, const char* name) {
  if (w.size() == 0) throw InvalidInput(std::string(name) + " is empty");
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (!std::isfinite(w(i)) || w(i) <= 0.0) {
      throw InvalidInput(std::string(name) + "[" + std::to_string(i) +
                         "] is not strictly positive");
    }
  }
  if (std::abs(w.sum() - 1.0) > 1e-12) {
    throw InvalidInput(std::string(name) + " does not sum to 1");
  }
}

Vector scaled(const Vector& v, double s) { return v * s; }

}  // namespace

PrwInstance PrwInstance::create(Matrix x, Matrix y, Vector r, Vector c,
                                Eigen::Index k) {
  if (x.rows() != y.rows()) {
    throw InvalidInput("point dimensions differ: " + std::to_string(x.rows()) +
                       " vs " + std::to_string(y.rows()));
  }
  if (x.rows() < 1 || x.cols() < 1 || y.cols() < 1) {
    throw InvalidInput("empty point cloud");
  }
  if (!x.allFinite() || !y.allFinite()) {
    throw InvalidInput("point clouds contain non-finite values");
  }
  if (r.size() != x.cols() || c.size() != y.cols()) {
    throw InvalidInput("weight lengths do not match point counts");
  }
  check_weights(r, "r");
  check_weights(c, "c");
  if (k < 1 || k > x.rows()) {
    throw InvalidInput("k must lie in [1, d], got " + std::to_string(k));
  }
  PrwInstance inst;
  inst.x_ = std::move(x);
  inst.y_ = std::move(y);
  inst.r_ = std::move(r);
  inst.c_ = std::move(c);
  inst.k_ = k;
  inst.cost_ = cost_matrix(inst.x_, inst.y_);
  inst.cost_inf_ = inst.cost_.maxCoeff();
  inst.marginal_inf_ = std::max(inst.r_.maxCoeff(), inst.c_.maxCoeff());
  return inst;
}

MultiplierState MultiplierState::ones(Eigen::Index n, Eigen::Index m) {
  return from_log(RowMatrix::Zero(n, m));
}

MultiplierState MultiplierState::from_log(RowMatrix log_kappa) {
  if (!log_kappa.allFinite()) {
    throw InvalidInput("log kappa has non-finite entries");
  }
  MultiplierState s;
  s.log_var_ = var_norm(log_kappa);
  s.log_inf_ = log_kappa.cwiseAbs().maxCoeff();
  s.log_kappa_ = std::move(log_kappa);
  return s;
}

RowMatrix pairwise_sq_dists(const Matrix& p, const Matrix& q) {
  const Eigen::RowVectorXd pn = p.colwise().squaredNorm();
  const Eigen::RowVectorXd qn = q.colwise().squaredNorm();
  RowMatrix out = -2.0 * (p.transpose() * q);
  out.colwise() += pn.transpose();
  out.rowwise() += qn;
  return out.cwiseMax(0.0);
}

RowMatrix cost_matrix(const Matrix& x, const Matrix& y) {
  return pairwise_sq_dists(x, y);
}

RowMatrix projected_cost(const PrwInstance& inst, const StiefelPoint& u) {
  const Matrix& um = u.matrix();
  if (um.rows() != inst.d()) throw InvalidInput("projected_cost: d mismatch");
  const Matrix px = um.transpose() * inst.x();
  const Matrix py = um.transpose() * inst.y();
  return pairwise_sq_dists(px, py).cwiseMin(inst.cost());
}

double var_norm(const RowMatrix& a) { return a.maxCoeff() - a.minCoeff(); }

LogKernel make_log_kernel(const PrwInstance& inst, const MultiplierState& mult,
                          double eta, const StiefelPoint& u) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw InvalidInput("eta must be positive and finite");
  }
  if (mult.log_kappa().rows() != inst.n() ||
      mult.log_kappa().cols() != inst.m()) {
    throw InvalidInput("multiplier shape does not match the instance");
  }
  const Matrix& um = u.matrix();
  if (um.rows() != inst.d()) throw InvalidInput("make_log_kernel: d mismatch");
  const Matrix px = um.transpose() * inst.x();
  const Matrix py = um.transpose() * inst.y();
  const Vector pn = px.colwise().squaredNorm().transpose();
  const Vector qn = py.colwise().squaredNorm().transpose();
  const Eigen::Index k = px.rows();
  LogKernel lk;
  lk.cost_u.resize(inst.n(), inst.m());
  lk.g.resize(inst.n(), inst.m());
  lk.eta = eta;
  const double inv_eta = 1.0 / eta;
  const RowMatrix& c = inst.cost();
  const RowMatrix& lkap = mult.log_kappa();
  for (Eigen::Index i = 0; i < inst.n(); ++i) {
    double* cu = lk.cost_u.row(i).data();
    double* g = lk.g.row(i).data();
    const double* ci = c.row(i).data();
    const double* li = lkap.row(i).data();
    const double* xi = px.col(i).data();
    const double pi = pn(i);
    for (Eigen::Index j = 0; j < inst.m(); ++j) {
      const double* yj = py.col(j).data();
      double dot = 0.0;
      for (Eigen::Index t = 0; t < k; ++t) dot += xi[t] * yj[t];
      const double v = std::min(std::max(pi + qn(j) - 2.0 * dot, 0.0), ci[j]);
      cu[j] = v;
      g[j] = li[j] - v * inv_eta;
    }
  }
  return lk;
}

RowMatrix phi(const RowMatrix& cost_u, const Vector& alpha,
              const Vector& beta) {
  RowMatrix out = cost_u;
  out.colwise() += alpha;
  out.rowwise() += beta.transpose();
  return out;
}

RowMatrix log_zeta(const LogKernel& lk, const Vector& alpha,
                   const Vector& beta) {
  RowMatrix out = lk.g;
  out.colwise() -= alpha / lk.eta;
  out.rowwise() -= beta.transpose() / lk.eta;
  return out;
}

RowMatrix plan_from_duals(const LogKernel& lk, const Vector& alpha,
                          const Vector& beta, double* log_mass) {
  const auto n = static_cast<std::size_t>(lk.g.rows());
  const auto m = static_cast<std::size_t>(lk.g.cols());
  if (alpha.size() != lk.g.rows() || beta.size() != lk.g.cols()) {
    throw InvalidInput("dual lengths do not match the kernel");
  }
  const Vector a = scaled(alpha, -1.0 / lk.eta);
  const Vector b = scaled(beta, -1.0 / lk.eta);
  const auto& kt = kernels::active();
  const double mx = kt.max_affine(lk.g.data(), n, m, a.data(), b.data());
  RowMatrix out(lk.g.rows(), lk.g.cols());
  const double total =
      kt.exp_affine(lk.g.data(), n, m, a.data(), b.data(), -mx, out.data());
  out /= total;
  if (log_mass != nullptr) *log_mass = mx + std::log(total);
  return out;
}

double log_zeta_mass(const LogKernel& lk, const Vector& alpha,
                     const Vector& beta) {
  double lm = 0.0;
  plan_from_duals(lk, alpha, beta, &lm);
  return lm;
}

MarginalGaps marginal_gaps(const RowMatrix& plan, const Vector& r,
                           const Vector& c) {
  MarginalGaps g;
  g.row = (plan.rowwise().sum() - r).lpNorm<1>();
  g.col = (plan.colwise().sum().transpose() - c).lpNorm<1>();
  return g;
}

Matrix v_pi(const PrwInstance& inst, const RowMatrix& plan) {
  const Vector a = plan.rowwise().sum();
  const Vector b = plan.colwise().sum().transpose();
  const Matrix& x = inst.x();
  const Matrix& y = inst.y();
  const Matrix cross = x * plan * y.transpose();
  Matrix out = x * a.asDiagonal() * x.transpose() +
               y * b.asDiagonal() * y.transpose() - cross -
               cross.transpose();
  return 0.5 * (out + out.transpose());
}

Matrix v_pi_u(const PrwInstance& inst, const RowMatrix& plan,
              const StiefelPoint& u) {
  const Matrix& um = u.matrix();
  const Vector a = plan.rowwise().sum();
  const Vector b = plan.colwise().sum().transpose();
  const Matrix xu = inst.x().transpose() * um;
  const Matrix yu = inst.y().transpose() * um;
  const Matrix left = a.asDiagonal() * xu - plan * yu;
  const Matrix right = b.asDiagonal() * yu - plan.transpose() * xu;
  return inst.x() * left + inst.y() * right;
}

TangentVector riemannian_grad(const PrwInstance& inst, const RowMatrix& plan,
                              const StiefelPoint& u) {
  return {project_tangent(u, -2.0 * v_pi_u(inst, plan, u)), u};
}

double lagrangian(const LogKernel& lk, const Vector& r, const Vector& c,
                  const Vector& alpha, const Vector& beta) {
  return r.dot(alpha) + c.dot(beta) + lk.eta * log_zeta_mass(lk, alpha, beta);
}

void shift_normalize(const LogKernel& lk, const Vector& r, const Vector& c,
                     Vector& alpha, Vector& beta) {
  const double lm = lk.eta * log_zeta_mass(lk, alpha, beta);
  const double ra = r.dot(alpha);
  const double cb = c.dot(beta);
  alpha.array() += 0.5 * (cb - ra + lm);
  beta.array() += 0.5 * (ra - cb + lm);
}

RowMatrix round_plan(const RowMatrix& plan, const Vector& r, const Vector& c) {
  if (plan.rows() != r.size() || plan.cols() != c.size()) {
    throw InvalidInput("round_plan: shape mismatch");
  }
  if ((plan.array() < 0.0).any() || !plan.allFinite()) {
    throw InvalidInput("round_plan: plan must be finite and nonnegative");
  }
  RowMatrix p = plan;
  const Vector rs = p.rowwise().sum();
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    if (rs(i) > r(i)) p.row(i) *= r(i) / rs(i);
  }
  const Vector cs = p.colwise().sum().transpose();
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    if (cs(j) > c(j)) p.col(j) *= c(j) / cs(j);
  }
  const Vector er = (r - p.rowwise().sum()).cwiseMax(0.0);
  const Vector ec = (c - p.colwise().sum().transpose()).cwiseMax(0.0);
  const double s = er.sum();
  if (s > 0.0) p.noalias() += er * ec.transpose() / s;
  return p;
}

Certificate certify(const PrwInstance& inst, const MultiplierState& mult,
                    double eta, const DualIterate& x) {
  const LogKernel lk = make_log_kernel(inst, mult, eta, x.u);
  Certificate cert;
  const MarginalGaps gaps = marginal_gaps(x.plan, inst.r(), inst.c());
  cert.e2 = gaps.row + gaps.col;
  cert.e1 = riemannian_grad(inst, x.plan, x.u).xi.norm();
  cert.rounded_plan = round_plan(x.plan, inst.r(), inst.c());
  cert.e1_rounded = riemannian_grad(inst, cert.rounded_plan, x.u).xi.norm();
  cert.grad_bound = cert.e1 + 2.0 * inst.cost_inf() * cert.e2;

  RowMatrix z = phi(lk.cost_u, x.alpha, x.beta);
  z.array() -= z.minCoeff();
  cert.complementarity = cert.rounded_plan.cwiseProduct(z).sum();
  const double var_a = x.alpha.maxCoeff() - x.alpha.minCoeff();
  const double var_b = x.beta.maxCoeff() - x.beta.minCoeff();
  const double entropy =
      std::log(static_cast<double>(inst.n()) * static_cast<double>(inst.m()));
  cert.comp_bound = (entropy + mult.log_var()) * eta +
                    (var_a + var_b + inst.cost_inf()) * cert.e2;
  cert.primal = cert.rounded_plan.cwiseProduct(lk.cost_u).sum();
  cert.r_bound = var_norm(lk.cost_u) + eta * mult.log_var();
  return cert;
}

}  // namespace prw
