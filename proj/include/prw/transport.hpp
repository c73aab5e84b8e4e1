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

#ifndef PRW_TRANSPORT_HPP_
#define PRW_TRANSPORT_HPP_

#include "prw/geometry.hpp"
#include "prw/types.hpp"

namespace prw {

// Two weighted point clouds in R^d (points are columns) and the target
// subspace dimension k.
class PrwInstance {
 public:
  // Validates shapes, finiteness, strictly positive weights summing to one
  // (1e-12) and 1 <= k <= d. Throws InvalidInput.
  static PrwInstance create(Matrix x, Matrix y, Vector r, Vector c,
                            Eigen::Index k);

  const Matrix& x() const { return x_; }
  const Matrix& y() const { return y_; }
  const Vector& r() const { return r_; }
  const Vector& c() const { return c_; }
  Eigen::Index k() const { return k_; }
  Eigen::Index d() const { return x_.rows(); }
  Eigen::Index n() const { return x_.cols(); }
  Eigen::Index m() const { return y_.cols(); }
  // Unprojected squared distances, n x m.
  const RowMatrix& cost() const { return cost_; }
  double cost_inf() const { return cost_inf_; }
  // max(||r||_inf, ||c||_inf).
  double marginal_inf() const { return marginal_inf_; }

 private:
  Matrix x_, y_;
  Vector r_, c_;
  Eigen::Index k_ = 0;
  RowMatrix cost_;
  double cost_inf_ = 0.0;
  double marginal_inf_ = 0.0;
};

// Entrywise positive multiplier kappa, stored as log kappa.
class MultiplierState {
 public:
  MultiplierState() = default;
  static MultiplierState ones(Eigen::Index n, Eigen::Index m);
  // Throws InvalidInput on non-finite entries.
  static MultiplierState from_log(RowMatrix log_kappa);

  const RowMatrix& log_kappa() const { return log_kappa_; }
  RowMatrix kappa() const { return log_kappa_.array().exp().matrix(); }
  double log_var() const { return log_var_; }
  double log_inf() const { return log_inf_; }

 private:
  RowMatrix log_kappa_;
  double log_var_ = 0.0;
  double log_inf_ = 0.0;
};

// ||x_i - y_j||^2 for columns of p and q, negative round-off clamped to 0.
RowMatrix pairwise_sq_dists(const Matrix& p, const Matrix& q);
RowMatrix cost_matrix(const Matrix& x, const Matrix& y);
// ||U^T (x_i - y_j)||^2, clamped to [0, C_ij].
RowMatrix projected_cost(const PrwInstance& inst, const StiefelPoint& u);

double var_norm(const RowMatrix& a);

// log kappa - C(U)/eta together with C(U).
struct LogKernel {
  RowMatrix cost_u;
  RowMatrix g;
  double eta = 1.0;
};

LogKernel make_log_kernel(const PrwInstance& inst, const MultiplierState& mult,
                          double eta, const StiefelPoint& u);

// alpha_i + beta_j + C(U)_ij.
RowMatrix phi(const RowMatrix& cost_u, const Vector& alpha,
              const Vector& beta);
// log kappa_ij - phi_ij / eta.
RowMatrix log_zeta(const LogKernel& lk, const Vector& alpha,
                   const Vector& beta);
// log ||zeta||_1 via a max-shifted log-sum-exp.
double log_zeta_mass(const LogKernel& lk, const Vector& alpha,
                     const Vector& beta);
// zeta / ||zeta||_1. Optionally reports log ||zeta||_1.
RowMatrix plan_from_duals(const LogKernel& lk, const Vector& alpha,
                          const Vector& beta, double* log_mass = nullptr);

struct DualIterate {
  Vector alpha, beta;
  StiefelPoint u;
  RowMatrix plan;
  double row_gap = 0.0;
  double col_gap = 0.0;
  double e2() const { return row_gap + col_gap; }
};

struct MarginalGaps {
  double row = 0.0;
  double col = 0.0;
};
MarginalGaps marginal_gaps(const RowMatrix& plan, const Vector& r,
                           const Vector& c);

// X Diag(pi 1) X^T + Y Diag(pi^T 1) Y^T - X pi Y^T - Y pi^T X^T.
Matrix v_pi(const PrwInstance& inst, const RowMatrix& plan);
// V_pi U in factored form, O(nmk).
Matrix v_pi_u(const PrwInstance& inst, const RowMatrix& plan,
              const StiefelPoint& u);
// Proj_{T_U}(-2 V_pi U).
TangentVector riemannian_grad(const PrwInstance& inst, const RowMatrix& plan,
                              const StiefelPoint& u);

// r^T alpha + c^T beta + eta log ||zeta||_1.
double lagrangian(const LogKernel& lk, const Vector& r, const Vector& c,
                  const Vector& alpha, const Vector& beta);

// Adds constants to alpha and beta so that r^T alpha = c^T beta and
// ||zeta||_1 = 1. The Lagrangian value is unchanged.
void shift_normalize(const LogKernel& lk, const Vector& r, const Vector& c,
                     Vector& alpha, Vector& beta);

// Projects a nonnegative plan onto Pi(r, c) by row/column down-scaling and
// a rank-one correction. ||out - plan||_1 <= row gap + column gap.
RowMatrix round_plan(const RowMatrix& plan, const Vector& r, const Vector& c);

struct Certificate {
  RowMatrix rounded_plan;
  double e1 = 0.0;
  double e2 = 0.0;
  double e1_rounded = 0.0;
  double grad_bound = 0.0;
  double complementarity = 0.0;
  double comp_bound = 0.0;
  double primal = 0.0;
  // ||C(U)||_var + eta ||log kappa||_var, diagnostic only.
  double r_bound = 0.0;
  bool grad_ok() const { return e1_rounded <= grad_bound; }
  bool comp_ok() const { return complementarity <= comp_bound; }
};

// Rounds the plan of x and checks the stationarity and complementarity
// bounds for the original problem. x must be shift-normalized.
Certificate certify(const PrwInstance& inst, const MultiplierState& mult,
                    double eta, const DualIterate& x);

}  // namespace prw

#endif  // PRW_TRANSPORT_HPP_
