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

#ifndef PRW_REALM_HPP_
#define PRW_REALM_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "prw/irbbs.hpp"

namespace prw {

struct RealmConfig {
  double eta1 = 1.0;
  double eta_min = 0.055;
  double gamma_w = 0.9;
  double gamma_eta = 0.5;
  double gamma_eps = 0.25;
  double eps_c = 1e-5;
  // Final tolerances. Defaults: eps2 = 1e-6 max(||r||_inf, ||c||_inf),
  // eps1 = 2 ||C||_inf eps2.
  std::optional<double> eps1;
  std::optional<double> eps2;
  // First subproblem uses eps2 = eps_init_factor max(||r||_inf, ||c||_inf).
  double eps_init_factor = 0.1;
  int max_multiplier_updates = 8;
  int max_outer = 50;
  // Subproblem settings. eps1, eps2 and, with auto_mode, mode and
  // theta_scale are overwritten per outer iteration.
  IrbbsConfig irbbs;
  bool auto_mode = true;
  double exp_theta_scale = 0.1;
  double log_theta_scale = 10.0;
  double switch_marginal = 500.0;
  double switch_var = 900.0;
  bool keep_traces = false;
};

struct RealmIteration {
  int k = 0;
  double eta = 0.0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  SinkhornMode mode = SinkhornMode::kExp;
  double theta_scale = 0.0;
  double w_norm = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
  double lagrangian = 0.0;
  // L of x^{k-1} under the same kappa and eta.
  double warm_lagrangian = 0.0;
  bool sub_converged = false;
  // The subproblem increased L and x^{k-1} was kept.
  bool monotone_fallback = false;
  bool multiplier_updated = false;
  std::int64_t sub_iterations = 0;
  std::int64_t n_grad = 0;
  std::int64_t n_sinkhorn = 0;
};

struct RealmResult {
  DualIterate x;
  // Multiplier and penalty of the subproblem that produced x.
  MultiplierState mult;
  double eta = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
  double w_norm = 0.0;
  bool converged = false;
  // "complementarity", "eta_min" or "max_outer".
  std::string stop_reason;
  int iterations = 0;
  int multiplier_updates = 0;
  std::int64_t n_grad = 0;
  std::int64_t n_sinkhorn = 0;
  std::int64_t n_sinkhorn_exp = 0;
  std::int64_t n_sinkhorn_log = 0;
  Certificate certificate;
  // <rounded plan, C(U)>.
  double prw_value = 0.0;
  std::vector<RealmIteration> history;
  std::vector<std::vector<IrbbsTraceEntry>> traces;
};

// W_ij = min(eta pi_ij, phi_ij).
RowMatrix complementarity_residual(const RowMatrix& phi, const RowMatrix& pi,
                                   double eta);

// Chooses the Sinkhorn form for a subproblem from the marginal scale and the
// spread of C(U) - eta log kappa.
SinkhornMode select_mode(const PrwInstance& inst, const MultiplierState& mult,
                         double eta, const StiefelPoint& u,
                         const RealmConfig& cfg);

// x0 must be shift-normalized under (kappa = 1, eta1).
RealmResult realm_solve(const PrwInstance& inst, const RealmConfig& cfg,
                        const DualIterate& x0);
// Starts from initial_point(inst, 1, eta1, init_seed).
RealmResult realm_solve(const PrwInstance& inst, const RealmConfig& cfg,
                        std::uint64_t init_seed);

}  // namespace prw

#endif  // PRW_REALM_HPP_
