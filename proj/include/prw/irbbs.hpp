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

#ifndef PRW_IRBBS_HPP_
#define PRW_IRBBS_HPP_

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "prw/sinkhorn.hpp"

namespace prw {

struct IrbbsConfig {
  // Stop when ||xi|| <= eps1 and ||pi 1 - r||_1 <= eps2. Both required.
  double eps1 = 0.0;
  double eps2 = 0.0;
  double tau_min = 1e-10;
  double tau_max = 1e10;
  double tau0 = 1e-3;
  double sigma = 0.5;
  double delta1 = 1e-4;
  // rho = rho_factor * eta, must be below eta / 2.
  double rho_factor = 0.49;
  double gamma = 0.85;
  double psi0 = 0.05;
  double psi_factor = 1.02;
  // Extra safeguard in the adaptive BB branch.
  double tau_new = std::numeric_limits<double>::infinity();
  // theta_{t+1} = max(theta_scale / (2 ||C||_inf) ||xi^t||, eps2).
  double theta_scale = 0.1;
  double theta0 = 1.0;
  SinkhornMode mode = SinkhornMode::kExp;
  std::int64_t max_outer = 5000;
  int max_backtracks = 60;
  // Constant stepsize without line search.
  std::optional<double> fixed_step;
  std::int64_t sinkhorn_max_iters = 1'000'000;
  bool record_trace = true;
};

struct BbState {
  std::int64_t calls = 0;
  double prev_bb2 = 0.0;
  double psi = 0.05;
  double last_tau = 1e-3;
};

// Adaptive Barzilai-Borwein stepsize from dU = U^t - U^{t-1} and
// dxi = xi^t - xi^{t-1}, clamped to [tau_min, tau_max]. Falls back to the
// previous stepsize when <dU, dxi> = 0 or dxi = 0.
double bb_stepsize(BbState& state, const Matrix& du, const Matrix& dxi,
                   const IrbbsConfig& cfg);

// Nonmonotone sufficient decrease test on E_rho = L + rho e2^2.
bool line_search_accept(double e_rho_new, double e_ref, double tau,
                        double xi_norm, double e2_new, double eta,
                        const IrbbsConfig& cfg);

double next_theta(double theta_scale, double cost_inf, double e1,
                  double eps2);

struct IrbbsTraceEntry {
  std::int64_t t = 0;
  double tau = 0.0;
  int backtracks = 0;
  // ||xi^t|| at the iterate the step starts from.
  double e1 = 0.0;
  // Quantities at the accepted x^{t+1}.
  double e2 = 0.0;
  double lagrangian = 0.0;
  double e_rho = 0.0;
  // Reference value E^r_t the step was tested against.
  double e_ref = 0.0;
  double theta = 0.0;
  std::int64_t sinkhorn_iters = 0;
  SinkhornMode mode = SinkhornMode::kExp;
  bool line_search = true;
  // Accepted after max_backtracks without passing the test.
  bool forced = false;
};

struct IrbbsResult {
  DualIterate x;
  double e1 = 0.0;
  double lagrangian = 0.0;
  bool converged = false;
  bool hit_max_outer = false;
  std::int64_t iterations = 0;
  std::int64_t n_grad = 0;
  std::int64_t backtracks = 0;
  std::int64_t forced_steps = 0;
  std::int64_t n_sinkhorn = 0;
  std::int64_t n_sinkhorn_exp = 0;
  std::int64_t n_sinkhorn_log = 0;
  std::int64_t fallbacks = 0;
  std::vector<IrbbsTraceEntry> trace;
};

// Minimizes L_eta(., kappa) from the duals and U of x0. Sinkhorn to theta0
// first, then Riemannian BB steps on U each followed by inexact Sinkhorn.
// At max_outer the best-e1 iterate is returned with hit_max_outer set.
IrbbsResult irbbs_solve(const PrwInstance& inst, const MultiplierState& mult,
                        double eta, const DualIterate& x0,
                        const IrbbsConfig& cfg);

}  // namespace prw

#endif  // PRW_IRBBS_HPP_
