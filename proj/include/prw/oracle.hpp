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

#ifndef PRW_ORACLE_HPP_
#define PRW_ORACLE_HPP_

#include <cstdint>
#include <vector>

#include "prw/sinkhorn.hpp"

namespace prw {

struct Assignment {
  // col_of_row[i] is the column assigned to row i.
  std::vector<int> col_of_row;
  // Sum of the selected entries.
  double total = 0.0;
};

// Minimum-cost perfect matching of a square cost matrix (shortest augmenting
// paths with potentials, O(n^3)). Among optimal matchings the
// lexicographically smallest col_of_row is returned.
Assignment hungarian(const RowMatrix& cost);

// Exhaustive enumeration in lexicographic order, n <= 10.
Assignment brute_force_assignment(const RowMatrix& cost);

struct PrimalOptions {
  // Use the certified entropic path even when an exact solver applies.
  bool force_certified = false;
  // eta = eta_factor ||C(U)||_inf for the certified path.
  double eta_factor = 1e-3;
  // Row-gap tolerance of the final Sinkhorn solve. The gap stays a valid
  // bound for any value; rounding adds at most about ||Z||_inf theta to it.
  double theta = 1e-4;
  std::int64_t max_iters = 1'000'000;
};

struct PrimalValue {
  // min over Pi(r, c) of <pi, C(U)> when exact, otherwise <pi_hat, C(U)>
  // for a feasible pi_hat with value - optimum in [0, gap].
  double value = 0.0;
  double gap = 0.0;
  bool exact = false;
  RowMatrix plan;
};

PrimalValue prw_primal(const PrwInstance& inst, const StiefelPoint& u,
                       const PrimalOptions& opts = {});

struct FdDirection {
  double finite_difference = 0.0;
  double analytic = 0.0;
  double rel_error = 0.0;
};

struct FdReport {
  std::vector<FdDirection> directions;
  double grad_norm = 0.0;
  double max_rel_error = 0.0;
};

// Central differences of q(U) = min_{alpha,beta} L along retraction curves
// U(t) = R_U(t xi) for random unit tangent directions, against <grad q, xi>.
// Relative error is measured against ||grad q(U)||_F.
FdReport fd_gradient_check(const PrwInstance& inst,
                           const MultiplierState& mult, double eta,
                           const StiefelPoint& u, double h, int directions,
                           std::uint64_t seed);

}  // namespace prw

#endif  // PRW_ORACLE_HPP_
