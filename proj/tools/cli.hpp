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

#ifndef PRW_TOOLS_CLI_HPP_
#define PRW_TOOLS_CLI_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "prw/datasets.hpp"
#include "prw/realm.hpp"

namespace prw::cli {

struct SolverSettings {
  // "realm", "irbbs" or "fixed".
  std::string solver = "realm";
  // realm: eta1; irbbs and fixed: the penalty parameter. Default 1.
  std::optional<double> eta;
  double eta_min = 0.055;
  double gamma_w = 0.9;
  double gamma_eta = 0.5;
  double gamma_eps = 0.25;
  // theta_scale override. For realm it replaces both the exp and log value.
  std::optional<double> theta;
  // irbbs: initial stepsize; fixed: the constant stepsize (default 1e-3).
  std::optional<double> tau;
  // Sinkhorn form for irbbs and fixed.
  std::string mode = "exp";
  bool keep_traces = false;
};

struct RunSeeds {
  std::uint64_t instance = 0;
  std::uint64_t init = 0;
};

// Seeds of run (instance, init) in sweep cell number cell under a master
// seed.
// solve uses cell 0, instance 0, init 0.
RunSeeds run_seeds(std::uint64_t master, std::uint64_t cell,
                   std::uint64_t instance, std::uint64_t init);

struct RunOutcome {
  double prw = 0.0;
  double prw_p = 0.0;
  double prw_p_gap = 0.0;
  bool prw_p_exact = false;
  bool converged = false;
  std::string stop_reason;
  int iterations = 0;
  int multiplier_updates = 0;
  std::int64_t n_grad = 0;
  std::int64_t n_sinkhorn_exp = 0;
  std::int64_t n_sinkhorn_log = 0;
  double e1 = 0.0;
  double e2 = 0.0;
  Certificate certificate;
  double seconds = 0.0;
  // Deterministic report (no timings).
  nlohmann::json report;
};

RunOutcome run_solver(const PrwInstance& inst, const SolverSettings& s,
                      std::uint64_t init_seed);

// Parses "n=100,d=20,kstar=2[,k=2]".
HypercubeSpec parse_hypercube(const std::string& text);

// Entry point of the prw tool. Returns the process exit code: 0 on success
// (for solve: only when the solver converged), 1 when not converged, 2 on
// usage or input errors.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace prw::cli

#endif  // PRW_TOOLS_CLI_HPP_
