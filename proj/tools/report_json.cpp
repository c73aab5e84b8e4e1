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

#include "report_json.hpp"

namespace prw::report {

using nlohmann::json;

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json trace_json(const std::vector<IrbbsTraceEntry>& trace) {
  json out = json::array();
  for (const auto& e : trace) {
    out.push_back({{"t", e.t},
                   {"tau", e.tau},
                   {"backtracks", e.backtracks},
                   {"e1", e.e1},
                   {"e2", e.e2},
                   {"lagrangian", e.lagrangian},
                   {"e_rho", e.e_rho},
                   {"e_ref", e.e_ref},
                   {"theta", e.theta},
                   {"sinkhorn_iters", e.sinkhorn_iters},
                   {"mode", mode_name(e.mode)},
                   {"line_search", e.line_search},
                   {"forced", e.forced}});
  }
  return out;
}

json certificate_json(const Certificate& c) {
  return {{"e1", c.e1},
          {"e2", c.e2},
          {"e1_rounded", c.e1_rounded},
          {"grad_bound", c.grad_bound},
          {"grad_ok", c.grad_ok()},
          {"complementarity", c.complementarity},
          {"comp_bound", c.comp_bound},
          {"comp_ok", c.comp_ok()},
          {"primal", c.primal},
          {"r_bound", c.r_bound}};
}

json history_json(const std::vector<RealmIteration>& h) {
  json out = json::array();
  for (const auto& r : h) {
    out.push_back({{"k", r.k},
                   {"eta", r.eta},
                   {"eps1", r.eps1},
                   {"eps2", r.eps2},
                   {"mode", mode_name(r.mode)},
                   {"theta_scale", r.theta_scale},
                   {"w_norm", r.w_norm},
                   {"e1", r.e1},
                   {"e2", r.e2},
                   {"lagrangian", r.lagrangian},
                   {"sub_converged", r.sub_converged},
                   {"monotone_fallback", r.monotone_fallback},
                   {"multiplier_updated", r.multiplier_updated},
                   {"sub_iterations", r.sub_iterations},
                   {"n_grad", r.n_grad},
                   {"n_sinkhorn", r.n_sinkhorn}});
  }
  return out;
}

}  // namespace prw::report
