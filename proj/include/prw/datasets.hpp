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

#ifndef PRW_DATASETS_HPP_
#define PRW_DATASETS_HPP_

#include <cstdint>
#include <optional>
#include <string>

#include "prw/transport.hpp"

namespace prw {

struct HypercubeSpec {
  Eigen::Index n = 100;
  Eigen::Index d = 20;
  Eigen::Index kstar = 2;
  // Target subspace dimension of the returned instance.
  Eigen::Index k = 2;
};

// X uniform on [-1, 1]^d. Y is a second uniform sample pushed through
// y -> y + 2 sign(y) on its first kstar coordinates. Uniform weights.
// X is drawn first (point by point), then Y, from one Rng(seed).
PrwInstance fragmented_hypercube(const HypercubeSpec& spec,
                                 std::uint64_t seed);

// One point per row, comma separated, optional non-numeric header row.
// Returns a d x n matrix. Errors name the offending row and column.
Matrix load_points_csv(const std::string& path);
// One strictly positive weight per row, renormalized to sum to one.
Vector load_weights_csv(const std::string& path);
void write_points_csv(const std::string& path, const Matrix& points);
void write_weights_csv(const std::string& path, const Vector& w);

struct WeightFiles {
  std::string r;
  std::string c;
};
// Uniform weights when no weight files are given.
PrwInstance load_instance(const std::string& x_path, const std::string& y_path,
                          Eigen::Index k,
                          const std::optional<WeightFiles>& weights = {});

// Seeded starting point: pi0 = round(P / sum P) with P uniform(0,1) entries,
// U0 = top-k eigenvectors of V_pi0, duals zero then shift-normalized under
// (kappa, eta). The plan and gaps describe those duals at U0.
DualIterate initial_point(const PrwInstance& inst, const MultiplierState& mult,
                          double eta, std::uint64_t seed);

}  // namespace prw

#endif  // PRW_DATASETS_HPP_
