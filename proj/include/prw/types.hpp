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

#ifndef PRW_TYPES_HPP_
#define PRW_TYPES_HPP_

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace prw {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
// n x m transport-sized matrices are row-major so kernels can stream rows.
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Thrown when inputs violate a documented precondition.
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what)
      : std::invalid_argument(what) {}
};

// Thrown when the thin QR of U + xi is numerically rank deficient.
class DegenerateRetraction : public std::runtime_error {
 public:
  explicit DegenerateRetraction(const std::string& what)
      : std::runtime_error(what) {}
};

// Thrown when a solver produces a non-finite objective.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace prw

#endif  // PRW_TYPES_HPP_
