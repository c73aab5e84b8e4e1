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

#ifndef PRW_GEOMETRY_HPP_
#define PRW_GEOMETRY_HPP_

#include "prw/types.hpp"

namespace prw {

// A d x k matrix with orthonormal columns.
class StiefelPoint {
 public:
  StiefelPoint() = default;
  // Re-orthonormalizes through the thin QR when ||U^T U - I||_F > 1e-12.
  explicit StiefelPoint(Matrix u);

  const Matrix& matrix() const { return u_; }
  Eigen::Index d() const { return u_.rows(); }
  Eigen::Index k() const { return u_.cols(); }

 private:
  Matrix u_;
};

// A tangent vector at base, i.e. base^T xi + xi^T base = 0.
struct TangentVector {
  Matrix xi;
  StiefelPoint base;
};

double orthonormality_error(const Matrix& u);

// G - U sym(U^T G).
Matrix project_tangent(const StiefelPoint& u, const Matrix& g);

// Q factor of the thin QR of U + xi with positive diag(R).
StiefelPoint retract_qr(const StiefelPoint& u, const Matrix& xi);

// Top-k eigenvectors of a symmetric matrix, eigenvalues descending, each
// column's first nonzero entry positive. Exact ties keep index order.
StiefelPoint top_k_eigvecs(const Matrix& s, Eigen::Index k);

}  // namespace prw

#endif  // PRW_GEOMETRY_HPP_
