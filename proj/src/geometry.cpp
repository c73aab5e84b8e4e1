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

#include "prw/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace prw {
namespace {

void fix_column_signs(Matrix& q) {
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const double scale = q.col(j).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
      if (std::abs(q(i, j)) > 1e-12 * scale) {
        if (q(i, j) < 0) q.col(j) = -q.col(j);
        break;
      }
    }
  }
}

Matrix thin_q(const Matrix& a) {
  const Eigen::Index d = a.rows();
  const Eigen::Index k = a.cols();
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(d, k);
  const Matrix& packed = qr.matrixQR();
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  for (Eigen::Index j = 0; j < k; ++j) {
    const double rjj = packed(j, j);
    if (!std::isfinite(rjj) || std::abs(rjj) <= 1e-13 * scale) {
      throw DegenerateRetraction("thin QR is rank deficient at column " +
                                 std::to_string(j));
    }
    if (rjj < 0) q.col(j) = -q.col(j);
  }
  return q;
}

}  // namespace

StiefelPoint::StiefelPoint(Matrix u) : u_(std::move(u)) {
  if (u_.cols() < 1 || u_.cols() > u_.rows()) {
    throw InvalidInput("StiefelPoint needs 1 <= k <= d, got d=" +
                       std::to_string(u_.rows()) +
                       " k=" + std::to_string(u_.cols()));
  }
  if (!u_.allFinite()) throw InvalidInput("StiefelPoint has non-finite entries");
  if (orthonormality_error(u_) > 1e-12) u_ = thin_q(u_);
}

double orthonormality_error(const Matrix& u) {
  return (u.transpose() * u - Matrix::Identity(u.cols(), u.cols())).norm();
}

Matrix project_tangent(const StiefelPoint& u, const Matrix& g) {
  const Matrix& um = u.matrix();
  if (g.rows() != um.rows() || g.cols() != um.cols()) {
    throw InvalidInput("project_tangent: shape mismatch");
  }
  const Matrix utg = um.transpose() * g;
  const Matrix sym = 0.5 * (utg + utg.transpose());
  return g - um * sym;
}

StiefelPoint retract_qr(const StiefelPoint& u, const Matrix& xi) {
  const Matrix& um = u.matrix();
  if (xi.rows() != um.rows() || xi.cols() != um.cols()) {
    throw InvalidInput("retract_qr: shape mismatch");
  }
  if (!xi.allFinite()) throw DegenerateRetraction("retract_qr: non-finite step");
  if ((xi.array() == 0.0).all()) return u;
  return StiefelPoint(thin_q(um + xi));
}

StiefelPoint top_k_eigvecs(const Matrix& s, Eigen::Index k) {
  if (s.rows() != s.cols()) throw InvalidInput("top_k_eigvecs: not square");
  if (k < 1 || k > s.rows()) {
    throw InvalidInput("top_k_eigvecs: k out of range");
  }
  const Matrix sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success) {
    throw SolverError("top_k_eigvecs: eigensolver failed");
  }
  const Vector& w = es.eigenvalues();
  std::vector<Eigen::Index> order(w.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return w(a) > w(b); });
  Matrix q(s.rows(), k);
  for (Eigen::Index j = 0; j < k; ++j) q.col(j) = es.eigenvectors().col(order[j]);
  fix_column_signs(q);
  return StiefelPoint(std::move(q));
}

}  // namespace prw
