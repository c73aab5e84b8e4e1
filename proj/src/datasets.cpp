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

#include "prw/datasets.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string_view>
#include <vector>

#include "prw/rng.hpp"

namespace prw {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(std::string_view tok, double& out) {
  tok = trim(tok);
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  if (tok.empty()) return false;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

// Rows of numbers; a first line with any non-numeric field is a header.
std::vector<std::vector<double>> read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput(path + ": cannot open");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    std::vector<double> row(fields.size());
    bool numeric = true;
    std::size_t bad = 0;
    for (std::size_t j = 0; j < fields.size() && numeric; ++j) {
      if (!parse_double(fields[j], row[j])) {
        numeric = false;
        bad = j;
      }
    }
    if (!numeric) {
      if (rows.empty() && lineno == 1) continue;
      throw InvalidInput(path + ": row " + std::to_string(lineno) +
                         " column " + std::to_string(bad + 1) + ": '" +
                         std::string(trim(fields[bad])) +
                         "' is not a number");
    }
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (!std::isfinite(row[j])) {
        throw InvalidInput(path + ": row " + std::to_string(lineno) +
                           " column " + std::to_string(j + 1) +
                           ": non-finite value");
      }
    }
    if (rows.empty()) {
      width = row.size();
    } else if (row.size() != width) {
      throw InvalidInput(path + ": row " + std::to_string(lineno) + " has " +
                         std::to_string(row.size()) + " columns, expected " +
                         std::to_string(width));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidInput(path + ": no data rows");
  return rows;
}

}  // namespace

PrwInstance fragmented_hypercube(const HypercubeSpec& spec,
                                 std::uint64_t seed) {
  if (spec.n < 1 || spec.d < 1) throw InvalidInput("hypercube: n, d >= 1");
  if (spec.kstar < 1 || spec.kstar > spec.d) {
    throw InvalidInput("hypercube: kstar must lie in [1, d]");
  }
  Rng rng(seed);
  Matrix x(spec.d, spec.n);
  Matrix y(spec.d, spec.n);
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    for (Eigen::Index t = 0; t < spec.d; ++t) x(t, i) = rng.uniform(-1.0, 1.0);
  }
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    for (Eigen::Index t = 0; t < spec.d; ++t) {
      double v = rng.uniform(-1.0, 1.0);
      if (t < spec.kstar) v += v > 0 ? 2.0 : (v < 0 ? -2.0 : 0.0);
      y(t, i) = v;
    }
  }
  const Vector w = Vector::Constant(spec.n, 1.0 / static_cast<double>(spec.n));
  return PrwInstance::create(std::move(x), std::move(y), w, w, spec.k);
}

Matrix load_points_csv(const std::string& path) {
  const auto rows = read_table(path);
  Matrix out(static_cast<Eigen::Index>(rows.front().size()),
             static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t t = 0; t < rows[i].size(); ++t) {
      out(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) =
          rows[i][t];
    }
  }
  return out;
}

Vector load_weights_csv(const std::string& path) {
  const auto rows = read_table(path);
  if (rows.front().size() != 1) {
    throw InvalidInput(path + ": weights need exactly one column");
  }
  Vector w(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!(rows[i][0] > 0.0)) {
      throw InvalidInput(path + ": weight on data row " +
                         std::to_string(i + 1) + " is not strictly positive");
    }
    w(static_cast<Eigen::Index>(i)) = rows[i][0];
  }
  return w / w.sum();
}

void write_points_csv(const std::string& path, const Matrix& points) {
  std::ofstream out(path);
  if (!out) throw InvalidInput(path + ": cannot write");
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    for (Eigen::Index t = 0; t < points.rows(); ++t) {
      if (t > 0) out << ',';
      out << points(t, i);
    }
    out << '\n';
  }
}

void write_weights_csv(const std::string& path, const Vector& w) {
  std::ofstream out(path);
  if (!out) throw InvalidInput(path + ": cannot write");
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < w.size(); ++i) out << w(i) << '\n';
}

PrwInstance load_instance(const std::string& x_path, const std::string& y_path,
                          Eigen::Index k,
                          const std::optional<WeightFiles>& weights) {
  Matrix x = load_points_csv(x_path);
  Matrix y = load_points_csv(y_path);
  Vector r, c;
  if (weights) {
    r = load_weights_csv(weights->r);
    c = load_weights_csv(weights->c);
  } else {
    r = Vector::Constant(x.cols(), 1.0 / static_cast<double>(x.cols()));
    c = Vector::Constant(y.cols(), 1.0 / static_cast<double>(y.cols()));
  }
  return PrwInstance::create(std::move(x), std::move(y), std::move(r),
                             std::move(c), k);
}

DualIterate initial_point(const PrwInstance& inst, const MultiplierState& mult,
                          double eta, std::uint64_t seed) {
  Rng rng(seed);
  RowMatrix p(inst.n(), inst.m());
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.cols(); ++j) p(i, j) = rng.uniform();
  }
  p /= p.sum();
  const RowMatrix pi0 = round_plan(p, inst.r(), inst.c());
  DualIterate x;
  x.u = top_k_eigvecs(v_pi(inst, pi0), inst.k());
  x.alpha = Vector::Zero(inst.n());
  x.beta = Vector::Zero(inst.m());
  const LogKernel lk = make_log_kernel(inst, mult, eta, x.u);
  shift_normalize(lk, inst.r(), inst.c(), x.alpha, x.beta);
  x.plan = plan_from_duals(lk, x.alpha, x.beta);
  const MarginalGaps g = marginal_gaps(x.plan, inst.r(), inst.c());
  x.row_gap = g.row;
  x.col_gap = g.col;
  return x;
}

}  // namespace prw
