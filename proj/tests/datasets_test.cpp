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

#include <cmath>
#include <fstream>
#include <functional>
#include <string>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "prw/rng.hpp"

namespace prw {
namespace {

std::string temp_file(const std::string& name, const std::string& body) {
  const std::string path = ::testing::TempDir() + "prw_datasets_" + name;
  std::ofstream(path) << body;
  return path;
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const InvalidInput& e) {
    return e.what();
  }
  return "";
}

TEST(HypercubeTest, Deterministic) {
  const PrwInstance a = fragmented_hypercube({30, 5, 2, 2}, 42);
  const PrwInstance b = fragmented_hypercube({30, 5, 2, 2}, 42);
  const PrwInstance c = fragmented_hypercube({30, 5, 2, 2}, 43);
  EXPECT_EQ(a.x(), b.x());
  EXPECT_EQ(a.y(), b.y());
  EXPECT_NE(a.x(), c.x());
}

// Regenerates the raw stream and applies y -> y + 2 sign(y) by hand.
TEST(HypercubeTest, MatchesStreamAndPushforward) {
  const HypercubeSpec spec{25, 6, 3, 2};
  const PrwInstance inst = fragmented_hypercube(spec, 9);
  Rng rng(9);
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    for (Eigen::Index t = 0; t < spec.d; ++t) {
      EXPECT_EQ(inst.x()(t, i), -1.0 + 2.0 * rng.uniform());
    }
  }
  double shift = 0.0;
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    for (Eigen::Index t = 0; t < spec.d; ++t) {
      const double raw = -1.0 + 2.0 * rng.uniform();
      const double want = t < spec.kstar ? raw + 2.0 * ((raw > 0) - (raw < 0))
                                         : raw;
      EXPECT_EQ(inst.y()(t, i), want);
      if (t < spec.kstar) {
        EXPECT_GT(std::abs(want), 1.0);
        EXPECT_LT(std::abs(want), 3.0);
      }
      shift += (want - raw) * (want - raw);
    }
  }
  EXPECT_NEAR(shift / spec.n, 4.0 * spec.kstar, 1e-12);
  EXPECT_LE(inst.x().cwiseAbs().maxCoeff(), 1.0);
  EXPECT_EQ(inst.k(), 2);
  EXPECT_TRUE((inst.r().array() == 1.0 / 25).all());
}

TEST(HypercubeTest, RejectsBadSpec) {
  EXPECT_THROW(fragmented_hypercube({10, 4, 0, 1}, 1), InvalidInput);
  EXPECT_THROW(fragmented_hypercube({10, 4, 5, 1}, 1), InvalidInput);
  EXPECT_THROW(fragmented_hypercube({0, 4, 2, 1}, 1), InvalidInput);
  EXPECT_THROW(fragmented_hypercube({10, 4, 2, 5}, 1), InvalidInput);
}

TEST(CsvTest, SmallFilesWithHeaderGiveUniformInstance) {
  const auto xp = temp_file("x.csv", "a,b\n1,2\n3,4\n");
  const auto yp = temp_file("y.csv", "0.5, -1e-3\n\n+2,7\n");
  const PrwInstance inst = load_instance(xp, yp, 1);
  EXPECT_EQ(inst.n(), 2);
  EXPECT_EQ(inst.m(), 2);
  EXPECT_EQ(inst.d(), 2);
  EXPECT_EQ(inst.x()(1, 1), 4.0);
  EXPECT_EQ(inst.y()(1, 0), -1e-3);
  EXPECT_EQ(inst.y()(0, 1), 2.0);
  EXPECT_EQ(inst.r()(0), 0.5);
}

TEST(CsvTest, ErrorsNameRowAndColumn) {
  const auto bad = temp_file("bad.csv", "1,2\n3,4\n5,x\n");
  EXPECT_NE(error_of([&] { load_points_csv(bad); }).find("row 3 column 2"),
            std::string::npos);
  const auto ragged = temp_file("ragged.csv", "1,2\n3\n");
  EXPECT_NE(error_of([&] { load_points_csv(ragged); }).find("row 2 has 1"),
            std::string::npos);
  const auto inf = temp_file("inf.csv", "1,inf\n");
  EXPECT_NE(error_of([&] { load_points_csv(inf); }).find("row 1 column 2"),
            std::string::npos);
  const auto empty = temp_file("empty.csv", "x,y\n");
  EXPECT_NE(error_of([&] { load_points_csv(empty); }).find("no data"),
            std::string::npos);
  EXPECT_THROW(load_points_csv(::testing::TempDir() + "does_not_exist.csv"),
               InvalidInput);
}

TEST(CsvTest, DimensionMismatchRejected) {
  const auto xp = temp_file("x3.csv", "1,2,3\n");
  const auto yp = temp_file("y2.csv", "1,2\n");
  EXPECT_THROW(load_instance(xp, yp, 1), InvalidInput);
}

TEST(CsvTest, WeightsRenormalizedAndPositive) {
  const auto wp = temp_file("w.csv", "weight\n0.5\n1.5\n");
  const Vector w = load_weights_csv(wp);
  ASSERT_EQ(w.size(), 2);
  EXPECT_DOUBLE_EQ(w(0), 0.25);
  EXPECT_DOUBLE_EQ(w(1), 0.75);
  EXPECT_THROW(load_weights_csv(temp_file("w0.csv", "1\n0\n")), InvalidInput);
  EXPECT_THROW(load_weights_csv(temp_file("wn.csv", "1\n-2\n")), InvalidInput);
  EXPECT_THROW(load_weights_csv(temp_file("w2.csv", "1,2\n")), InvalidInput);
  const auto xp = temp_file("xw.csv", "0,0\n1,1\n");
  const PrwInstance inst =
      load_instance(xp, xp, 2, WeightFiles{wp, wp});
  EXPECT_DOUBLE_EQ(inst.c()(1), 0.75);
}

TEST(CsvTest, RoundTripIsExact) {
  const PrwInstance inst = fragmented_hypercube({20, 4, 2, 2}, 5);
  const std::string dir = ::testing::TempDir();
  write_points_csv(dir + "prw_rt_x.csv", inst.x());
  write_points_csv(dir + "prw_rt_y.csv", inst.y());
  write_weights_csv(dir + "prw_rt_r.csv", inst.r());
  write_weights_csv(dir + "prw_rt_c.csv", inst.c());
  const PrwInstance back =
      load_instance(dir + "prw_rt_x.csv", dir + "prw_rt_y.csv", 2,
                    WeightFiles{dir + "prw_rt_r.csv", dir + "prw_rt_c.csv"});
  EXPECT_EQ(back.x(), inst.x());
  EXPECT_EQ(back.y(), inst.y());
  EXPECT_LE((back.cost() - inst.cost()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((back.r() - inst.r()).cwiseAbs().maxCoeff(), 1e-16);
}

TEST(InitialPointTest, TopEigenspaceOfRoundedRandomPlan) {
  const PrwInstance inst = fragmented_hypercube({100, 20, 2, 2}, 3);
  const auto ones = MultiplierState::ones(100, 100);
  const DualIterate x = initial_point(inst, ones, 1.0, 17);
  Rng rng(17);
  RowMatrix p(100, 100);
  for (Eigen::Index i = 0; i < 100; ++i) {
    for (Eigen::Index j = 0; j < 100; ++j) p(i, j) = rng.uniform();
  }
  const RowMatrix pi0 = round_plan(p / p.sum(), inst.r(), inst.c());
  EXPECT_LE((pi0.rowwise().sum() - inst.r()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((pi0.colwise().sum().transpose() - inst.c()).cwiseAbs().maxCoeff(),
            1e-12);
  const Matrix v = v_pi(inst, pi0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(v);
  const Vector ev = es.eigenvalues();
  const double top2 = ev(ev.size() - 1) + ev(ev.size() - 2);
  const Matrix& u = x.u.matrix();
  EXPECT_NEAR((u.transpose() * v * u).trace(), top2, 1e-8);

  const LogKernel lk = make_log_kernel(inst, ones, 1.0, x.u);
  EXPECT_NEAR(inst.r().dot(x.alpha), inst.c().dot(x.beta), 1e-12);
  EXPECT_NEAR(log_zeta_mass(lk, x.alpha, x.beta), 0.0, 1e-12);
  EXPECT_TRUE((x.alpha.array() == x.alpha(0)).all());
  const auto g = marginal_gaps(x.plan, inst.r(), inst.c());
  EXPECT_EQ(g.row, x.row_gap);
  EXPECT_EQ(g.col, x.col_gap);

  const DualIterate again = initial_point(inst, ones, 1.0, 17);
  EXPECT_EQ(again.u.matrix(), x.u.matrix());
  EXPECT_EQ(again.alpha, x.alpha);
}

}  // namespace
}  // namespace prw
