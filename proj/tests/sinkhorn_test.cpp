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

#include "prw/sinkhorn.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "prw/kernels.hpp"
#include "test_support.hpp"

namespace prw {
namespace {

using testing::random_instance;
using testing::random_matrix;
using testing::random_multiplier;
using testing::random_stiefel;

struct Trace {
  std::vector<double> lagr, gap, log_mass;
};

SinkhornResult traced_run(const PrwInstance& inst, const LogKernel& lk,
                          const StiefelPoint& u, const Vector& a0,
                          const Vector& b0, SinkhornMode mode, double theta,
                          Trace& tr) {
  SinkhornOptions opts;
  opts.mode = mode;
  opts.theta = theta;
  opts.observer = [&](std::int64_t it, const Vector& a, const Vector& b,
                      double gap) {
    // Exp mode restarts from the warm start after a fallback.
    if (it == 0) tr = Trace{};
    tr.lagr.push_back(lagrangian(lk, inst.r(), inst.c(), a, b));
    tr.gap.push_back(gap);
    tr.log_mass.push_back(log_zeta_mass(lk, a, b));
  };
  return sinkhorn(inst, lk, u, a0, b0, opts);
}

void expect_lemmas(const Trace& tr, double eta) {
  ASSERT_GE(tr.lagr.size(), 2u);
  for (std::size_t l = 0; l + 1 < tr.lagr.size(); ++l) {
    const double scale = std::max(1.0, std::abs(tr.lagr[l]));
    const double decrease =
        0.5 * eta * (tr.gap[l] * tr.gap[l] + tr.gap[l + 1] * tr.gap[l + 1]);
    EXPECT_LE(tr.lagr[l + 1] - tr.lagr[l] + decrease, 1e-9 * scale)
        << "iteration " << l;
    if (l >= 1) EXPECT_LE(tr.gap[l + 1], tr.gap[l] + 1e-12) << "iteration " << l;
    if (l >= 1) EXPECT_NEAR(tr.log_mass[l], 0.0, 1e-10) << "iteration " << l;
  }
}

TEST(SinkhornTest, SinglePoint) {
  Rng rng(1);
  const PrwInstance inst = PrwInstance::create(
      random_matrix(3, 1, rng), random_matrix(3, 1, rng), Vector::Ones(1),
      Vector::Ones(1), 1);
  const StiefelPoint u(Matrix::Identity(3, 1));
  for (auto mode : {SinkhornMode::kExp, SinkhornMode::kLog}) {
    SinkhornOptions opts;
    opts.mode = mode;
    opts.theta = 1e-12;
    const auto res = sinkhorn(inst, MultiplierState::ones(1, 1), 0.5, u,
                              Vector::Constant(1, 3.0), Vector::Zero(1), opts);
    EXPECT_EQ(res.iterations, 1);
    EXPECT_NEAR(res.x.plan(0, 0), 1.0, 1e-15);
    EXPECT_NEAR(res.x.row_gap, 0.0, 1e-15);
  }
}

TEST(SinkhornTest, ConstantCostGivesUniformPlan) {
  const Eigen::Index n = 4, m = 6;
  const Matrix x = Matrix::Zero(2, n);
  const Matrix y = Matrix::Ones(2, m);
  const PrwInstance inst =
      PrwInstance::create(x, y, Vector::Constant(n, 1.0 / n),
                          Vector::Constant(m, 1.0 / m), 1);
  Rng rng(2);
  const StiefelPoint u = random_stiefel(2, 1, rng);
  for (auto mode : {SinkhornMode::kExp, SinkhornMode::kLog}) {
    SinkhornOptions opts;
    opts.mode = mode;
    opts.theta = 2.0;
    const auto res = sinkhorn(inst, MultiplierState::ones(n, m), 0.3, u,
                              random_matrix(n, 1, rng),
                              random_matrix(m, 1, rng), opts);
    EXPECT_EQ(res.iterations, 1);
    EXPECT_LE((res.x.plan.array() - 1.0 / (n * m)).abs().maxCoeff(), 1e-15);
  }
}

// Entropic objective on the one-parameter 2x2 transport polytope,
// minimized by ternary search (strictly convex).
TEST(SinkhornTest, TwoByTwoMatchesEntropicMinimizer) {
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const PrwInstance inst = random_instance(2, 2, 3, 2, 100 + trial);
    const StiefelPoint u = random_stiefel(3, 2, rng);
    const auto mult = random_multiplier(2, 2, 1.0, rng);
    const double eta = 1.0;
    const RowMatrix cu = projected_cost(inst, u);
    const RowMatrix w = cu - eta * mult.log_kappa();
    const double r1 = inst.r()(0), c1 = inst.c()(0);
    auto plan_at = [&](double t) {
      RowMatrix p(2, 2);
      p << t, r1 - t, c1 - t, 1.0 - r1 - c1 + t;
      return p;
    };
    auto h = [&](double t) {
      const RowMatrix p = plan_at(t);
      double v = 0.0;
      for (int i = 0; i < 4; ++i) {
        const double pi = p.data()[i];
        v += w.data()[i] * pi + eta * (pi > 0.0 ? pi * std::log(pi) : 0.0);
      }
      return v;
    };
    double lo = std::max(0.0, r1 + c1 - 1.0), hi = std::min(r1, c1);
    for (int s = 0; s < 200; ++s) {
      const double a = lo + (hi - lo) / 3.0, b = hi - (hi - lo) / 3.0;
      if (h(a) < h(b)) {
        hi = b;
      } else {
        lo = a;
      }
    }
    const RowMatrix want = plan_at(0.5 * (lo + hi));
    SinkhornOptions opts;
    opts.theta = 1e-14;
    opts.mode = SinkhornMode::kLog;
    const auto res =
        sinkhorn(inst, mult, eta, u, Vector::Zero(2), Vector::Zero(2), opts);
    EXPECT_LE((res.x.plan - want).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(SinkhornTest, LemmasHoldAlongIterates) {
  Rng rng(4);
  for (int trial = 0; trial < 12; ++trial) {
    const Eigen::Index n = 3 + trial, m = 2 + 2 * trial;
    const PrwInstance inst = random_instance(n, m, 4, 2, 200 + trial);
    const StiefelPoint u = random_stiefel(4, 2, rng);
    const auto mult = random_multiplier(n, m, 1.0, rng);
    const double eta = rng.uniform(0.1, 5.0);
    const LogKernel lk = make_log_kernel(inst, mult, eta, u);
    const Vector a0 = random_matrix(n, 1, rng);
    const Vector b0 = random_matrix(m, 1, rng);
    for (auto mode : {SinkhornMode::kExp, SinkhornMode::kLog}) {
      Trace tr;
      const auto res = traced_run(inst, lk, u, a0, b0, mode, 1e-11, tr);
      expect_lemmas(tr, eta);
      EXPECT_NEAR(res.log_mass, 0.0, 1e-10);
      EXPECT_LE(res.x.row_gap, 1e-11 * 1.0001);
      EXPECT_LE(res.x.col_gap, 1e-12);
      EXPECT_NEAR(res.x.plan.sum(), 1.0, 1e-13);
    }
  }
}

TEST(SinkhornTest, WarmStartRowGapIsReported) {
  const PrwInstance inst = random_instance(5, 4, 3, 1, 5);
  Rng rng(5);
  const StiefelPoint u = random_stiefel(3, 1, rng);
  const LogKernel lk = make_log_kernel(inst, MultiplierState::ones(5, 4), 0.7, u);
  const Vector a0 = random_matrix(5, 1, rng);
  const Vector b0 = random_matrix(4, 1, rng);
  const RowMatrix p0 = plan_from_duals(lk, a0, b0);
  const double want = (p0.rowwise().sum() - inst.r()).lpNorm<1>();
  for (auto mode : {SinkhornMode::kExp, SinkhornMode::kLog}) {
    Trace tr;
    traced_run(inst, lk, u, a0, b0, mode, 1e-6, tr);
    EXPECT_NEAR(tr.gap.front(), want, 1e-14);
  }
}

TEST(SinkhornTest, ExpAndLogAgree) {
  Rng rng(6);
  for (int trial = 0; trial < 6; ++trial) {
    const PrwInstance inst = random_instance(20, 15, 5, 2, 300 + trial);
    const StiefelPoint u = random_stiefel(5, 2, rng);
    const auto mult = random_multiplier(20, 15, 0.5, rng);
    const double eta = rng.uniform(0.5, 3.0);
    SinkhornOptions opts;
    opts.theta = 1e-13;
    opts.mode = SinkhornMode::kExp;
    const auto e = sinkhorn(inst, mult, eta, u, Vector::Zero(20),
                            Vector::Zero(15), opts);
    opts.mode = SinkhornMode::kLog;
    const auto l = sinkhorn(inst, mult, eta, u, Vector::Zero(20),
                            Vector::Zero(15), opts);
    EXPECT_EQ(e.mode_used, SinkhornMode::kExp);
    EXPECT_FALSE(e.fell_back);
    EXPECT_LE((e.x.plan - l.x.plan).lpNorm<1>(), 1e-8);
    EXPECT_NEAR(lagrangian(make_log_kernel(inst, mult, eta, u), inst.r(),
                           inst.c(), e.x.alpha, e.x.beta),
                lagrangian(make_log_kernel(inst, mult, eta, u), inst.r(),
                           inst.c(), l.x.alpha, l.x.beta),
                1e-10);
  }
}

TEST(SinkhornTest, ExpFallsBackToLogOnUnderflow) {
  const PrwInstance inst = random_instance(30, 30, 4, 2, 7);
  Rng rng(7);
  const StiefelPoint u = random_stiefel(4, 2, rng);
  const auto mult = MultiplierState::ones(30, 30);
  const double eta = 1e-4;
  SinkhornOptions opts;
  opts.theta = 1e-8;
  opts.mode = SinkhornMode::kExp;
  const auto e =
      sinkhorn(inst, mult, eta, u, Vector::Zero(30), Vector::Zero(30), opts);
  EXPECT_TRUE(e.fell_back);
  EXPECT_EQ(e.mode_used, SinkhornMode::kLog);
  EXPECT_GT(e.log_iterations, 0);
  opts.mode = SinkhornMode::kLog;
  const auto l =
      sinkhorn(inst, mult, eta, u, Vector::Zero(30), Vector::Zero(30), opts);
  EXPECT_EQ(e.log_iterations, l.iterations);
  EXPECT_LE((e.x.plan - l.x.plan).lpNorm<1>(), 1e-12);
  EXPECT_LE(l.x.row_gap, 1e-8);
}

TEST(SinkhornTest, LogModeSurvivesUnderflowingColumns) {
  const PrwInstance inst = random_instance(25, 20, 6, 3, 8);
  Rng rng(8);
  const StiefelPoint u = random_stiefel(6, 3, rng);
  const double eta = 1e-3;
  const LogKernel lk =
      make_log_kernel(inst, MultiplierState::ones(25, 20), eta, u);
  // A warm start far from the fixed point drives column masses below 1e-300.
  Vector b0 = Vector::Zero(20);
  b0(0) = -5.0;
  Trace tr;
  const auto res = traced_run(inst, lk, u, Vector::Zero(25), b0,
                              SinkhornMode::kLog, 1e-9, tr);
  EXPECT_TRUE(res.x.alpha.allFinite());
  EXPECT_LE(res.x.row_gap, 1e-9 * 1.0001);
  expect_lemmas(tr, eta);
}

TEST(SinkhornTest, ThetaAtLeastTwoRunsOneIteration) {
  const PrwInstance inst = random_instance(6, 5, 3, 2, 9);
  Rng rng(9);
  const StiefelPoint u = random_stiefel(3, 2, rng);
  for (auto mode : {SinkhornMode::kExp, SinkhornMode::kLog}) {
    SinkhornOptions opts;
    opts.mode = mode;
    opts.theta = 2.0;
    const auto res = sinkhorn(inst, MultiplierState::ones(6, 5), 0.2, u,
                              Vector::Zero(6), Vector::Zero(5), opts);
    EXPECT_EQ(res.iterations, 1);
    EXPECT_LE(res.x.col_gap, 1e-14);
  }
}

TEST(SinkhornTest, MaxItersIsFlagged) {
  const PrwInstance inst = random_instance(10, 10, 3, 2, 10);
  Rng rng(10);
  const StiefelPoint u = random_stiefel(3, 2, rng);
  for (auto mode : {SinkhornMode::kExp, SinkhornMode::kLog}) {
    SinkhornOptions opts;
    opts.mode = mode;
    opts.theta = 1e-300;
    opts.max_iters = 3;
    const auto res = sinkhorn(inst, MultiplierState::ones(10, 10), 0.05, u,
                              Vector::Zero(10), Vector::Zero(10), opts);
    EXPECT_TRUE(res.hit_max_iters);
    EXPECT_EQ(res.iterations, 3);
  }
}

TEST(SinkhornTest, RejectsBadArguments) {
  const PrwInstance inst = random_instance(4, 3, 2, 1, 11);
  const StiefelPoint u(Matrix::Identity(2, 1));
  const auto mult = MultiplierState::ones(4, 3);
  SinkhornOptions opts;
  EXPECT_THROW(sinkhorn(inst, mult, 1.0, u, Vector::Zero(3), Vector::Zero(3),
                        opts),
               InvalidInput);
  Vector bad = Vector::Zero(4);
  bad(1) = std::nan("");
  EXPECT_THROW(sinkhorn(inst, mult, 1.0, u, bad, Vector::Zero(3), opts),
               InvalidInput);
  opts.theta = 0.0;
  EXPECT_THROW(sinkhorn(inst, mult, 1.0, u, Vector::Zero(4), Vector::Zero(3),
                        opts),
               InvalidInput);
}

TEST(SinkhornTest, BackendsAgree) {
  if (!kernels::backend_supported(kernels::Backend::kAvx2)) {
    GTEST_SKIP() << "AVX2 not available";
  }
  const PrwInstance inst = random_instance(37, 29, 5, 2, 12);
  Rng rng(12);
  const StiefelPoint u = random_stiefel(5, 2, rng);
  const auto mult = random_multiplier(37, 29, 0.5, rng);
  const auto before = kernels::active_backend();
  for (auto mode : {SinkhornMode::kExp, SinkhornMode::kLog}) {
    SinkhornOptions opts;
    opts.mode = mode;
    opts.theta = 1e-10;
    kernels::set_backend(kernels::Backend::kScalar);
    const auto s = sinkhorn(inst, mult, 0.4, u, Vector::Zero(37),
                            Vector::Zero(29), opts);
    kernels::set_backend(kernels::Backend::kAvx2);
    const auto v = sinkhorn(inst, mult, 0.4, u, Vector::Zero(37),
                            Vector::Zero(29), opts);
    EXPECT_LE((s.x.plan - v.x.plan).lpNorm<1>(), 1e-11);
    EXPECT_LE(std::abs(s.iterations - v.iterations), 1);
  }
  kernels::set_backend(before);
}

}  // namespace
}  // namespace prw
