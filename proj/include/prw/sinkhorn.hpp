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

#ifndef PRW_SINKHORN_HPP_
#define PRW_SINKHORN_HPP_

#include <cstdint>
#include <functional>

#include "prw/transport.hpp"

namespace prw {

enum class SinkhornMode { kExp, kLog };

const char* mode_name(SinkhornMode m);

// Called once per iterate, starting with the warm start (iteration 0).
// row_gap is ||pi 1 - r||_1 of the normalized plan of (alpha, beta).
using SinkhornObserver =
    std::function<void(std::int64_t iteration, const Vector& alpha,
                       const Vector& beta, double row_gap)>;

struct SinkhornOptions {
  SinkhornMode mode = SinkhornMode::kExp;
  // Stop once ||pi 1 - r||_1 <= theta after at least one iteration. Values
  // >= 2 perform exactly one iteration.
  double theta = 1.0;
  std::int64_t max_iters = 1'000'000;
  SinkhornObserver observer;
};

struct SinkhornResult {
  DualIterate x;
  double log_mass = 0.0;
  std::int64_t iterations = 0;
  std::int64_t exp_iterations = 0;
  std::int64_t log_iterations = 0;
  SinkhornMode mode_used = SinkhornMode::kExp;
  // Exp mode hit a zero or non-finite scaling and restarted in log mode.
  bool fell_back = false;
  bool hit_max_iters = false;
};

// Alternating exact minimization of the Lagrangian in alpha then beta at a
// fixed U, warm-started from (alpha0, beta0).
SinkhornResult sinkhorn(const PrwInstance& inst, const LogKernel& lk,
                        const StiefelPoint& u, const Vector& alpha0,
                        const Vector& beta0, const SinkhornOptions& opts);

SinkhornResult sinkhorn(const PrwInstance& inst, const MultiplierState& mult,
                        double eta, const StiefelPoint& u,
                        const Vector& alpha0, const Vector& beta0,
                        const SinkhornOptions& opts);

}  // namespace prw

#endif  // PRW_SINKHORN_HPP_
