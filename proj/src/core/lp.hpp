// Copyright 2026 The RiskEngine Authors
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

#ifndef RISKENGINE_CORE_LP_HPP_
#define RISKENGINE_CORE_LP_HPP_

#include <string>

#include "core/scenario.hpp"

namespace riskengine {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };
enum class LpSense { kMinimize, kMaximize };

const char* ToString(LpStatus s);

// Dense LP: optimize c.x subject to A_eq x = b_eq, A_ub x <= b_ub,
// lower <= x <= upper. Empty lower/upper mean [0, +inf).
struct LpProblem {
  LpSense sense = LpSense::kMinimize;
  Vector c;
  Matrix A_eq;
  Vector b_eq;
  Matrix A_ub;
  Vector b_ub;
  Vector lower;
  Vector upper;

  int num_vars() const { return static_cast<int>(c.size()); }
};

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  Vector x;
  double objective = 0.0;
  // Duals satisfy A_eq' y_eq + A_ub' y_ub + reduced = c. For minimization
  // y_ub <= 0, for maximization y_ub >= 0.
  Vector y_eq;
  Vector y_ub;
  Vector reduced;
  // Farkas certificate when infeasible. Every constraint is read as a row
  // a.x <= b (lower bounds as -x_j <= -l_j); multipliers on inequality rows
  // are nonnegative, the combination of rows vanishes and the combined rhs
  // is negative.
  Vector farkas_eq;
  Vector farkas_ub;
  Vector farkas_lower;
  Vector farkas_upper;
  int pivots = 0;
  int phase_one_pivots = 0;
};

struct LpCheck {
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double complementarity = 0.0;
  double gap = 0.0;
  double farkas_combination = 0.0;
  double farkas_rhs = 0.0;
};

LpSolution SolveLp(const LpProblem& problem);

// Per-thread running totals over SolveLp calls.
struct LpStats {
  long long solves = 0;
  long long pivots = 0;
};
LpStats& ThreadLpStats();

// Recomputes residuals of the returned certificate from the raw data.
LpCheck CheckLpSolution(const LpProblem& problem, const LpSolution& sol);

}  // namespace riskengine

#endif  // RISKENGINE_CORE_LP_HPP_
