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

#ifndef RISKENGINE_CORE_LP_BUILDER_HPP_
#define RISKENGINE_CORE_LP_BUILDER_HPP_

#include <limits>
#include <utility>
#include <vector>

#include "core/lp.hpp"

namespace riskengine {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct LinExpr {
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;

  LinExpr() = default;
  explicit LinExpr(double c) : constant(c) {}
  static LinExpr Var(int j, double coef = 1.0) {
    LinExpr e;
    e.terms.emplace_back(j, coef);
    return e;
  }
  LinExpr& Add(int j, double coef) {
    if (coef != 0.0) terms.emplace_back(j, coef);
    return *this;
  }
  LinExpr& Add(const LinExpr& o, double scale = 1.0) {
    for (const auto& [j, c] : o.terms) Add(j, c * scale);
    constant += o.constant * scale;
    return *this;
  }
  double Evaluate(const Vector& x) const {
    double s = constant;
    for (const auto& [j, c] : terms) s += c * x[j];
    return s;
  }
};

// Sum_i coef_i * exprs_i.
LinExpr Combine(const std::vector<LinExpr>& exprs, const Vector& coef);

struct RowRef {
  bool equality = true;
  int index = -1;
  double sign = 1.0;
};

class LpBuilder {
 public:
  int AddVar(double lo = 0.0, double hi = kInfinity);
  int AddVars(int count, double lo = 0.0, double hi = kInfinity);
  int num_vars() const { return static_cast<int>(lower_.size()); }

  RowRef AddEq(const LinExpr& e, double rhs);
  RowRef AddLe(const LinExpr& e, double rhs);
  RowRef AddGe(const LinExpr& e, double rhs);
  void SetObjective(const LinExpr& e, LpSense sense);
  double objective_constant() const { return objective_.constant; }

  LpProblem Build() const;

  // Dual multiplier of a row in the orientation it was written.
  static double Dual(const LpSolution& sol, const RowRef& row);

 private:
  struct Row {
    LinExpr expr;
    double rhs;
  };
  std::vector<double> lower_, upper_;
  std::vector<Row> eq_, ub_;
  LinExpr objective_;
  LpSense sense_ = LpSense::kMinimize;
};

// Builds, solves, and adds back the objective constant.
LpSolution SolveBuilt(const LpBuilder& b);

// Range of a row's dual multiplier over all optimal dual solutions.
struct DualInterval {
  double lo = 0.0;
  double hi = 0.0;
};
DualInterval DualRange(const LpProblem& p, const LpSolution& sol, const RowRef& row);

}  // namespace riskengine

#endif  // RISKENGINE_CORE_LP_BUILDER_HPP_
