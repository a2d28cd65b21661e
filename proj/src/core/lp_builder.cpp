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

#include "core/lp_builder.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace riskengine {

LinExpr Combine(const std::vector<LinExpr>& exprs, const Vector& coef) {
  LinExpr out;
  for (size_t i = 0; i < exprs.size(); ++i) {
    if (coef[i] != 0.0) out.Add(exprs[i], coef[i]);
  }
  return out;
}

int LpBuilder::AddVar(double lo, double hi) {
  lower_.push_back(lo);
  upper_.push_back(hi);
  return static_cast<int>(lower_.size()) - 1;
}

int LpBuilder::AddVars(int count, double lo, double hi) {
  int first = num_vars();
  for (int k = 0; k < count; ++k) AddVar(lo, hi);
  return first;
}

RowRef LpBuilder::AddEq(const LinExpr& e, double rhs) {
  eq_.push_back({e, rhs - e.constant});
  return {true, static_cast<int>(eq_.size()) - 1, 1.0};
}

RowRef LpBuilder::AddLe(const LinExpr& e, double rhs) {
  ub_.push_back({e, rhs - e.constant});
  return {false, static_cast<int>(ub_.size()) - 1, 1.0};
}

RowRef LpBuilder::AddGe(const LinExpr& e, double rhs) {
  LinExpr neg;
  neg.Add(e, -1.0);
  ub_.push_back({neg, -(rhs - e.constant)});
  return {false, static_cast<int>(ub_.size()) - 1, -1.0};
}

void LpBuilder::SetObjective(const LinExpr& e, LpSense sense) {
  objective_ = e;
  sense_ = sense;
}

LpProblem LpBuilder::Build() const {
  const int n = num_vars();
  LpProblem p;
  p.sense = sense_;
  p.c = Vector::Zero(n);
  for (const auto& [j, c] : objective_.terms) p.c[j] += c;
  auto fill = [n](const std::vector<Row>& rows, Matrix* a, Vector* b) {
    *a = Matrix::Zero(static_cast<int>(rows.size()), n);
    *b = Vector(static_cast<int>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
      for (const auto& [j, c] : rows[i].expr.terms) {
        if (j < 0 || j >= n) throw StructuralError("lp builder: variable out of range");
        (*a)(static_cast<int>(i), j) += c;
      }
      (*b)[static_cast<int>(i)] = rows[i].rhs;
    }
  };
  fill(eq_, &p.A_eq, &p.b_eq);
  fill(ub_, &p.A_ub, &p.b_ub);
  p.lower = Eigen::Map<const Vector>(lower_.data(), n);
  p.upper = Eigen::Map<const Vector>(upper_.data(), n);
  return p;
}

double LpBuilder::Dual(const LpSolution& sol, const RowRef& row) {
  const Vector& y = row.equality ? sol.y_eq : sol.y_ub;
  return row.sign * y[row.index];
}

LpSolution SolveBuilt(const LpBuilder& b) {
  LpSolution sol = SolveLp(b.Build());
  if (sol.status == LpStatus::kOptimal) sol.objective += b.objective_constant();
  return sol;
}

DualInterval DualRange(const LpProblem& p, const LpSolution& sol, const RowRef& row) {
  if (sol.status != LpStatus::kOptimal) throw ContractError("dual range needs an optimal solution");
  const int n = p.num_vars();
  const int neq = static_cast<int>(p.b_eq.size()), nub = static_cast<int>(p.b_ub.size());
  const double flip = p.sense == LpSense::kMaximize ? -1.0 : 1.0;
  const Vector c = flip * p.c;
  const double opt = c.dot(sol.x);
  Vector lo = p.lower.size() ? p.lower : Vector::Zero(n);
  Vector hi = p.upper.size() ? p.upper : Vector::Constant(n, kInfinity);
  // Dual of the minimisation form: A_eq' y + A_ub' v + r_lo - r_hi = c.
  LpBuilder b;
  int y = b.AddVars(neq, -kInfinity, kInfinity);
  int v = b.AddVars(nub, -kInfinity, 0.0);
  std::vector<int> rlo(n, -1), rhi(n, -1);
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(lo[j])) rlo[j] = b.AddVar();
    if (std::isfinite(hi[j])) rhi[j] = b.AddVar();
  }
  for (int j = 0; j < n; ++j) {
    LinExpr e;
    for (int i = 0; i < neq; ++i) {
      if (p.A_eq(i, j) != 0.0) e.Add(y + i, p.A_eq(i, j));
    }
    for (int i = 0; i < nub; ++i) {
      if (p.A_ub(i, j) != 0.0) e.Add(v + i, p.A_ub(i, j));
    }
    if (rlo[j] >= 0) e.Add(rlo[j], 1.0);
    if (rhi[j] >= 0) e.Add(rhi[j], -1.0);
    b.AddEq(e, c[j]);
  }
  LinExpr obj;
  for (int i = 0; i < neq; ++i) obj.Add(y + i, p.b_eq[i]);
  for (int i = 0; i < nub; ++i) obj.Add(v + i, p.b_ub[i]);
  for (int j = 0; j < n; ++j) {
    if (rlo[j] >= 0) obj.Add(rlo[j], lo[j]);
    if (rhi[j] >= 0) obj.Add(rhi[j], -hi[j]);
  }
  b.AddGe(obj, opt - 1e-9 * (1.0 + std::abs(opt)));
  int target = (row.equality ? y : v) + row.index;
  DualInterval out;
  for (int side = 0; side < 2; ++side) {
    b.SetObjective(LinExpr::Var(target), side == 0 ? LpSense::kMinimize : LpSense::kMaximize);
    LpSolution s = SolveBuilt(b);
    double val;
    if (s.status == LpStatus::kOptimal) {
      val = s.objective;
    } else if (s.status == LpStatus::kUnbounded) {
      val = side == 0 ? -kInfinity : kInfinity;
    } else {
      throw SolverError("dual face empty at the reported optimum");
    }
    (side == 0 ? out.lo : out.hi) = val;
  }
  // Back to the caller's sense and row orientation.
  double a = out.lo * flip * row.sign, z = out.hi * flip * row.sign;
  out.lo = std::min(a, z);
  out.hi = std::max(a, z);
  return out;
}

}  // namespace riskengine
