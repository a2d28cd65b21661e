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

#include "core/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "core/errors.hpp"
#include "core/tolerances.hpp"

namespace riskengine {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Transform { kShift, kFlip, kFree };

class BoundedSimplex {
 public:
  BoundedSimplex(const LpProblem& p, const Vector& cost) : p_(p) { Setup(cost); }

  LpSolution Run();

 private:
  void Setup(const Vector& cost);
  bool Iterate(const Vector& cost, bool phase_one, int* pivots);
  void Price(const Vector& cost);
  void Refactor(const Vector& cost);
  Eigen::PartialPivLU<Matrix> BasisLu() const;
  double PhaseOneValue() const;

  const LpProblem& p_;
  int n_ = 0;       // structural
  int n_eq_ = 0;
  int n_ub_ = 0;
  int rows_ = 0;
  int cols_ = 0;    // structural + slack + artificial
  int art0_ = 0;

  std::vector<Transform> transform_;
  Matrix a_;        // internal constraint matrix
  Vector b_;        // internal rhs
  Vector lo_, hi_;  // internal bounds
  Vector c2_;       // phase-two cost
  Vector c1_;       // phase-one cost
  double offset_ = 0.0;

  Matrix t_;                 // B^{-1} a_
  Vector d_;                 // reduced costs
  std::vector<int> basis_;   // column basic in each row
  std::vector<int> where_;   // row of a basic column, -1 otherwise
  Vector val_;               // value of every column
  bool bland_ = false;
  int degenerate_run_ = 0;
  int since_refactor_ = 0;
};

void BoundedSimplex::Setup(const Vector& cost) {
  n_ = p_.num_vars();
  n_eq_ = static_cast<int>(p_.b_eq.size());
  n_ub_ = static_cast<int>(p_.b_ub.size());
  rows_ = n_eq_ + n_ub_;
  art0_ = n_ + n_ub_;
  cols_ = art0_ + rows_;

  Vector lower = p_.lower.size() ? p_.lower : Vector::Zero(n_);
  Vector upper = p_.upper.size() ? p_.upper : Vector::Constant(n_, kInf);

  Matrix a_orig(rows_, n_);
  if (n_eq_) a_orig.topRows(n_eq_) = p_.A_eq;
  if (n_ub_) a_orig.bottomRows(n_ub_) = p_.A_ub;
  Vector b_orig(rows_);
  if (n_eq_) b_orig.head(n_eq_) = p_.b_eq;
  if (n_ub_) b_orig.tail(n_ub_) = p_.b_ub;

  a_ = Matrix::Zero(rows_, cols_);
  b_ = b_orig;
  lo_ = Vector::Zero(cols_);
  hi_ = Vector::Constant(cols_, kInf);
  c2_ = Vector::Zero(cols_);
  transform_.resize(n_);
  for (int j = 0; j < n_; ++j) {
    if (std::isfinite(lower[j])) {
      transform_[j] = Transform::kShift;
      a_.col(j) = a_orig.col(j);
      b_ -= a_orig.col(j) * lower[j];
      hi_[j] = upper[j] - lower[j];
      c2_[j] = cost[j];
      offset_ += cost[j] * lower[j];
    } else if (std::isfinite(upper[j])) {
      transform_[j] = Transform::kFlip;
      a_.col(j) = -a_orig.col(j);
      b_ -= a_orig.col(j) * upper[j];
      c2_[j] = -cost[j];
      offset_ += cost[j] * upper[j];
    } else {
      transform_[j] = Transform::kFree;
      a_.col(j) = a_orig.col(j);
      lo_[j] = -kInf;
      c2_[j] = cost[j];
    }
  }
  for (int i = 0; i < n_ub_; ++i) a_(n_eq_ + i, n_ + i) = 1.0;
  c1_ = Vector::Zero(cols_);
  val_ = Vector::Zero(cols_);
  basis_.assign(rows_, -1);
  where_.assign(cols_, -1);
  for (int i = 0; i < rows_; ++i) {
    double sigma = b_[i] >= 0.0 ? 1.0 : -1.0;
    a_(i, art0_ + i) = sigma;
    c1_[art0_ + i] = 1.0;
    basis_[i] = art0_ + i;
    where_[art0_ + i] = i;
    val_[art0_ + i] = std::abs(b_[i]);
  }
  t_ = Matrix(rows_, cols_);
  for (int i = 0; i < rows_; ++i) t_.row(i) = a_.row(i) * a_(i, art0_ + i);
}

Eigen::PartialPivLU<Matrix> BoundedSimplex::BasisLu() const {
  Matrix bm(rows_, rows_);
  for (int i = 0; i < rows_; ++i) bm.col(i) = a_.col(basis_[i]);
  return Eigen::PartialPivLU<Matrix>(bm);
}

void BoundedSimplex::Refactor(const Vector& cost) {
  since_refactor_ = 0;
  if (rows_ > 0) {
    auto lu = BasisLu();
    t_ = lu.solve(a_);
    Vector rhs = b_;
    for (int j = 0; j < cols_; ++j) {
      if (where_[j] < 0 && val_[j] != 0.0) rhs -= a_.col(j) * val_[j];
    }
    Vector xb = lu.solve(rhs);
    for (int i = 0; i < rows_; ++i) val_[basis_[i]] = xb[i];
  }
  Price(cost);
}

void BoundedSimplex::Price(const Vector& cost) {
  d_ = cost;
  for (int i = 0; i < rows_; ++i) {
    double cb = cost[basis_[i]];
    if (cb != 0.0) d_ -= cb * t_.row(i).transpose();
  }
}

double BoundedSimplex::PhaseOneValue() const {
  double w = 0.0;
  for (int i = 0; i < rows_; ++i) w += val_[art0_ + i];
  return w;
}

// Returns true on optimality, false on unboundedness.
bool BoundedSimplex::Iterate(const Vector& cost, bool phase_one, int* pivots) {
  const double pivot_tol = tol().pivot;
  const double opt_tol = 1e-9 * (1.0 + cost.cwiseAbs().maxCoeff());
  const int max_pivots = 50 * (rows_ + cols_) + 5000;
  Price(cost);
  bland_ = false;
  degenerate_run_ = 0;
  for (;;) {
    if (*pivots > max_pivots) {
      std::ostringstream os;
      os << "simplex stalled after " << *pivots << " pivots (" << rows_
         << " rows, " << cols_ << " columns)";
      throw SolverError(os.str());
    }
    if (since_refactor_ >= 200) Refactor(cost);
    // Entering column.
    int q = -1;
    double best = 0.0;
    double dir = 0.0;
    for (int j = 0; j < art0_; ++j) {
      if (where_[j] >= 0) continue;
      if (hi_[j] - lo_[j] == 0.0) continue;
      double dj = d_[j];
      double s = 0.0;
      bool at_upper = std::isfinite(hi_[j]) && val_[j] == hi_[j];
      bool is_free = !std::isfinite(lo_[j]);
      if (is_free) {
        if (dj < -opt_tol) s = 1.0;
        else if (dj > opt_tol) s = -1.0;
      } else if (at_upper) {
        if (dj > opt_tol) s = -1.0;
      } else if (dj < -opt_tol) {
        s = 1.0;
      }
      if (s == 0.0) continue;
      if (bland_) {
        q = j;
        dir = s;
        break;
      }
      if (std::abs(dj) > best) {
        best = std::abs(dj);
        q = j;
        dir = s;
      }
    }
    if (q < 0) return true;

    // Ratio test.
    double theta = hi_[q] - lo_[q];  // bound flip
    int leave = -1;
    double leave_alpha = 0.0;
    for (int i = 0; i < rows_; ++i) {
      double alpha = dir * t_(i, q);
      if (std::abs(alpha) <= pivot_tol) continue;
      int bj = basis_[i];
      double limit;
      if (alpha > 0.0) {
        if (!std::isfinite(lo_[bj])) continue;
        limit = (val_[bj] - lo_[bj]) / alpha;
      } else {
        if (!std::isfinite(hi_[bj])) continue;
        limit = (hi_[bj] - val_[bj]) / -alpha;
      }
      if (limit < 0.0) limit = 0.0;
      bool take = false;
      if (limit < theta - 1e-12) {
        take = true;
      } else if (limit <= theta + 1e-12 && leave >= 0) {
        if (bland_) take = bj < basis_[leave];
        else take = std::abs(alpha) > std::abs(leave_alpha);
      } else if (limit <= theta + 1e-12 && leave < 0 && !std::isfinite(theta)) {
        take = true;
      }
      if (take) {
        theta = std::min(limit, theta);
        leave = i;
        leave_alpha = alpha;
      }
    }
    if (!std::isfinite(theta)) {
      if (phase_one) throw SolverError("phase one reported unbounded");
      return false;
    }
    ++*pivots;
    ++since_refactor_;
    if (theta <= 1e-12) {
      if (++degenerate_run_ > 50) bland_ = true;
    } else {
      degenerate_run_ = 0;
      bland_ = false;
    }
    // Move values.
    for (int i = 0; i < rows_; ++i) val_[basis_[i]] -= dir * theta * t_(i, q);
    val_[q] += dir * theta;
    if (leave < 0) {
      val_[q] = dir > 0 ? hi_[q] : lo_[q];
      continue;
    }
    int out = basis_[leave];
    double alpha = dir * t_(leave, q);
    val_[out] = alpha > 0.0 ? lo_[out] : hi_[out];
    // Pivot.
    double piv = t_(leave, q);
    t_.row(leave) /= piv;
    for (int i = 0; i < rows_; ++i) {
      if (i == leave) continue;
      double f = t_(i, q);
      if (f != 0.0) t_.row(i) -= f * t_.row(leave);
    }
    double fq = d_[q];
    if (fq != 0.0) d_ -= fq * t_.row(leave).transpose();
    where_[out] = -1;
    where_[q] = leave;
    basis_[leave] = q;
  }
}

LpSolution BoundedSimplex::Run() {
  LpSolution sol;
  int pivots = 0;
  Iterate(c1_, true, &pivots);
  Refactor(c1_);
  sol.phase_one_pivots = pivots;
  double scale = 1.0 + (rows_ ? b_.cwiseAbs().maxCoeff() : 0.0);
  double w = PhaseOneValue();
  if (w > tol().lp_feasibility * scale) {
    sol.status = LpStatus::kInfeasible;
    sol.pivots = pivots;
    Vector y = Vector::Zero(rows_);
    if (rows_ > 0) {
      auto lu = BasisLu();
      Vector cb(rows_);
      for (int i = 0; i < rows_; ++i) cb[i] = c1_[basis_[i]];
      y = lu.transpose().solve(cb);
    }
    Vector lower = p_.lower.size() ? p_.lower : Vector::Zero(n_);
    Vector upper = p_.upper.size() ? p_.upper : Vector::Constant(n_, kInf);
    sol.farkas_eq = -y.head(n_eq_);
    sol.farkas_ub = (-y.tail(n_ub_)).cwiseMax(0.0);
    sol.farkas_lower = Vector::Zero(n_);
    sol.farkas_upper = Vector::Zero(n_);
    for (int j = 0; j < n_; ++j) {
      double g = 0.0;
      if (n_eq_) g -= p_.A_eq.col(j).dot(y.head(n_eq_));
      if (n_ub_) g -= p_.A_ub.col(j).dot(y.tail(n_ub_));
      if (g > 0.0 && std::isfinite(lower[j])) sol.farkas_lower[j] = g;
      if (g < 0.0 && std::isfinite(upper[j])) sol.farkas_upper[j] = -g;
    }
    return sol;
  }
  // Artificials are pinned at zero for phase two.
  for (int i = 0; i < rows_; ++i) {
    hi_[art0_ + i] = 0.0;
    if (where_[art0_ + i] < 0) val_[art0_ + i] = 0.0;
  }
  bool optimal = Iterate(c2_, false, &pivots);
  sol.pivots = pivots;
  if (!optimal) {
    sol.status = LpStatus::kUnbounded;
    return sol;
  }
  Refactor(c2_);
  sol.status = LpStatus::kOptimal;
  Vector y = Vector::Zero(rows_);
  if (rows_ > 0) {
    auto lu = BasisLu();
    Vector cb(rows_);
    for (int i = 0; i < rows_; ++i) cb[i] = c2_[basis_[i]];
    y = lu.transpose().solve(cb);
  }
  Vector lower = p_.lower.size() ? p_.lower : Vector::Zero(n_);
  Vector upper = p_.upper.size() ? p_.upper : Vector::Constant(n_, kInf);
  sol.x = Vector(n_);
  for (int j = 0; j < n_; ++j) {
    double v = val_[j];
    switch (transform_[j]) {
      case Transform::kShift:
        v = lower[j] + std::clamp(v, 0.0, hi_[j]);
        break;
      case Transform::kFlip:
        v = upper[j] - std::max(v, 0.0);
        break;
      case Transform::kFree:
        break;
    }
    sol.x[j] = v;
  }
  sol.y_eq = y.head(n_eq_);
  sol.y_ub = y.tail(n_ub_);
  return sol;
}

}  // namespace

const char* ToString(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
  }
  return "unknown";
}

LpStats& ThreadLpStats() {
  thread_local LpStats stats;
  return stats;
}

LpSolution SolveLp(const LpProblem& problem) {
  const int n = problem.num_vars();
  auto bad = [](const char* what) { throw StructuralError(std::string("lp: ") + what); };
  if (problem.A_eq.rows() != problem.b_eq.size()) bad("A_eq/b_eq row mismatch");
  if (problem.A_ub.rows() != problem.b_ub.size()) bad("A_ub/b_ub row mismatch");
  if (problem.b_eq.size() && problem.A_eq.cols() != n) bad("A_eq column mismatch");
  if (problem.b_ub.size() && problem.A_ub.cols() != n) bad("A_ub column mismatch");
  if (problem.lower.size() && problem.lower.size() != n) bad("lower bound length");
  if (problem.upper.size() && problem.upper.size() != n) bad("upper bound length");
  if (!problem.c.allFinite() || !problem.A_eq.allFinite() || !problem.b_eq.allFinite() ||
      !problem.A_ub.allFinite() || !problem.b_ub.allFinite()) {
    bad("non-finite data");
  }
  for (int j = 0; j < n; ++j) {
    double l = problem.lower.size() ? problem.lower[j] : 0.0;
    double u = problem.upper.size() ? problem.upper[j] : kInf;
    if (std::isnan(l) || std::isnan(u) || l == kInf || u == -kInf) bad("invalid bound");
    if (l > u) {
      LpSolution sol;
      sol.status = LpStatus::kInfeasible;
      sol.farkas_eq = Vector::Zero(problem.b_eq.size());
      sol.farkas_ub = Vector::Zero(problem.b_ub.size());
      sol.farkas_lower = Vector::Zero(n);
      sol.farkas_upper = Vector::Zero(n);
      sol.farkas_lower[j] = 1.0;
      sol.farkas_upper[j] = 1.0;
      return sol;
    }
  }
  const bool maximize = problem.sense == LpSense::kMaximize;
  Vector cost = maximize ? Vector(-problem.c) : problem.c;
  BoundedSimplex simplex(problem, cost);
  LpSolution sol = simplex.Run();
  ThreadLpStats().solves += 1;
  ThreadLpStats().pivots += sol.pivots;
  if (sol.status != LpStatus::kOptimal) return sol;
  if (maximize) {
    sol.y_eq = -sol.y_eq;
    sol.y_ub = -sol.y_ub;
  }
  sol.objective = problem.c.dot(sol.x);
  sol.reduced = problem.c;
  if (problem.b_eq.size()) sol.reduced -= problem.A_eq.transpose() * sol.y_eq;
  if (problem.b_ub.size()) sol.reduced -= problem.A_ub.transpose() * sol.y_ub;
  return sol;
}

LpCheck CheckLpSolution(const LpProblem& problem, const LpSolution& sol) {
  LpCheck check;
  const int n = problem.num_vars();
  Vector lower = problem.lower.size() ? problem.lower : Vector::Zero(n);
  Vector upper = problem.upper.size() ? problem.upper : Vector::Constant(n, kInf);
  if (sol.status == LpStatus::kInfeasible) {
    Vector comb = -sol.farkas_lower + sol.farkas_upper;
    double rhs = 0.0;
    if (problem.b_eq.size()) {
      comb += problem.A_eq.transpose() * sol.farkas_eq;
      rhs += problem.b_eq.dot(sol.farkas_eq);
    }
    if (problem.b_ub.size()) {
      comb += problem.A_ub.transpose() * sol.farkas_ub;
      rhs += problem.b_ub.dot(sol.farkas_ub);
    }
    for (int j = 0; j < n; ++j) {
      if (sol.farkas_lower[j] != 0.0) rhs -= sol.farkas_lower[j] * lower[j];
      if (sol.farkas_upper[j] != 0.0) rhs += sol.farkas_upper[j] * upper[j];
    }
    check.farkas_combination = comb.size() ? comb.cwiseAbs().maxCoeff() : 0.0;
    check.farkas_rhs = rhs;
    return check;
  }
  if (sol.status != LpStatus::kOptimal) return check;
  const bool maximize = problem.sense == LpSense::kMaximize;
  const Vector& x = sol.x;
  double pr = 0.0;
  if (problem.b_eq.size()) pr = std::max(pr, (problem.A_eq * x - problem.b_eq).cwiseAbs().maxCoeff());
  if (problem.b_ub.size()) pr = std::max(pr, (problem.A_ub * x - problem.b_ub).maxCoeff());
  for (int j = 0; j < n; ++j) {
    pr = std::max(pr, lower[j] - x[j]);
    pr = std::max(pr, x[j] - upper[j]);
  }
  check.primal_residual = std::max(pr, 0.0);
  // Dual feasibility: sign of y_ub and of reduced costs against bounds.
  double sgn = maximize ? -1.0 : 1.0;  // minimization form multiplier
  double dr = 0.0;
  for (int i = 0; i < sol.y_ub.size(); ++i) dr = std::max(dr, sgn * sol.y_ub[i]);
  double dual_obj = 0.0;
  if (problem.b_eq.size()) dual_obj += problem.b_eq.dot(sol.y_eq);
  if (problem.b_ub.size()) dual_obj += problem.b_ub.dot(sol.y_ub);
  double comp = 0.0;
  for (int j = 0; j < n; ++j) {
    double r = sgn * sol.reduced[j];  // in minimization form r>0 pairs with lower
    if (r > 0.0) {
      if (!std::isfinite(lower[j])) dr = std::max(dr, r);
      else {
        dual_obj += sol.reduced[j] * lower[j];
        comp = std::max(comp, r * std::abs(x[j] - lower[j]));
      }
    } else if (r < 0.0) {
      if (!std::isfinite(upper[j])) dr = std::max(dr, -r);
      else {
        dual_obj += sol.reduced[j] * upper[j];
        comp = std::max(comp, -r * std::abs(upper[j] - x[j]));
      }
    }
  }
  for (int i = 0; i < sol.y_ub.size(); ++i) {
    double slack = problem.b_ub[i] - problem.A_ub.row(i).dot(x);
    comp = std::max(comp, std::abs(sol.y_ub[i]) * std::abs(slack));
  }
  check.dual_residual = dr;
  check.complementarity = comp;
  check.gap = std::abs(dual_obj - sol.objective);
  return check;
}

}  // namespace riskengine
