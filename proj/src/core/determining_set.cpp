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

#include "core/determining_set.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "core/errors.hpp"
#include "core/geometry.hpp"
#include "core/tolerances.hpp"

namespace riskengine {
namespace {

DensityComponent Box(int m, double bound) {
  DensityComponent c;
  c.upper = Vector::Constant(m, bound);
  c.a = Matrix(0, m);
  c.b = Vector(0);
  return c;
}

// Fractional-knapsack minimiser of E_Q x over a box component.
double GreedyBox(const ScenarioSpace& space, const Vector& upper, const Vector& x, Vector* z) {
  const int m = space.size();
  const Vector& p = space.p();
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return x[a] < x[b]; });
  z->setZero(m);
  double remaining = 1.0;
  double value = 0.0;
  for (int i : order) {
    if (remaining <= 0.0) break;
    double take = std::min(upper[i], remaining / p[i]);
    (*z)[i] = take;
    remaining -= take * p[i];
    value += take * p[i] * x[i];
  }
  if (remaining > 1e-12) throw ModelError("determining set is empty (density bounds too tight)");
  return value;
}

// Upper bound on the vertex count of a box component: at most one
// coordinate is fractional, the rest sit at a bound.
double BoxVertexBound(const ScenarioSpace& space, const Vector& upper) {
  const int m = space.size();
  double min_mass = kInfinity;
  for (int i = 0; i < m; ++i) min_mass = std::min(min_mass, space.p()[i] * upper[i]);
  const int kmax = std::min(m, static_cast<int>(std::floor(1.0 / min_mass + 1e-9)));
  double total = 0.0;
  for (int j = 0; j <= kmax; ++j) {
    double log_c = std::lgamma(m + 1.0) - std::lgamma(j + 1.0) - std::lgamma(m - j + 1.0);
    total += std::exp(log_c) * (m - j + 1);
  }
  return total;
}

std::vector<Vector> ComponentVertices(const ScenarioSpace& space, const DensityComponent& c) {
  const int m = space.size();
  if (c.is_box() && BoxVertexBound(space, c.upper) > tol().vertex_cap) {
    throw CapacityError("vertex enumeration exceeded cap");
  }
  std::vector<int> finite;
  for (int i = 0; i < m; ++i) {
    if (std::isfinite(c.upper[i])) finite.push_back(i);
  }
  const int rows = static_cast<int>(m + finite.size() + c.a.rows());
  Matrix a = Matrix::Zero(rows, m);
  Vector b = Vector::Zero(rows);
  int r = 0;
  for (int i = 0; i < m; ++i, ++r) a(r, i) = -1.0;
  for (int i : finite) {
    a(r, i) = 1.0;
    b[r++] = c.upper[i];
  }
  for (int k = 0; k < c.a.rows(); ++k, ++r) {
    a.row(r) = c.a.row(k);
    b[r] = c.b[k];
  }
  Matrix e = space.p().transpose();
  Vector f = Vector::Ones(1);
  return EnumerateVertices(a, b, e, f, tol().vertex_cap);
}

}  // namespace

const char* ToString(Family f) {
  switch (f) {
    case Family::kPointMass:
      return "point_mass";
    case Family::kTailVaR:
      return "tail_var";
    case Family::kWeightedVaR:
      return "weighted_var";
    case Family::kCustom:
      return "custom";
  }
  return "unknown";
}

DeterminingSet DeterminingSet::PointMass(SpacePtr space) {
  DeterminingSet d(std::move(space), Family::kPointMass);
  d.weights_ = {1.0};
  d.levels_ = {1.0};
  d.components_.push_back(Box(d.size(), 1.0));
  d.vertices_ = std::vector<Vector>{Vector::Ones(d.size())};
  return d;
}

DeterminingSet DeterminingSet::TailVaR(SpacePtr space, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw StructuralError("tail_var level must lie in (0, 1]");
  }
  DeterminingSet d(std::move(space), Family::kTailVaR);
  d.weights_ = {1.0};
  d.levels_ = {lambda};
  d.components_.push_back(Box(d.size(), 1.0 / lambda));
  return d;
}

DeterminingSet DeterminingSet::WeightedVaR(SpacePtr space, std::vector<double> weights,
                                           std::vector<double> levels) {
  if (weights.size() != levels.size() || weights.empty()) {
    throw StructuralError("weighted_var needs matching, nonempty weights and levels");
  }
  double total = 0.0;
  for (size_t k = 0; k < weights.size(); ++k) {
    if (!(weights[k] >= 0.0)) throw StructuralError("weighted_var weights must be >= 0");
    if (!(levels[k] > 0.0 && levels[k] <= 1.0)) {
      throw StructuralError("weighted_var levels must lie in (0, 1]");
    }
    total += weights[k];
  }
  if (std::abs(total - 1.0) > tol().structural) {
    throw StructuralError("weighted_var weights must sum to 1");
  }
  DeterminingSet d(std::move(space), Family::kWeightedVaR);
  for (size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] == 0.0) continue;
    d.weights_.push_back(weights[k]);
    d.levels_.push_back(levels[k]);
    d.components_.push_back(Box(d.size(), 1.0 / levels[k]));
  }
  return d;
}

DeterminingSet DeterminingSet::FromVertices(SpacePtr space, std::vector<Vector> z) {
  if (z.empty()) throw ModelError("determining set has no vertices");
  DeterminingSet d(std::move(space), Family::kCustom);
  d.weights_ = {1.0};
  d.vertices_ = std::move(z);
  d.ValidateVertices();
  return d;
}

DeterminingSet DeterminingSet::FromHalfspaces(SpacePtr space, Matrix a, Vector b) {
  const int m = space->size();
  if (a.cols() != m || a.rows() != b.size()) {
    throw StructuralError("halfspace matrix does not match scenario count");
  }
  DeterminingSet d(std::move(space), Family::kCustom);
  d.weights_ = {1.0};
  DensityComponent c;
  c.upper = Vector::Constant(m, kInfinity);
  c.a = std::move(a);
  c.b = std::move(b);
  d.components_.push_back(std::move(c));
  d.CheckNonempty();
  return d;
}

DeterminingSet DeterminingSet::FromBoth(SpacePtr space, std::vector<Vector> z, Matrix a,
                                        Vector b) {
  DeterminingSet d = FromHalfspaces(space, a, b);
  if (z.empty()) throw ModelError("determining set has no vertices");
  d.vertices_ = std::move(z);
  d.ValidateVertices();
  const double eps = tol().structural;
  const DensityComponent& c = d.components_[0];
  for (int k = 0; k < c.a.rows(); ++k) {
    bool tight = false;
    for (const Vector& v : *d.vertices_) {
      double slack = c.b[k] - c.a.row(k).dot(v);
      if (slack < -eps * (1.0 + std::abs(c.b[k]))) {
        std::ostringstream os;
        os << "vertex violates halfspace " << k;
        throw ModelError(os.str());
      }
      if (slack <= 1e-7 * (1.0 + std::abs(c.b[k]))) tight = true;
    }
    if (!tight) {
      std::ostringstream os;
      os << "halfspace " << k << " is not tight at any vertex";
      throw ModelError(os.str());
    }
  }
  return d;
}

void DeterminingSet::ValidateVertices() const {
  const Vector& p = space_->p();
  for (size_t k = 0; k < vertices_->size(); ++k) {
    const Vector& v = (*vertices_)[k];
    std::ostringstream os;
    os << "vertex " << k << ": ";
    if (v.size() != p.size()) throw StructuralError(os.str() + "length does not match scenario count");
    if (v.minCoeff() < -tol().structural) throw StructuralError(os.str() + "density must be nonnegative");
    if (std::abs(v.dot(p) - 1.0) > tol().structural) throw StructuralError(os.str() + "density does not integrate to 1");
  }
}

void DeterminingSet::CheckNonempty() const {
  LpBuilder b;
  AddToLp(b);
  if (SolveBuilt(b).status != LpStatus::kOptimal) {
    throw ModelError("determining set is empty");
  }
}

bool DeterminingSet::is_box_mixture() const {
  if (components_.empty()) return false;
  for (const auto& c : components_) {
    if (!c.is_box()) return false;
  }
  return true;
}

bool DeterminingSet::ContainsDensity(const Vector& z, double tol) const {
  const Vector& p = space_->p();
  if (components_.size() == 1 && components_[0].is_box()) {
    if (std::abs(p.dot(z) - 1.0) > tol) return false;
    for (int i = 0; i < size(); ++i) {
      if (z[i] < -tol || z[i] > components_[0].upper[i] + tol) return false;
    }
    return true;
  }
  LpBuilder b;
  auto mass = AddToLp(b);
  for (int i = 0; i < size(); ++i) b.AddEq(mass[i], z[i] * p[i]);
  return SolveBuilt(b).status == LpStatus::kOptimal;
}

std::vector<Vector> DeterminingSet::VertexDensities() const {
  if (vertices_) return *vertices_;
  const int cap = tol().vertex_cap;
  std::vector<std::vector<Vector>> parts;
  double count = 1.0;
  for (const auto& c : components_) {
    parts.push_back(ComponentVertices(*space_, c));
    count *= static_cast<double>(parts.back().size());
    if (count > cap) throw CapacityError("vertex enumeration exceeded cap");
  }
  if (parts.size() == 1) return parts[0];
  // Minkowski mixture: combine, then drop points inside the hull of the rest.
  std::vector<Vector> cand;
  std::vector<size_t> idx(parts.size(), 0);
  for (;;) {
    Vector z = Vector::Zero(size());
    for (size_t k = 0; k < parts.size(); ++k) z += weights_[k] * parts[k][idx[k]];
    bool dup = false;
    for (const Vector& c : cand) {
      if ((c - z).cwiseAbs().maxCoeff() <= 1e-10) {
        dup = true;
        break;
      }
    }
    if (!dup) cand.push_back(z);
    size_t k = 0;
    while (k < parts.size() && ++idx[k] == parts[k].size()) idx[k++] = 0;
    if (k == parts.size()) break;
  }
  std::vector<bool> keep(cand.size(), true);
  for (size_t i = 0; i < cand.size(); ++i) {
    std::vector<Vector> others;
    for (size_t j = 0; j < cand.size(); ++j) {
      if (j != i && keep[j]) others.push_back(cand[j]);
    }
    if (!others.empty() && InConvexHull(others, cand[i], 0.0)) keep[i] = false;
  }
  std::vector<Vector> out;
  for (size_t i = 0; i < cand.size(); ++i) {
    if (keep[i]) out.push_back(cand[i]);
  }
  return out;
}

DeterminingSet DeterminingSet::WithVertices() const {
  DeterminingSet d = *this;
  if (!d.vertices_) d.vertices_ = VertexDensities();
  return d;
}

std::vector<LinExpr> DeterminingSet::AddToLp(LpBuilder& b, int scale) const {
  const int m = size();
  const Vector& p = space_->p();
  std::vector<LinExpr> mass(m);
  bool use_vertices =
      vertices_ && (components_.empty() || static_cast<int>(vertices_->size()) <= 2 * m);
  if (use_vertices) {
    const auto& vs = *vertices_;
    int alpha = b.AddVars(static_cast<int>(vs.size()));
    LinExpr sum;
    for (size_t k = 0; k < vs.size(); ++k) {
      int v = alpha + static_cast<int>(k);
      sum.Add(v, 1.0);
      for (int i = 0; i < m; ++i) mass[i].Add(v, p[i] * vs[k][i]);
    }
    if (scale >= 0) {
      sum.Add(scale, -1.0);
      b.AddEq(sum, 0.0);
    } else {
      b.AddEq(sum, 1.0);
    }
    return mass;
  }
  for (size_t k = 0; k < components_.size(); ++k) {
    const DensityComponent& c = components_[k];
    int first = b.num_vars();
    for (int i = 0; i < m; ++i) {
      b.AddVar(0.0, scale >= 0 ? kInfinity : c.upper[i]);
      mass[i].Add(first + i, weights_[k] * p[i]);
    }
    LinExpr norm;
    for (int i = 0; i < m; ++i) norm.Add(first + i, p[i]);
    if (scale >= 0) {
      norm.Add(scale, -1.0);
      b.AddEq(norm, 0.0);
      for (int i = 0; i < m; ++i) {
        if (!std::isfinite(c.upper[i])) continue;
        LinExpr e = LinExpr::Var(first + i);
        e.Add(scale, -c.upper[i]);
        b.AddLe(e, 0.0);
      }
    } else {
      b.AddEq(norm, 1.0);
    }
    for (int r = 0; r < c.a.rows(); ++r) {
      LinExpr e;
      for (int i = 0; i < m; ++i) e.Add(first + i, c.a(r, i));
      if (scale >= 0) {
        e.Add(scale, -c.b[r]);
        b.AddLe(e, 0.0);
      } else {
        b.AddLe(e, c.b[r]);
      }
    }
  }
  return mass;
}

std::string DeterminingSet::Describe() const {
  std::ostringstream os;
  os.precision(12);
  os << ToString(family_);
  if (family_ == Family::kTailVaR) os << "(lambda=" << levels_[0] << ")";
  if (family_ == Family::kWeightedVaR) {
    os << "(";
    for (size_t k = 0; k < weights_.size(); ++k) {
      os << (k ? "," : "") << weights_[k] << "@" << levels_[k];
    }
    os << ")";
  }
  return os.str();
}

UtilityValue Minimize(const DeterminingSet& d, const RandomVariable& x) {
  CheckSize(*d.space(), x, "utility");
  UtilityValue out;
  if (d.has_vertices()) {
    const auto& vs = d.VertexDensities();
    out.value = kInfinity;
    for (const Vector& v : vs) {
      double e = ExpectDensity(*d.space(), v, x.values());
      if (e < out.value) {
        out.value = e;
        out.z = v;
      }
    }
    return out;
  }
  if (d.is_box_mixture()) {
    out.z = Vector::Zero(d.size());
    out.value = 0.0;
    Vector zk;
    for (size_t k = 0; k < d.components().size(); ++k) {
      out.value += d.weights()[k] * GreedyBox(*d.space(), d.components()[k].upper, x.values(), &zk);
      out.z += d.weights()[k] * zk;
    }
    return out;
  }
  LpBuilder b;
  auto mass = d.AddToLp(b);
  b.SetObjective(ExpectExpr(mass, x.values()), LpSense::kMinimize);
  LpSolution s = SolveBuilt(b);
  if (s.status != LpStatus::kOptimal) throw ModelError("determining set is empty");
  out.value = s.objective;
  out.z = DensityAt(*d.space(), mass, s.x);
  return out;
}

double Utility(const DeterminingSet& d, const RandomVariable& x) { return Minimize(d, x).value; }

double Rho(const DeterminingSet& d, const RandomVariable& x) { return -Utility(d, x); }

double UpperValue(const DeterminingSet& d, const RandomVariable& x) { return -Utility(d, -x); }

std::vector<Vector> ExtremeSet::ActiveDensities() const {
  std::vector<Vector> out;
  for (int i : active) out.push_back(vertices[i]);
  return out;
}

ExtremeSet ComputeExtremeSet(const DeterminingSet& d, const RandomVariable& x) {
  CheckSize(*d.space(), x, "extreme_set");
  ExtremeSet es;
  es.vertices = d.VertexDensities();
  std::vector<double> vals;
  double best = kInfinity;
  for (const Vector& v : es.vertices) {
    vals.push_back(ExpectDensity(*d.space(), v, x.values()));
    best = std::min(best, vals.back());
  }
  es.value = best;
  const double slack = tol().active_set * (1.0 + std::abs(best));
  for (size_t k = 0; k < vals.size(); ++k) {
    if (vals[k] <= best + slack) es.active.push_back(static_cast<int>(k));
  }
  return es;
}

double UtilityContribution(const DeterminingSet& d, const RandomVariable& x,
                           const RandomVariable& y) {
  CheckSize(*d.space(), x, "utility_contribution");
  ExtremeSet es = ComputeExtremeSet(d, y);
  double best = kInfinity;
  for (int k : es.active) best = std::min(best, ExpectDensity(*d.space(), es.vertices[k], x.values()));
  return best;
}

double RiskContribution(const DeterminingSet& d, const RandomVariable& x, const RandomVariable& y) {
  return -UtilityContribution(d, x, y);
}

Vector DensityAt(const ScenarioSpace& space, const std::vector<LinExpr>& mass, const Vector& x) {
  Vector z(space.size());
  for (int i = 0; i < space.size(); ++i) z[i] = std::max(0.0, mass[i].Evaluate(x)) / space.p()[i];
  return z;
}

LinExpr ExpectExpr(const std::vector<LinExpr>& mass, const Vector& v) {
  return Combine(mass, v);
}

}  // namespace riskengine
