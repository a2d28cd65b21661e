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

#include "core/optimization.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "core/errors.hpp"
#include "core/tolerances.hpp"

namespace riskengine {
namespace {

// E_Q S1 lies in S0 - H* for every generator row written as <g, .> <= <g, S0>.
SetLifting DLifting(const DeterminingSet& rd, const Market& mkt) {
  return [&rd, &mkt](LpBuilder& b) {
    auto mass = rd.AddToLp(b);
    auto pay = mkt.ExpectedPayoff(mass);
    const int d = mkt.dim();
    int c = b.AddVars(d, -kInfinity, kInfinity);
    for (const Vector& g : mkt.cone().generators()) {
      LinExpr e;
      for (int k = 0; k < d; ++k) e.Add(c + k, g[k]);
      b.AddGe(e, 0.0);
    }
    std::vector<LinExpr> x(d);
    for (int k = 0; k < d; ++k) {
      x[k] = pay[k];
      x[k].Add(c + k, 1.0);
    }
    return x;
  };
}

std::optional<std::pair<Vector, Vector>> FeasibleAt(const DeterminingSet& pd,
                                                    const DeterminingSet& rd,
                                                    const Market& mkt, double lambda) {
  LpBuilder b;
  auto m1 = pd.AddToLp(b);
  auto m2 = rd.AddToLp(b);
  auto p1 = mkt.ExpectedPayoff(m1);
  auto p2 = mkt.ExpectedPayoff(m2);
  // S0 - lambda (e - S0) - g in H*, with the largest uniform slack.
  int slack = b.AddVar(-kInfinity, kInfinity);
  for (const Vector& g : mkt.cone().generators()) {
    LinExpr e;
    e.Add(Combine(p1, g), lambda);
    e.Add(Combine(p2, g), 1.0);
    e.Add(slack, g.norm());
    b.AddLe(e, (1.0 + lambda) * g.dot(mkt.s0()));
  }
  b.AddLe(LinExpr::Var(slack), 1.0);
  b.SetObjective(LinExpr::Var(slack), LpSense::kMaximize);
  LpSolution s = SolveBuilt(b);
  if (s.status != LpStatus::kOptimal || s.objective < -1e-12 * (1.0 + lambda)) return std::nullopt;
  return std::make_pair(DensityAt(*pd.space(), m1, s.x), DensityAt(*rd.space(), m2, s.x));
}

bool InteriorOfCone(const Cone& cone, const Vector& h) {
  const Matrix& b = cone.inequalities();
  double scale = 1e-9 * (1.0 + h.norm());
  for (int i = 0; i < b.rows(); ++i) {
    if (b.row(i).dot(h) <= scale * b.row(i).norm()) return false;
  }
  return true;
}

}  // namespace

Extended Raroc(const DeterminingSet& pd, const DeterminingSet& rd, const RandomVariable& x) {
  const double e = Utility(pd, x);
  const double u = Utility(rd, x);
  const double eps = 1e-12 * (1.0 + x.values().cwiseAbs().maxCoeff());
  Extended r;
  if (e > eps && u >= -eps) {
    r.infinite = true;
    return r;
  }
  const double rho = -u;
  if (std::abs(rho) <= eps) {
    r.value = 0.0;
    return r;
  }
  r.value = e / rho;
  return r;
}

RarocLp SolveRarocLp(const DeterminingSet& pd, const DeterminingSet& rd, const Market& mkt) {
  LpBuilder b;
  int t = b.AddVar();
  auto m1 = pd.AddToLp(b, t);
  auto m2 = rd.AddToLp(b);
  auto p1 = mkt.ExpectedPayoff(m1);
  auto p2 = mkt.ExpectedPayoff(m2);
  std::vector<RowRef> rows;
  const auto& gens = mkt.cone().generators();
  for (const Vector& g : gens) {
    LinExpr e = Combine(p1, g);
    e.Add(Combine(p2, g));
    e.Add(t, -g.dot(mkt.s0()));
    rows.push_back(b.AddLe(e, g.dot(mkt.s0())));
  }
  b.SetObjective(LinExpr::Var(t), LpSense::kMaximize);
  LpSolution s = SolveBuilt(b);
  RarocLp out;
  if (s.status == LpStatus::kInfeasible) {
    out.feasible = false;
    return out;
  }
  if (s.status == LpStatus::kUnbounded) {
    out.unbounded = true;
    return out;
  }
  out.lambda = s.objective;
  out.h = Vector::Zero(mkt.dim());
  for (size_t k = 0; k < gens.size(); ++k) out.h += LpBuilder::Dual(s, rows[k]) * gens[k];
  Vector z1 = Vector::Zero(pd.size());
  if (s.x[t] > 1e-12) {
    for (int i = 0; i < pd.size(); ++i) z1[i] = std::max(0.0, m1[i].Evaluate(s.x)) / s.x[t] / pd.space()->p()[i];
  }
  out.q_pd = z1;
  out.q_rd = DensityAt(*rd.space(), m2, s.x);
  return out;
}

RarocResult SolveAgentIndependent(const DeterminingSet& pd, const DeterminingSet& rd,
                                  const Market& mkt) {
  if (pd.space()->size() != rd.space()->size() || mkt.space()->size() != rd.size()) {
    throw StructuralError("agent-independent problem: scenario spaces differ");
  }
  RarocResult res;
  const int d = mkt.dim();
  // S0 in E means every P&L has zero expected return.
  {
    LpBuilder b;
    auto mass = pd.AddToLp(b);
    auto pay = mkt.ExpectedPayoff(mass);
    for (int k = 0; k < d; ++k) b.AddEq(pay[k], mkt.s0()[k]);
    if (SolveBuilt(b).status == LpStatus::kOptimal) {
      throw DomainError("S0 lies in E: every attainable P&L has zero PD-expectation, so R* = 0");
    }
  }
  SetLifting dset = DLifting(rd, mkt);
  if (!SetContains(dset, mkt.s0())) {
    throw DomainError("S0 lies outside D = G + H*: some attainable P&L has infinite RAROC (R* = infinity)");
  }
  AffineHull hull = ComputeAffineHull(dset, mkt.s0(), tol().structural);
  InteriorStatus st = RelativeInteriorStatus(dset, hull, mkt.s0(), tol().interior_margin);
  if (st != InteriorStatus::kInterior) {
    throw DomainError("S0 lies on the relative boundary of D = G + H*: R* = infinity");
  }
  // Informational check of PD inside RD.
  if (pd.has_vertices()) {
    for (const Vector& v : pd.VertexDensities()) {
      if (!rd.ContainsDensity(v, tol().structural)) {
        res.warnings.push_back("PD is not contained in RD");
        break;
      }
    }
  }

  RarocLp lp = SolveRarocLp(pd, rd, mkt);
  if (!lp.feasible) throw SolverError("homogenised RAROC LP infeasible although S0 lies in D");
  if (lp.unbounded) {
    res.lambda_infinite = true;
    res.r_star = 0.0;
    res.all_optimal = true;
    return res;
  }
  res.lambda_lp = lp.lambda;
  if (lp.lambda <= 1e-12) {
    res.r_infinite = true;
    res.lambda_star = 0.0;
    res.warnings.push_back("lambda* = 0: E leaves the affine hull of D");
    return res;
  }
  std::function<std::optional<std::pair<Vector, Vector>>(double)> test = [&](double lam) {
    return FeasibleAt(pd, rd, mkt, lam);
  };
  auto bis = BisectFeasibility(test, 0.0, 2.0 * lp.lambda + 1.0, tol().bisection);
  if (bis.boundary) throw SolverError("bisection bracket does not contain lambda*");
  res.bisection_iterations = bis.iterations;
  res.lambda_bisection = bis.value;
  res.lambda_star = lp.lambda;
  res.r_star = 1.0 / lp.lambda;
  if (bis.witness) {
    res.q_pd = bis.witness->first;
    res.q_rd = bis.witness->second;
  }
  if (std::abs(bis.value - lp.lambda) > 1e-5 * (1.0 + lp.lambda)) {
    std::ostringstream os;
    os.precision(12);
    os << "bisection lambda " << bis.value << " differs from the LP value " << lp.lambda;
    res.warnings.push_back(os.str());
  }
  double n = lp.h.norm();
  if (n > 0.0) {
    res.h_star = lp.h / n;
  } else {
    res.warnings.push_back("dual functional vanished; no representative optimiser");
  }
  return res;
}

bool IsRarocOptimal(const DeterminingSet& pd, const DeterminingSet& rd, const Market& mkt,
                    const RarocResult& res, const Vector& h) {
  if (!mkt.cone().Contains(h, tol().structural)) return false;
  if (res.all_optimal) return true;
  Extended r = Raroc(pd, rd, mkt.Pnl(h));
  if (res.r_infinite) return r.infinite;
  if (r.infinite) return false;
  return std::abs(r.value - res.r_star) <= 1e-6 * (1.0 + res.r_star);
}

double RarocContribution(const DeterminingSet& pd, const DeterminingSet& rd,
                         const RandomVariable& x, const RandomVariable& y) {
  const double rc = RiskContribution(rd, x, y);
  if (std::abs(rc) <= tol().structural) {
    throw DomainError("undefined contribution: risk contribution is zero");
  }
  return Utility(pd, x) / rc;
}

FirmStructure CheckFirmStructure(const DeterminingSet& pd, const DeterminingSet& rd,
                                 const std::vector<RandomVariable>& units, const Vector& h,
                                 const Cone& cone) {
  const int d = static_cast<int>(units.size());
  if (h.size() != d || cone.dim() != d) throw StructuralError("firm structure: dimension mismatch");
  if (d == 0) throw StructuralError("firm structure needs at least one unit");
  const int m = units[0].size();
  RandomVariable y = RandomVariable::Constant(m, 0.0);
  Matrix s1(d, m);
  for (int i = 0; i < d; ++i) {
    y = y + units[i] * h[i];
    s1.row(i) = units[i].values().transpose();
  }
  FirmStructure out;
  double lo = kInfinity, hi = -kInfinity;
  int defined = 0;
  for (int i = 0; i < d; ++i) {
    if (std::abs(h[i]) <= 1e-12) {
      out.contributions.push_back(std::nullopt);
      continue;
    }
    try {
      double c = RarocContribution(pd, rd, units[i] * h[i], y);
      out.contributions.push_back(c);
      lo = std::min(lo, c);
      hi = std::max(hi, c);
      ++defined;
    } catch (const DomainError&) {
      out.contributions.push_back(std::nullopt);
      out.indeterminate = true;
    }
  }
  if (defined == 0) out.indeterminate = true;
  out.contributions_equal =
      !out.indeterminate && hi - lo <= 1e-6 * (1.0 + std::max(std::abs(lo), std::abs(hi)));
  out.hypothesis_verified = ComputeExtremeSet(rd, y).active.size() == 1;
  out.interior = InteriorOfCone(cone, h);

  Market firm(pd.space(), Vector::Zero(d), s1, cone);
  RarocLp lp = SolveRarocLp(pd, rd, firm);
  Extended r = Raroc(pd, rd, y);
  out.raroc = r.infinite ? kInfinity : r.value;
  bool by_value = false;
  if (lp.feasible && lp.unbounded) {
    out.r_star = 0.0;
    by_value = !r.infinite && std::abs(r.value) <= 1e-9;
  } else if (lp.feasible && lp.lambda > 1e-12) {
    out.r_star = 1.0 / lp.lambda;
    by_value = !r.infinite && std::abs(r.value - out.r_star) <= 1e-6 * (1.0 + out.r_star);
  } else {
    out.r_star = kInfinity;
    by_value = r.infinite;
  }
  out.optimal = by_value;
  if (!cone.Contains(h, tol().structural)) {
    out.optimal = false;
    out.flags.push_back("h outside H");
  }
  if (!out.hypothesis_verified) out.flags.push_back("hypothesis unverified");
  if (out.indeterminate) out.flags.push_back("contribution undefined");
  if (out.optimal && !out.contributions_equal && !out.interior) {
    out.flags.push_back("boundary, equality not necessary");
  }
  if (out.contributions_equal && out.hypothesis_verified && !out.optimal) {
    out.flags.push_back("equal contributions without optimality");
  }
  return out;
}

GlobalResult SolveGlobal(const DeterminingSet& d, const Market& mkt, const RandomVariable& w,
                         bool cross_check) {
  CheckSize(*d.space(), w, "global problem endowment");
  GlobalResult res;
  LpBuilder b;
  auto mass = d.AddToLp(b);
  auto rows = mkt.AddRiskNeutral(b, mass);
  b.SetObjective(ExpectExpr(mass, w.values()), LpSense::kMinimize);
  LpSolution s = SolveBuilt(b);
  if (s.status == LpStatus::kInfeasible) {
    res.infinite = true;
  } else if (s.status != LpStatus::kOptimal) {
    throw SolverError("global problem LP unbounded over a compact set");
  } else {
    res.u_star = s.objective;
    res.witness = DensityAt(*d.space(), mass, s.x);
    Vector h = Vector::Zero(mkt.dim());
    const auto& gens = mkt.cone().generators();
    for (size_t k = 0; k < gens.size(); ++k) h -= LpBuilder::Dual(s, rows[k]) * gens[k];
    res.h_star = h;
  }
  if (cross_check) {
    try {
      GlobalResult lifted = SolveGlobalLifted(d, mkt, w);
      res.lifted_checked = true;
      res.lifted_value = lifted.infinite ? kInfinity : lifted.u_star;
      res.lifted_h = lifted.h_star;
    } catch (const CapacityError&) {
      res.lifted_checked = false;
    }
  }
  return res;
}

GlobalResult SolveGlobalLifted(const DeterminingSet& d, const Market& mkt,
                               const RandomVariable& w) {
  const int dim = mkt.dim();
  std::vector<Vector> verts = d.VertexDensities();
  std::vector<Vector> pts;
  for (const Vector& v : verts) {
    Vector g(dim + 1);
    for (int k = 0; k < dim; ++k) g[k] = ExpectDensity(*d.space(), v, mkt.UnitPnl(k).values());
    g[dim] = ExpectDensity(*d.space(), v, w.values());
    pts.push_back(g);
  }
  Cone hstar = DualCone(mkt.cone());
  std::vector<Vector> gens;
  for (const Vector& c : hstar.generators()) {
    Vector t = Vector::Zero(dim + 1);
    t.head(dim) = -c;
    gens.push_back(t);
  }
  gens.push_back(-Vector::Unit(dim + 1, dim));

  LpBuilder b;
  int mu = b.AddVars(static_cast<int>(pts.size()));
  int lam = b.AddVar(-kInfinity, kInfinity);
  int nu = b.AddVars(static_cast<int>(gens.size()));
  LinExpr sum;
  for (size_t k = 0; k < pts.size(); ++k) sum.Add(mu + static_cast<int>(k), 1.0);
  b.AddEq(sum, 1.0);
  std::vector<RowRef> rows;
  for (int r = 0; r <= dim; ++r) {
    LinExpr e;
    for (size_t k = 0; k < pts.size(); ++k) e.Add(mu + static_cast<int>(k), pts[k][r]);
    if (r == dim) e.Add(lam, -1.0);
    for (size_t j = 0; j < gens.size(); ++j) e.Add(nu + static_cast<int>(j), -gens[j][r]);
    rows.push_back(b.AddEq(e, 0.0));
  }
  b.SetObjective(LinExpr::Var(lam), LpSense::kMinimize);
  LpSolution s = SolveBuilt(b);
  GlobalResult res;
  if (s.status == LpStatus::kInfeasible) {
    res.infinite = true;
    return res;
  }
  if (s.status != LpStatus::kOptimal) throw SolverError("lifted global LP unbounded");
  res.u_star = s.objective;
  Vector ht(dim + 1);
  for (int r = 0; r <= dim; ++r) ht[r] = -LpBuilder::Dual(s, rows[r]);
  if (std::abs(ht[dim]) > 1e-12) res.h_star = Vector(ht.head(dim) / ht[dim]);
  Vector z = Vector::Zero(d.size());
  for (size_t k = 0; k < verts.size(); ++k) z += s.x[mu + static_cast<int>(k)] * verts[k];
  res.witness = z;
  return res;
}

DeterminingSet ExtremeFace(const DeterminingSet& d, const RandomVariable& w) {
  ExtremeSet es = ComputeExtremeSet(d, w);
  return DeterminingSet::FromVertices(d.space(), es.ActiveDensities());
}

LocalResult SolveLocal(const DeterminingSet& d, const std::vector<RandomVariable>& x,
                       const std::vector<Vector>& h_points, const RandomVariable* w) {
  if (h_points.empty()) throw StructuralError("local problem: empty portfolio polytope");
  const int dim = static_cast<int>(x.size());
  for (const Vector& h : h_points) {
    if (h.size() != dim) throw StructuralError("local problem: polytope point has wrong dimension");
  }
  for (const RandomVariable& xi : x) CheckSize(*d.space(), xi, "local problem P&L");
  if (!InConvexHull(h_points, Vector::Zero(dim), 0.0)) {
    throw DomainError("local problem: the portfolio polytope must contain 0");
  }
  DeterminingSet face = w ? ExtremeFace(d, *w) : d;
  LpBuilder b;
  auto mass = face.AddToLp(b);
  std::vector<LinExpr> g;
  for (const RandomVariable& xi : x) g.push_back(ExpectExpr(mass, xi.values()));
  int lam = b.AddVar();
  std::vector<RowRef> rows;
  for (const Vector& h : h_points) {
    LinExpr e = Combine(g, h);
    e.Add(lam, -1.0);
    rows.push_back(b.AddLe(e, 0.0));
  }
  b.SetObjective(LinExpr::Var(lam), LpSense::kMinimize);
  LpSolution s = SolveBuilt(b);
  if (s.status != LpStatus::kOptimal) throw SolverError("local problem LP failed");
  LocalResult res;
  res.value = s.objective;
  res.g = Vector(dim);
  for (int k = 0; k < dim; ++k) res.g[k] = g[k].Evaluate(s.x);
  if (res.value > 1e-12) {
    Vector h = Vector::Zero(dim);
    for (size_t k = 0; k < h_points.size(); ++k) h -= LpBuilder::Dual(s, rows[k]) * h_points[k];
    res.h_star = h;
  }
  return res;
}

}  // namespace riskengine
