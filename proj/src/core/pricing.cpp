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

#include "core/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "core/errors.hpp"
#include "core/geometry.hpp"
#include "core/optimization.hpp"
#include "core/tolerances.hpp"

namespace riskengine {
namespace {

using Constrain = std::function<void(LpBuilder&, const std::vector<LinExpr>&)>;

// min and max of E_Q F over Q in `d` subject to extra constraints on the masses.
PriceInterval Endpoints(const DeterminingSet& d, const Constrain& extra, const RandomVariable& f) {
  CheckSize(*d.space(), f, "claim");
  PriceInterval out;
  for (int side = 0; side < 2; ++side) {
    LpBuilder b;
    auto mass = d.AddToLp(b);
    extra(b, mass);
    b.SetObjective(ExpectExpr(mass, f.values()), side == 0 ? LpSense::kMinimize : LpSense::kMaximize);
    LpSolution s = SolveBuilt(b);
    if (s.status == LpStatus::kInfeasible) {
      out.empty = true;
      out.diagnostic = "no admissible measure: the interval is empty";
      return out;
    }
    if (s.status != LpStatus::kOptimal) throw SolverError("price endpoint LP unbounded");
    Vector z = DensityAt(*d.space(), mass, s.x);
    if (side == 0) {
      out.lo = s.objective;
      out.lo_measure = z;
    } else {
      out.hi = s.objective;
      out.hi_measure = z;
    }
  }
  return out;
}

Constrain RiskNeutral(const Market& mkt) {
  return [&mkt](LpBuilder& b, const std::vector<LinExpr>& mass) { mkt.AddRiskNeutral(b, mass); };
}

// <h_k, E_Q X> <= 0 for every polytope point.
Constrain RiskNeutralPoints(const std::vector<RandomVariable>& x, const std::vector<Vector>& h) {
  return [&x, &h](LpBuilder& b, const std::vector<LinExpr>& mass) {
    std::vector<LinExpr> g;
    for (const RandomVariable& xi : x) g.push_back(ExpectExpr(mass, xi.values()));
    for (const Vector& hk : h) b.AddLe(Combine(g, hk), 0.0);
  };
}

std::vector<LinExpr> Mixture(const std::vector<LinExpr>& a, const std::vector<LinExpr>& b,
                             double wa, double wb) {
  std::vector<LinExpr> out(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    out[i].Add(a[i], wa);
    out[i].Add(b[i], wb);
  }
  return out;
}

PriceInterval MeasureFormNbc(const DeterminingSet& pd, const DeterminingSet& rd, const Market& mkt,
                             const RandomVariable& f, double r) {
  const double a = 1.0 / (1.0 + r), c = r / (1.0 + r);
  PriceInterval out;
  for (int side = 0; side < 2; ++side) {
    LpBuilder b;
    auto m1 = pd.AddToLp(b);
    auto m2 = rd.AddToLp(b);
    auto mix = Mixture(m1, m2, a, c);
    mkt.AddRiskNeutral(b, mix);
    b.SetObjective(ExpectExpr(mix, f.values()), side == 0 ? LpSense::kMinimize : LpSense::kMaximize);
    LpSolution s = SolveBuilt(b);
    if (s.status != LpStatus::kOptimal) {
      out.empty = true;
      return out;
    }
    Vector z = DensityAt(*pd.space(), mix, s.x);
    (side == 0 ? out.lo : out.hi) = s.objective;
    (side == 0 ? out.lo_measure : out.hi_measure) = z;
  }
  return out;
}

struct LiftedPoints {
  std::vector<Vector> e, g, c;  // lifted points of PD, RD and generators of H*
};

// Smallest sup-norm residual of (1/(1+R)) E + (R/(1+R)) (G + H*) = S0 in the
// first d coordinates; with `price` set, optimises the last coordinate at zero residual.
LpSolution LiftedLp(const LiftedPoints& lp, const Vector& s0, double r, int price_sense,
                    double* lifted_x) {
  const int d = static_cast<int>(s0.size());
  const double a = 1.0 / (1.0 + r), c = r / (1.0 + r);
  LpBuilder b;
  int al = b.AddVars(static_cast<int>(lp.e.size()));
  int be = b.AddVars(static_cast<int>(lp.g.size()));
  int nu = b.AddVars(static_cast<int>(lp.c.size()));
  int res = b.AddVar();
  LinExpr sa, sb;
  for (size_t k = 0; k < lp.e.size(); ++k) sa.Add(al + static_cast<int>(k), 1.0);
  for (size_t k = 0; k < lp.g.size(); ++k) sb.Add(be + static_cast<int>(k), 1.0);
  b.AddEq(sa, 1.0);
  b.AddEq(sb, 1.0);
  auto coord = [&](int r_) {
    LinExpr e;
    for (size_t k = 0; k < lp.e.size(); ++k) e.Add(al + static_cast<int>(k), a * lp.e[k][r_]);
    for (size_t k = 0; k < lp.g.size(); ++k) e.Add(be + static_cast<int>(k), c * lp.g[k][r_]);
    for (size_t k = 0; k < lp.c.size(); ++k) {
      if (r_ < d) e.Add(nu + static_cast<int>(k), c * lp.c[k][r_]);
    }
    return e;
  };
  for (int r_ = 0; r_ < d; ++r_) {
    LinExpr e = coord(r_);
    LinExpr up = e, dn = e;
    up.Add(res, -1.0);
    dn.Add(res, 1.0);
    b.AddLe(up, s0[r_]);
    b.AddGe(dn, s0[r_]);
  }
  if (price_sense == 0) {
    b.SetObjective(LinExpr::Var(res), LpSense::kMinimize);
  } else {
    b.AddLe(LinExpr::Var(res), 0.0);
    b.SetObjective(coord(d), price_sense < 0 ? LpSense::kMinimize : LpSense::kMaximize);
  }
  LpSolution s = SolveBuilt(b);
  if (lifted_x && s.status == LpStatus::kOptimal) *lifted_x = s.objective;
  return s;
}

LiftedPoints BuildLifted(const DeterminingSet& pd, const DeterminingSet& rd, const Market& mkt,
                         const RandomVariable& f) {
  const int d = mkt.dim();
  auto lift = [&](const DeterminingSet& ds) {
    std::vector<Vector> pts;
    for (const Vector& z : ds.VertexDensities()) {
      Vector p(d + 1);
      for (int k = 0; k < d; ++k) p[k] = ExpectDensity(*ds.space(), z, mkt.s1().row(k).transpose());
      p[d] = ExpectDensity(*ds.space(), z, f.values());
      pts.push_back(p);
    }
    return pts;
  };
  LiftedPoints lp;
  lp.e = lift(pd);
  lp.g = lift(rd);
  Cone hstar = DualCone(mkt.cone());
  for (const Vector& c : hstar.generators()) lp.c.push_back(c);
  return lp;
}

}  // namespace

PriceInterval NgdInterval(const DeterminingSet& d, const Market& mkt, const RandomVariable& f) {
  PriceInterval out = Endpoints(d, RiskNeutral(mkt), f);
  if (out.empty) out.diagnostic = "no good deals fails: D has no risk-neutral measure";
  return out;
}

std::vector<double> DefaultVolumeGrid() {
  std::vector<double> v;
  for (int i = 0; i < 25; ++i) v.push_back(std::pow(10.0, -2.0 + 4.0 * i / 24.0));
  return v;
}

double UpperLiquidityPrice(const DeterminingSet& d, const std::vector<RandomVariable>& x,
                           const std::vector<Vector>& h_points, const RandomVariable& f,
                           double v) {
  if (!(v > 0.0)) throw ContractError("liquidity volume must be positive");
  LpBuilder b;
  auto mass = d.AddToLp(b);
  std::vector<LinExpr> g;
  for (const RandomVariable& xi : x) g.push_back(ExpectExpr(mass, xi.values()));
  LinExpr ef = ExpectExpr(mass, f.values());
  int s = b.AddVar(-kInfinity, kInfinity);
  for (const Vector& h : h_points) {
    LinExpr e = Combine(g, h);
    e.Add(ef, -v);
    e.Add(s, -1.0);
    b.AddLe(e, 0.0);
  }
  b.SetObjective(LinExpr::Var(s), LpSense::kMinimize);
  LpSolution sol = SolveBuilt(b);
  if (sol.status != LpStatus::kOptimal) throw SolverError("liquidity LP failed");
  return -sol.objective / v;
}

LiquidityCurve ComputeLiquidityCurve(const DeterminingSet& d, const std::vector<RandomVariable>& x,
                                     const std::vector<Vector>& h_points,
                                     const RandomVariable& f, const std::vector<double>& v_grid) {
  CheckSize(*d.space(), f, "claim");
  LocalResult local = SolveLocal(d, x, h_points);
  if (local.value > 1e-9) {
    std::ostringstream os;
    os.precision(12);
    os << "some attainable P&L has positive utility " << local.value
       << ": the liquidity prices are not defined";
    throw DomainError(os.str());
  }
  LiquidityCurve out;
  out.claim = f;
  std::vector<double> grid = v_grid;
  std::sort(grid.begin(), grid.end());
  for (double v : grid) {
    LiquiditySample s;
    s.v = v;
    s.upper = UpperLiquidityPrice(d, x, h_points, f, v);
    s.lower = -UpperLiquidityPrice(d, x, h_points, -f, v);
    if (!out.samples.empty()) {
      const LiquiditySample& p = out.samples.back();
      if (s.upper < p.upper - 1e-7) out.upper_monotone = false;
      if (s.lower > p.lower + 1e-7) out.lower_monotone = false;
    }
    out.samples.push_back(s);
  }
  PriceInterval l0 = Endpoints(d, RiskNeutralPoints(x, h_points), f);
  if (l0.empty) throw SolverError("risk-neutral set empty despite the standing assumption");
  out.limit0_upper = l0.hi;
  out.limit0_lower = l0.lo;
  out.limit_inf_upper = UpperValue(d, f);
  out.limit_inf_lower = Utility(d, f);
  return out;
}

double UpperLiquidityPriceCone(const DeterminingSet& d, const Market& mkt, const RandomVariable& f,
                               double v) {
  if (!(v > 0.0)) throw ContractError("liquidity volume must be positive");
  GlobalResult g = SolveGlobal(d, mkt, f * -v, false);
  if (g.infinite) throw DomainError("the market admits a good deal: the liquidity prices are not defined");
  return -g.u_star / v;
}

LiquidityCurve ComputeMarketLiquidityCurve(const DeterminingSet& d, const Market& mkt,
                                           const RandomVariable& f,
                                           const std::vector<double>& v_grid) {
  if (mkt.has_polytope()) return ComputeLiquidityCurve(d, mkt.UnitPnls(), mkt.polytope(), f, v_grid);
  CheckSize(*d.space(), f, "claim");
  GlobalResult zero = SolveGlobal(d, mkt, RandomVariable::Constant(d.size(), 0.0), false);
  if (zero.infinite || zero.u_star > 1e-9) {
    throw DomainError("the market admits a good deal: the liquidity prices are not defined");
  }
  LiquidityCurve out;
  out.claim = f;
  std::vector<double> grid = v_grid;
  std::sort(grid.begin(), grid.end());
  for (double v : grid) {
    LiquiditySample s;
    s.v = v;
    s.upper = UpperLiquidityPriceCone(d, mkt, f, v);
    s.lower = -UpperLiquidityPriceCone(d, mkt, -f, v);
    if (!out.samples.empty()) {
      const LiquiditySample& p = out.samples.back();
      if (s.upper < p.upper - 1e-7) out.upper_monotone = false;
      if (s.lower > p.lower + 1e-7) out.lower_monotone = false;
    }
    out.samples.push_back(s);
  }
  PriceInterval l0 = NgdInterval(d, mkt, f);
  if (l0.empty) throw SolverError("risk-neutral set empty despite the standing assumption");
  out.limit0_upper = l0.hi;
  out.limit0_lower = l0.lo;
  out.limit_inf_upper = UpperValue(d, f);
  out.limit_inf_lower = Utility(d, f);
  return out;
}

NbcAgentIndependent NbcAgentIndependentInterval(const DeterminingSet& pd, const DeterminingSet& rd,
                                                const Market& mkt, const RandomVariable& f) {
  CheckSize(*pd.space(), f, "claim");
  RarocResult rr = SolveAgentIndependent(pd, rd, mkt);
  if (rr.lambda_infinite || rr.r_star <= 0.0) {
    throw DomainError("agent-independent NBC needs R* > 0, but R* = 0");
  }
  if (rr.r_infinite) throw DomainError("agent-independent NBC needs R* < infinity");
  NbcAgentIndependent out;
  out.r_star = rr.r_star;
  out.interval = MeasureFormNbc(pd, rd, mkt, f, rr.r_star);
  if (out.interval.empty) {
    out.interval = MeasureFormNbc(pd, rd, mkt, f, rr.r_star * (1.0 + 1e-9));
    out.interval.warnings.push_back("measure form solved at R* (1 + 1e-9)");
  }
  if (out.interval.empty) throw SolverError("D_* has no risk-neutral measure at R*");

  try {
    LiftedPoints lp = BuildLifted(pd, rd, mkt, f);
    const double tol_res = 1e-11;
    std::function<std::optional<int>(double)> test = [&](double r) -> std::optional<int> {
      LpSolution s = LiftedLp(lp, mkt.s0(), r, 0, nullptr);
      if (s.status == LpStatus::kOptimal && s.objective <= tol_res * (1.0 + r)) return 1;
      return std::nullopt;
    };
    auto bis = BisectFeasibility(test, 0.0, 2.0 * rr.r_star + 1.0, 1e-10, false);
    out.lifted_r_star = bis.value;
    double lo = 0.0, hi = 0.0;
    LpSolution a = LiftedLp(lp, mkt.s0(), bis.value, -1, &lo);
    LpSolution b = LiftedLp(lp, mkt.s0(), bis.value, 1, &hi);
    if (a.status == LpStatus::kOptimal && b.status == LpStatus::kOptimal) {
      out.lifted_checked = true;
      out.lifted_lo = lo;
      out.lifted_hi = hi;
      double scale = 1.0 + std::max(std::abs(lo), std::abs(hi));
      if (std::abs(lo - out.interval.lo) > 1e-6 * scale ||
          std::abs(hi - out.interval.hi) > 1e-6 * scale) {
        out.interval.warnings.push_back("lifted geometric endpoints disagree with the measure form");
      }
    }
  } catch (const CapacityError& e) {
    out.interval.warnings.push_back(std::string("lifted geometric check skipped: ") + e.what());
  }

  // Mixture of the extreme sets at the optimiser.
  if (rr.h_star) {
    try {
      RandomVariable xs = mkt.Pnl(*rr.h_star);
      ExtremeSet e1 = ComputeExtremeSet(pd, xs);
      ExtremeSet e2 = ComputeExtremeSet(rd, xs);
      if (e1.active.size() != 1 || e2.active.size() != 1) {
        out.interval.warnings.push_back(
            "extreme-set mixture cross-check skipped: extreme sets are not singletons, the "
            "mixture may contain measures that are not risk-neutral");
      } else {
        const double a = 1.0 / (1.0 + rr.r_star), c = rr.r_star / (1.0 + rr.r_star);
        Vector z = a * e1.vertices[e1.active[0]] + c * e2.vertices[e2.active[0]];
        double price = ExpectDensity(*pd.space(), z, f.values());
        double scale = 1.0 + std::abs(price);
        out.mixture_checked = true;
        if (std::abs(price - out.interval.lo) > 1e-6 * scale ||
            std::abs(price - out.interval.hi) > 1e-6 * scale) {
          out.interval.warnings.push_back("extreme-set mixture price disagrees with the interval");
        }
      }
    } catch (const CapacityError&) {
      out.interval.warnings.push_back("extreme-set mixture cross-check skipped: vertex cap");
    }
  }
  return out;
}

PriceInterval NbcSingleAgent(const DeterminingSet& d, const Market& mkt, const RandomVariable& w,
                             const RandomVariable& f) {
  CheckSize(*d.space(), w, "endowment");
  GlobalResult g = SolveGlobal(d, mkt, w, false);
  PriceInterval out;
  if (g.infinite) {
    out.empty = true;
    out.diagnostic = "D has no risk-neutral measure";
    return out;
  }
  const double m = g.u_star;
  const double u = Utility(d, w);
  if (m > u + 1e-7 * (1.0 + std::abs(u))) {
    out.empty = true;
    out.diagnostic = "the endowment is not optimal: its extreme set has no risk-neutral measure";
    return out;
  }
  const double slack = 1e-12 * (1.0 + std::abs(m));
  Constrain extra = [&](LpBuilder& b, const std::vector<LinExpr>& mass) {
    mkt.AddRiskNeutral(b, mass);
    b.AddLe(ExpectExpr(mass, w.values()), m + slack);
  };
  out = Endpoints(d, extra, f);
  if (out.empty) throw SolverError("argmin face of the global problem is empty");
  return out;
}

PriceInterval NbcMultiAgent(const std::vector<Agent>& agents, const Market& mkt,
                            const RandomVariable& f) {
  if (agents.empty()) throw StructuralError("multi-agent NBC needs at least one agent");
  PriceInterval out;
  bool first = true;
  for (size_t n = 0; n < agents.size(); ++n) {
    const Agent& a = agents[n];
    GlobalResult g = SolveGlobal(a.d, mkt, a.w, false);
    double u = Utility(a.d, a.w);
    if (g.infinite || std::abs(g.u_star - u) > 1e-7 * (1.0 + std::abs(u))) {
      throw DomainError("agent " + std::to_string(n) + ": endowment is not optimal");
    }
    PriceInterval p = NbcSingleAgent(a.d, mkt, a.w, f);
    if (p.empty) throw DomainError("agent " + std::to_string(n) + ": empty single-agent interval");
    if (first) {
      out = p;
      first = false;
      continue;
    }
    if (p.lo < out.lo) {
      out.lo = p.lo;
      out.lo_measure = p.lo_measure;
    }
    if (p.hi > out.hi) {
      out.hi = p.hi;
      out.hi_measure = p.hi_measure;
    }
  }
  return out;
}

}  // namespace riskengine
