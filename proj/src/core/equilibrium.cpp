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

#include "core/equilibrium.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"
#include "core/geometry.hpp"

namespace riskengine {
namespace {

void CheckAgents(const std::vector<AgentSpec>& agents) {
  if (agents.empty()) throw StructuralError("equilibrium needs at least one agent");
  const int m = agents[0].d.size();
  for (const AgentSpec& a : agents) {
    if (a.d.size() != m || a.w.size() != m || a.market.space()->size() != m) {
      throw StructuralError("agents must share one scenario space");
    }
  }
}

// One measure lying in every set: the first block's masses, tied to the others.
std::vector<LinExpr> AddCommonMeasure(LpBuilder& b, const std::vector<const DeterminingSet*>& sets) {
  std::vector<LinExpr> mass = sets[0]->AddToLp(b);
  for (size_t k = 1; k < sets.size(); ++k) {
    std::vector<LinExpr> other = sets[k]->AddToLp(b);
    for (size_t i = 0; i < mass.size(); ++i) {
      LinExpr e = other[i];
      e.Add(mass[i], -1.0);
      b.AddEq(e, 0.0);
    }
  }
  return mass;
}

Vector Payoff(const std::vector<RandomVariable>& s, const Vector& h) {
  Vector v = Vector::Zero(s.empty() ? 0 : s[0].size());
  for (size_t i = 0; i < s.size(); ++i) v += h[static_cast<int>(i)] * s[i].values();
  return v;
}

RandomVariable Sum(const std::vector<AgentSpec>& agents) {
  RandomVariable w = agents[0].w;
  for (size_t n = 1; n < agents.size(); ++n) w = w + agents[n].w;
  return w;
}

struct JointLp {
  LpBuilder b;
  std::vector<std::vector<LinExpr>> mass;
  int x = -1;
  std::vector<std::vector<RowRef>> coupling;
  LinExpr objective;
};

void BuildJoint(const std::vector<AgentSpec>& agents, const std::vector<RandomVariable>& s,
                JointLp* j) {
  const int d = static_cast<int>(s.size());
  j->x = j->b.AddVars(d, -kInfinity, kInfinity);
  for (const AgentSpec& a : agents) {
    auto mass = a.d.AddToLp(j->b);
    a.market.AddRiskNeutral(j->b, mass);
    std::vector<RowRef> rows;
    for (int i = 0; i < d; ++i) {
      LinExpr e = ExpectExpr(mass, s[i].values());
      e.Add(j->x + i, -1.0);
      rows.push_back(j->b.AddEq(e, 0.0));
    }
    j->objective.Add(ExpectExpr(mass, a.w.values()));
    j->mass.push_back(std::move(mass));
    j->coupling.push_back(std::move(rows));
  }
  j->b.SetObjective(j->objective, LpSense::kMinimize);
}

// f_n(P): min E_Q w_n over D_n and R(A_n) with E_Q S = P.
std::optional<double> LowerEnvelope(const AgentSpec& a, const std::vector<RandomVariable>& s,
                                    const Vector& p) {
  for (double slack : {0.0, 1e-9}) {
    LpBuilder b;
    auto mass = a.d.AddToLp(b);
    a.market.AddRiskNeutral(b, mass);
    for (size_t i = 0; i < s.size(); ++i) {
      LinExpr e = ExpectExpr(mass, s[i].values());
      const double pi = p[static_cast<int>(i)];
      if (slack == 0.0) {
        b.AddEq(e, pi);
      } else {
        b.AddLe(e, pi + slack * (1.0 + std::abs(pi)));
        b.AddGe(e, pi - slack * (1.0 + std::abs(pi)));
      }
    }
    b.SetObjective(ExpectExpr(mass, a.w.values()), LpSense::kMinimize);
    LpSolution sol = SolveBuilt(b);
    if (sol.status == LpStatus::kOptimal) return sol.objective;
  }
  return std::nullopt;
}

// The agent's market with the contracts S added at prices P.
std::optional<Market> ExtendedMarket(const Market& mkt, const std::vector<RandomVariable>& s,
                                     const Vector& p) {
  const int dn = mkt.dim(), d = static_cast<int>(s.size()), m = mkt.space()->size();
  Vector s0(dn + d);
  Matrix s1(dn + d, m);
  s0.head(dn) = mkt.s0();
  s0.tail(d) = p;
  if (dn > 0) s1.topRows(dn) = mkt.s1();
  for (int i = 0; i < d; ++i) s1.row(dn + i) = s[i].values().transpose();
  if (dn == 0) return Market(mkt.space(), s0, s1, Cone::Full(d));
  std::vector<Vector> gens;
  for (const Vector& g : mkt.cone().generators()) {
    Vector e = Vector::Zero(dn + d);
    e.head(dn) = g;
    gens.push_back(e);
  }
  for (int i = 0; i < d; ++i) {
    gens.push_back(Vector::Unit(dn + d, dn + i));
    gens.push_back(-Vector::Unit(dn + d, dn + i));
  }
  try {
    return Market(mkt.space(), s0, s1, Cone::FromGenerators(dn + d, gens));
  } catch (const CapacityError&) {
    return std::nullopt;
  }
}

// Largest t with a common x such that x and x +- t e_i lie in every G_n.
double InteriorMargin(const std::vector<AgentSpec>& agents, const std::vector<RandomVariable>& s) {
  const int d = static_cast<int>(s.size());
  LpBuilder b;
  int x = b.AddVars(d, -kInfinity, kInfinity);
  int t = b.AddVar(0.0, 1.0);
  for (const AgentSpec& a : agents) {
    for (int o = 0; o <= 2 * d; ++o) {
      auto mass = a.d.AddToLp(b);
      a.market.AddRiskNeutral(b, mass);
      for (int i = 0; i < d; ++i) {
        LinExpr e = ExpectExpr(mass, s[i].values());
        e.Add(x + i, -1.0);
        if (o > 0 && (o - 1) / 2 == i) e.Add(t, (o % 2 == 1) ? -1.0 : 1.0);
        b.AddEq(e, 0.0);
      }
    }
  }
  b.SetObjective(LinExpr::Var(t), LpSense::kMaximize);
  LpSolution sol = SolveBuilt(b);
  return sol.status == LpStatus::kOptimal ? sol.objective : -1.0;
}

double AgentUtility(const AgentSpec& a, const Vector& personal, const Vector& contract_payoff) {
  RandomVariable x = a.w + RandomVariable(contract_payoff);
  if (a.market.dim() > 0 && personal.size() == a.market.dim()) x = x + a.market.Pnl(personal);
  return Utility(a.d, x);
}

}  // namespace

OverallUtility SupConvolution(const std::vector<DeterminingSet>& d_sets, const RandomVariable& x) {
  if (d_sets.empty()) throw StructuralError("sup-convolution needs at least one set");
  std::vector<const DeterminingSet*> ptrs;
  for (const DeterminingSet& d : d_sets) {
    CheckSize(*d.space(), x, "sup-convolution argument");
    ptrs.push_back(&d);
  }
  LpBuilder b;
  auto mass = AddCommonMeasure(b, ptrs);
  b.SetObjective(ExpectExpr(mass, x.values()), LpSense::kMinimize);
  LpSolution sol = SolveBuilt(b);
  OverallUtility out;
  if (sol.status == LpStatus::kInfeasible) {
    out.infinite = true;
    return out;
  }
  out.value = sol.objective;
  out.witness = DensityAt(*d_sets[0].space(), mass, sol.x);
  return out;
}

OverallUtility OverallUtilityUnconstrained(const std::vector<AgentSpec>& agents) {
  CheckAgents(agents);
  std::vector<const DeterminingSet*> ptrs;
  for (const AgentSpec& a : agents) ptrs.push_back(&a.d);
  LpBuilder b;
  auto mass = AddCommonMeasure(b, ptrs);
  for (const AgentSpec& a : agents) a.market.AddRiskNeutral(b, mass);
  b.SetObjective(ExpectExpr(mass, Sum(agents).values()), LpSense::kMinimize);
  LpSolution sol = SolveBuilt(b);
  OverallUtility out;
  if (sol.status == LpStatus::kInfeasible) {
    out.infinite = true;
    return out;
  }
  if (sol.status != LpStatus::kOptimal) throw SolverError("overall utility LP unbounded");
  out.value = sol.objective;
  out.witness = DensityAt(*agents[0].d.space(), mass, sol.x);
  return out;
}

UnconstrainedEquilibrium SolveUnconstrainedEquilibrium(const std::vector<AgentSpec>& agents,
                                                       const RandomVariable& f) {
  OverallUtility mu = OverallUtilityUnconstrained(agents);
  if (mu.infinite) throw DomainError("M = infinity: no common risk-neutral measure, no equilibrium");
  CheckSize(*agents[0].d.space(), f, "claim");
  UnconstrainedEquilibrium out;
  out.m = mu.value;
  out.certificate = mu.witness;
  std::vector<const DeterminingSet*> ptrs;
  for (const AgentSpec& a : agents) ptrs.push_back(&a.d);
  const RandomVariable w = Sum(agents);
  const double cap = mu.value + 1e-12 * (1.0 + std::abs(mu.value));
  for (int side = 0; side < 2; ++side) {
    LpBuilder b;
    auto mass = AddCommonMeasure(b, ptrs);
    for (const AgentSpec& a : agents) a.market.AddRiskNeutral(b, mass);
    b.AddLe(ExpectExpr(mass, w.values()), cap);
    b.SetObjective(ExpectExpr(mass, f.values()), side == 0 ? LpSense::kMinimize : LpSense::kMaximize);
    LpSolution sol = SolveBuilt(b);
    if (sol.status != LpStatus::kOptimal) throw SolverError("equilibrium face LP failed");
    Vector z = DensityAt(*agents[0].d.space(), mass, sol.x);
    (side == 0 ? out.price.lo : out.price.hi) = sol.objective;
    (side == 0 ? out.price.lo_measure : out.price.hi_measure) = z;
  }
  return out;
}

OverallUtility OverallUtilityConstrained(const std::vector<AgentSpec>& agents,
                                         const std::vector<RandomVariable>& s) {
  CheckAgents(agents);
  if (s.empty()) throw StructuralError("constrained equilibrium needs at least one contract");
  for (const RandomVariable& si : s) CheckSize(*agents[0].d.space(), si, "contract");
  JointLp j;
  BuildJoint(agents, s, &j);
  LpSolution sol = SolveBuilt(j.b);
  OverallUtility out;
  if (sol.status == LpStatus::kInfeasible) {
    out.infinite = true;
    return out;
  }
  if (sol.status != LpStatus::kOptimal) throw SolverError("joint equilibrium LP unbounded");
  out.value = sol.objective;
  out.witness = DensityAt(*agents[0].d.space(), j.mass[0], sol.x);
  return out;
}

EquilibriumSolution SolveConstrainedEquilibrium(const std::vector<AgentSpec>& agents,
                                                const std::vector<RandomVariable>& s) {
  CheckAgents(agents);
  if (s.empty()) throw StructuralError("constrained equilibrium needs at least one contract");
  for (const RandomVariable& si : s) CheckSize(*agents[0].d.space(), si, "contract");
  const int d = static_cast<int>(s.size());
  const int n_agents = static_cast<int>(agents.size());
  JointLp j;
  BuildJoint(agents, s, &j);
  LpProblem problem = j.b.Build();
  LpSolution sol = SolveLp(problem);
  if (sol.status == LpStatus::kInfeasible) {
    throw DomainError("M = infinity: the agents' generators do not intersect");
  }
  if (sol.status != LpStatus::kOptimal) throw SolverError("joint equilibrium LP unbounded");
  EquilibriumSolution out;
  out.m = sol.objective + j.b.objective_constant();
  out.p = Vector(d);
  for (int i = 0; i < d; ++i) out.p[i] = sol.x[j.x + i];

  Vector total = Vector::Zero(d);
  bool non_unique = false;
  for (int n = 0; n < n_agents; ++n) {
    Vector h(d);
    for (int i = 0; i < d; ++i) {
      h[i] = -LpBuilder::Dual(sol, j.coupling[n][i]);
      if (!non_unique && n_agents > 1) {
        DualInterval r = DualRange(problem, sol, j.coupling[n][i]);
        if (r.hi - r.lo > 1e-7 * (1.0 + std::abs(h[i]))) non_unique = true;
      }
    }
    total += h;
    out.holdings.push_back(h);
  }
  out.sum_residual = total.cwiseAbs().maxCoeff();
  for (Vector& h : out.holdings) h -= total / n_agents;
  if (non_unique) out.flags.push_back("holdings non-unique");

  // Range of the equilibrium price over the optimal face.
  out.p_lo = out.p;
  out.p_hi = out.p;
  {
    JointLp k;
    BuildJoint(agents, s, &k);
    k.b.AddLe(k.objective, out.m + 1e-12 * (1.0 + std::abs(out.m)));
    for (int i = 0; i < d; ++i) {
      for (int side = 0; side < 2; ++side) {
        k.b.SetObjective(LinExpr::Var(k.x + i), side == 0 ? LpSense::kMinimize : LpSense::kMaximize);
        LpSolution r = SolveBuilt(k.b);
        if (r.status == LpStatus::kOptimal) (side == 0 ? out.p_lo : out.p_hi)[i] = r.objective;
      }
    }
    if ((out.p_hi - out.p_lo).maxCoeff() > 1e-7) out.flags.push_back("equilibrium price non-unique");
  }

  out.interiors_intersect = InteriorMargin(agents, s) > 1e-9;
  if (!out.interiors_intersect) {
    out.flags.push_back("interiors of the generators do not intersect");
  }

  double total_u = 0.0;
  out.arrow_debreu = true;
  for (int n = 0; n < n_agents; ++n) {
    const AgentSpec& a = agents[n];
    const Vector& h = out.holdings[n];
    AgentOutcome ao;
    RandomVariable endowed = a.w + RandomVariable(Payoff(s, h));
    GlobalResult g = SolveGlobal(a.d, a.market, endowed, false);
    if (g.infinite) throw SolverError("agent problem infeasible at a finite overall utility");
    ao.utility = g.u_star;
    ao.personal = g.h_star ? *g.h_star : Vector::Zero(a.market.dim());
    total_u += ao.utility;
    std::optional<double> fp = LowerEnvelope(a, s, out.p);
    ao.f_at_p = fp ? *fp : kInfinity;
    const double own = ao.utility - h.dot(out.p);
    ao.support_ok = fp.has_value() && own >= *fp - 1e-7 * (1.0 + std::abs(*fp));
    std::optional<Market> ext = ExtendedMarket(a.market, s, out.p);
    if (ext) {
      GlobalResult best = SolveGlobal(a.d, *ext, a.w, false);
      ao.arrow_debreu_max = best.infinite ? kInfinity : best.u_star;
      ao.arrow_debreu_ok = !best.infinite &&
                           std::abs(best.u_star - own) <= 1e-6 * (1.0 + std::abs(own));
    } else {
      out.flags.push_back("agent " + std::to_string(n) + ": Arrow-Debreu check skipped (cone too large)");
    }
    out.arrow_debreu = out.arrow_debreu && ao.arrow_debreu_ok;
    out.agents.push_back(ao);
  }
  out.pareto = std::abs(total_u - out.m) <= 1e-6 * (1.0 + std::abs(out.m));
  return out;
}

ParetoCheck VerifyParetoConstrained(const std::vector<AgentSpec>& agents,
                                    const std::vector<RandomVariable>& s,
                                    const std::vector<Vector>& holdings,
                                    const std::vector<Vector>& personal) {
  if (holdings.size() != agents.size()) throw StructuralError("one holding per agent expected");
  OverallUtility mu = OverallUtilityConstrained(agents, s);
  ParetoCheck out;
  out.m = mu.infinite ? kInfinity : mu.value;
  Vector total = Vector::Zero(static_cast<int>(s.size()));
  for (size_t n = 0; n < agents.size(); ++n) {
    total += holdings[n];
    Vector own = n < personal.size() ? personal[n] : Vector();
    if (own.size() && !agents[n].market.cone().Contains(own, 1e-9)) return out;
    out.sum += AgentUtility(agents[n], own, Payoff(s, holdings[n]));
  }
  if (mu.infinite || total.cwiseAbs().maxCoeff() > 1e-9) return out;
  out.pareto = std::abs(out.sum - out.m) <= 1e-6 * (1.0 + std::abs(out.m));
  return out;
}

ParetoCheck VerifyParetoUnconstrained(const std::vector<AgentSpec>& agents,
                                      const std::vector<Vector>& personal,
                                      const std::vector<RandomVariable>& transfers) {
  if (transfers.size() != agents.size()) throw StructuralError("one transfer per agent expected");
  OverallUtility mu = OverallUtilityUnconstrained(agents);
  ParetoCheck out;
  out.m = mu.infinite ? kInfinity : mu.value;
  Vector total = Vector::Zero(agents[0].d.size());
  for (size_t n = 0; n < agents.size(); ++n) {
    total += transfers[n].values();
    Vector own = n < personal.size() ? personal[n] : Vector();
    if (own.size() && !agents[n].market.cone().Contains(own, 1e-9)) return out;
    out.sum += AgentUtility(agents[n], own, transfers[n].values());
  }
  if (mu.infinite || total.cwiseAbs().maxCoeff() > 1e-9) return out;
  out.pareto = std::abs(out.sum - out.m) <= 1e-6 * (1.0 + std::abs(out.m));
  return out;
}

}  // namespace riskengine
