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

#include "app/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <future>
#include <sstream>

#include "core/equilibrium.hpp"
#include "core/lp.hpp"
#include "core/optimization.hpp"
#include "core/pricing.hpp"
#ifdef RISKENGINE_WITH_ORACLE
#include "oracle/oracle.hpp"
#endif

namespace riskengine::app {
namespace {

using model::Model;

const std::string& Need(const std::string& value, const char* flag) {
  if (value.empty()) throw ModelError(std::string("missing required argument --") + flag);
  return value;
}

RandomVariable Endowment(const Model& m, const std::string& name) {
  if (name.empty()) return RandomVariable::Constant(m.space->size(), 0.0);
  return m.Variable(name);
}

json Strings(const std::vector<std::string>& xs) {
  json a = json::array();
  for (const auto& s : xs) a.push_back(s);
  return a;
}

json Interval(const PriceInterval& p) {
  json j;
  j["empty"] = p.empty;
  if (!p.empty) {
    j["lo"] = Num(p.lo);
    j["hi"] = Num(p.hi);
    j["lo_measure"] = Vec(p.lo_measure);
    j["hi_measure"] = Vec(p.hi_measure);
  }
  if (!p.diagnostic.empty()) j["diagnostic"] = p.diagnostic;
  return j;
}

json Check(const std::string& name, bool pass, double value = NAN, double tolerance = NAN) {
  json j;
  j["name"] = name;
  j["pass"] = pass;
  if (!std::isnan(value)) j["value"] = Num(value);
  if (!std::isnan(tolerance)) j["tolerance"] = Num(tolerance);
  return j;
}

bool AllPass(const json& checks) {
  for (const auto& c : checks) {
    if (!c["pass"].get<bool>()) return false;
  }
  return true;
}

double ExpectAt(const ScenarioSpace& s, const Vector& z, const RandomVariable& x) {
  return ExpectDensity(s, z, x.values());
}

// Wraps a command body with timing, solver statistics and error capture.
template <class F>
Outcome Run(const std::string& command, const Model* m, json inputs, F&& body) {
  Outcome out;
  LpStats before = ThreadLpStats();
  auto t0 = std::chrono::steady_clock::now();
  json& doc = out.document;
  doc["command"] = command;
  doc["inputs"] = inputs;
  doc["inputs_digest"] = Fnv1a((m ? m->canonical : std::string()) + "\n" + inputs.dump());
  doc["warnings"] = json::array();
  long long extra_pivots = 0, extra_solves = 0;
  try {
    body(out, &extra_solves, &extra_pivots);
  } catch (const Error& e) {
    out.ok = false;
    out.passed = false;
    out.error = e.kind();
    doc["error"] = {{"kind", KindName(e.kind())}, {"message", e.what()}};
    doc.erase("outputs");
    doc.erase("certificates");
    doc.erase("checks");
    out.csv.clear();
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const LpStats& after = ThreadLpStats();
  doc["statistics"]["lp_solves"] = after.solves - before.solves + extra_solves;
  doc["statistics"]["pivots"] = after.pivots - before.pivots + extra_pivots;
  if (doc.contains("checks") && !AllPass(doc["checks"])) out.passed = false;
  return out;
}

void AddWarnings(json& doc, const std::vector<std::string>& w) {
  for (const auto& s : w) doc["warnings"].push_back(s);
}

}  // namespace

const char* KindName(ErrorKind k) {
  switch (k) {
    case ErrorKind::kStructural: return "structural";
    case ErrorKind::kModel: return "model";
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kSolver: return "solver";
    case ErrorKind::kCapacity: return "capacity";
    case ErrorKind::kContract: return "contract";
  }
  return "unknown";
}

std::string Fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json Num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  double r = std::strtod(buf, nullptr);
  if (r == 0.0) r = 0.0;
  return r;
}

json Vec(const Vector& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(Num(v[i]));
  return a;
}

std::string Render(const Outcome& o, bool with_timing) {
  json doc = o.document;
  if (with_timing) doc["statistics"]["wall_seconds"] = o.seconds;
  return doc.dump(2) + "\n";
}

Outcome Optimize(const Model& m, const OptimizeArgs& a) {
  json in = {{"problem", a.problem}, {"pd", a.pd}, {"rd", a.rd}, {"set", a.set},
             {"market", a.market}, {"endowment", a.endowment}, {"firm", a.firm}};
  return Run("optimize", &m, in, [&](Outcome& out, long long*, long long*) {
    json& doc = out.document;
    if (a.problem == "raroc") {
      const DeterminingSet& pd = m.Set(Need(a.pd, "pd"));
      const DeterminingSet& rd = m.Set(Need(a.rd, "rd"));
      const Market& mkt = m.GetMarket(Need(a.market, "market"));
      RarocResult r = SolveAgentIndependent(pd, rd, mkt);
      json& o = doc["outputs"];
      o["r_star"] = r.r_infinite ? json("inf") : Num(r.r_star);
      o["r_star_infinite"] = r.r_infinite;
      o["lambda_star"] = r.lambda_infinite ? json("inf") : Num(r.lambda_star);
      o["lambda_star_infinite"] = r.lambda_infinite;
      o["all_optimal"] = r.all_optimal;
      o["h_star"] = r.h_star ? Vec(*r.h_star) : json(nullptr);
      json& c = doc["certificates"];
      c["pd_density"] = Vec(r.q_pd);
      c["rd_density"] = Vec(r.q_rd);
      c["lambda_lp"] = Num(r.lambda_lp);
      c["lambda_bisection"] = Num(r.lambda_bisection);
      doc["statistics"]["bisection_iterations"] = r.bisection_iterations;
      json checks = json::array();
      if (r.h_star) {
        checks.push_back(Check("h_star_in_cone", mkt.cone().Contains(*r.h_star, 1e-9)));
        checks.push_back(Check("h_star_optimal", IsRarocOptimal(pd, rd, mkt, r, *r.h_star)));
      }
      if (!r.lambda_infinite && !r.r_infinite) {
        double gap = std::abs(r.lambda_lp - r.lambda_bisection);
        checks.push_back(Check("bisection_matches_lp", gap <= 1e-5 * (1 + r.lambda_lp), gap, 1e-5));
      }
      doc["checks"] = checks;
      AddWarnings(doc, r.warnings);
    } else if (a.problem == "global") {
      const DeterminingSet& d = m.Set(Need(a.set, "set"));
      const Market& mkt = m.GetMarket(Need(a.market, "market"));
      RandomVariable w = Endowment(m, a.endowment);
      GlobalResult g = SolveGlobal(d, mkt, w);
      json& o = doc["outputs"];
      o["u_star"] = g.infinite ? json("inf") : Num(g.u_star);
      o["u_star_infinite"] = g.infinite;
      o["h_star"] = g.h_star ? Vec(*g.h_star) : json(nullptr);
      json& c = doc["certificates"];
      c["witness_density"] = Vec(g.witness);
      c["lifted_checked"] = g.lifted_checked;
      if (g.lifted_checked) c["lifted_value"] = Num(g.lifted_value);
      json checks = json::array();
      if (g.lifted_checked && !g.infinite) {
        double gap = std::abs(g.u_star - g.lifted_value);
        checks.push_back(Check("formulations_agree", gap <= 1e-6 * (1 + std::abs(g.u_star)), gap, 1e-6));
      }
      if (g.h_star && !g.infinite) {
        double at = Utility(d, w + mkt.Pnl(*g.h_star));
        double gap = std::abs(at - g.u_star);
        checks.push_back(Check("utility_at_h_star", gap <= 1e-6 * (1 + std::abs(g.u_star)), gap, 1e-6));
        checks.push_back(Check("h_star_in_cone", mkt.cone().Contains(*g.h_star, 1e-9)));
      }
      doc["checks"] = checks;
    } else if (a.problem == "local") {
      const DeterminingSet& d = m.Set(Need(a.set, "set"));
      const Market& mkt = m.GetMarket(Need(a.market, "market"));
      if (!mkt.has_polytope()) throw ModelError("--problem local needs a market with a \"polytope\"");
      RandomVariable w = Endowment(m, a.endowment);
      LocalResult l = SolveLocal(d, mkt.UnitPnls(), mkt.polytope(), a.endowment.empty() ? nullptr : &w);
      json& o = doc["outputs"];
      o["value"] = Num(l.value);
      o["h_star"] = l.h_star ? Vec(*l.h_star) : json(nullptr);
      doc["certificates"]["g"] = Vec(l.g);
      json checks = json::array();
      if (l.h_star) {
        double at = Utility(d, w + mkt.Pnl(*l.h_star));
        double gap = std::abs(at - l.value);
        checks.push_back(Check("utility_at_h_star", gap <= 1e-7 * (1 + std::abs(l.value)), gap, 1e-7));
      }
      doc["checks"] = checks;
    } else if (a.problem == "firm") {
      const DeterminingSet& pd = m.Set(Need(a.pd, "pd"));
      const DeterminingSet& rd = m.Set(Need(a.rd, "rd"));
      const model::FirmEntry& f = m.Firm(Need(a.firm, "firm"));
      std::vector<RandomVariable> units;
      for (const auto& u : f.units) units.push_back(m.Variable(u));
      FirmStructure fs = CheckFirmStructure(pd, rd, units, f.h, f.cone);
      json& o = doc["outputs"];
      o["optimal"] = fs.optimal;
      o["contributions_equal"] = fs.contributions_equal;
      o["interior"] = fs.interior;
      o["hypothesis_verified"] = fs.hypothesis_verified;
      o["indeterminate"] = fs.indeterminate;
      o["raroc"] = Num(fs.raroc);
      o["r_star"] = Num(fs.r_star);
      json contrib = json::array();
      for (const auto& c : fs.contributions) contrib.push_back(c ? Num(*c) : json(nullptr));
      o["contributions"] = contrib;
      o["flags"] = Strings(fs.flags);
      doc["checks"] = json::array();
    } else {
      throw ModelError("unknown --problem \"" + a.problem + "\" (raroc, global, local, firm)");
    }
  });
}

Outcome Price(const Model& m, const PriceArgs& a) {
  json in = {{"technique", a.technique}, {"set", a.set}, {"pd", a.pd}, {"rd", a.rd},
             {"market", a.market}, {"endowment", a.endowment}, {"agents", a.agents},
             {"claim", a.claim}};
  return Run("price", &m, in, [&](Outcome& out, long long*, long long*) {
    json& doc = out.document;
    const RandomVariable& f = m.Variable(Need(a.claim, "claim"));
    const Market& mkt = m.GetMarket(Need(a.market, "market"));
    const ScenarioSpace& s = *m.space;
    PriceInterval p;
    json checks = json::array();
    if (a.technique == "ngd") {
      p = NgdInterval(m.Set(Need(a.set, "set")), mkt, f);
    } else if (a.technique == "nbc-ai") {
      NbcAgentIndependent n =
          NbcAgentIndependentInterval(m.Set(Need(a.pd, "pd")), m.Set(Need(a.rd, "rd")), mkt, f);
      p = n.interval;
      doc["certificates"]["r_star"] = Num(n.r_star);
      doc["certificates"]["lifted_checked"] = n.lifted_checked;
      doc["certificates"]["mixture_checked"] = n.mixture_checked;
      if (n.lifted_checked) {
        doc["certificates"]["lifted_lo"] = Num(n.lifted_lo);
        doc["certificates"]["lifted_hi"] = Num(n.lifted_hi);
        double gap = std::max(std::abs(n.lifted_lo - p.lo), std::abs(n.lifted_hi - p.hi));
        checks.push_back(Check("lifted_form_agrees", gap <= 1e-6 * (1 + std::abs(p.hi)), gap, 1e-6));
      }
    } else if (a.technique == "nbc-single") {
      p = NbcSingleAgent(m.Set(Need(a.set, "set")), mkt, Endowment(m, a.endowment), f);
    } else if (a.technique == "nbc-multi") {
      std::vector<Agent> agents;
      for (const auto& e : m.Agents(Need(a.agents, "agents"))) {
        agents.push_back({m.Set(e.set), Endowment(m, e.endowment)});
      }
      p = NbcMultiAgent(agents, mkt, f);
    } else {
      throw ModelError("unknown --technique \"" + a.technique + "\" (ngd, nbc-ai, nbc-single, nbc-multi)");
    }
    doc["outputs"]["interval"] = Interval(p);
    if (!p.empty && p.lo_measure.size() == s.size()) {
      double glo = std::abs(ExpectAt(s, p.lo_measure, f) - p.lo);
      double ghi = std::abs(ExpectAt(s, p.hi_measure, f) - p.hi);
      double g = std::max(glo, ghi);
      checks.push_back(Check("endpoint_measures_price_claim", g <= 1e-7 * (1 + std::abs(p.hi)), g, 1e-7));
      checks.push_back(Check("ordered", p.lo <= p.hi + 1e-12 * (1 + std::abs(p.hi))));
    }
    doc["checks"] = checks;
    AddWarnings(doc, p.warnings);
  });
}

Outcome Liquidity(const Model& m, const LiquidityArgs& a) {
  json in = {{"set", a.set}, {"market", a.market}, {"claim", a.claim}, {"v_grid", Vec(Eigen::Map<const Vector>(a.v_grid.data(), static_cast<int>(a.v_grid.size())))}};
  return Run("liquidity", &m, in, [&](Outcome& out, long long* solves, long long* pivots) {
    json& doc = out.document;
    const DeterminingSet& d = m.Set(Need(a.set, "set"));
    const Market& mkt = m.GetMarket(Need(a.market, "market"));
    const RandomVariable& f = m.Variable(Need(a.claim, "claim"));
    std::vector<double> grid = a.v_grid.empty() ? DefaultVolumeGrid() : a.v_grid;
    for (double v : grid) {
      if (!(v > 0.0) || !std::isfinite(v)) throw ModelError("volume grid entries must be positive and finite");
    }
    std::sort(grid.begin(), grid.end());
    const auto x = mkt.UnitPnls();
    // Limits and the standing-assumption check come from a curve with no samples.
    LiquidityCurve curve = ComputeMarketLiquidityCurve(d, mkt, f, {});
    auto upper = [&](const RandomVariable& claim, double v) {
      return mkt.has_polytope() ? UpperLiquidityPrice(d, x, mkt.polytope(), claim, v)
                                : UpperLiquidityPriceCone(d, mkt, claim, v);
    };
    std::vector<LiquiditySample> samples(grid.size());
    const int jobs = std::max(1, std::min<int>(a.jobs, static_cast<int>(grid.size())));
    auto work = [&](int part) {
      LpStats before = ThreadLpStats();
      for (size_t i = part; i < grid.size(); i += jobs) {
        samples[i].v = grid[i];
        samples[i].upper = upper(f, grid[i]);
        samples[i].lower = -upper(-f, grid[i]);
      }
      LpStats after = ThreadLpStats();
      return std::make_pair(after.solves - before.solves, after.pivots - before.pivots);
    };
    std::vector<std::future<std::pair<long long, long long>>> futures;
    for (int k = 1; k < jobs; ++k) futures.push_back(std::async(std::launch::async, work, k));
    work(0);
    for (auto& fu : futures) {
      auto [s, p] = fu.get();
      *solves += s;
      *pivots += p;
    }
    bool up = true, low = true;
    std::ostringstream csv;
    csv << "v,upper,lower\n";
    for (size_t i = 0; i < samples.size(); ++i) {
      if (i > 0) {
        up = up && samples[i].upper >= samples[i - 1].upper - 1e-7;
        low = low && samples[i].lower <= samples[i - 1].lower + 1e-7;
      }
      csv << Num(samples[i].v).dump() << "," << Num(samples[i].upper).dump() << ","
          << Num(samples[i].lower).dump() << "\n";
    }
    out.csv = csv.str();
    json& o = doc["outputs"];
    o["samples"] = static_cast<int>(samples.size());
    o["limit_0"] = {{"upper", Num(curve.limit0_upper)}, {"lower", Num(curve.limit0_lower)}};
    o["limit_inf"] = {{"upper", Num(curve.limit_inf_upper)}, {"lower", Num(curve.limit_inf_lower)}};
    o["csv_digest"] = Fnv1a(out.csv);
    json checks = json::array();
    checks.push_back(Check("upper_nondecreasing", up));
    checks.push_back(Check("lower_nonincreasing", low));
    bool inside = true;
    for (const auto& s : samples) {
      inside = inside && s.upper <= curve.limit_inf_upper + 1e-7 && s.upper >= curve.limit0_upper - 1e-7 &&
               s.lower >= curve.limit_inf_lower - 1e-7 && s.lower <= curve.limit0_lower + 1e-7;
    }
    checks.push_back(Check("between_limits", inside));
    doc["checks"] = checks;
  });
}

Outcome Equilibrium(const Model& m, const EquilibriumArgs& a) {
  json in = {{"mode", a.mode}, {"agents", a.agents}, {"claim", a.claim}, {"contracts", Strings(a.contracts)}};
  return Run("equilibrium", &m, in, [&](Outcome& out, long long*, long long*) {
    json& doc = out.document;
    std::vector<AgentSpec> agents;
    for (const auto& e : m.Agents(Need(a.agents, "agents"))) {
      agents.push_back({m.Set(e.set), e.market.empty() ? Market::Trivial(m.space) : m.GetMarket(e.market),
                        Endowment(m, e.endowment)});
    }
    json checks = json::array();
    if (a.mode == "unconstrained") {
      if (!a.contracts.empty()) throw ModelError("--contracts applies to constrained mode only");
      UnconstrainedEquilibrium u = SolveUnconstrainedEquilibrium(agents, m.Variable(Need(a.claim, "claim")));
      doc["outputs"]["M"] = Num(u.m);
      doc["outputs"]["price"] = Interval(u.price);
      doc["certificates"]["measure"] = Vec(u.certificate);
      double e = 0.0;
      for (const auto& ag : agents) e += ExpectAt(*m.space, u.certificate, ag.w);
      double gap = std::abs(e - u.m);
      checks.push_back(Check("certificate_attains_M", gap <= 1e-7 * (1 + std::abs(u.m)), gap, 1e-7));
      AddWarnings(doc, u.price.warnings);
    } else if (a.mode == "constrained") {
      if (!a.claim.empty()) throw ModelError("--claim applies to unconstrained mode only");
      if (a.contracts.empty()) throw ModelError("constrained mode needs --contracts");
      std::vector<RandomVariable> s;
      for (const auto& c : a.contracts) s.push_back(m.Variable(c));
      EquilibriumSolution eq = SolveConstrainedEquilibrium(agents, s);
      json& o = doc["outputs"];
      o["M"] = Num(eq.m);
      o["P"] = Vec(eq.p);
      o["P_range"] = {{"lo", Vec(eq.p_lo)}, {"hi", Vec(eq.p_hi)}};
      json h = json::array();
      for (const auto& v : eq.holdings) h.push_back(Vec(v));
      o["holdings"] = h;
      json per = json::array();
      for (const auto& ag : eq.agents) {
        per.push_back({{"utility", Num(ag.utility)},
                       {"f_at_P", Num(ag.f_at_p)},
                       {"personal", Vec(ag.personal)},
                       {"arrow_debreu_max", Num(ag.arrow_debreu_max)},
                       {"arrow_debreu", ag.arrow_debreu_ok},
                       {"support", ag.support_ok}});
      }
      o["per_agent"] = per;
      o["interiors_intersect"] = eq.interiors_intersect;
      o["flags"] = Strings(eq.flags);
      checks.push_back(Check("pareto", eq.pareto));
      checks.push_back(Check("arrow_debreu", eq.arrow_debreu));
      checks.push_back(Check("sum_zero", eq.sum_residual <= 1e-9, eq.sum_residual, 1e-9));
      bool support = true;
      for (const auto& ag : eq.agents) support = support && ag.support_ok;
      checks.push_back(Check("support", support));
    } else {
      throw ModelError("unknown --mode \"" + a.mode + "\" (unconstrained, constrained)");
    }
    doc["checks"] = checks;
  });
}

#ifdef RISKENGINE_WITH_ORACLE
namespace {

Vector Vals(std::initializer_list<double> xs) {
  Vector v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

json Compare(const std::string& name, double solver, double oracle, double tol, bool one_sided_ok) {
  json j = Check(name, std::abs(solver - oracle) <= tol && one_sided_ok, std::abs(solver - oracle), tol);
  j["solver"] = Num(solver);
  j["oracle"] = Num(oracle);
  return j;
}

}  // namespace

Outcome SelfCheck(const Model* m) {
  json in = {{"model", m != nullptr}};
  return Run("self-check", m, in, [&](Outcome& out, long long*, long long*) {
    json checks = json::array();
    auto s2 = ScenarioSpace::Uniform(2);
    {
      auto pd = DeterminingSet::PointMass(s2);
      auto rd = DeterminingSet::TailVaR(s2, 0.5);
      Market mkt(s2, Vals({0.8}), Vals({0, 2}).transpose(), Cone::Full(1));
      RarocResult r = SolveAgentIndependent(pd, rd, mkt);
      oracle::RarocGrid g = oracle::GridRarocMax(pd, rd, mkt, oracle::GridSpec::Uniform(1, -8, 8, 1e-3));
      checks.push_back(Compare("raroc_canonical_grid", r.r_star, g.r_best, 1e-6, g.r_best <= r.r_star + 1e-12));
      oracle::GaussianForms gf = oracle::GaussianClosedForms(Vals({1.0}), Matrix::Identity(1, 1), Vals({0.8}), 1.0);
      checks.push_back(Compare("raroc_canonical_closed_form", r.r_star, gf.r_star, 1e-6, true));
    }
    {
      auto d = DeterminingSet::TailVaR(s2, 0.5);
      Market mkt(s2, Vals({1.0}), Vals({0, 2}).transpose(), Cone::Full(1));
      RandomVariable w(Vals({4, 0}));
      GlobalResult g = SolveGlobal(d, mkt, w);
      double best = -kInfinity;
      for (int k = -4000; k <= 4000; ++k) {
        best = std::max(best, oracle::NaiveUtility(d, w + mkt.Pnl(Vals({k * 1e-3}))));
      }
      checks.push_back(Compare("global_hand_grid", g.u_star, best, 1e-3, best <= g.u_star + 1e-9));
    }
    {
      auto d = DeterminingSet::TailVaR(s2, 0.75);
      RandomVariable w(Vals({1, 0})), f(Vals({0, 1}));
      PriceInterval p = NbcSingleAgent(d, Market(s2, Vals({0.0}), Vals({0, 0}).transpose(), Cone::Zero(1)), w, f);
      std::vector<Vector> verts = d.VertexDensities();
      double umin = kInfinity;
      for (const auto& z : verts) umin = std::min(umin, ExpectDensity(*s2, z, w.values()));
      double lo = kInfinity, hi = -kInfinity;
      for (const auto& z : verts) {
        if (ExpectDensity(*s2, z, w.values()) <= umin + 1e-12) {
          lo = std::min(lo, ExpectDensity(*s2, z, f.values()));
          hi = std::max(hi, ExpectDensity(*s2, z, f.values()));
        }
      }
      checks.push_back(Compare("nbc_single_vertex_lo", p.empty ? NAN : p.lo, lo, 1e-9, !p.empty));
      checks.push_back(Compare("nbc_single_vertex_hi", p.empty ? NAN : p.hi, hi, 1e-9, !p.empty));
    }
    {
      auto s3 = ScenarioSpace::Uniform(3);
      std::vector<AgentSpec> agents = {
          {DeterminingSet::TailVaR(s3, 2.0 / 3), Market::Trivial(s3), RandomVariable(Vals({0, 1, 0}))},
          {DeterminingSet::TailVaR(s3, 1.0), Market::Trivial(s3), RandomVariable(Vals({2, 0, 0}))}};
      std::vector<RandomVariable> contracts = {RandomVariable(Vals({1, 0, 0}))};
      EquilibriumSolution eq = SolveConstrainedEquilibrium(agents, contracts);
      std::vector<oracle::OracleAgent> oa;
      for (const auto& a : agents) oa.push_back({a.d, a.market, a.w});
      oracle::EquilibriumGrid g = oracle::GridEquilibrium(oa, contracts, oracle::GridSpec::Uniform(1, -10, 10, 1e-3));
      checks.push_back(Compare("equilibrium_three_scenario_grid", eq.m, g.m_best, 1e-3, g.m_best <= eq.m + 1e-9));
      checks.push_back(Check("equilibrium_three_scenario_pareto", eq.pareto && eq.arrow_debreu));
    }
    {
      const int n = 2001;
      std::vector<double> q = oracle::NormalQuantileGrid(n);
      Vector x(n);
      for (int i = 0; i < n; ++i) x[i] = 0.3 + 2.0 * q[i];
      auto s = ScenarioSpace::Uniform(n);
      auto d = DeterminingSet::TailVaR(s, 0.1);
      double solver = Utility(d, RandomVariable(x));
      double formula = 0.3 - oracle::TailVaRGamma(0.1) * 2.0;
      checks.push_back(Compare("gaussian_tail_utility", solver, formula, 0.02 * std::abs(formula), true));
      double naive = oracle::NaiveUtility(d, RandomVariable(x));
      checks.push_back(Compare("gaussian_tail_naive", solver, naive, 1e-9 * (1 + std::abs(naive)), true));
    }
    if (m != nullptr) {
      for (const auto& [sn, d] : m->sets) {
        for (const auto& [vn, x] : m->variables) {
          double solver = Utility(d, x);
          double naive = oracle::NaiveUtility(d, x);
          checks.push_back(Compare("model_utility:" + sn + ":" + vn, solver, naive,
                                   1e-9 * (1 + x.values().cwiseAbs().maxCoeff()), true));
        }
      }
    }
    int failed = 0;
    for (const auto& c : checks) failed += c["pass"].get<bool>() ? 0 : 1;
    out.document["outputs"] = {{"checks_run", static_cast<int>(checks.size())}, {"failed", failed}};
    out.document["checks"] = checks;
  });
}
#else
Outcome SelfCheck(const Model* m) {
  return Run("self-check", m, json{{"model", m != nullptr}}, [](Outcome&, long long*, long long*) {
    throw ContractError("self-check needs a build with RISK_ENGINE_TESTING=ON");
  });
}
#endif

}  // namespace riskengine::app
