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

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "core/equilibrium.hpp"
#include "core/errors.hpp"
#include "core/optimization.hpp"
#include "core/pricing.hpp"
#include "oracle/oracle.hpp"

using namespace riskengine;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;
};

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Vector Vals(std::initializer_list<double> xs) {
  Vector v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

double AngleDegrees(const Vector& a, const Vector& b) {
  double c = a.dot(b) / (a.norm() * b.norm());
  return std::acos(std::clamp(c, -1.0, 1.0)) * 180.0 / M_PI;
}

Cone RandomCone(std::mt19937& rng, int d, int kind) {
  std::normal_distribution<double> n(0.0, 1.0);
  if (kind == 0) return Cone::Full(d);
  if (kind == 1) return Cone::Orthant(d);
  std::vector<Vector> gens;
  for (int k = 0; k < 3; ++k) gens.push_back(Vector::NullaryExpr(d, [&] { return n(rng); }));
  return Cone::FromGenerators(d, gens);
}

// PD = P, RD = Tail V@R, S0 = E_Q S1 for Q strictly inside RD, and some
// h in H with positive expected P&L.
struct RarocInstance {
  SpacePtr s;
  DeterminingSet pd = DeterminingSet::PointMass(ScenarioSpace::Uniform(1));
  DeterminingSet rd = DeterminingSet::PointMass(ScenarioSpace::Uniform(1));
  Market mkt;
};

RarocInstance MakeRaroc(std::mt19937& rng, int m, int d, int cone_kind) {
  m = std::max(m, d + 1);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.2, 1.0), lam(0.2, 0.5);
  for (;;) {
    RarocInstance r;
    r.s = ScenarioSpace::Uniform(m);
    r.pd = DeterminingSet::PointMass(r.s);
    r.rd = DeterminingSet::TailVaR(r.s, lam(rng));
    Matrix s1 = Matrix::NullaryExpr(d, m, [&] { return 1.0 + 0.5 * n(rng); });
    Vector tilt = Vector::NullaryExpr(m, [&] { return u(rng); });
    tilt /= tilt.mean();
    Vector q = 0.8 * Vector::Ones(m) + 0.2 * tilt;
    Vector s0 = s1 * q / m;
    Cone cone = RandomCone(rng, d, cone_kind);
    Vector drift = s1.rowwise().mean() - s0;
    double best = cone.generators().empty() ? 0.0 : -kInfinity;
    for (const Vector& g : cone.generators()) best = std::max(best, g.dot(drift) / g.norm());
    if (cone.is_linear()) best = drift.norm();
    if (best <= 1e-3) continue;
    r.mkt = Market(r.s, s0, s1, cone);
    return r;
  }
}

double NormalQuantile(double p) {
  static const boost::math::normal z;
  return boost::math::quantile(z, p);
}

// 60 x 60 product grid of standard normal midpoint quantiles.
struct GaussianGrid {
  static constexpr int kSide = 60;
  SpacePtr s = ScenarioSpace::Uniform(kSide * kSide);
  Vector z1, z2;
  GaussianGrid() {
    std::vector<double> q = oracle::NormalQuantileGrid(kSide);
    z1.resize(kSide * kSide);
    z2.resize(kSide * kSide);
    for (int i = 0; i < kSide; ++i) {
      for (int j = 0; j < kSide; ++j) {
        z1[i * kSide + j] = q[i];
        z2[i * kSide + j] = q[j];
      }
    }
  }
};

// ---------------------------------------------------------------------------

Verdict Criterion1() {
  Verdict v;
  auto t0 = Clock::now();
  auto s = ScenarioSpace::Uniform(2);
  auto pd = DeterminingSet::PointMass(s);
  auto rd = DeterminingSet::TailVaR(s, 0.5);
  Market mkt(s, Vals({0.8}), Vals({0, 2}).transpose(), Cone::Full(1));
  RarocResult r = SolveAgentIndependent(pd, rd, mkt);
  double solve_time = Seconds(t0);
  oracle::RarocGrid g = oracle::GridRarocMax(pd, rd, mkt, oracle::GridSpec::Uniform(1, -8, 8, 1e-3));
  v.pass = std::abs(r.r_star - 0.25) <= 1e-6 && std::abs(r.lambda_star * r.r_star - 1.0) <= 1e-7 &&
           std::abs(g.r_best - r.r_star) <= 1e-6 && g.r_best <= r.r_star + 1e-12 && solve_time < 1.0;
  v.detail << "R*=" << r.r_star << " lambda*R*=" << r.lambda_star * r.r_star << " grid=" << g.r_best
           << " solve " << solve_time << "s";
  return v;
}

Verdict Criterion2() {
  Verdict v;
  auto t0 = Clock::now();
  std::mt19937 rng(2024);
  int below = 0, within = 0, errors = 0, n = 300;
  double worst_gap = 0.0;
  for (int t = 0; t < n; ++t) {
    int m = 2 + t % 5, d = 1 + (t / 5) % 3;
    RarocInstance ri = MakeRaroc(rng, m, d, t % 3);
    RarocResult r;
    try {
      r = SolveAgentIndependent(ri.pd, ri.rd, ri.mkt);
    } catch (const Error& e) {
      if (errors == 0) v.detail << "first error: " << e.what() << "; ";
      ++errors;
      continue;
    }
    oracle::GridSpec grid = d == 1   ? oracle::GridSpec::Uniform(1, -4, 4, 1e-3)
                            : d == 2 ? oracle::GridSpec::Uniform(2, -2, 2, 0.02)
                                     : oracle::GridSpec::Uniform(3, -1, 1, 0.05);
    oracle::RarocGrid g = oracle::GridRarocMax(ri.pd, ri.rd, ri.mkt, grid);
    double rstar = r.r_infinite ? kInfinity : r.r_star;
    if (!g.infinite && g.r_best <= rstar + 1e-9 * (1 + std::abs(rstar))) ++below;
    // Directional refinement: pattern search from the grid optimum and from
    // the grid point closest to the solver's direction.
    double refined = g.r_best;
    refined = std::max(refined, oracle::RefineRaroc(ri.pd, ri.rd, ri.mkt, g.h_best, 60).r_best);
    if (r.h_star) {
      Vector dir = *r.h_star / r.h_star->cwiseAbs().maxCoeff() * grid.hi[0];
      refined = std::max(refined, oracle::RefineRaroc(ri.pd, ri.rd, ri.mkt, dir, 60).r_best);
    }
    worst_gap = std::max(worst_gap, rstar - refined);
    if (rstar <= refined + 1e-4) ++within;
  }
  double secs = Seconds(t0);
  v.pass = errors == 0 && below == n && within == n && secs < 60.0;
  v.detail << "upper bound " << below << "/" << n << ", attained after refinement " << within << "/" << n
           << ", solver errors " << errors << ", worst gap " << worst_gap << ", " << secs << "s";
  return v;
}

Verdict Criterion3() {
  Verdict v;
  auto t0 = Clock::now();
  GaussianGrid gg;
  std::mt19937 rng(77);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::array<double, 4> levels = {0.05, 0.1, 0.2, 0.25};
  double worst_rel = 0.0, worst_angle = 0.0;
  int ok = 0, errors = 0;
  for (int t = 0; t < 10; ++t) {
    const double lambda = levels[t % levels.size()];
    const double gamma = oracle::TailVaRGamma(lambda);
    Vector a = Vector::NullaryExpr(2, [&] { return n(rng); });
    Matrix b = Matrix::NullaryExpr(2, 2, [&] { return n(rng); });
    Matrix c = b * b.transpose() + 0.3 * Matrix::Identity(2, 2);
    Eigen::LLT<Matrix> llt(c);
    Matrix l = llt.matrixL();
    double s_target = (0.2 + 0.3 * u(rng)) * gamma;
    double angle = 2 * M_PI * u(rng);
    Vector dir(2);
    dir << std::cos(angle), std::sin(angle);
    Vector s0 = a - s_target * (l * dir);
    Matrix s1(2, gg.s->size());
    for (int i = 0; i < gg.s->size(); ++i) {
      Vector z(2);
      z << gg.z1[i], gg.z2[i];
      s1.col(i) = a + l * z;
    }
    Market mkt(gg.s, s0, s1, Cone::Full(2));
    oracle::GaussianForms f = oracle::GaussianClosedForms(a, c, s0, gamma);
    RarocResult r;
    try {
      r = SolveAgentIndependent(DeterminingSet::PointMass(gg.s), DeterminingSet::TailVaR(gg.s, lambda), mkt);
    } catch (const Error& e) {
      ++errors;
      continue;
    }
    double rel = std::abs(r.r_star - f.r_star) / f.r_star;
    double ang = r.h_star ? AngleDegrees(*r.h_star, f.direction) : 180.0;
    worst_rel = std::max(worst_rel, rel);
    worst_angle = std::max(worst_angle, ang);
    if (rel <= 0.03 && ang <= 2.0) ++ok;
  }
  double secs = Seconds(t0);
  v.pass = ok == 10 && secs < 30.0;
  v.detail << ok << "/10 draws, worst relative R* error " << worst_rel << ", worst angle " << worst_angle
           << " deg, errors " << errors << ", " << secs << "s";
  return v;
}

Verdict Criterion4() {
  Verdict v;
  std::mt19937 rng(404);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  int agree = 0, checked = 0, n_inst = 300;
  double worst = 0.0;
  for (int t = 0; t < n_inst; ++t) {
    int m = 2 + t % 5, d = 1 + t % 3;
    auto s = ScenarioSpace::Uniform(m);
    DeterminingSet ds = t % 4 == 0 ? DeterminingSet::PointMass(s) : DeterminingSet::TailVaR(s, u(rng));
    Matrix s1 = Matrix::NullaryExpr(d, m, [&] { return n(rng); });
    Vector s0 = Vector::NullaryExpr(d, [&] { return 0.5 * n(rng); });
    Market mkt(s, s0, s1, RandomCone(rng, d, t % 3));
    RandomVariable w(Vector::NullaryExpr(m, [&] { return n(rng); }));
    GlobalResult g = SolveGlobal(ds, mkt, w);
    if (!g.lifted_checked) continue;
    ++checked;
    double gap = g.infinite ? (std::isinf(g.lifted_value) ? 0.0 : kInfinity) : std::abs(g.u_star - g.lifted_value);
    worst = std::max(worst, gap);
    if (gap <= 1e-6 * (1 + (g.infinite ? 0.0 : std::abs(g.u_star)))) ++agree;
  }
  // G touches the vertical axis only at its boundary: E_Q X >= 0 on D with
  // equality at one vertex.
  auto s2 = ScenarioSpace::Uniform(2);
  Market edge(s2, Vals({0.0}), Vals({0, 1}).transpose(), Cone::Full(1));
  GlobalResult e = SolveGlobal(DeterminingSet::TailVaR(s2, 0.5), edge, RandomVariable(Vals({1, 0})));
  bool value_ok = !e.infinite && std::abs(e.u_star - 1.0) <= 1e-9;
  bool absent = !e.h_star.has_value();
  v.pass = checked == n_inst && agree == n_inst && value_ok && absent;
  v.detail << "formulations agree " << agree << "/" << checked << " (of " << n_inst << "), worst gap " << worst
           << "; boundary-touching case u*=" << e.u_star << ", h_star "
           << (absent ? "absent" : "returned (polyhedral data always attains the optimum)");
  return v;
}

double MaxMin(const std::vector<Vector>& h, const std::vector<Vector>& g) {
  LpBuilder b;
  int beta = b.AddVars(static_cast<int>(h.size()));
  int t = b.AddVar(-kInfinity, kInfinity);
  LinExpr sum;
  for (size_t k = 0; k < h.size(); ++k) sum.Add(beta + static_cast<int>(k), 1.0);
  b.AddEq(sum, 1.0);
  for (const Vector& gj : g) {
    LinExpr e;
    e.Add(t, 1.0);
    for (size_t k = 0; k < h.size(); ++k) e.Add(beta + static_cast<int>(k), -h[k].dot(gj));
    b.AddLe(e, 0.0);
  }
  b.SetObjective(LinExpr::Var(t), LpSense::kMaximize);
  return SolveBuilt(b).objective;
}

Verdict Criterion5() {
  Verdict v;
  std::mt19937 rng(505);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.2, 0.9);
  int agree = 0, n_inst = 300;
  double worst = 0.0;
  for (int t = 0; t < n_inst; ++t) {
    int m = 2 + t % 5, dim = 1 + t % 3;
    auto s = ScenarioSpace::Uniform(m);
    auto d = t % 5 == 0 ? DeterminingSet::PointMass(s) : DeterminingSet::TailVaR(s, u(rng));
    std::vector<RandomVariable> x;
    for (int i = 0; i < dim; ++i) x.emplace_back(Vector::NullaryExpr(m, [&] { return n(rng); }));
    std::vector<Vector> hp;
    for (int k = 0; k < dim + 2; ++k) hp.push_back(Vector::NullaryExpr(dim, [&] { return n(rng); }));
    Vector centre = Vector::Zero(dim);
    for (const Vector& h : hp) centre += h;
    centre /= static_cast<double>(hp.size());
    for (Vector& h : hp) h -= centre;
    LocalResult r = SolveLocal(d, x, hp);
    std::vector<Vector> gpts;
    for (const Vector& z : d.VertexDensities()) {
      Vector g(dim);
      for (int i = 0; i < dim; ++i) g[i] = ExpectDensity(*s, z, x[i].values());
      gpts.push_back(g);
    }
    double gap = std::abs(r.value - std::max(0.0, MaxMin(hp, gpts)));
    worst = std::max(worst, gap);
    if (gap <= 1e-7) ++agree;
  }
  auto s1 = ScenarioSpace::Uniform(1);
  LocalResult zero = SolveLocal(DeterminingSet::PointMass(s1), {RandomVariable(Vals({0}))},
                                {Vals({-1}), Vals({1})});
  bool empty_ok = zero.value == 0.0 && !zero.h_star.has_value();
  v.pass = agree == n_inst && empty_ok;
  v.detail << "max-min agreement " << agree << "/" << n_inst << ", worst gap " << worst
           << "; zero-value optimizer " << (empty_ok ? "empty" : "NOT empty");
  return v;
}

Verdict Criterion6() {
  Verdict v;
  std::mt19937 rng(606);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.2, 0.9);
  const std::vector<double> grid = DefaultVolumeGrid();
  int monotone = 0, lim0 = 0, liminf = 0, n_inst = 100, errors = 0;
  double worst0 = 0.0, worst_inf = 0.0;
  for (int t = 0; t < n_inst; ++t) {
    int m = 3 + t % 4, dim = 1 + t % 2;
    auto s = ScenarioSpace::Uniform(m);
    auto d = DeterminingSet::TailVaR(s, u(rng));
    std::vector<RandomVariable> x;
    for (int i = 0; i < dim; ++i) {
      Vector xi = Vector::NullaryExpr(m, [&] { return n(rng); });
      x.emplace_back(Vector(xi.array() - xi.mean()));
    }
    std::vector<Vector> h;
    for (int k = 0; k < 3; ++k) h.push_back(Vector::NullaryExpr(dim, [&] { return n(rng); }));
    h.push_back(Vector::Zero(dim));
    RandomVariable f(Vector::NullaryExpr(m, [&] { return n(rng); }));
    LiquidityCurve lc;
    try {
      lc = ComputeLiquidityCurve(d, x, h, f, grid);
    } catch (const Error&) {
      ++errors;
      continue;
    }
    bool mono = true;
    for (size_t i = 1; i < lc.samples.size(); ++i) {
      mono = mono && lc.samples[i].upper >= lc.samples[i - 1].upper - 1e-7;
      mono = mono && lc.samples[i].lower <= lc.samples[i - 1].lower + 1e-7;
    }
    monotone += mono;
    const LiquiditySample& first = lc.samples.front();
    const LiquiditySample& last = lc.samples.back();
    double g0 = std::max(std::abs(first.upper - lc.limit0_upper), std::abs(first.lower - lc.limit0_lower));
    double ginf = std::max(std::abs(last.upper - lc.limit_inf_upper), std::abs(last.lower - lc.limit_inf_lower));
    worst0 = std::max(worst0, g0);
    worst_inf = std::max(worst_inf, ginf);
    lim0 += g0 <= 1e-5;
    liminf += ginf <= 1e-5;
  }
  // Cone markets.
  int flat = 0, n_cone = 20;
  double worst_flat = 0.0;
  for (int t = 0; t < n_cone; ++t) {
    int m = 3 + t % 3, dim = 1 + t % 2;
    auto s = ScenarioSpace::Uniform(m);
    auto d = DeterminingSet::TailVaR(s, u(rng));
    Matrix s1 = Matrix::NullaryExpr(dim, m, [&] { return n(rng); });
    Vector s0 = s1.rowwise().mean();
    Market mkt(s, s0, s1, t % 2 ? Cone::Orthant(dim) : Cone::Full(dim));
    RandomVariable f(Vector::NullaryExpr(m, [&] { return n(rng); }));
    LiquidityCurve lc = ComputeMarketLiquidityCurve(d, mkt, f, grid);
    double spread = 0.0;
    for (const auto& sm : lc.samples) {
      spread = std::max(spread, std::abs(sm.upper - lc.samples.front().upper));
      spread = std::max(spread, std::abs(sm.lower - lc.samples.front().lower));
    }
    worst_flat = std::max(worst_flat, spread);
    flat += spread <= 1e-6;
  }
  int done = n_inst - errors;
  v.pass = errors == 0 && monotone == done && lim0 == done && liminf == done && flat == n_cone;
  v.detail << "monotone " << monotone << "/" << done << ", v=1e-2 limit " << lim0 << "/" << done << " (worst "
           << worst0 << "), v=1e2 limit " << liminf << "/" << done << " (worst " << worst_inf
           << ", decays like 1/v), cone constant " << flat << "/" << n_cone << " (worst " << worst_flat << ")";
  return v;
}

Verdict Criterion7() {
  Verdict v;
  std::mt19937 rng(707);
  int agree = 0, n_inst = 200, skipped = 0, errors = 0;
  double worst = 0.0;
  for (int t = 0; t < n_inst; ++t) {
    int m = 2 + t % 5, d = 1 + (t / 5) % 2;
    RarocInstance ri = MakeRaroc(rng, m, d, t % 3);
    std::normal_distribution<double> n(0.0, 1.0);
    RandomVariable f(Vector::NullaryExpr(ri.s->size(), [&] { return n(rng); }));
    NbcAgentIndependent r;
    try {
      r = NbcAgentIndependentInterval(ri.pd, ri.rd, ri.mkt, f);
    } catch (const Error& e) {
      if (errors == 0) v.detail << "first error: " << e.what() << "; ";
      ++errors;
      continue;
    }
    if (!r.lifted_checked) {
      ++skipped;
      continue;
    }
    double gap = std::max(std::abs(r.lifted_lo - r.interval.lo), std::abs(r.lifted_hi - r.interval.hi));
    worst = std::max(worst, gap);
    agree += gap <= 1e-6;
  }
  auto s = ScenarioSpace::Uniform(2);
  NbcAgentIndependent c = NbcAgentIndependentInterval(
      DeterminingSet::PointMass(s), DeterminingSet::TailVaR(s, 0.5),
      Market(s, Vals({0.8}), Vals({0, 2}).transpose(), Cone::Full(1)), RandomVariable(Vals({1, 0})));
  bool canonical = std::abs(c.interval.lo - 0.6) <= 1e-6 && std::abs(c.interval.hi - 0.6) <= 1e-6;

  // (S1, F) jointly Gaussian on the 60 x 60 grid, d = 1.
  GaussianGrid gg;
  const double a = 1.0, sd_s = 0.5, mean_f = 2.0, sd_f = 1.0, rho = 0.6;
  Matrix s1(1, gg.s->size());
  Vector fv(gg.s->size());
  for (int i = 0; i < gg.s->size(); ++i) {
    s1(0, i) = a + sd_s * gg.z1[i];
    fv[i] = mean_f + sd_f * (rho * gg.z1[i] + std::sqrt(1 - rho * rho) * gg.z2[i]);
  }
  const double lambda = 0.1;
  const double gamma = oracle::TailVaRGamma(lambda);
  const double s0 = a - 0.3 * gamma * sd_s;
  Matrix cmat(1, 1);
  cmat(0, 0) = sd_s * sd_s;
  double formula = oracle::GaussianNbcPrice(Vals({a}), cmat, Vals({s0}), Vals({rho * sd_s * sd_f}), mean_f);
  double width = kInfinity, mid = NAN;
  try {
    NbcAgentIndependent gr = NbcAgentIndependentInterval(DeterminingSet::PointMass(gg.s),
                                                         DeterminingSet::TailVaR(gg.s, lambda),
                                                         Market(gg.s, Vals({s0}), s1, Cone::Full(1)),
                                                         RandomVariable(fv));
    width = gr.interval.hi - gr.interval.lo;
    mid = 0.5 * (gr.interval.hi + gr.interval.lo);
  } catch (const Error& e) {
    v.detail << "gaussian instance failed: " << e.what() << "; ";
  }
  bool gaussian = width <= 0.02 * sd_f;
  v.pass = errors == 0 && skipped == 0 && agree == n_inst && canonical && gaussian;
  v.detail << "forms agree " << agree << "/" << n_inst << " (skipped " << skipped << ", errors " << errors
           << ", worst " << worst << "); canonical [" << c.interval.lo << ", " << c.interval.hi
           << "]; gaussian width " << width << " vs scale " << sd_f << ", midpoint " << mid << " vs formula "
           << formula;
  return v;
}

Verdict Criterion8() {
  Verdict v;
  std::mt19937 rng(808);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.2, 0.9);
  int nested = 0, n_inst = 200, empty = 0;
  for (int t = 0; t < n_inst; ++t) {
    int m = 3 + t % 4, d = 1 + t % 2;
    auto s = ScenarioSpace::Uniform(m);
    auto ds = DeterminingSet::TailVaR(s, u(rng));
    Matrix s1 = Matrix::NullaryExpr(d, m, [&] { return n(rng); });
    Vector s0 = s1.rowwise().mean();
    Market mkt(s, s0, s1, RandomCone(rng, d, t % 3));
    RandomVariable w(Vector::NullaryExpr(m, [&] { return n(rng); }));
    GlobalResult g = SolveGlobal(ds, mkt, w, false);
    RandomVariable wopt = g.h_star ? w + mkt.Pnl(*g.h_star) : w;
    RandomVariable f(Vector::NullaryExpr(m, [&] { return n(rng); }));
    PriceInterval sa = NbcSingleAgent(ds, mkt, wopt, f);
    PriceInterval ngd = NgdInterval(ds, mkt, f);
    double lo0 = Utility(ds, f), hi0 = -Utility(ds, -f);
    bool ok = !ngd.empty && ngd.lo >= lo0 - 1e-7 && ngd.hi <= hi0 + 1e-7;
    if (sa.empty) {
      ++empty;
    } else {
      ok = ok && sa.lo >= ngd.lo - 1e-7 && sa.hi <= ngd.hi + 1e-7;
    }
    nested += ok;
  }
  // (W, F) jointly Gaussian, no trading.
  GaussianGrid gg;
  const double mean_w = 1.0, sd_w = 2.0, mean_f = 3.0, sd_f = 1.0, rho = 0.5, lambda = 0.2;
  Vector wv(gg.s->size()), fv(gg.s->size());
  for (int i = 0; i < gg.s->size(); ++i) {
    wv[i] = mean_w + sd_w * gg.z1[i];
    fv[i] = mean_f + sd_f * (rho * gg.z1[i] + std::sqrt(1 - rho * rho) * gg.z2[i]);
  }
  double formula = oracle::GaussianSingleAgentPrice(mean_f, rho * sd_w * sd_f, sd_w * sd_w, oracle::TailVaRGamma(lambda));
  PriceInterval p = NbcSingleAgent(DeterminingSet::TailVaR(gg.s, lambda), Market::Trivial(gg.s), RandomVariable(wv),
                                   RandomVariable(fv));
  bool gaussian = !p.empty && std::abs(p.lo - formula) <= 0.02 * std::abs(formula) &&
                  std::abs(p.hi - formula) <= 0.02 * std::abs(formula);
  v.pass = nested == n_inst && gaussian;
  v.detail << "nested " << nested << "/" << n_inst << " (" << empty << " empty single-agent intervals); gaussian ["
           << p.lo << ", " << p.hi << "] vs formula " << formula;
  return v;
}

bool SameBits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool SameBits(const Vector& a, const Vector& b) {
  return a.size() == b.size() && (a.size() == 0 || std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0);
}

Verdict Criterion9() {
  Verdict v;
  std::mt19937 rng(909);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.2, 0.9);
  int hull_ok = 0, single_ok = 0, n_inst = 100, n_single = 0;
  for (int t = 0; t < n_inst; ++t) {
    int m = 3 + t % 3, d = 1 + t % 2, na = 1 + t % 3;
    auto s = ScenarioSpace::Uniform(m);
    Matrix s1 = Matrix::NullaryExpr(d, m, [&] { return n(rng); });
    Vector s0 = s1.rowwise().mean();
    Market mkt(s, s0, s1, t % 2 ? Cone::Orthant(d) : Cone::Full(d));
    std::vector<Agent> agents;
    for (int k = 0; k < na; ++k) {
      auto ds = DeterminingSet::TailVaR(s, u(rng));
      RandomVariable w(Vector::NullaryExpr(m, [&] { return n(rng); }));
      GlobalResult g = SolveGlobal(ds, mkt, w, false);
      agents.push_back({ds, g.h_star ? w + mkt.Pnl(*g.h_star) : w});
    }
    RandomVariable f(Vector::NullaryExpr(m, [&] { return n(rng); }));
    PriceInterval multi = NbcMultiAgent(agents, mkt, f);
    double lo = kInfinity, hi = -kInfinity;
    PriceInterval first;
    for (size_t k = 0; k < agents.size(); ++k) {
      PriceInterval one = NbcSingleAgent(agents[k].d, mkt, agents[k].w, f);
      if (k == 0) first = one;
      lo = std::min(lo, one.lo);
      hi = std::max(hi, one.hi);
    }
    hull_ok += !multi.empty && multi.lo == lo && multi.hi == hi;
    if (na == 1) {
      ++n_single;
      single_ok += multi.empty == first.empty && SameBits(multi.lo, first.lo) && SameBits(multi.hi, first.hi) &&
                   SameBits(multi.lo_measure, first.lo_measure) && SameBits(multi.hi_measure, first.hi_measure);
    }
  }
  v.pass = hull_ok == n_inst && single_ok == n_single;
  v.detail << "hull exact " << hull_ok << "/" << n_inst << ", N=1 bit-identical " << single_ok << "/" << n_single;
  return v;
}

struct EqInstance {
  std::vector<AgentSpec> agents;
  std::vector<RandomVariable> contracts;
};

EqInstance MakeEquilibrium(std::mt19937& rng, int m, int d, int na, bool personal) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.2, 1.0);
  auto s = ScenarioSpace::Uniform(m);
  EqInstance e;
  for (int k = 0; k < na; ++k) {
    auto ds = DeterminingSet::TailVaR(s, u(rng));
    RandomVariable w(Vector::NullaryExpr(m, [&] { return n(rng); }));
    if (personal && k % 2 == 0) {
      Matrix s1 = Matrix::NullaryExpr(1, m, [&] { return n(rng); });
      Vector s0 = s1.rowwise().mean();
      e.agents.push_back({ds, Market(s, s0, s1, Cone::Orthant(1)), w});
    } else {
      e.agents.push_back({ds, Market::Trivial(s), w});
    }
  }
  for (int i = 0; i < d; ++i) e.contracts.emplace_back(Vector::NullaryExpr(m, [&] { return n(rng); }));
  return e;
}

// Minimal density vertices of D_n intersected with the agent's risk-neutral set.
std::vector<Vector> RiskNeutralVertices(const AgentSpec& a) {
  const ScenarioSpace& s = *a.d.space();
  if (a.market.dim() == 0) return a.d.VertexDensities();
  const int m = s.size();
  const double lambda = a.d.levels()[0];
  // Tail box rows z <= 1/lambda plus <g, E_Q (S1 - S0)> <= 0 for each generator.
  std::vector<Vector> rows;
  std::vector<double> rhs;
  for (int i = 0; i < m; ++i) {
    Vector r = Vector::Zero(m);
    r[i] = 1.0;
    rows.push_back(r);
    rhs.push_back(1.0 / lambda);
  }
  for (const Vector& g : a.market.cone().generators()) {
    Vector r = Vector::Zero(m);
    for (int k = 0; k < a.market.dim(); ++k) r += g[k] * a.market.UnitPnl(k).values();
    rows.push_back(Vector(r.array() * s.p().array()));
    rhs.push_back(0.0);
  }
  Matrix am(static_cast<int>(rows.size()), m);
  Vector bv(static_cast<int>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    am.row(static_cast<int>(i)) = rows[i].transpose();
    bv[static_cast<int>(i)] = rhs[i];
  }
  return DeterminingSet::FromHalfspaces(a.d.space(), am, bv).VertexDensities();
}

double GridM(const EqInstance& e, const EquilibriumSolution& eq) {
  std::vector<oracle::OracleAgent> oa;
  for (const auto& a : e.agents) oa.push_back({a.d, a.market, a.w});
  const int d = static_cast<int>(e.contracts.size());
  const int free_dims = d * (static_cast<int>(e.agents.size()) - 1);
  double bound = 1.0;
  for (const Vector& h : eq.holdings) bound = std::max(bound, 1.5 * h.cwiseAbs().maxCoeff());
  const double coarse = free_dims == 1 ? 1e-3 : 0.02;
  oracle::GridSpec g = oracle::GridSpec::Uniform(d, -bound, bound, coarse);
  oracle::EquilibriumGrid best = oracle::GridEquilibrium(oa, e.contracts, g);
  if (free_dims == 1) return best.m_best;
  // Exhaustive fine grid around the coarse optimum, per free coordinate.
  std::vector<oracle::OracleAgent> shifted = oa;
  for (size_t k = 0; k + 1 < oa.size(); ++k) {
    RandomVariable pay = RandomVariable::Constant(oa[0].w.size(), 0.0);
    for (int i = 0; i < d; ++i) pay = pay + e.contracts[i] * best.holdings[k][i];
    shifted[k].w = oa[k].w + pay;
    shifted.back().w = shifted.back().w - pay;
  }
  oracle::GridSpec fine = oracle::GridSpec::Uniform(d, -2 * coarse, 2 * coarse, 1e-3);
  return std::max(best.m_best, oracle::GridEquilibrium(shifted, e.contracts, fine).m_best);
}

Verdict Criterion10() {
  Verdict v;
  auto t0 = Clock::now();
  std::mt19937 rng(1010);
  int ok = 0, n_inst = 200, support_ok = 0;
  double worst_sum = 0.0, worst_support = 0.0;
  for (int t = 0; t < n_inst; ++t) {
    int m = 2 + t % 4, d = 1 + t % 2, na = 1 + t % 3;
    EqInstance e = MakeEquilibrium(rng, m, d, na, t % 4 != 0);
    EquilibriumSolution eq = SolveConstrainedEquilibrium(e.agents, e.contracts);
    Vector total = Vector::Zero(d);
    for (const Vector& h : eq.holdings) total += h;
    double sum = total.cwiseAbs().maxCoeff();
    worst_sum = std::max(worst_sum, sum);
    std::vector<Vector> personal;
    for (const auto& a : eq.agents) personal.push_back(a.personal);
    bool pareto = VerifyParetoConstrained(e.agents, e.contracts, eq.holdings, personal).pareto;
    bool ad = true;
    for (const auto& a : eq.agents) {
      ad = ad && a.arrow_debreu_ok &&
           std::abs(a.arrow_debreu_max - (a.utility - eq.holdings[&a - &eq.agents[0]].dot(eq.p))) <=
               1e-6 * (1 + std::abs(a.arrow_debreu_max));
    }
    // Support inequality at every vertex of each agent's generator.
    bool support = true;
    for (size_t k = 0; k < e.agents.size(); ++k) {
      const AgentSpec& a = e.agents[k];
      const ScenarioSpace& s = *a.d.space();
      double fp = eq.agents[k].f_at_p;
      for (const Vector& z : RiskNeutralVertices(a)) {
        Vector es(d);
        for (int i = 0; i < d; ++i) es[i] = ExpectDensity(s, z, e.contracts[i].values());
        double lhs = ExpectDensity(s, z, a.w.values()) + eq.holdings[k].dot(es - eq.p);
        double slack = fp - lhs;
        worst_support = std::max(worst_support, slack);
        support = support && slack <= 1e-7 * (1 + std::abs(fp));
      }
    }
    support_ok += support;
    ok += eq.pareto && pareto && ad && sum <= 1e-9 && support;
  }
  int grid_ok = 0, n_grid = 20;
  double worst_grid = 0.0;
  for (int t = 0; t < n_grid; ++t) {
    int m = 2 + t % 4;
    int d = t % 3 == 2 ? 2 : 1;
    int na = t % 3 == 1 ? 3 : 2;
    EqInstance e = MakeEquilibrium(rng, m, d, na, false);
    EquilibriumSolution eq = SolveConstrainedEquilibrium(e.agents, e.contracts);
    double g = GridM(e, eq);
    worst_grid = std::max(worst_grid, std::abs(eq.m - g));
    grid_ok += g <= eq.m + 1e-9 && std::abs(eq.m - g) <= 1e-3;
  }
  double secs = Seconds(t0);
  v.pass = ok == n_inst && grid_ok == n_grid && secs < 120.0;
  v.detail << "pareto+AD+sum+support " << ok << "/" << n_inst << " (support " << support_ok << ", worst sum "
           << worst_sum << ", worst support slack " << worst_support << "); grid oracle " << grid_ok << "/"
           << n_grid << " (worst " << worst_grid << "), " << secs << "s";
  return v;
}

Verdict Criterion11() {
  Verdict v;
  std::mt19937 rng(1111);
  std::uniform_real_distribution<double> u(0.2, 1.0), x(-1.0, 1.0);
  int ok = 0, n_inst = 50;
  double worst_excess = 0.0;
  const double step = 0.05, box = 3.0;
  for (int t = 0; t < n_inst; ++t) {
    int m = t < 40 ? 2 : 3;
    auto s = ScenarioSpace::Uniform(m);
    auto a = DeterminingSet::TailVaR(s, u(rng));
    auto b = DeterminingSet::TailVaR(s, u(rng));
    Vector xv = Vector::NullaryExpr(m, [&] { return x(rng); });
    RandomVariable xr(xv);
    const int k = static_cast<int>(std::round(2 * box / step)) + 1;
    double best = -kInfinity;
    std::vector<int> idx(m, 0);
    Vector y(m);
    for (;;) {
      for (int i = 0; i < m; ++i) y[i] = -box + idx[i] * step;
      best = std::max(best, oracle::NaiveUtility(a, RandomVariable(y)) + oracle::NaiveUtility(b, RandomVariable(xv - y)));
      int i = m - 1;
      while (i >= 0 && ++idx[i] == k) idx[i--] = 0;
      if (i < 0) break;
    }
    OverallUtility lp = SupConvolution({a, b}, xr);
    // Each utility is 1-Lipschitz in the sup norm, so L = 2 agents.
    const double bound = step * 2;
    worst_excess = std::max(worst_excess, lp.value - best);
    ok += !lp.infinite && lp.value >= best - 1e-9 && lp.value <= best + bound;
  }
  int inf_ok = 0, n_inf = 5;
  for (int t = 0; t < n_inf; ++t) {
    int m = 2 + t % 3;
    auto s = ScenarioSpace::Uniform(m);
    Vector z = Vector::Zero(m);
    z[t % m] = m;
    OverallUtility r = SupConvolution({DeterminingSet::TailVaR(s, 1.0), DeterminingSet::FromVertices(s, {z})},
                                      RandomVariable(Vector::NullaryExpr(m, [&] { return x(rng); })));
    inf_ok += r.infinite;
  }
  v.pass = ok == n_inst && inf_ok == n_inf;
  v.detail << "grid agreement " << ok << "/" << n_inst << " (worst LP - grid " << worst_excess << ", bound "
           << step * 2 << "); empty intersections flagged " << inf_ok << "/" << n_inf;
  return v;
}

Verdict Criterion12() {
  Verdict v;
  auto s2 = ScenarioSpace::Uniform(2);
  auto pm = DeterminingSet::PointMass(s2);
  Market neg(s2, Vals({1.0}), Matrix::Zero(1, 2), Cone::Orthant(1));
  std::vector<AgentSpec> agents = {{pm, neg, RandomVariable(Vals({0, 0}))}, {pm, neg, RandomVariable(Vals({0, 0}))}};
  bool rejected = !VerifyParetoUnconstrained(agents, {Vals({1}), Vals({1})},
                                        {RandomVariable(Vals({0, 0})), RandomVariable(Vals({0, 0}))})
                  .pareto;

  auto s4 = ScenarioSpace::Uniform(4);
  Matrix s1(2, 4);
  s1 << -1, -1, 2, 2, -1, 1, -1, 1;
  NbcAgentIndependent mixture = NbcAgentIndependentInterval(
      DeterminingSet::PointMass(s4), DeterminingSet::TailVaR(s4, 0.25),
      Market(s4, Vals({0, 0}), s1, Cone::Full(2)), RandomVariable(Vals({1, 0, 0, 0})));
  bool skip = false;
  for (const auto& w : mixture.interval.warnings) skip = skip || w.find("cross-check skipped") != std::string::npos;

  std::vector<RandomVariable> units = {RandomVariable(Vals({1, -1, 2, -0.5})), RandomVariable(Vals({0.5, 1, -1, 0.3}))};
  FirmStructure fs = CheckFirmStructure(DeterminingSet::PointMass(s4), DeterminingSet::TailVaR(s4, 0.5), units,
                                        Vals({1, 1}), Cone::FromGenerators(2, {Vals({1, 1})}));
  bool boundary = false;
  for (const auto& f : fs.flags) boundary = boundary || f.find("boundary") != std::string::npos;
  v.pass = rejected && skip && boundary;
  v.detail << "non-optimal personal holdings rejected " << (rejected ? "yes" : "no") << ", mixture skip warning " << (skip ? "yes" : "no")
           << ", firm ray flagged boundary " << (boundary ? "yes" : "no");
  return v;
}

std::string RunCapture(const std::string& cmd, int* status) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) {
    *status = -1;
    return out;
  }
  std::array<char, 4096> buf;
  size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), got);
  *status = pclose(p);
  return out;
}

Verdict Criterion13(const std::string& cli, const std::string& models) {
  Verdict v;
  if (cli.empty()) {
    v.pass = false;
    v.detail << "no CLI path given (--cli)";
    return v;
  }
  const std::string c = models + "/canonical.json";
  const std::vector<std::string> commands = {
      "optimize " + c + " --problem raroc --pd PD --rd RD --market M",
      "optimize " + c + " --problem global --set RD --market M1 --endowment W",
      "optimize " + c + " --problem local --set RD --market BOX",
      "optimize " + models + "/firm_ray.json --problem firm --pd PD --rd RD --firm ray",
      "price " + c + " --technique ngd --set RD --market M --claim F",
      "price " + c + " --technique nbc-ai --pd PD --rd RD --market M --claim F",
      "price " + c + " --technique nbc-single --set TV34 --market NONE --endowment W1 --claim G",
      "price " + c + " --technique nbc-multi --agents pair --market NONE --claim F",
      "liquidity " + c + " --set RD --market M --claim F",
      "liquidity " + c + " --set RD --market BOX --claim F --jobs 3",
      "equilibrium " + models + "/three_scenario.json --mode constrained --agents traders --contracts S",
      "equilibrium " + c + " --mode unconstrained --agents split --claim F",
      "optimize " + c + " --problem raroc --pd PD --rd RD --market M1",
      "self-check " + c};
  int identical = 0;
  for (const auto& cmd : commands) {
    int st0 = 0, st = 0;
    std::string first = RunCapture(cli + " " + cmd + " 2>/dev/null", &st0);
    bool same = !first.empty();
    for (int k = 0; k < 2; ++k) same = same && RunCapture(cli + " " + cmd + " 2>/dev/null", &st) == first && st == st0;
    identical += same;
    if (!same) v.detail << "differs: " << cmd << "; ";
  }
  v.pass = identical == static_cast<int>(commands.size());
  v.detail << identical << "/" << commands.size() << " commands byte-identical over 3 runs";
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli, models, expect;
  int only = 0;
  for (int i = 1; i + 1 < argc; i += 2) {
    std::string k = argv[i];
    if (k == "--cli") cli = argv[i + 1];
    else if (k == "--models") models = argv[i + 1];
    else if (k == "--expect-fail") expect = argv[i + 1];
    else if (k == "--only") only = std::stoi(argv[i + 1]);
  }
  std::set<int> expected;
  {
    std::stringstream ss(expect);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) expected.insert(std::stoi(item));
    }
  }
  std::cout.precision(6);
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"canonical RAROC instance", Criterion1},
      {"RAROC duality sweep against the grid oracle", Criterion2},
      {"Gaussian closed forms for R* and direction", Criterion3},
      {"global problem cross-formulation and nonexistence", Criterion4},
      {"local problem against max-min LP", Criterion5},
      {"liquidity curves", Criterion6},
      {"agent-independent NBC", Criterion7},
      {"NBC nesting and Gaussian single-agent price", Criterion8},
      {"multi-agent NBC hull", Criterion9},
      {"equilibrium equivalence", Criterion10},
      {"sup-convolution against allocation search", Criterion11},
      {"regression suite", Criterion12},
      {"determinism", [&] { return Criterion13(cli, models); }},
  };
  std::set<int> failed;
  for (size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && only != static_cast<int>(i) + 1) continue;
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << "exception: " << e.what();
    }
    const int id = static_cast<int>(i) + 1;
    if (!v.pass) failed.insert(id);
    std::cout << (v.pass ? "PASS" : "FAIL") << " " << id << " " << criteria[i].first << ": " << v.detail.str()
              << std::endl;
  }
  std::cout << failed.size() << " of " << criteria.size() << " criteria failed" << std::endl;
  if (!expect.empty()) {
    // Only the documented unattainable criteria may fail, and they must.
    if (failed != expected) {
      std::cout << "failures differ from the documented set" << std::endl;
      return 1;
    }
    return 0;
  }
  return failed.empty() ? 0 : 1;
}
