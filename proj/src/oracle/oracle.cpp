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

#include "oracle/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "core/errors.hpp"

namespace riskengine::oracle {
namespace {

// min E_Q x over densities 0 <= z <= cap with sum p z = 1.
double BoxMin(const ScenarioSpace& s, const Vector& x, double cap) {
  std::vector<int> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return x[a] < x[b]; });
  double left = 1.0, value = 0.0;
  for (int i : order) {
    if (left <= 0.0) break;
    double mass = std::min(left, cap * s.p()[i]);
    value += mass * x[i];
    left -= mass;
  }
  return value;
}

template <class F>
long long ForEachPoint(const GridSpec& g, F&& visit) {
  const int dim = static_cast<int>(g.lo.size());
  if (g.Count() > g.cap) throw CapacityError("oracle grid exceeds its point cap");
  std::vector<long long> n(dim), idx(dim, 0);
  for (int k = 0; k < dim; ++k) n[k] = static_cast<long long>(std::floor((g.hi[k] - g.lo[k]) / g.step[k] + 1e-9)) + 1;
  long long count = 0;
  Vector h(dim);
  while (true) {
    for (int k = 0; k < dim; ++k) h[k] = g.lo[k] + static_cast<double>(idx[k]) * g.step[k];
    visit(h);
    ++count;
    int k = dim - 1;
    while (k >= 0 && ++idx[k] == n[k]) idx[k--] = 0;
    if (k < 0) break;
  }
  return count;
}

bool Better(const Extended& a, const Extended& b) {
  if (a.infinite) return !b.infinite;
  if (b.infinite) return false;
  return a.value > b.value;
}

}  // namespace

GridSpec GridSpec::Uniform(int dim, double lo, double hi, double step) {
  GridSpec g;
  g.lo.assign(dim, lo);
  g.hi.assign(dim, hi);
  g.step.assign(dim, step);
  return g;
}

long long GridSpec::Count() const {
  long long total = 1;
  for (size_t k = 0; k < lo.size(); ++k) {
    long long n = static_cast<long long>(std::floor((hi[k] - lo[k]) / step[k] + 1e-9)) + 1;
    if (n <= 0) return 0;
    if (total > cap / n + 1) return cap + 1;
    total *= n;
  }
  return total;
}

double NaiveUtility(const DeterminingSet& d, const RandomVariable& x) {
  const ScenarioSpace& s = *d.space();
  CheckSize(s, x, "oracle utility");
  switch (d.family()) {
    case Family::kPointMass:
      return s.p().dot(x.values());
    case Family::kTailVaR:
    case Family::kWeightedVaR: {
      double u = 0.0;
      for (size_t k = 0; k < d.weights().size(); ++k) {
        u += d.weights()[k] * BoxMin(s, x.values(), 1.0 / d.levels()[k]);
      }
      return u;
    }
    default:
      break;
  }
  double best = std::numeric_limits<double>::infinity();
  for (const Vector& z : d.VertexDensities()) {
    double e = 0.0;
    for (int i = 0; i < s.size(); ++i) e += s.p()[i] * z[i] * x[i];
    best = std::min(best, e);
  }
  return best;
}

Extended NaiveRaroc(const DeterminingSet& pd, const DeterminingSet& rd, const RandomVariable& x) {
  const double e = NaiveUtility(pd, x);
  const double u = NaiveUtility(rd, x);
  const double eps = 1e-12 * (1.0 + x.values().cwiseAbs().maxCoeff());
  Extended r;
  if (e > eps && u >= -eps) {
    r.infinite = true;
  } else if (std::abs(u) > eps) {
    r.value = e / -u;
  }
  return r;
}

RarocGrid GridRarocMax(const DeterminingSet& pd, const DeterminingSet& rd, const Market& mkt,
                       const GridSpec& grid) {
  if (static_cast<int>(grid.lo.size()) != mkt.dim()) throw StructuralError("grid dimension mismatch");
  RarocGrid out;
  out.h_best = Vector::Zero(mkt.dim());
  Extended best;
  out.evaluated = ForEachPoint(grid, [&](const Vector& h) {
    if (!mkt.cone().Contains(h, 1e-12)) return;
    Extended r = NaiveRaroc(pd, rd, mkt.Pnl(h));
    if (Better(r, best)) {
      best = r;
      out.h_best = h;
    }
  });
  out.r_best = best.value;
  out.infinite = best.infinite;
  return out;
}

RarocGrid RefineRaroc(const DeterminingSet& pd, const DeterminingSet& rd, const Market& mkt,
                      const Vector& h, int rounds) {
  const int d = mkt.dim();
  RarocGrid out;
  out.h_best = h;
  Extended best = NaiveRaroc(pd, rd, mkt.Pnl(h));
  double step = 0.1 * std::max(1.0, h.norm());
  for (int r = 0; r < rounds; ++r) {
    bool moved = false;
    for (int k = 0; k < d; ++k) {
      for (double sgn : {1.0, -1.0}) {
        Vector c = out.h_best;
        c[k] += sgn * step;
        if (!mkt.cone().Contains(c, 1e-12)) continue;
        Extended e = NaiveRaroc(pd, rd, mkt.Pnl(c));
        ++out.evaluated;
        if (Better(e, best)) {
          best = e;
          out.h_best = c;
          moved = true;
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  out.r_best = best.value;
  out.infinite = best.infinite;
  return out;
}

EquilibriumGrid GridEquilibrium(const std::vector<OracleAgent>& agents,
                                const std::vector<RandomVariable>& s, const GridSpec& grid,
                                const GridSpec* personal) {
  const int n = static_cast<int>(agents.size());
  const int d = static_cast<int>(s.size());
  if (n == 0) throw StructuralError("oracle needs at least one agent");
  GridSpec g;
  for (int k = 0; k < n - 1; ++k) {
    for (int i = 0; i < d; ++i) {
      g.lo.push_back(grid.lo[i]);
      g.hi.push_back(grid.hi[i]);
      g.step.push_back(grid.step[i]);
    }
  }
  g.cap = grid.cap;
  const int m = agents[0].w.size();
  auto payoff = [&](const Vector& h) {
    Vector v = Vector::Zero(m);
    for (int i = 0; i < d; ++i) v += h[i] * s[i].values();
    return RandomVariable(v);
  };
  // Best utility of one agent over its personal holdings.
  auto agent_best = [&](const OracleAgent& a, const RandomVariable& base) {
    double best = NaiveUtility(a.d, base);
    if (a.market.dim() == 0 || personal == nullptr) return best;
    GridSpec pg = GridSpec::Uniform(a.market.dim(), personal->lo[0], personal->hi[0], personal->step[0]);
    pg.cap = personal->cap;
    ForEachPoint(pg, [&](const Vector& x) {
      if (!a.market.cone().Contains(x, 1e-12)) return;
      best = std::max(best, NaiveUtility(a.d, base + a.market.Pnl(x)));
    });
    return best;
  };
  EquilibriumGrid out;
  out.m_best = -std::numeric_limits<double>::infinity();
  auto visit = [&](const Vector& flat) {
    std::vector<Vector> h(n, Vector::Zero(d));
    for (int k = 0; k < n - 1; ++k) {
      h[k] = flat.segment(k * d, d);
      h[n - 1] -= h[k];
    }
    double total = 0.0;
    for (int k = 0; k < n; ++k) total += agent_best(agents[k], agents[k].w + payoff(h[k]));
    if (total > out.m_best) {
      out.m_best = total;
      out.holdings = h;
    }
  };
  if (n == 1) {
    visit(Vector());
    out.evaluated = 1;
  } else {
    out.evaluated = ForEachPoint(g, visit);
  }
  return out;
}

GaussianForms GaussianClosedForms(const Vector& a, const Matrix& c, const Vector& s0, double gamma) {
  GaussianForms out;
  Vector diff = s0 - a;
  Eigen::LDLT<Matrix> ldlt(c);
  out.s = std::sqrt(std::max(0.0, diff.dot(ldlt.solve(diff))));
  out.direction = ldlt.solve(Vector(a - s0));
  if (out.s == 0.0) {
    out.r_star = 0.0;
    return out;
  }
  if (gamma <= out.s) throw DomainError("gamma <= s: S0 is not inside the generator");
  out.r_star = out.s / (gamma - out.s);
  out.direction.normalize();
  return out;
}

double GaussianNbcPrice(const Vector& a, const Matrix& c, const Vector& s0, const Vector& cov_sf,
                        double mean_f) {
  Vector b = c.ldlt().solve(cov_sf);
  return mean_f + b.dot(s0 - a);
}

double GaussianSingleAgentPrice(double mean_f, double cov_fw, double var_w, double gamma) {
  return mean_f - gamma * cov_fw / std::sqrt(var_w);
}

double TailVaRGamma(double lambda) {
  boost::math::normal z;
  return boost::math::pdf(z, boost::math::quantile(z, lambda)) / lambda;
}

std::vector<double> NormalQuantileGrid(int n) {
  boost::math::normal z;
  std::vector<double> q(n);
  for (int i = 0; i < n; ++i) q[i] = boost::math::quantile(z, (i + 0.5) / n);
  return q;
}

}  // namespace riskengine::oracle
