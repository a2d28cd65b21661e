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

#ifndef RISKENGINE_ORACLE_ORACLE_HPP_
#define RISKENGINE_ORACLE_ORACLE_HPP_

#include <vector>

#include "core/determining_set.hpp"
#include "core/market.hpp"

namespace riskengine::oracle {

struct GridSpec {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<double> step;
  long long cap = 2000000;

  static GridSpec Uniform(int dim, double lo, double hi, double step);
  long long Count() const;
};

// Greedy or vertex-scan utility; no LP involved.
double NaiveUtility(const DeterminingSet& d, const RandomVariable& x);

struct Extended {
  double value = 0.0;
  bool infinite = false;
};
Extended NaiveRaroc(const DeterminingSet& pd, const DeterminingSet& rd, const RandomVariable& x);

struct RarocGrid {
  double r_best = 0.0;
  bool infinite = false;
  Vector h_best;
  long long evaluated = 0;
};

RarocGrid GridRarocMax(const DeterminingSet& pd, const DeterminingSet& rd, const Market& mkt,
                       const GridSpec& grid);

// Local pattern search around h with shrinking steps, staying in H.
RarocGrid RefineRaroc(const DeterminingSet& pd, const DeterminingSet& rd, const Market& mkt,
                      const Vector& h, int rounds = 40);

struct OracleAgent {
  DeterminingSet d;
  Market market;  // dim 0 for no personal trading
  RandomVariable w;
};

struct EquilibriumGrid {
  double m_best = 0.0;
  std::vector<Vector> holdings;
  long long evaluated = 0;
};

// Zero-sum contract holdings on the grid; personal holdings on `personal`.
EquilibriumGrid GridEquilibrium(const std::vector<OracleAgent>& agents,
                                const std::vector<RandomVariable>& s, const GridSpec& grid,
                                const GridSpec* personal = nullptr);

struct GaussianForms {
  double s = 0.0;
  double r_star = 0.0;
  Vector direction;  // C^{-1}(a - S0), unit length
};

GaussianForms GaussianClosedForms(const Vector& a, const Matrix& c, const Vector& s0, double gamma);

// E F + <b, S0 - a> with b = C^{-1} cov(S1, F).
double GaussianNbcPrice(const Vector& a, const Matrix& c, const Vector& s0, const Vector& cov_sf,
                        double mean_f);

// E F - gamma cov(F, W) / sd(W).
double GaussianSingleAgentPrice(double mean_f, double cov_fw, double var_w, double gamma);

// gamma of Tail V@R(lambda) for a standard normal.
double TailVaRGamma(double lambda);

// Midpoint quantiles Phi^{-1}((i + 1/2) / n).
std::vector<double> NormalQuantileGrid(int n);

}  // namespace riskengine::oracle

#endif  // RISKENGINE_ORACLE_ORACLE_HPP_
