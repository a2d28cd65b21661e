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

#ifndef RISKENGINE_CORE_PRICING_HPP_
#define RISKENGINE_CORE_PRICING_HPP_

#include <string>
#include <utility>
#include <vector>

#include "core/determining_set.hpp"
#include "core/market.hpp"

namespace riskengine {

struct PriceInterval {
  bool empty = false;
  double lo = 0.0;
  double hi = 0.0;
  Vector lo_measure;  // densities attaining each endpoint
  Vector hi_measure;
  std::string diagnostic;
  std::vector<std::string> warnings;
};

// {E_Q F : Q in D, Q risk-neutral for the market}.
PriceInterval NgdInterval(const DeterminingSet& d, const Market& mkt, const RandomVariable& f);

struct LiquiditySample {
  double v = 0.0;
  double upper = 0.0;
  double lower = 0.0;
};

struct LiquidityCurve {
  RandomVariable claim;
  std::vector<LiquiditySample> samples;
  double limit0_upper = 0.0, limit0_lower = 0.0;
  double limit_inf_upper = 0.0, limit_inf_lower = 0.0;
  bool upper_monotone = true;
  bool lower_monotone = true;
};

std::vector<double> DefaultVolumeGrid();

// Upper price at volume v: -f(v)/v with f(v) = sup_{h in conv H} u(-vF + <h, X>).
double UpperLiquidityPrice(const DeterminingSet& d, const std::vector<RandomVariable>& x,
                           const std::vector<Vector>& h_points, const RandomVariable& f,
                           double v);

LiquidityCurve ComputeLiquidityCurve(const DeterminingSet& d, const std::vector<RandomVariable>& x,
                                     const std::vector<Vector>& h_points,
                                     const RandomVariable& f, const std::vector<double>& v_grid);

// Cone markets: f(v) = sup over the cone of u(-vF + <h, X>), one global
// problem per volume.
double UpperLiquidityPriceCone(const DeterminingSet& d, const Market& mkt, const RandomVariable& f,
                               double v);

// Polytope markets use the local problem, cone markets the global one.
LiquidityCurve ComputeMarketLiquidityCurve(const DeterminingSet& d, const Market& mkt,
                                           const RandomVariable& f,
                                           const std::vector<double>& v_grid);

struct NbcAgentIndependent {
  PriceInterval interval;  // measure form
  double r_star = 0.0;
  bool lifted_checked = false;
  double lifted_r_star = 0.0;
  double lifted_lo = 0.0;
  double lifted_hi = 0.0;
  bool mixture_checked = false;
};

NbcAgentIndependent NbcAgentIndependentInterval(const DeterminingSet& pd, const DeterminingSet& rd,
                                                const Market& mkt, const RandomVariable& f);

PriceInterval NbcSingleAgent(const DeterminingSet& d, const Market& mkt, const RandomVariable& w,
                             const RandomVariable& f);

struct Agent {
  DeterminingSet d;
  RandomVariable w;
};

PriceInterval NbcMultiAgent(const std::vector<Agent>& agents, const Market& mkt,
                            const RandomVariable& f);

}  // namespace riskengine

#endif  // RISKENGINE_CORE_PRICING_HPP_
