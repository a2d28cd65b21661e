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

#ifndef RISKENGINE_CORE_EQUILIBRIUM_HPP_
#define RISKENGINE_CORE_EQUILIBRIUM_HPP_

#include <string>
#include <vector>

#include "core/determining_set.hpp"
#include "core/market.hpp"
#include "core/optimization.hpp"
#include "core/pricing.hpp"

namespace riskengine {

// One agent: determining set, personal attainable P&Ls and endowment.
struct AgentSpec {
  DeterminingSet d;
  Market market;
  RandomVariable w;
};

struct OverallUtility {
  double value = 0.0;
  bool infinite = false;
  Vector witness;  // density of a minimising measure
};

// inf of E_Q x over the intersection of the determining sets.
OverallUtility SupConvolution(const std::vector<DeterminingSet>& d_sets, const RandomVariable& x);

OverallUtility OverallUtilityUnconstrained(const std::vector<AgentSpec>& agents);

struct UnconstrainedEquilibrium {
  double m = 0.0;
  PriceInterval price;
  Vector certificate;
};

UnconstrainedEquilibrium SolveUnconstrainedEquilibrium(const std::vector<AgentSpec>& agents,
                                                       const RandomVariable& f);

OverallUtility OverallUtilityConstrained(const std::vector<AgentSpec>& agents,
                                         const std::vector<RandomVariable>& s);

struct AgentOutcome {
  double utility = 0.0;      // u_n(W_n + X_n + <h_n, S>)
  double f_at_p = 0.0;       // f_n(P)
  Vector personal;           // holding in the agent's own market
  double arrow_debreu_max = 0.0;
  bool arrow_debreu_ok = false;
  bool support_ok = false;
};

struct EquilibriumSolution {
  double m = 0.0;
  Vector p;
  Vector p_lo, p_hi;  // range of argmin f per coordinate
  std::vector<Vector> holdings;
  std::vector<AgentOutcome> agents;
  double sum_residual = 0.0;
  bool interiors_intersect = false;
  bool pareto = false;
  bool arrow_debreu = false;
  std::vector<std::string> flags;
};

EquilibriumSolution SolveConstrainedEquilibrium(const std::vector<AgentSpec>& agents,
                                                const std::vector<RandomVariable>& s);

struct ParetoCheck {
  bool pareto = false;
  double m = 0.0;
  double sum = 0.0;
};

// Condition (c') for contract holdings h_n and personal holdings x_n.
ParetoCheck VerifyParetoConstrained(const std::vector<AgentSpec>& agents,
                                    const std::vector<RandomVariable>& s,
                                    const std::vector<Vector>& holdings,
                                    const std::vector<Vector>& personal);

// Condition (c') for P&Ls x_n in A_n and transfers y_n summing to zero.
ParetoCheck VerifyParetoUnconstrained(const std::vector<AgentSpec>& agents,
                                      const std::vector<Vector>& personal,
                                      const std::vector<RandomVariable>& transfers);

}  // namespace riskengine

#endif  // RISKENGINE_CORE_EQUILIBRIUM_HPP_
