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

#ifndef RISKENGINE_CORE_TOLERANCES_HPP_
#define RISKENGINE_CORE_TOLERANCES_HPP_

#include <string>

namespace riskengine {

struct Tolerances {
  double structural = 1e-9;
  double probability_sum = 1e-12;
  double lp_feasibility = 1e-7;
  double pivot = 1e-10;
  double active_set = 1e-7;
  double bisection = 1e-9;
  double interior_margin = 1e-9;
  double duality_gap = 1e-6;
  int vertex_cap = 100000;
  int dd_max_dim = 8;
};

// Parses "key=value,key=value". Unknown keys raise StructuralError.
Tolerances ParseTolerances(const std::string& spec, Tolerances base = {});

// Process-wide bundle. Initialised once from RISK_ENGINE_TOL when set.
const Tolerances& tol();

}  // namespace riskengine

#endif  // RISKENGINE_CORE_TOLERANCES_HPP_
