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

#ifndef RISKENGINE_APP_COMMANDS_HPP_
#define RISKENGINE_APP_COMMANDS_HPP_

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "core/errors.hpp"
#include "model/model.hpp"

namespace riskengine::app {

using nlohmann::json;

struct OptimizeArgs {
  std::string problem;  // raroc | global | local | firm
  std::string pd, rd, set, market, endowment, firm;
};

struct PriceArgs {
  std::string technique;  // ngd | nbc-ai | nbc-single | nbc-multi
  std::string set, pd, rd, market, endowment, agents, claim;
};

struct LiquidityArgs {
  std::string set, market, claim;
  std::vector<double> v_grid;  // empty: default log grid
  int jobs = 1;
};

struct EquilibriumArgs {
  std::string mode;  // unconstrained | constrained
  std::string agents, claim;
  std::vector<std::string> contracts;
};

struct Outcome {
  bool ok = true;
  ErrorKind error = ErrorKind::kStructural;
  bool passed = true;  // false when a check in the document failed
  json document;
  std::string csv;
  double seconds = 0.0;
};

// Each command catches library errors and reports them in the document.
Outcome Optimize(const model::Model& m, const OptimizeArgs& a);
Outcome Price(const model::Model& m, const PriceArgs& a);
Outcome Liquidity(const model::Model& m, const LiquidityArgs& a);
Outcome Equilibrium(const model::Model& m, const EquilibriumArgs& a);
Outcome SelfCheck(const model::Model* m);

// Deterministic text of a document: 12 significant digits, sorted keys.
std::string Render(const Outcome& o, bool with_timing);

std::string Fnv1a(const std::string& text);
// Number rounded to 12 significant digits; infinities become "inf"/"-inf".
json Num(double x);
json Vec(const Vector& v);

const char* KindName(ErrorKind k);

}  // namespace riskengine::app

#endif  // RISKENGINE_APP_COMMANDS_HPP_
