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

#include "core/tolerances.hpp"

#include <cstdlib>
#include <sstream>

#include "core/errors.hpp"

namespace riskengine {

Tolerances ParseTolerances(const std::string& spec, Tolerances base) {
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw StructuralError("tolerance entry without '=': " + item);
    }
    std::string key = item.substr(0, eq);
    double value = 0.0;
    try {
      value = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw StructuralError("bad tolerance value: " + item);
    }
    if (!(value > 0.0)) throw StructuralError("tolerance must be > 0: " + item);
    if (key == "structural") {
      base.structural = value;
    } else if (key == "feas") {
      base.lp_feasibility = value;
    } else if (key == "pivot") {
      base.pivot = value;
    } else if (key == "active") {
      base.active_set = value;
    } else if (key == "bisect") {
      base.bisection = value;
    } else if (key == "interior") {
      base.interior_margin = value;
    } else if (key == "gap") {
      base.duality_gap = value;
    } else if (key == "vertex_cap") {
      base.vertex_cap = static_cast<int>(value);
    } else {
      throw StructuralError("unknown tolerance key: " + key);
    }
  }
  return base;
}

const Tolerances& tol() {
  static const Tolerances bundle = [] {
    const char* env = std::getenv("RISK_ENGINE_TOL");
    if (env == nullptr || *env == '\0') return Tolerances{};
    return ParseTolerances(env);
  }();
  return bundle;
}

}  // namespace riskengine
