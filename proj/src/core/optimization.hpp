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

#ifndef RISKENGINE_CORE_OPTIMIZATION_HPP_
#define RISKENGINE_CORE_OPTIMIZATION_HPP_

#include <optional>
#include <string>
#include <vector>

#include "core/determining_set.hpp"
#include "core/market.hpp"

namespace riskengine {

struct Extended {
  double value = 0.0;
  bool infinite = false;
};

Extended Raroc(const DeterminingSet& pd, const DeterminingSet& rd, const RandomVariable& x);

struct RarocResult {
  double r_star = 0.0;
  bool r_infinite = false;
  double lambda_star = 0.0;
  bool lambda_infinite = false;
  bool all_optimal = false;  // N = H
  std::optional<Vector> h_star;
  Vector q_pd;  // densities realising the touching point
  Vector q_rd;
  double lambda_lp = 0.0;  // homogenised single-LP value
  double lambda_bisection = 0.0;
  int bisection_iterations = 0;
  std::vector<std::string> warnings;
};

RarocResult SolveAgentIndependent(const DeterminingSet& pd, const DeterminingSet& rd,
                                  const Market& mkt);

// Membership in the optimal set N.
bool IsRarocOptimal(const DeterminingSet& pd, const DeterminingSet& rd, const Market& mkt,
                    const RarocResult& res, const Vector& h);

// sup_{h in H} RAROC(<h, S1 - S0>) as one homogenised LP (no
// standing-assumption checks).
struct RarocLp {
  bool feasible = true;
  bool unbounded = false;
  double lambda = 0.0;
  Vector h;
  Vector q_pd, q_rd;
};
RarocLp SolveRarocLp(const DeterminingSet& pd, const DeterminingSet& rd, const Market& mkt);

double RarocContribution(const DeterminingSet& pd, const DeterminingSet& rd,
                         const RandomVariable& x, const RandomVariable& y);

struct FirmStructure {
  bool optimal = false;
  bool contributions_equal = false;
  bool interior = false;
  bool hypothesis_verified = false;
  bool indeterminate = false;
  double raroc = 0.0;
  double r_star = 0.0;
  std::vector<std::optional<double>> contributions;
  std::vector<std::string> flags;
};

FirmStructure CheckFirmStructure(const DeterminingSet& pd, const DeterminingSet& rd,
                                 const std::vector<RandomVariable>& units, const Vector& h,
                                 const Cone& cone);

struct GlobalResult {
  double u_star = 0.0;
  bool infinite = false;
  std::optional<Vector> h_star;
  Vector witness;  // density attaining the infimum
  bool lifted_checked = false;
  double lifted_value = 0.0;
  std::optional<Vector> lifted_h;
};

GlobalResult SolveGlobal(const DeterminingSet& d, const Market& mkt, const RandomVariable& w,
                         bool cross_check = true);

// Formulation (b) alone, on vertices of the lifted generator.
GlobalResult SolveGlobalLifted(const DeterminingSet& d, const Market& mkt, const RandomVariable& w);

struct LocalResult {
  double value = 0.0;
  std::optional<Vector> h_star;
  Vector g;  // point of G attaining the value
};

LocalResult SolveLocal(const DeterminingSet& d, const std::vector<RandomVariable>& x,
                       const std::vector<Vector>& h_points, const RandomVariable* w = nullptr);

// Determining set replaced by the face of minimisers of E_Q w.
DeterminingSet ExtremeFace(const DeterminingSet& d, const RandomVariable& w);

}  // namespace riskengine

#endif  // RISKENGINE_CORE_OPTIMIZATION_HPP_
