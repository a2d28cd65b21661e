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

#ifndef RISKENGINE_CORE_MARKET_HPP_
#define RISKENGINE_CORE_MARKET_HPP_

#include <vector>

#include "core/geometry.hpp"
#include "core/lp_builder.hpp"
#include "core/scenario.hpp"

namespace riskengine {

class Market {
 public:
  Market() = default;
  Market(SpacePtr space, Vector s0, Matrix s1, Cone cone);

  // A market whose portfolio set is the convex hull of `points`.
  static Market WithPolytope(SpacePtr space, Vector s0, Matrix s1,
                             std::vector<Vector> points);
  // d = 0 market: no trading.
  static Market Trivial(SpacePtr space);

  const SpacePtr& space() const { return space_; }
  int dim() const { return static_cast<int>(s0_.size()); }
  const Vector& s0() const { return s0_; }
  const Matrix& s1() const { return s1_; }  // d x m
  const Cone& cone() const { return cone_; }
  bool has_polytope() const { return !polytope_.empty(); }
  const std::vector<Vector>& polytope() const { return polytope_; }

  // Discounted P&L <h, S1 - S0>.
  RandomVariable Pnl(const Vector& h) const;
  // Row k of S1 - S0 as a random variable.
  RandomVariable UnitPnl(int k) const;
  std::vector<RandomVariable> UnitPnls() const;

  // Adds <g, E_Q S1 - S0> <= 0 for every cone generator.
  std::vector<RowRef> AddRiskNeutral(LpBuilder& b, const std::vector<LinExpr>& mass) const;
  // E_Q S1 as d expressions.
  std::vector<LinExpr> ExpectedPayoff(const std::vector<LinExpr>& mass) const;

 private:
  SpacePtr space_;
  Vector s0_;
  Matrix s1_;
  Cone cone_;
  std::vector<Vector> polytope_;
};

}  // namespace riskengine

#endif  // RISKENGINE_CORE_MARKET_HPP_
