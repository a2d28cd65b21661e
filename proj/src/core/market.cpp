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

#include "core/market.hpp"

#include "core/determining_set.hpp"
#include "core/errors.hpp"

namespace riskengine {

Market::Market(SpacePtr space, Vector s0, Matrix s1, Cone cone)
    : space_(std::move(space)), s0_(std::move(s0)), s1_(std::move(s1)), cone_(std::move(cone)) {
  if (s1_.rows() != s0_.size()) throw StructuralError("market: S1 rows must match S0 length");
  if (s1_.cols() != space_->size()) throw StructuralError("market: S1 columns must match scenario count");
  if (cone_.dim() != s0_.size()) throw StructuralError("market: cone dimension must match S0 length");
  if (!s0_.allFinite() || !s1_.allFinite()) throw StructuralError("market: prices must be finite");
}

Market Market::WithPolytope(SpacePtr space, Vector s0, Matrix s1, std::vector<Vector> points) {
  const int d = static_cast<int>(s0.size());
  if (points.empty()) throw StructuralError("market: empty portfolio polytope");
  for (const Vector& h : points) {
    if (h.size() != d) throw StructuralError("market: polytope point has wrong dimension");
  }
  // The cone spanned by the polytope stands in for the cone field.
  std::vector<Vector> gens;
  for (const Vector& h : points) {
    if (h.cwiseAbs().maxCoeff() > 0.0) gens.push_back(h);
  }
  Market m(std::move(space), std::move(s0), std::move(s1),
           d <= 8 ? Cone::FromGenerators(d, gens) : Cone::Full(d));
  m.polytope_ = std::move(points);
  return m;
}

Market Market::Trivial(SpacePtr space) {
  int m = space->size();
  return Market(std::move(space), Vector(0), Matrix(0, m), Cone::Zero(0));
}

RandomVariable Market::Pnl(const Vector& h) const {
  if (h.size() != dim()) throw StructuralError("market: holding has wrong dimension");
  Vector v = s1_.transpose() * h;
  v.array() -= h.dot(s0_);
  return RandomVariable(v);
}

RandomVariable Market::UnitPnl(int k) const {
  Vector v = s1_.row(k).transpose();
  v.array() -= s0_[k];
  return RandomVariable(v);
}

std::vector<RandomVariable> Market::UnitPnls() const {
  std::vector<RandomVariable> out;
  for (int k = 0; k < dim(); ++k) out.push_back(UnitPnl(k));
  return out;
}

std::vector<LinExpr> Market::ExpectedPayoff(const std::vector<LinExpr>& mass) const {
  std::vector<LinExpr> out;
  for (int k = 0; k < dim(); ++k) out.push_back(ExpectExpr(mass, s1_.row(k).transpose()));
  return out;
}

std::vector<RowRef> Market::AddRiskNeutral(LpBuilder& b, const std::vector<LinExpr>& mass) const {
  std::vector<RowRef> rows;
  if (dim() == 0) return rows;
  std::vector<LinExpr> pay = ExpectedPayoff(mass);
  for (const Vector& g : cone_.generators()) {
    LinExpr e = Combine(pay, g);
    rows.push_back(b.AddLe(e, g.dot(s0_)));
  }
  return rows;
}

}  // namespace riskengine
