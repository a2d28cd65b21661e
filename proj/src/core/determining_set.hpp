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

#ifndef RISKENGINE_CORE_DETERMINING_SET_HPP_
#define RISKENGINE_CORE_DETERMINING_SET_HPP_

#include <optional>
#include <string>
#include <vector>

#include "core/lp_builder.hpp"
#include "core/scenario.hpp"

namespace riskengine {

enum class Family { kPointMass, kTailVaR, kWeightedVaR, kCustom };

const char* ToString(Family f);

// {z : 0 <= z <= upper, a z <= b, p.z = 1}
struct DensityComponent {
  Vector upper;
  Matrix a;
  Vector b;
  bool is_box() const { return a.rows() == 0; }
};

class DeterminingSet {
 public:
  static DeterminingSet PointMass(SpacePtr space);
  static DeterminingSet TailVaR(SpacePtr space, double lambda);
  static DeterminingSet WeightedVaR(SpacePtr space, std::vector<double> weights,
                                    std::vector<double> levels);
  static DeterminingSet FromVertices(SpacePtr space, std::vector<Vector> z);
  static DeterminingSet FromHalfspaces(SpacePtr space, Matrix a, Vector b);
  static DeterminingSet FromBoth(SpacePtr space, std::vector<Vector> z, Matrix a, Vector b);

  const SpacePtr& space() const { return space_; }
  int size() const { return space_->size(); }
  Family family() const { return family_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& levels() const { return levels_; }
  // Convex mixture of components, each a density polytope.
  const std::vector<DensityComponent>& components() const { return components_; }
  bool has_halfspaces() const { return !components_.empty(); }
  bool has_vertices() const { return vertices_.has_value(); }
  bool is_box_mixture() const;

  // Whether density z lies in the set.
  bool ContainsDensity(const Vector& z, double tol) const;

  // Stored vertices, or enumerated ones (capacity guarded).
  std::vector<Vector> VertexDensities() const;
  DeterminingSet WithVertices() const;

  // Adds the set to an LP and returns the scenario masses q_i = p_i z_i as
  // expressions. With `scale >= 0` the set is scaled by that variable.
  std::vector<LinExpr> AddToLp(LpBuilder& b, int scale = -1) const;

  std::string Describe() const;

 private:
  DeterminingSet(SpacePtr space, Family family) : space_(std::move(space)), family_(family) {}
  void ValidateVertices() const;
  void CheckNonempty() const;

  SpacePtr space_;
  Family family_;
  std::vector<double> weights_;
  std::vector<double> levels_;
  std::vector<DensityComponent> components_;
  std::optional<std::vector<Vector>> vertices_;
};

struct UtilityValue {
  double value = 0.0;
  Vector z;  // a minimising density
};

UtilityValue Minimize(const DeterminingSet& d, const RandomVariable& x);
double Utility(const DeterminingSet& d, const RandomVariable& x);
double Rho(const DeterminingSet& d, const RandomVariable& x);
// Upper analogue: max E_Q x over the set.
double UpperValue(const DeterminingSet& d, const RandomVariable& x);

struct ExtremeSet {
  double value = 0.0;
  std::vector<int> active;       // indices into `vertices`
  std::vector<Vector> vertices;  // all parent vertices
  std::vector<Vector> ActiveDensities() const;
};

ExtremeSet ComputeExtremeSet(const DeterminingSet& d, const RandomVariable& x);
double UtilityContribution(const DeterminingSet& d, const RandomVariable& x,
                           const RandomVariable& y);
double RiskContribution(const DeterminingSet& d, const RandomVariable& x,
                        const RandomVariable& y);

// Mass expressions evaluated at an LP point, converted to a density.
Vector DensityAt(const ScenarioSpace& space, const std::vector<LinExpr>& mass, const Vector& x);
// E_Q v as an expression over the LP.
LinExpr ExpectExpr(const std::vector<LinExpr>& mass, const Vector& v);

}  // namespace riskengine

#endif  // RISKENGINE_CORE_DETERMINING_SET_HPP_
