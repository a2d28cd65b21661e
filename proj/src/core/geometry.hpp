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

#ifndef RISKENGINE_CORE_GEOMETRY_HPP_
#define RISKENGINE_CORE_GEOMETRY_HPP_

#include <functional>
#include <optional>
#include <vector>

#include "core/errors.hpp"
#include "core/lp_builder.hpp"
#include "core/scenario.hpp"

namespace riskengine {

// Generators of {x : B x >= 0}: nonnegative combinations of `rays` plus
// the linear span of `lineality`.
struct DdResult {
  std::vector<Vector> rays;
  std::vector<Vector> lineality;
};

DdResult DoubleDescription(const Matrix& b, int ray_cap);

class Cone {
 public:
  Cone() = default;

  static Cone FromGenerators(int dim, std::vector<Vector> generators);
  static Cone Full(int dim);
  static Cone Orthant(int dim);
  static Cone Zero(int dim);

  int dim() const { return dim_; }
  // An empty generator list denotes the cone {0}.
  const std::vector<Vector>& generators() const { return generators_; }
  // Rows b with b.x >= 0 on the cone.
  const Matrix& inequalities() const { return inequalities_; }
  bool is_linear() const { return linear_; }
  bool is_zero() const { return generators_.empty(); }
  bool Contains(const Vector& x, double tol) const;

 private:
  friend Cone DualCone(const Cone& h);
  int dim_ = 0;
  std::vector<Vector> generators_;
  Matrix inequalities_;
  bool linear_ = false;
};

Cone DualCone(const Cone& h);

struct PolarSet {
  std::vector<Vector> normals;  // <normal, x> <= 1
  bool bounded = false;
  std::vector<Vector> vertices;  // filled when bounded
};

PolarSet ComputePolar(const std::vector<Vector>& points);

// Vertices of the bounded polytope {x : A x <= b, E x = f}.
std::vector<Vector> EnumerateVertices(const Matrix& a, const Vector& b, const Matrix& e,
                                      const Vector& f, int cap);

// True if `x` is in the convex hull of `points` (LP).
bool InConvexHull(const std::vector<Vector>& points, const Vector& x, double tol);

template <class W>
struct Bisection {
  double value = 0.0;
  bool boundary = false;
  int iterations = 0;
  std::optional<W> witness;
};

// Finds the switch point of a monotone predicate returning a witness when
// true. `true_below` selects which side of the switch is feasible.
template <class W>
Bisection<W> BisectFeasibility(const std::function<std::optional<W>(double)>& test,
                               double lo, double hi, double tol, bool true_below = true) {
  Bisection<W> out;
  std::optional<W> at_lo = test(lo);
  std::optional<W> at_hi = test(hi);
  const bool fl = at_lo.has_value(), fh = at_hi.has_value();
  if (fl && fh) {
    out.value = true_below ? hi : lo;
    out.boundary = true;
    out.witness = true_below ? at_hi : at_lo;
    return out;
  }
  if (!fl && !fh) {
    out.value = true_below ? lo : hi;
    out.boundary = true;
    return out;
  }
  if (fl != true_below) {
    throw ContractError("bisection: predicate is not monotone on the bracket");
  }
  out.witness = fl ? at_lo : at_hi;
  double a = lo, b = hi;
  while (b - a > tol) {
    double mid = 0.5 * (a + b);
    std::optional<W> w = test(mid);
    ++out.iterations;
    if (w.has_value()) {
      out.witness = w;
      (true_below ? a : b) = mid;
    } else {
      (true_below ? b : a) = mid;
    }
  }
  // The feasible end, so the witness belongs to the returned value.
  out.value = true_below ? a : b;
  return out;
}

// Adds variables and constraints to an LP and returns expressions whose
// feasible values sweep exactly the points of a convex set.
using SetLifting = std::function<std::vector<LinExpr>(LpBuilder&)>;

struct SupportAnswer {
  bool feasible = false;
  bool bounded = true;
  Vector point;
};

SupportAnswer SupportPoint(const SetLifting& set, const Vector& dir);
bool SetContains(const SetLifting& set, const Vector& x);
// max t in [0, cap] with base + t u in the set; negative when base is outside.
double RayExtent(const SetLifting& set, const Vector& base, const Vector& u, double cap);

struct AffineHull {
  Vector anchor;
  Matrix basis;  // orthonormal columns
  int dim() const { return static_cast<int>(basis.cols()); }
};

// `anchor` must lie in the set.
AffineHull ComputeAffineHull(const SetLifting& set, const Vector& anchor, double tol);

enum class InteriorStatus { kInterior, kBoundary, kOutside, kOffHull };
InteriorStatus RelativeInteriorStatus(const SetLifting& set, const AffineHull& hull,
                                      const Vector& x, double margin);

// Lifting of conv(points) + cone(generators).
SetLifting HullPlusCone(const std::vector<Vector>& points, const std::vector<Vector>& rays);

}  // namespace riskengine

#endif  // RISKENGINE_CORE_GEOMETRY_HPP_
