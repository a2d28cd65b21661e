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

#include "core/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "core/tolerances.hpp"

namespace riskengine {
namespace {

constexpr double kTight = 1e-9;

Vector Normalized(const Vector& v) {
  double n = v.norm();
  return n > 0.0 ? Vector(v / n) : v;
}

void Orthonormalize(std::vector<Vector>* vs) {
  std::vector<Vector> out;
  for (Vector v : *vs) {
    for (const Vector& u : out) v -= u.dot(v) * u;
    double n = v.norm();
    if (n > 1e-10) out.push_back(v / n);
  }
  *vs = std::move(out);
}

void Dedupe(std::vector<Vector>* vs, double tol) {
  std::vector<Vector> out;
  for (const Vector& v : *vs) {
    bool dup = false;
    for (const Vector& u : out) {
      if ((u - v).cwiseAbs().maxCoeff() <= tol) {
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(v);
  }
  *vs = std::move(out);
}

using Bits = std::vector<uint64_t>;

Bits ZeroSet(const Matrix& b, int rows, const Vector& r) {
  Bits z((rows + 63) / 64, 0);
  for (int i = 0; i < rows; ++i) {
    if (std::abs(b.row(i).dot(r)) <= kTight) z[i / 64] |= uint64_t{1} << (i % 64);
  }
  return z;
}

bool SubsetOf(const Bits& a, const Bits& b) {
  for (size_t k = 0; k < a.size(); ++k) {
    if ((a[k] & ~b[k]) != 0) return false;
  }
  return true;
}

Bits And(const Bits& a, const Bits& b) {
  Bits out(a.size());
  for (size_t k = 0; k < a.size(); ++k) out[k] = a[k] & b[k];
  return out;
}

}  // namespace

DdResult DoubleDescription(const Matrix& b_in, int ray_cap) {
  const int d = static_cast<int>(b_in.cols());
  Matrix b(0, d);
  {
    std::vector<Vector> rows;
    for (int i = 0; i < b_in.rows(); ++i) {
      Vector r = b_in.row(i).transpose();
      if (r.norm() > 0.0) rows.push_back(r / r.norm());
    }
    b.resize(static_cast<int>(rows.size()), d);
    for (size_t i = 0; i < rows.size(); ++i) b.row(static_cast<int>(i)) = rows[i].transpose();
  }
  DdResult res;
  for (int i = 0; i < d; ++i) res.lineality.push_back(Vector::Unit(d, i));
  std::vector<Vector>& rays = res.rays;
  std::vector<Vector>& lin = res.lineality;

  for (int k = 0; k < b.rows(); ++k) {
    Vector a = b.row(k).transpose();
    int best = -1;
    double best_val = kTight;
    for (size_t i = 0; i < lin.size(); ++i) {
      double v = std::abs(a.dot(lin[i]));
      if (v > best_val) {
        best_val = v;
        best = static_cast<int>(i);
      }
    }
    if (best >= 0) {
      Vector l0 = lin[best];
      if (a.dot(l0) < 0.0) l0 = -l0;
      const double al0 = a.dot(l0);
      lin.erase(lin.begin() + best);
      for (Vector& l : lin) l -= (a.dot(l) / al0) * l0;
      Orthonormalize(&lin);
      for (Vector& r : rays) r = Normalized(r - (a.dot(r) / al0) * l0);
      rays.push_back(Normalized(l0));
      continue;
    }
    std::vector<int> pos, neg;
    std::vector<Vector> next;
    std::vector<double> s(rays.size());
    for (size_t i = 0; i < rays.size(); ++i) {
      s[i] = a.dot(rays[i]);
      if (s[i] > kTight) {
        pos.push_back(static_cast<int>(i));
        next.push_back(rays[i]);
      } else if (s[i] < -kTight) {
        neg.push_back(static_cast<int>(i));
      } else {
        next.push_back(rays[i]);
      }
    }
    if (!neg.empty() && !pos.empty()) {
      std::vector<Bits> z(rays.size());
      for (size_t i = 0; i < rays.size(); ++i) z[i] = ZeroSet(b, k, rays[i]);
      for (int p : pos) {
        for (int n : neg) {
          Bits common = And(z[p], z[n]);
          bool adjacent = true;
          for (size_t r = 0; r < rays.size() && adjacent; ++r) {
            if (static_cast<int>(r) == p || static_cast<int>(r) == n) continue;
            if (SubsetOf(common, z[r])) adjacent = false;
          }
          if (!adjacent) continue;
          next.push_back(Normalized(s[p] * rays[n] - s[n] * rays[p]));
          if (static_cast<int>(next.size()) > ray_cap) {
            std::ostringstream os;
            os << "double description exceeded the cap of " << ray_cap << " rays";
            throw CapacityError(os.str());
          }
        }
      }
    }
    rays = std::move(next);
  }
  Dedupe(&rays, 1e-9);
  return res;
}

Cone Cone::FromGenerators(int dim, std::vector<Vector> generators) {
  for (const Vector& g : generators) {
    if (g.size() != dim) throw StructuralError("cone generator has wrong dimension");
    if (g.cwiseAbs().maxCoeff() == 0.0) throw StructuralError("cone generator is zero");
    if (!g.allFinite()) throw StructuralError("cone generator is not finite");
  }
  if (generators.empty()) return Zero(dim);
  if (dim > tol().dd_max_dim) {
    std::ostringstream os;
    os << "cone dimension " << dim << " exceeds the double-description guard "
       << tol().dd_max_dim;
    throw CapacityError(os.str());
  }
  Cone c;
  c.dim_ = dim;
  c.generators_ = std::move(generators);
  Matrix g(static_cast<int>(c.generators_.size()), dim);
  for (size_t i = 0; i < c.generators_.size(); ++i) g.row(static_cast<int>(i)) = c.generators_[i].transpose();
  DdResult dual = DoubleDescription(g, tol().vertex_cap);
  std::vector<Vector> rows = dual.rays;
  for (const Vector& l : dual.lineality) {
    rows.push_back(l);
    rows.push_back(-l);
  }
  c.inequalities_.resize(static_cast<int>(rows.size()), dim);
  for (size_t i = 0; i < rows.size(); ++i) c.inequalities_.row(static_cast<int>(i)) = rows[i].transpose();
  c.linear_ = dual.rays.empty();
  return c;
}

Cone Cone::Full(int dim) {
  Cone c;
  c.dim_ = dim;
  for (int i = 0; i < dim; ++i) {
    c.generators_.push_back(Vector::Unit(dim, i));
    c.generators_.push_back(-Vector::Unit(dim, i));
  }
  c.inequalities_ = Matrix(0, dim);
  c.linear_ = true;
  return c;
}

Cone Cone::Orthant(int dim) {
  Cone c;
  c.dim_ = dim;
  for (int i = 0; i < dim; ++i) c.generators_.push_back(Vector::Unit(dim, i));
  c.inequalities_ = Matrix::Identity(dim, dim);
  c.linear_ = dim == 0;
  return c;
}

Cone Cone::Zero(int dim) {
  Cone c;
  c.dim_ = dim;
  c.inequalities_ = Matrix(2 * dim, dim);
  c.inequalities_.topRows(dim) = Matrix::Identity(dim, dim);
  c.inequalities_.bottomRows(dim) = -Matrix::Identity(dim, dim);
  c.linear_ = true;
  return c;
}

bool Cone::Contains(const Vector& x, double tol_) const {
  if (x.size() != dim_) throw StructuralError("cone membership: dimension mismatch");
  double t = tol_ * (1.0 + x.cwiseAbs().maxCoeff());
  for (int i = 0; i < inequalities_.rows(); ++i) {
    if (inequalities_.row(i).dot(x) < -t * inequalities_.row(i).cwiseAbs().maxCoeff()) return false;
  }
  return true;
}

Cone DualCone(const Cone& h) {
  const int d = h.dim();
  if (h.is_zero()) return Cone::Full(d);
  // Full space is recognised by an empty inequality list.
  if (h.inequalities().rows() == 0) return Cone::Zero(d);
  std::vector<Vector> gens;
  for (int i = 0; i < h.inequalities().rows(); ++i) gens.push_back(h.inequalities().row(i).transpose());
  Dedupe(&gens, 1e-12);
  Cone c;
  c.dim_ = d;
  c.generators_ = std::move(gens);
  c.inequalities_.resize(static_cast<int>(h.generators().size()), d);
  for (size_t i = 0; i < h.generators().size(); ++i) {
    c.inequalities_.row(static_cast<int>(i)) = Normalized(h.generators()[i]).transpose();
  }
  // H* is linear exactly when H is.
  c.linear_ = h.is_linear();
  return c;
}

bool InConvexHull(const std::vector<Vector>& points, const Vector& x, double tol_) {
  if (points.empty()) return false;
  LpBuilder b;
  int first = b.AddVars(static_cast<int>(points.size()));
  LinExpr sum;
  for (size_t i = 0; i < points.size(); ++i) sum.Add(first + static_cast<int>(i), 1.0);
  b.AddEq(sum, 1.0);
  for (int r = 0; r < x.size(); ++r) {
    LinExpr e;
    for (size_t i = 0; i < points.size(); ++i) e.Add(first + static_cast<int>(i), points[i][r]);
    b.AddEq(e, x[r]);
  }
  b.SetObjective(LinExpr(), LpSense::kMinimize);
  LpSolution s = SolveBuilt(b);
  (void)tol_;
  return s.status == LpStatus::kOptimal;
}

PolarSet ComputePolar(const std::vector<Vector>& points) {
  PolarSet out;
  if (points.empty()) throw StructuralError("polar set of an empty point list");
  const int d = static_cast<int>(points[0].size());
  std::vector<bool> keep(points.size(), true);
  for (size_t k = 0; k < points.size(); ++k) {
    if (points[k].size() != d) throw StructuralError("polar set: mixed dimensions");
    std::vector<Vector> others{Vector::Zero(d)};
    for (size_t j = 0; j < points.size(); ++j) {
      if (j != k && keep[j]) others.push_back(points[j]);
    }
    if (InConvexHull(others, points[k], 0.0)) keep[k] = false;
  }
  for (size_t k = 0; k < points.size(); ++k) {
    if (keep[k]) out.normals.push_back(points[k]);
  }
  // Homogenised polar {(x,t) : t - <h,x> >= 0, t >= 0}.
  Matrix b(static_cast<int>(out.normals.size()) + 1, d + 1);
  for (size_t k = 0; k < out.normals.size(); ++k) {
    b.row(static_cast<int>(k)).head(d) = -out.normals[k].transpose();
    b(static_cast<int>(k), d) = 1.0;
  }
  b.row(b.rows() - 1).setZero();
  b(b.rows() - 1, d) = 1.0;
  DdResult dd = DoubleDescription(b, tol().vertex_cap);
  out.bounded = dd.lineality.empty();
  for (const Vector& r : dd.rays) {
    if (r[d] > 1e-9) {
      out.vertices.push_back(r.head(d) / r[d]);
    } else {
      out.bounded = false;
    }
  }
  if (!out.bounded) out.vertices.clear();
  return out;
}

std::vector<Vector> EnumerateVertices(const Matrix& a, const Vector& bvec, const Matrix& e,
                                      const Vector& f, int cap) {
  const int n = static_cast<int>(std::max(a.cols(), e.cols()));
  const int rows = static_cast<int>(a.rows() + 2 * e.rows() + 1);
  Matrix b = Matrix::Zero(rows, n + 1);
  int r = 0;
  for (int i = 0; i < a.rows(); ++i, ++r) {
    b.row(r).head(n) = -a.row(i);
    b(r, n) = bvec[i];
  }
  for (int i = 0; i < e.rows(); ++i) {
    b.row(r).head(n) = -e.row(i);
    b(r, n) = f[i];
    ++r;
    b.row(r).head(n) = e.row(i);
    b(r, n) = -f[i];
    ++r;
  }
  b(r, n) = 1.0;
  DdResult dd = DoubleDescription(b, cap);
  if (!dd.lineality.empty()) throw StructuralError("vertex enumeration: polytope is unbounded");
  std::vector<Vector> out;
  for (const Vector& ray : dd.rays) {
    if (ray[n] <= 1e-9) throw StructuralError("vertex enumeration: polytope is unbounded");
    out.push_back(ray.head(n) / ray[n]);
  }
  Dedupe(&out, 1e-9);
  if (static_cast<int>(out.size()) > cap) throw CapacityError("vertex enumeration exceeded cap");
  return out;
}

SupportAnswer SupportPoint(const SetLifting& set, const Vector& dir) {
  LpBuilder b;
  std::vector<LinExpr> x = set(b);
  b.SetObjective(Combine(x, dir), LpSense::kMaximize);
  LpSolution s = SolveBuilt(b);
  SupportAnswer ans;
  ans.feasible = s.status != LpStatus::kInfeasible;
  ans.bounded = s.status != LpStatus::kUnbounded;
  if (s.status == LpStatus::kOptimal) {
    ans.point = Vector(static_cast<int>(x.size()));
    for (size_t i = 0; i < x.size(); ++i) ans.point[static_cast<int>(i)] = x[i].Evaluate(s.x);
  }
  return ans;
}

bool SetContains(const SetLifting& set, const Vector& pt) {
  LpBuilder b;
  std::vector<LinExpr> x = set(b);
  for (size_t i = 0; i < x.size(); ++i) b.AddEq(x[i], pt[static_cast<int>(i)]);
  return SolveBuilt(b).status == LpStatus::kOptimal;
}

double RayExtent(const SetLifting& set, const Vector& base, const Vector& u, double cap) {
  LpBuilder b;
  std::vector<LinExpr> x = set(b);
  int t = b.AddVar(0.0, cap);
  for (size_t i = 0; i < x.size(); ++i) {
    LinExpr e = x[i];
    e.Add(t, -u[static_cast<int>(i)]);
    b.AddEq(e, base[static_cast<int>(i)]);
  }
  b.SetObjective(LinExpr::Var(t), LpSense::kMaximize);
  LpSolution s = SolveBuilt(b);
  if (s.status != LpStatus::kOptimal) return -1.0;
  return s.x[t];
}

namespace {

// Maximiser of <dir, x> over the set capped one unit beyond the anchor.
Vector CappedSupport(const SetLifting& set, const Vector& anchor, const Vector& dir) {
  LpBuilder b;
  std::vector<LinExpr> x = set(b);
  LinExpr obj = Combine(x, dir);
  b.AddLe(obj, dir.dot(anchor) + 1.0);
  b.SetObjective(obj, LpSense::kMaximize);
  LpSolution s = SolveBuilt(b);
  if (s.status != LpStatus::kOptimal) throw SolverError("affine hull probe failed");
  Vector pt(static_cast<int>(x.size()));
  for (size_t i = 0; i < x.size(); ++i) pt[static_cast<int>(i)] = x[i].Evaluate(s.x);
  return pt;
}

Matrix Complement(const Matrix& u, int d) {
  if (u.cols() == 0) return Matrix::Identity(d, d);
  Eigen::HouseholderQR<Matrix> qr(u);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  return q.rightCols(d - u.cols());
}

}  // namespace

AffineHull ComputeAffineHull(const SetLifting& set, const Vector& anchor, double tol_) {
  const int d = static_cast<int>(anchor.size());
  AffineHull hull;
  hull.anchor = anchor;
  hull.basis = Matrix(d, 0);
  const double thresh = tol_ * (1.0 + anchor.cwiseAbs().maxCoeff());
  bool grown = true;
  while (grown && hull.dim() < d) {
    grown = false;
    Matrix comp = Complement(hull.basis, d);
    for (int c = 0; c < comp.cols() && !grown; ++c) {
      for (double sgn : {1.0, -1.0}) {
        Vector dir = sgn * comp.col(c);
        Vector pt = CappedSupport(set, anchor, dir);
        Vector w = pt - anchor;
        if (dir.dot(w) <= thresh) continue;
        w -= hull.basis * (hull.basis.transpose() * w);
        if (w.norm() <= thresh) continue;
        hull.basis.conservativeResize(d, hull.dim() + 1);
        hull.basis.col(hull.dim() - 1) = w / w.norm();
        grown = true;
        break;
      }
    }
  }
  return hull;
}

InteriorStatus RelativeInteriorStatus(const SetLifting& set, const AffineHull& hull,
                                      const Vector& x, double margin) {
  Vector w = x - hull.anchor;
  Vector off = w - hull.basis * (hull.basis.transpose() * w);
  if (off.norm() > 1e-9 * (1.0 + x.cwiseAbs().maxCoeff())) return InteriorStatus::kOffHull;
  if (!SetContains(set, x)) return InteriorStatus::kOutside;
  for (int c = 0; c < hull.dim(); ++c) {
    for (double sgn : {1.0, -1.0}) {
      double t = RayExtent(set, x, sgn * hull.basis.col(c), 1.0);
      if (t <= margin) return InteriorStatus::kBoundary;
    }
  }
  return InteriorStatus::kInterior;
}

SetLifting HullPlusCone(const std::vector<Vector>& points, const std::vector<Vector>& rays) {
  return [points, rays](LpBuilder& b) {
    const int d = static_cast<int>(points.at(0).size());
    std::vector<LinExpr> x(d);
    int mu = b.AddVars(static_cast<int>(points.size()));
    LinExpr sum;
    for (size_t i = 0; i < points.size(); ++i) {
      sum.Add(mu + static_cast<int>(i), 1.0);
      for (int r = 0; r < d; ++r) x[r].Add(mu + static_cast<int>(i), points[i][r]);
    }
    b.AddEq(sum, 1.0);
    int nu = b.AddVars(static_cast<int>(rays.size()));
    for (size_t j = 0; j < rays.size(); ++j) {
      for (int r = 0; r < d; ++r) x[r].Add(nu + static_cast<int>(j), rays[j][r]);
    }
    return x;
  };
}

}  // namespace riskengine
