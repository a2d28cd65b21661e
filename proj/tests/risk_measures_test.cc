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

#include "core/determining_set.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "core/errors.hpp"

namespace riskengine {
namespace {

Vector V(std::initializer_list<double> xs) {
  Vector v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

RandomVariable X(std::initializer_list<double> xs) { return RandomVariable(V(xs)); }

TEST(Expect, HandArithmetic) {
  auto s = ScenarioSpace::Uniform(2);
  EXPECT_NEAR(Expect(Measure::Reference(s), X({5, 3})), 4.0, 1e-15);
  EXPECT_NEAR(Expect(Measure(s, V({0, 2})), X({5, 3})), 3.0, 1e-15);
  EXPECT_NEAR(Expect(Measure(s, V({2.0 / 3, 4.0 / 3})), X({1, 0})), 1.0 / 3, 1e-15);
  EXPECT_THROW(Expect(Measure::Reference(s), X({1, 2, 3})), StructuralError);
}

TEST(Expect, BilinearAndNormalised) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  for (int t = 0; t < 50; ++t) {
    int m = 1 + t % 6;
    Vector p = Vector::NullaryExpr(m, [&] { return u(rng); });
    p /= p.sum();
    auto s = ScenarioSpace::Make({}, p);
    Vector z = Vector::NullaryExpr(m, [&] { return u(rng); });
    z /= z.dot(s->p());
    Measure q(s, z);
    RandomVariable a(Vector::NullaryExpr(m, [&] { return u(rng) - 0.5; }));
    RandomVariable b(Vector::NullaryExpr(m, [&] { return u(rng) - 0.5; }));
    EXPECT_NEAR(Expect(q, RandomVariable::Constant(m, 1.0)), 1.0, 1e-12);
    EXPECT_NEAR(Expect(q, a + b), Expect(q, a) + Expect(q, b), 1e-14);
  }
}

TEST(ScenarioSpace, Invariants) {
  EXPECT_THROW(ScenarioSpace::Make({}, V({0.5, 0.6})), StructuralError);
  EXPECT_THROW(ScenarioSpace::Make({}, V({1.0, 0.0})), StructuralError);
  EXPECT_THROW(Measure(ScenarioSpace::Uniform(2), V({-0.5, 2.5})), StructuralError);
  EXPECT_THROW(Measure(ScenarioSpace::Uniform(2), V({1.0, 1.5})), StructuralError);
}

TEST(Utility, Examples) {
  auto s = ScenarioSpace::Uniform(2);
  auto pm = DeterminingSet::PointMass(s);
  auto tv = DeterminingSet::TailVaR(s, 0.5);
  EXPECT_NEAR(Utility(pm, X({0, 2})), 1.0, 1e-15);
  EXPECT_NEAR(Utility(tv, X({0, 2})), 0.0, 1e-15);
  EXPECT_NEAR(Rho(tv, X({0, 2})), 0.0, 1e-15);
  EXPECT_NEAR(Rho(tv, X({0, 0})), 0.0, 1e-15);
  RandomVariable x = X({0.3, -1.7});
  EXPECT_NEAR(Rho(tv, x + RandomVariable::Constant(2, 3.5)), Rho(tv, x) - 3.5, 1e-12);
  auto es = ComputeExtremeSet(tv, X({0, 2}));
  ASSERT_EQ(es.active.size(), 1u);
  EXPECT_NEAR((es.vertices[es.active[0]] - V({2, 0})).norm(), 0.0, 1e-12);
  EXPECT_NEAR(es.value, 0.0, 1e-15);
  EXPECT_EQ(ComputeExtremeSet(tv, X({1, 1})).active.size(), es.vertices.size());
  EXPECT_EQ(ComputeExtremeSet(pm, X({3, 1})).active.size(), 1u);
  EXPECT_NEAR(UtilityContribution(tv, X({1, 5}), X({0, 2})), 1.0, 1e-12);
  EXPECT_NEAR(UtilityContribution(tv, X({0, 2}), X({0, 2})), Utility(tv, X({0, 2})), 1e-12);
  EXPECT_NEAR(UtilityContribution(tv, X({4, 4}), X({0, 2})), 4.0, 1e-12);
}

TEST(Utility, TailVaRAtOneIsReferenceExpectation) {
  auto s = ScenarioSpace::Make({}, V({0.2, 0.3, 0.5}));
  auto tv = DeterminingSet::TailVaR(s, 1.0);
  RandomVariable x = X({1, -2, 4});
  EXPECT_NEAR(Utility(tv, x), Expect(Measure::Reference(s), x), 1e-14);
}

TEST(Utility, EmptyHalfspaceSetIsModelError) {
  auto s = ScenarioSpace::Uniform(2);
  Matrix a(1, 2);
  a << 1.0, 1.0;
  EXPECT_THROW(DeterminingSet::FromHalfspaces(s, a, V({1.0})), ModelError);
}

TEST(Utility, BothFormsMustAgree) {
  auto s = ScenarioSpace::Uniform(2);
  Matrix a(2, 2);
  a << 1.0, 0.0, 0.0, 1.0;
  std::vector<Vector> vs{V({2, 0}), V({0, 2})};
  EXPECT_NO_THROW(DeterminingSet::FromBoth(s, vs, a, V({2, 2})));
  EXPECT_THROW(DeterminingSet::FromBoth(s, vs, a, V({3, 2})), ModelError);
  EXPECT_THROW(DeterminingSet::FromBoth(s, vs, a, V({1.5, 2})), ModelError);
}

class RandomSets : public ::testing::Test {
 protected:
  std::mt19937 rng{17};
  std::uniform_real_distribution<double> u{0.0, 1.0};

  SpacePtr RandomSpace(int m) {
    Vector p = Vector::NullaryExpr(m, [&] { return 0.2 + u(rng); });
    return ScenarioSpace::Make({}, p / p.sum());
  }
  DeterminingSet RandomSet(const SpacePtr& s, int kind) {
    int m = s->size();
    switch (kind % 4) {
      case 0:
        return DeterminingSet::TailVaR(s, 0.1 + 0.9 * u(rng));
      case 1:
        return DeterminingSet::WeightedVaR(s, {0.3, 0.7}, {0.2 + 0.8 * u(rng), 0.2 + 0.8 * u(rng)});
      case 2: {
        std::vector<Vector> vs;
        for (int k = 0; k < 3; ++k) {
          Vector z = Vector::NullaryExpr(m, [&] { return u(rng); });
          vs.push_back(z / z.dot(s->p()));
        }
        return DeterminingSet::FromVertices(s, vs);
      }
      default: {
        Matrix a = Matrix::NullaryExpr(2, m, [&] { return u(rng) - 0.5; });
        // Reference density 1 is feasible with slack.
        Vector b = a * Vector::Ones(m) + Vector::Constant(2, 0.3);
        return DeterminingSet::FromHalfspaces(s, a, b);
      }
    }
  }
  RandomVariable Rv(int m) {
    return RandomVariable(Vector::NullaryExpr(m, [&] { return 4.0 * u(rng) - 2.0; }));
  }
};

TEST_F(RandomSets, CoherenceAxioms) {
  for (int t = 0; t < 200; ++t) {
    int m = 1 + t % 6;
    auto s = RandomSpace(m);
    auto d = RandomSet(s, t);
    RandomVariable x = Rv(m), y = Rv(m);
    double a = 3.0 * u(rng);
    double c = 4.0 * u(rng) - 2.0;
    EXPECT_GE(Utility(d, x + y), Utility(d, x) + Utility(d, y) - 1e-9) << t;
    EXPECT_NEAR(Utility(d, x * a), a * Utility(d, x), 1e-9) << t;
    EXPECT_NEAR(Utility(d, x + RandomVariable::Constant(m, c)), Utility(d, x) + c, 1e-9) << t;
    Vector bump = Vector::NullaryExpr(m, [&] { return u(rng); });
    EXPECT_GE(Utility(d, x + RandomVariable(bump)), Utility(d, x) - 1e-9) << t;
  }
}

TEST_F(RandomSets, VertexScanMatchesLpAndGreedy) {
  for (int t = 0; t < 120; ++t) {
    int m = 1 + t % 6;
    auto s = RandomSpace(m);
    auto d = RandomSet(s, t);
    RandomVariable x = Rv(m);
    auto withv = d.WithVertices();
    ExtremeSet es = ComputeExtremeSet(d, x);
    double u1 = Utility(d, x);
    double u2 = Utility(withv, x);
    EXPECT_NEAR(u1, u2, 1e-9) << t;
    EXPECT_NEAR(es.value, u1, 1e-9) << t;
    for (int k : es.active) {
      EXPECT_LE(ExpectDensity(*s, es.vertices[k], x.values()),
                es.value + 1e-7 * (1.0 + std::abs(es.value)));
    }
    // Plain LP route.
    LpBuilder b;
    auto mass = d.AddToLp(b);
    b.SetObjective(ExpectExpr(mass, x.values()), LpSense::kMinimize);
    LpSolution sol = SolveBuilt(b);
    ASSERT_EQ(sol.status, LpStatus::kOptimal);
    EXPECT_NEAR(sol.objective, u1, 1e-9) << t;
  }
}

TEST_F(RandomSets, ContributionHomogeneity) {
  for (int t = 0; t < 100; ++t) {
    int m = 1 + t % 6;
    auto s = RandomSpace(m);
    auto d = RandomSet(s, t);
    RandomVariable x = Rv(m), y = Rv(m);
    double a = 5.0 * u(rng);
    EXPECT_NEAR(UtilityContribution(d, x * a, y), a * UtilityContribution(d, x, y), 1e-9);
    EXPECT_NEAR(UtilityContribution(d, y, y), Utility(d, y), 1e-9);
  }
}

TEST(WeightedVaR, MixtureOfTailUtilities) {
  auto s = ScenarioSpace::Uniform(5);
  auto w = DeterminingSet::WeightedVaR(s, {0.25, 0.75}, {0.2, 0.6});
  RandomVariable x = X({3, -1, 0.5, 2, -4});
  double expected = 0.25 * Utility(DeterminingSet::TailVaR(s, 0.2), x) +
                    0.75 * Utility(DeterminingSet::TailVaR(s, 0.6), x);
  EXPECT_NEAR(Utility(w, x), expected, 1e-12);
  EXPECT_NEAR(Utility(w.WithVertices(), x), expected, 1e-12);
}

}  // namespace
}  // namespace riskengine
