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

#ifndef RISKENGINE_CORE_SCENARIO_HPP_
#define RISKENGINE_CORE_SCENARIO_HPP_

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace riskengine {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class ScenarioSpace {
 public:
  ScenarioSpace(std::vector<std::string> labels, Vector p);

  static std::shared_ptr<const ScenarioSpace> Uniform(int m);
  static std::shared_ptr<const ScenarioSpace> Make(std::vector<std::string> labels,
                                                   Vector p);

  int size() const { return static_cast<int>(p_.size()); }
  const Vector& p() const { return p_; }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<std::string> labels_;
  Vector p_;
};

using SpacePtr = std::shared_ptr<const ScenarioSpace>;

// A scenario measure stored as its density against the reference p.
class Measure {
 public:
  Measure(SpacePtr space, Vector z);

  static Measure Reference(SpacePtr space);

  const Vector& z() const { return z_; }
  const SpacePtr& space() const { return space_; }
  // Implied scenario probabilities z_i * p_i.
  Vector probabilities() const;

 private:
  SpacePtr space_;
  Vector z_;
};

class RandomVariable {
 public:
  RandomVariable() = default;
  explicit RandomVariable(Vector values) : values_(std::move(values)) {}

  const Vector& values() const { return values_; }
  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int i) const { return values_[i]; }

  RandomVariable operator+(const RandomVariable& o) const;
  RandomVariable operator-(const RandomVariable& o) const;
  RandomVariable operator*(double a) const;
  RandomVariable operator-() const;

  static RandomVariable Constant(int m, double c);

 private:
  Vector values_;
};

void CheckSize(const ScenarioSpace& space, const RandomVariable& x,
               const char* what);

double Expect(const Measure& q, const RandomVariable& x);
// Sum_i z_i p_i x_i without building a Measure (used by solver inner loops).
double ExpectDensity(const ScenarioSpace& space, const Vector& z,
                     const Vector& x);

}  // namespace riskengine

#endif  // RISKENGINE_CORE_SCENARIO_HPP_
