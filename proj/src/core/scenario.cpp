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

#include "core/scenario.hpp"

#include <cmath>
#include <sstream>

#include "core/errors.hpp"
#include "core/tolerances.hpp"

namespace riskengine {

ScenarioSpace::ScenarioSpace(std::vector<std::string> labels, Vector p)
    : labels_(std::move(labels)), p_(std::move(p)) {
  if (p_.size() < 1) throw StructuralError("scenario space needs m >= 1");
  if (labels_.empty()) {
    for (int i = 0; i < p_.size(); ++i) labels_.push_back("w" + std::to_string(i + 1));
  }
  if (static_cast<int>(labels_.size()) != p_.size()) {
    throw StructuralError("scenario labels and probabilities differ in length");
  }
  for (int i = 0; i < p_.size(); ++i) {
    if (!(p_[i] > 0.0) || !std::isfinite(p_[i])) {
      std::ostringstream os;
      os << "probability of scenario " << labels_[i] << " must be > 0";
      throw StructuralError(os.str());
    }
  }
  double total = p_.sum();
  if (std::abs(total - 1.0) > tol().probability_sum * std::max<double>(1.0, p_.size())) {
    std::ostringstream os;
    os.precision(17);
    os << "probabilities sum to " << total << ", expected 1";
    throw StructuralError(os.str());
  }
}

SpacePtr ScenarioSpace::Uniform(int m) {
  if (m < 1) throw StructuralError("scenario space needs m >= 1");
  return std::make_shared<const ScenarioSpace>(std::vector<std::string>{},
                                               Vector::Constant(m, 1.0 / m));
}

SpacePtr ScenarioSpace::Make(std::vector<std::string> labels, Vector p) {
  return std::make_shared<const ScenarioSpace>(std::move(labels), std::move(p));
}

Measure::Measure(SpacePtr space, Vector z) : space_(std::move(space)), z_(std::move(z)) {
  if (!space_) throw StructuralError("measure without scenario space");
  if (z_.size() != space_->size()) {
    throw StructuralError("density length does not match scenario count");
  }
  const double eps = tol().structural;
  for (int i = 0; i < z_.size(); ++i) {
    if (!std::isfinite(z_[i]) || z_[i] < -eps) {
      throw StructuralError("density must be nonnegative");
    }
    if (z_[i] < 0.0) z_[i] = 0.0;
  }
  double mass = z_.dot(space_->p());
  if (std::abs(mass - 1.0) > eps) {
    std::ostringstream os;
    os.precision(17);
    os << "measure has total mass " << mass;
    throw StructuralError(os.str());
  }
}

Measure Measure::Reference(SpacePtr space) {
  int m = space->size();
  return Measure(std::move(space), Vector::Ones(m));
}

Vector Measure::probabilities() const { return z_.cwiseProduct(space_->p()); }

RandomVariable RandomVariable::operator+(const RandomVariable& o) const {
  if (o.size() != size()) throw StructuralError("random variable size mismatch");
  return RandomVariable(values_ + o.values_);
}

RandomVariable RandomVariable::operator-(const RandomVariable& o) const {
  if (o.size() != size()) throw StructuralError("random variable size mismatch");
  return RandomVariable(values_ - o.values_);
}

RandomVariable RandomVariable::operator*(double a) const {
  return RandomVariable(values_ * a);
}

RandomVariable RandomVariable::operator-() const { return RandomVariable(-values_); }

RandomVariable RandomVariable::Constant(int m, double c) {
  return RandomVariable(Vector::Constant(m, c));
}

void CheckSize(const ScenarioSpace& space, const RandomVariable& x, const char* what) {
  if (x.size() != space.size()) {
    std::ostringstream os;
    os << what << ": length " << x.size() << " does not match scenario count "
       << space.size();
    throw StructuralError(os.str());
  }
}

double Expect(const Measure& q, const RandomVariable& x) {
  CheckSize(*q.space(), x, "expect");
  return ExpectDensity(*q.space(), q.z(), x.values());
}

double ExpectDensity(const ScenarioSpace& space, const Vector& z, const Vector& x) {
  const Vector& p = space.p();
  double s = 0.0;
  for (int i = 0; i < p.size(); ++i) s += z[i] * p[i] * x[i];
  return s;
}

}  // namespace riskengine
