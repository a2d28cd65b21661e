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

#ifndef RISKENGINE_CORE_ERRORS_HPP_
#define RISKENGINE_CORE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace riskengine {

// Error categories mirror the C API status codes.
enum class ErrorKind {
  kStructural,
  kModel,
  kDomain,
  kSolver,
  kCapacity,
  kContract,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class StructuralError : public Error {
 public:
  explicit StructuralError(const std::string& what)
      : Error(ErrorKind::kStructural, what) {}
};

class ModelError : public Error {
 public:
  explicit ModelError(const std::string& what)
      : Error(ErrorKind::kModel, what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(ErrorKind::kDomain, what) {}
};

class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what)
      : Error(ErrorKind::kSolver, what) {}
};

class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& what)
      : Error(ErrorKind::kCapacity, what) {}
};

class ContractError : public Error {
 public:
  explicit ContractError(const std::string& what)
      : Error(ErrorKind::kContract, what) {}
};

}  // namespace riskengine

#endif  // RISKENGINE_CORE_ERRORS_HPP_
