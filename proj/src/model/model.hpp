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

#ifndef RISKENGINE_MODEL_MODEL_HPP_
#define RISKENGINE_MODEL_MODEL_HPP_

#include <map>
#include <string>
#include <vector>

#include "core/determining_set.hpp"
#include "core/market.hpp"

namespace riskengine::model {

struct AgentEntry {
  std::string set;
  std::string market;  // empty: no personal trading
  std::string endowment;
};

struct FirmEntry {
  std::vector<std::string> units;
  Vector h;
  Cone cone;
};

struct Model {
  SpacePtr space;
  std::map<std::string, DeterminingSet> sets;
  std::map<std::string, Market> markets;
  std::map<std::string, RandomVariable> variables;
  std::map<std::string, std::vector<AgentEntry>> agents;
  std::map<std::string, FirmEntry> firms;
  // Canonical (sorted-key, compact) text of the parsed document.
  std::string canonical;

  const DeterminingSet& Set(const std::string& name) const;
  const Market& GetMarket(const std::string& name) const;
  const RandomVariable& Variable(const std::string& name) const;
  const std::vector<AgentEntry>& Agents(const std::string& name) const;
  const FirmEntry& Firm(const std::string& name) const;
};

// Throws ModelError with "line N (/json/pointer): ..." on invalid input.
Model LoadModel(const std::string& text);
Model LoadModelFile(const std::string& path);

}  // namespace riskengine::model

#endif  // RISKENGINE_MODEL_MODEL_HPP_
