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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "riskengine.h"

namespace {

int ExitCode(re_status s) {
  switch (s) {
    case RE_OK: return 0;
    case RE_ERR_DOMAIN: return 2;
    case RE_ERR_MODEL:
    case RE_ERR_STRUCTURAL:
    case RE_ERR_INVALID_ARGUMENT: return 3;
    default: return 4;
  }
}

const char* Opt(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

std::vector<double> ParseGrid(const std::string& spec) {
  std::vector<double> out;
  if (spec.empty()) return out;
  auto fail = [&]() -> std::vector<double> {
    throw CLI::ValidationError("--v-grid", "expected log:LO:HI:N, lin:LO:HI:N or a comma list");
  };
  if (spec.rfind("log:", 0) == 0 || spec.rfind("lin:", 0) == 0) {
    double lo = 0, hi = 0;
    int n = 0;
    char tail = 0;
    if (std::sscanf(spec.c_str() + 4, "%lf:%lf:%d%c", &lo, &hi, &n, &tail) != 3 || n < 1) return fail();
    bool log = spec[1] == 'o';
    if (log && (lo <= 0 || hi <= 0)) return fail();
    for (int i = 0; i < n; ++i) {
      double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
      out.push_back(log ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))) : lo + t * (hi - lo));
    }
    return out;
  }
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) return fail();
    } catch (const std::exception&) {
      return fail();
    }
  }
  return out;
}

struct Common {
  std::string model;
  std::string output;
  bool timing = false;
};

void AddCommon(CLI::App* cmd, Common& c, bool model_required = true) {
  auto* m = cmd->add_option("model", c.model, "Model JSON file");
  if (model_required) m->required()->check(CLI::ExistingFile);
  else m->check(CLI::ExistingFile);
  cmd->add_option("-o,--output", c.output, "Write the result document to a file instead of stdout");
  cmd->add_flag("--timing", c.timing, "Include wall time in the statistics block");
}

bool Write(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return static_cast<bool>(std::cout);
  }
  std::ofstream f(path, std::ios::binary);
  f << text;
  return static_cast<bool>(f);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coherent risk optimization, pricing and equilibrium engine"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(re_version()));

  Common oc, pc, lc, ec, sc;
  std::string problem, pd, rd, set, market, endowment, firm;
  auto* opt = app.add_subcommand("optimize", "Agent-independent, global, local or firm-structure problem");
  AddCommon(opt, oc);
  opt->add_option("--problem", problem, "raroc | global | local | firm")
      ->required()
      ->check(CLI::IsMember({"raroc", "global", "local", "firm"}));
  opt->add_option("--pd", pd, "Determining set for expected P&L");
  opt->add_option("--rd", rd, "Determining set for risk");
  opt->add_option("--set", set, "Determining set of the agent");
  opt->add_option("--market", market, "Market name");
  opt->add_option("--endowment", endowment, "Endowment variable (default zero)");
  opt->add_option("--firm", firm, "Firm entry for --problem firm");

  std::string technique, p_set, p_pd, p_rd, p_market, p_endow, p_agents, p_claim;
  auto* price = app.add_subcommand("price", "Price interval of a claim");
  AddCommon(price, pc);
  price->add_option("--technique", technique, "ngd | nbc-ai | nbc-single | nbc-multi")
      ->required()
      ->check(CLI::IsMember({"ngd", "nbc-ai", "nbc-single", "nbc-multi"}));
  price->add_option("--claim", p_claim, "Claim variable")->required();
  price->add_option("--market", p_market, "Market name")->required();
  price->add_option("--set", p_set, "Determining set");
  price->add_option("--pd", p_pd, "Determining set for expected P&L (nbc-ai)");
  price->add_option("--rd", p_rd, "Determining set for risk (nbc-ai)");
  price->add_option("--endowment", p_endow, "Endowment variable (nbc-single)");
  price->add_option("--agents", p_agents, "Agent group (nbc-multi)");

  std::string l_set, l_market, l_claim, l_grid, l_csv;
  int jobs = 1;
  auto* liq = app.add_subcommand("liquidity", "Volume-dependent NGD price curve as CSV");
  AddCommon(liq, lc);
  liq->add_option("--set", l_set, "Determining set")->required();
  liq->add_option("--market", l_market, "Market name (polytope or cone)")->required();
  liq->add_option("--claim", l_claim, "Claim variable")->required();
  liq->add_option("--v-grid", l_grid, "log:LO:HI:N, lin:LO:HI:N or a comma list");
  liq->add_option("--jobs", jobs, "Worker threads for curve sampling")->check(CLI::Range(1, 64));
  liq->add_option("--json", l_csv, "Also write the JSON document to this file");

  std::string mode, e_agents, e_claim;
  std::vector<std::string> contracts;
  auto* eq = app.add_subcommand("equilibrium", "Pareto and Arrow-Debreu equilibrium");
  AddCommon(eq, ec);
  eq->add_option("--mode", mode, "unconstrained | constrained")
      ->required()
      ->check(CLI::IsMember({"unconstrained", "constrained"}));
  eq->add_option("--agents", e_agents, "Agent group")->required();
  eq->add_option("--contracts", contracts, "Contract variables (constrained)")->delimiter(',');
  eq->add_option("--claim", e_claim, "Claim variable (unconstrained)");

  auto* self = app.add_subcommand("self-check", "Oracle cross-checks on built-in instances");
  AddCommon(self, sc, false);

  CLI11_PARSE(app, argc, argv);

  const Common* common = nullptr;
  re_model* model = nullptr;
  if (opt->parsed()) common = &oc;
  if (price->parsed()) common = &pc;
  if (liq->parsed()) common = &lc;
  if (eq->parsed()) common = &ec;
  if (self->parsed()) common = &sc;

  std::vector<double> grid;
  if (liq->parsed()) {
    try {
      grid = ParseGrid(l_grid);
    } catch (const CLI::Error& e) {
      return app.exit(e);
    }
  }

  if (!common->model.empty()) {
    re_status st = re_model_load_file(common->model.c_str(), &model);
    if (st != RE_OK) {
      std::cerr << "riskengine: " << re_status_name(st) << ": " << re_last_error() << "\n";
      return ExitCode(st);
    }
  }

  re_result* result = nullptr;
  re_status st = RE_OK;
  if (opt->parsed()) {
    re_optimize_args a{Opt(problem), Opt(pd), Opt(rd), Opt(set), Opt(market), Opt(endowment), Opt(firm)};
    st = re_optimize(model, &a, &result);
  } else if (price->parsed()) {
    re_price_args a{Opt(technique), Opt(p_set), Opt(p_pd),     Opt(p_rd),
                    Opt(p_market),  Opt(p_endow), Opt(p_agents), Opt(p_claim)};
    st = re_price(model, &a, &result);
  } else if (liq->parsed()) {
    re_liquidity_args a{Opt(l_set), Opt(l_market), Opt(l_claim), grid.empty() ? nullptr : grid.data(),
                        grid.size(), jobs};
    st = re_liquidity(model, &a, &result);
  } else if (eq->parsed()) {
    std::vector<const char*> names;
    for (const auto& c : contracts) names.push_back(c.c_str());
    re_equilibrium_args a{Opt(mode), Opt(e_agents), Opt(e_claim), names.empty() ? nullptr : names.data(),
                          names.size()};
    st = re_equilibrium(model, &a, &result);
  } else {
    st = re_self_check(model, &result);
  }

  int code = ExitCode(st);
  if (st != RE_OK) std::cerr << "riskengine: " << re_status_name(st) << ": " << re_last_error() << "\n";
  if (result != nullptr) {
    std::string doc = re_result_json(result, common->timing ? 1 : 0);
    bool ok;
    if (liq->parsed() && st == RE_OK) {
      // CSV body followed by the document as a commented footer.
      std::string text = re_result_csv(result);
      std::stringstream ss(doc);
      std::string line;
      while (std::getline(ss, line)) text += "# " + line + "\n";
      ok = Write(common->output, text);
      if (!l_csv.empty()) ok = Write(l_csv, doc) && ok;
    } else {
      ok = Write(common->output, doc);
    }
    if (!ok) {
      std::cerr << "riskengine: failed to write output\n";
      code = code ? code : 4;
    }
    if (code == 0 && !re_result_passed(result)) {
      std::cerr << "riskengine: one or more checks failed\n";
      code = 1;
    }
    re_result_free(result);
  }
  re_model_free(model);
  return code;
}
