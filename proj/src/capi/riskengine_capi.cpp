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

#include "riskengine.h"

#include <exception>
#include <memory>
#include <string>

#include "app/commands.hpp"
#include "core/errors.hpp"
#include "model/model.hpp"

struct re_model {
  riskengine::model::Model model;
};

struct re_result {
  riskengine::app::Outcome outcome;
  std::string json;
  std::string json_timed;
};

namespace {

thread_local std::string g_last_error;

re_status FromKind(riskengine::ErrorKind k) {
  using riskengine::ErrorKind;
  switch (k) {
    case ErrorKind::kStructural: return RE_ERR_STRUCTURAL;
    case ErrorKind::kModel: return RE_ERR_MODEL;
    case ErrorKind::kDomain: return RE_ERR_DOMAIN;
    case ErrorKind::kSolver: return RE_ERR_SOLVER;
    case ErrorKind::kCapacity: return RE_ERR_CAPACITY;
    case ErrorKind::kContract: return RE_ERR_CONTRACT;
  }
  return RE_ERR_INTERNAL;
}

re_status Fail(re_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
re_status Guard(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const riskengine::Error& e) {
    return Fail(FromKind(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(RE_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(RE_ERR_INTERNAL, e.what());
  }
}

std::string Str(const char* s) { return s ? s : ""; }

re_status Emit(riskengine::app::Outcome outcome, re_result** out) {
  re_status st = RE_OK;
  if (!outcome.ok) {
    st = FromKind(outcome.error);
    g_last_error = outcome.document["error"]["message"].get<std::string>();
  }
  auto r = std::make_unique<re_result>();
  r->outcome = std::move(outcome);
  *out = r.release();
  return st;
}

}  // namespace

extern "C" {

const char* re_version(void) { return "1.0.0"; }

const char* re_status_name(re_status status) {
  switch (status) {
    case RE_OK: return "ok";
    case RE_ERR_INVALID_ARGUMENT: return "invalid argument";
    case RE_ERR_STRUCTURAL: return "structural error";
    case RE_ERR_MODEL: return "model error";
    case RE_ERR_DOMAIN: return "domain error";
    case RE_ERR_SOLVER: return "solver error";
    case RE_ERR_CAPACITY: return "capacity error";
    case RE_ERR_CONTRACT: return "contract error";
    case RE_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* re_last_error(void) { return g_last_error.c_str(); }

re_status re_model_load_file(const char* path, re_model** out) {
  if (!path || !out) return Fail(RE_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return Guard([&] {
    auto m = std::make_unique<re_model>();
    m->model = riskengine::model::LoadModelFile(path);
    *out = m.release();
    return RE_OK;
  });
}

re_status re_model_load_string(const char* json_text, re_model** out) {
  if (!json_text || !out) return Fail(RE_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return Guard([&] {
    auto m = std::make_unique<re_model>();
    m->model = riskengine::model::LoadModel(json_text);
    *out = m.release();
    return RE_OK;
  });
}

void re_model_free(re_model* model) { delete model; }

re_status re_utility(const re_model* model, const char* set, const char* variable, double* out) {
  if (!model || !set || !variable || !out) return Fail(RE_ERR_INVALID_ARGUMENT, "null argument");
  return Guard([&] {
    *out = riskengine::Utility(model->model.Set(set), model->model.Variable(variable));
    return RE_OK;
  });
}

re_status re_scenario_count(const re_model* model, int* out) {
  if (!model || !out) return Fail(RE_ERR_INVALID_ARGUMENT, "null argument");
  *out = model->model.space->size();
  return RE_OK;
}

re_status re_optimize(const re_model* model, const re_optimize_args* args, re_result** out) {
  if (!model || !args || !out) return Fail(RE_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return Guard([&] {
    riskengine::app::OptimizeArgs a{Str(args->problem), Str(args->pd),        Str(args->rd),
                                    Str(args->set),     Str(args->market),    Str(args->endowment),
                                    Str(args->firm)};
    return Emit(riskengine::app::Optimize(model->model, a), out);
  });
}

re_status re_price(const re_model* model, const re_price_args* args, re_result** out) {
  if (!model || !args || !out) return Fail(RE_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return Guard([&] {
    riskengine::app::PriceArgs a{Str(args->technique), Str(args->set),       Str(args->pd),
                                 Str(args->rd),        Str(args->market),    Str(args->endowment),
                                 Str(args->agents),    Str(args->claim)};
    return Emit(riskengine::app::Price(model->model, a), out);
  });
}

re_status re_liquidity(const re_model* model, const re_liquidity_args* args, re_result** out) {
  if (!model || !args || !out) return Fail(RE_ERR_INVALID_ARGUMENT, "null argument");
  if (args->v_count > 0 && !args->v_grid) return Fail(RE_ERR_INVALID_ARGUMENT, "v_grid is null");
  *out = nullptr;
  return Guard([&] {
    riskengine::app::LiquidityArgs a;
    a.set = Str(args->set);
    a.market = Str(args->market);
    a.claim = Str(args->claim);
    if (args->v_grid) a.v_grid.assign(args->v_grid, args->v_grid + args->v_count);
    a.jobs = args->jobs;
    return Emit(riskengine::app::Liquidity(model->model, a), out);
  });
}

re_status re_equilibrium(const re_model* model, const re_equilibrium_args* args, re_result** out) {
  if (!model || !args || !out) return Fail(RE_ERR_INVALID_ARGUMENT, "null argument");
  if (args->contract_count > 0 && !args->contracts) return Fail(RE_ERR_INVALID_ARGUMENT, "contracts is null");
  *out = nullptr;
  return Guard([&] {
    riskengine::app::EquilibriumArgs a;
    a.mode = Str(args->mode);
    a.agents = Str(args->agents);
    a.claim = Str(args->claim);
    for (size_t i = 0; i < args->contract_count; ++i) a.contracts.push_back(Str(args->contracts[i]));
    return Emit(riskengine::app::Equilibrium(model->model, a), out);
  });
}

re_status re_self_check(const re_model* model, re_result** out) {
  if (!out) return Fail(RE_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return Guard([&] { return Emit(riskengine::app::SelfCheck(model ? &model->model : nullptr), out); });
}

const char* re_result_json(re_result* result, int with_timing) {
  if (!result) return "";
  std::string& slot = with_timing ? result->json_timed : result->json;
  if (slot.empty()) slot = riskengine::app::Render(result->outcome, with_timing != 0);
  return slot.c_str();
}

const char* re_result_csv(const re_result* result) { return result ? result->outcome.csv.c_str() : ""; }

int re_result_passed(const re_result* result) { return result && result->outcome.passed ? 1 : 0; }

void re_result_free(re_result* result) { delete result; }

}  // extern "C"
