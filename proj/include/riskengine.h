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

#ifndef RISKENGINE_H_
#define RISKENGINE_H_

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#  define RE_API __declspec(dllexport)
#else
#  define RE_API __attribute__((visibility("default")))
#endif

typedef enum re_status {
  RE_OK = 0,
  RE_ERR_INVALID_ARGUMENT = 1,
  RE_ERR_STRUCTURAL = 2,
  RE_ERR_MODEL = 3,
  RE_ERR_DOMAIN = 4,
  RE_ERR_SOLVER = 5,
  RE_ERR_CAPACITY = 6,
  RE_ERR_CONTRACT = 7,
  RE_ERR_INTERNAL = 8
} re_status;

typedef struct re_model re_model;
typedef struct re_result re_result;

/* Unset string fields may be NULL or "". */
typedef struct re_optimize_args {
  const char* problem; /* raroc, global, local, firm */
  const char* pd;
  const char* rd;
  const char* set;
  const char* market;
  const char* endowment;
  const char* firm;
} re_optimize_args;

typedef struct re_price_args {
  const char* technique; /* ngd, nbc-ai, nbc-single, nbc-multi */
  const char* set;
  const char* pd;
  const char* rd;
  const char* market;
  const char* endowment;
  const char* agents;
  const char* claim;
} re_price_args;

typedef struct re_liquidity_args {
  const char* set;
  const char* market;
  const char* claim;
  const double* v_grid; /* NULL: 25 log-spaced volumes in [1e-2, 1e2] */
  size_t v_count;
  int jobs;
} re_liquidity_args;

typedef struct re_equilibrium_args {
  const char* mode; /* unconstrained, constrained */
  const char* agents;
  const char* claim;
  const char* const* contracts;
  size_t contract_count;
} re_equilibrium_args;

RE_API const char* re_version(void);
RE_API const char* re_status_name(re_status status);

/* Message of the last failing call on this thread. */
RE_API const char* re_last_error(void);

RE_API re_status re_model_load_file(const char* path, re_model** out);
RE_API re_status re_model_load_string(const char* json_text, re_model** out);
RE_API void re_model_free(re_model* model);

/* Scalar helpers for embedding. */
RE_API re_status re_utility(const re_model* model, const char* set, const char* variable,
                            double* out);
RE_API re_status re_scenario_count(const re_model* model, int* out);

/*
 * Commands. On a library error *out still receives a result whose document
 * carries the error, and the status names its category.
 */
RE_API re_status re_optimize(const re_model* model, const re_optimize_args* args,
                             re_result** out);
RE_API re_status re_price(const re_model* model, const re_price_args* args, re_result** out);
RE_API re_status re_liquidity(const re_model* model, const re_liquidity_args* args,
                              re_result** out);
RE_API re_status re_equilibrium(const re_model* model, const re_equilibrium_args* args,
                                re_result** out);
/* model may be NULL. */
RE_API re_status re_self_check(const re_model* model, re_result** out);

/* Owned by the result; valid until re_result_free. */
RE_API const char* re_result_json(re_result* result, int with_timing);
RE_API const char* re_result_csv(const re_result* result);
/* 1 when every check in the document passed. */
RE_API int re_result_passed(const re_result* result);
RE_API void re_result_free(re_result* result);

#ifdef __cplusplus
}
#endif

#endif /* RISKENGINE_H_ */
