/* Copyright 2026 The neolrp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the neolrp location-routing toolkit.
 *
 * Every function returns NEOLRP_OK (0) or an error code. On failure the
 * calling thread's last error holds a message and a JSON rendering, both
 * valid until the next call on that thread. Strings returned through char**
 * out-parameters are owned by the caller and released with
 * neolrp_string_free().
 */

#ifndef NEOLRP_NEOLRP_H_
#define NEOLRP_NEOLRP_H_

#include <stddef.h>

#if defined(_WIN32)
#define NEOLRP_API __declspec(dllexport)
#else
#define NEOLRP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum neolrp_status {
  NEOLRP_OK = 0,
  NEOLRP_ERR_INVALID_ARGUMENT = 1,
  NEOLRP_ERR_PARSE = 2,
  NEOLRP_ERR_VALIDATION = 3,
  NEOLRP_ERR_CONFIG = 4,
  NEOLRP_ERR_IO = 5,
  NEOLRP_ERR_SHAPE = 6,
  NEOLRP_ERR_GENERATION_STALL = 7,
  NEOLRP_ERR_SIZE = 8,
  NEOLRP_ERR_TRAINING = 9,
  NEOLRP_ERR_BACKEND = 10,
  NEOLRP_ERR_METRIC = 11,
  NEOLRP_ERR_MISSING_ARTIFACT = 12,
  NEOLRP_ERR_INTERNAL = 99
} neolrp_status;

typedef struct neolrp_instance neolrp_instance;
typedef struct neolrp_model neolrp_model;
typedef struct neolrp_solution neolrp_solution;

NEOLRP_API const char* neolrp_version(void);

NEOLRP_API int neolrp_last_error_code(void);
NEOLRP_API const char* neolrp_last_error_message(void);
/* {"error": "<name>", "code": <int>, "message": "..."} */
NEOLRP_API const char* neolrp_last_error_json(void);

NEOLRP_API void neolrp_string_free(char* s);

/* Instances (Prodhon layout). rounding: NULL or "" keeps the file's flag,
 * otherwise "raw" or "prodhon100". */
NEOLRP_API int neolrp_instance_load(const char* path, const char* rounding,
                                    neolrp_instance** out);
NEOLRP_API int neolrp_instance_parse(const char* text, const char* rounding,
                                     neolrp_instance** out);
NEOLRP_API void neolrp_instance_free(neolrp_instance* inst);
NEOLRP_API int neolrp_instance_num_depots(const neolrp_instance* inst);
NEOLRP_API int neolrp_instance_num_customers(const neolrp_instance* inst);

/* Surrogate models (JSON weight files). */
NEOLRP_API int neolrp_model_load(const char* path, neolrp_model** out);
NEOLRP_API void neolrp_model_free(neolrp_model* model);
/* Predicted routing cost of depot `depot` serving the listed customers. */
NEOLRP_API int neolrp_model_predict(const neolrp_model* model, const neolrp_instance* inst,
                                    int depot, const int* customers, size_t count,
                                    double* out);

/* Routes a location-allocation decision. depot_of has one entry per customer,
 * open one per depot (nonzero = open). */
NEOLRP_API int neolrp_finalize_routes(const neolrp_instance* inst, const int* depot_of,
                                      const int* open, int exact_limit, int iterations,
                                      unsigned long long seed, neolrp_solution** out);
NEOLRP_API void neolrp_solution_free(neolrp_solution* sol);
NEOLRP_API double neolrp_solution_total_cost(const neolrp_solution* sol);
NEOLRP_API int neolrp_solution_to_json(const neolrp_solution* sol, char** out);

/* Pipeline stages: sample, label, train, solve, route, evaluate, ablate.
 * overrides_json may be NULL; it is merged into the config file. */
NEOLRP_API int neolrp_run_stage(const char* stage, const char* config_path,
                                const char* overrides_json, char** result_json);

#ifdef __cplusplus
}
#endif

#endif /* NEOLRP_NEOLRP_H_ */
