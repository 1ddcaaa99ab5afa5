#ifndef MGCOMM_H
#define MGCOMM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MGCOMM_BUILDING_LIBRARY)
#    define MGCOMM_API __declspec(dllexport)
#  else
#    define MGCOMM_API __declspec(dllimport)
#  endif
#else
#  define MGCOMM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mg_status {
  MG_OK = 0,
  MG_ERR_INVALID_ARGUMENT = 1,
  MG_ERR_DIMENSION = 2,
  MG_ERR_MODEL = 3,
  MG_ERR_NUMERICAL = 4,
  MG_ERR_INFEASIBLE = 5,
  MG_ERR_PARSE = 6,
  MG_ERR_IO = 7,
  MG_ERR_NOT_FOUND = 8,
  MG_ERR_INTERNAL = 99
} mg_status;

typedef struct mg_model mg_model;
typedef struct mg_report mg_report;
typedef struct mg_string mg_string;

MGCOMM_API const char* mg_version(void);
MGCOMM_API const char* mg_status_string(mg_status status);
/* Detail of the last failure on the calling thread; empty after success. */
MGCOMM_API const char* mg_last_error(void);

MGCOMM_API const char* mg_string_data(const mg_string* s);
MGCOMM_API size_t mg_string_size(const mg_string* s);
MGCOMM_API void mg_string_free(mg_string* s);

/* Models. Matrices cross the boundary as row-major JSON arrays. */
MGCOMM_API mg_status mg_model_canonical(mg_model** out);
MGCOMM_API mg_status mg_model_from_params(const char* params_json, mg_model** out);
MGCOMM_API mg_status mg_model_chain_extend(const char* params_json, int n, mg_model** out);
MGCOMM_API mg_status mg_model_from_json(const char* model_json, mg_model** out);
MGCOMM_API mg_status mg_model_to_json(const mg_model* model, mg_string** out);
MGCOMM_API mg_status mg_model_nodal_json(const char* params_json, mg_string** out);
MGCOMM_API int mg_model_states(const mg_model* model);
MGCOMM_API void mg_model_free(mg_model* model);

/* Closed loop A + BKC, or (A + BKC)(I - BDKC) when delay_json is not NULL.
 * Output: {"matrix": [...], "spectrum": [[re, im], ...], "max_real": x}. */
MGCOMM_API mg_status mg_closed_loop(const mg_model* model, const char* gain_json,
                                    const char* delay_json, mg_string** out);

/* Topology. network_json follows the fixture layout; constraints_json may be
 * NULL to use the constraints embedded in the network document. objective is
 * "reliability", "cost" or "user_requirement". Output has "paths",
 * "filtered", "sets" and "masks". */
MGCOMM_API mg_status mg_enumerate(const char* network_json, const char* constraints_json,
                                  const char* objective, mg_string** out);
MGCOMM_API mg_status mg_fixture(const char* name, mg_string** out);
MGCOMM_API mg_status mg_cbscd(int ns, int nc, const char* constraints_json, mg_string** out);

typedef struct mg_synthesis_options {
  double beta;
  double rho;
  /* 0: K'K <= rho I, 1: ||K||_2 <= rho */
  int norm_bound;
  double tolerance;
  /* Uniform link delay in seconds; negative disables the delay program. */
  double delay_seconds;
} mg_synthesis_options;

MGCOMM_API void mg_synthesis_options_default(mg_synthesis_options* opts);
/* mask_csv: 0/1 rows, controllers by sensors. Output is the result JSON. */
MGCOMM_API mg_status mg_synthesize(const mg_model* model, const char* mask_csv,
                                   const mg_synthesis_options* opts, mg_string** out);

/* Scheduling. policy is "edf", "llf" or "drp"; capacity <= 0 is rejected,
 * use INFINITY for an unconstrained run. Either output may be NULL, not both. */
MGCOMM_API mg_status mg_schedule(const char* tasks_csv, const char* policy, double capacity,
                                 int horizon, mg_string** trace_csv, mg_string** summary_json);
MGCOMM_API mg_status mg_generate_tasks(uint64_t seed, int count, int regions, mg_string** csv);

/* Broker-in-the-loop simulation. dt <= 0 and horizon <= 0 select defaults.
 * x0_json is an array of n initial states. Output is trajectory CSV. */
MGCOMM_API mg_status mg_simulate(const mg_model* model, const char* gain_json, int delay_slots,
                                 double dt, double horizon, const char* x0_json,
                                 mg_string** out);

/* Scenarios. */
MGCOMM_API mg_status mg_scenario_list(mg_string** out);
MGCOMM_API mg_status mg_scenario_run(const char* id, uint64_t seed, double tolerance,
                                     mg_report** out);
MGCOMM_API mg_status mg_report_emit(const mg_report* report, const char* format,
                                    int include_runtime, mg_string** out);
MGCOMM_API mg_status mg_report_parse(const char* json, mg_report** out);
MGCOMM_API double mg_report_runtime_ms(const mg_report* report);
MGCOMM_API void mg_report_free(mg_report* report);

#ifdef __cplusplus
}
#endif

#endif /* MGCOMM_H */
