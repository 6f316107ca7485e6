#ifndef OSLAB_OSLAB_H
#define OSLAB_OSLAB_H

/* C interface to the oslab library. Objects are opaque handles released with
 * the matching *_free function. Every call returns an oslab_status; on failure
 * oslab_last_error() describes the cause for the calling thread. Strings
 * returned through char** are released with oslab_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define OSLAB_API __declspec(dllexport)
#else
#define OSLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum oslab_status {
  OSLAB_OK = 0,
  OSLAB_E_ARGUMENT = 1,  /* null pointer, out-of-range value or malformed input */
  OSLAB_E_PARSE = 2,     /* JSON that does not describe a valid object */
  OSLAB_E_UNSTABLE = 3,  /* certificate search did not settle */
  OSLAB_E_BUDGET = 4,    /* combing stopped at the step budget */
  OSLAB_E_IO = 5,
  OSLAB_E_INTERNAL = 6   /* violated internal invariant */
} oslab_status;

typedef struct oslab_graph oslab_graph;
typedef struct oslab_trace oslab_trace;
typedef struct oslab_report oslab_report;

typedef struct oslab_experiment_config {
  int rank;
  double epsilon;
  uint64_t seed;
  int count;
  int move_min;
  int move_max;
  size_t cert_length; /* 0 selects the default bound */
  int check_facts;
  int threads;        /* 0 selects the hardware concurrency */
} oslab_experiment_config;

OSLAB_API const char* oslab_version(void);
OSLAB_API const char* oslab_last_error(void);
OSLAB_API const char* oslab_status_string(oslab_status s);
OSLAB_API void oslab_string_free(char* s);

/* Marked graphs. */
OSLAB_API oslab_status oslab_graph_from_json(const char* json, oslab_graph** out);
OSLAB_API oslab_status oslab_graph_to_json(const oslab_graph* g, char** out);
OSLAB_API oslab_status oslab_graph_rank(const oslab_graph* g, int* out);
OSLAB_API oslab_status oslab_graph_edge_count(const oslab_graph* g, int* out);
/* Writes the number of violations; with a non-null `report`, a JSON list of them. */
OSLAB_API oslab_status oslab_graph_validate(const oslab_graph* g, int* violations, char** report);
OSLAB_API oslab_status oslab_graph_systole(const oslab_graph* g, double* out);
OSLAB_API void oslab_graph_free(oslab_graph* g);

/* A seeded instance: a trivalent A and a rose B = phi(standard rose). */
OSLAB_API oslab_status oslab_generate_pair(int rank, uint64_t seed, int moves, double epsilon, oslab_graph** a,
                                           oslab_graph** b);

/* d(X, Y) = log Lambda(X, Y); `lambda` (optional) receives Lambda as an exact fraction. */
OSLAB_API oslab_status oslab_distance(const oslab_graph* x, const oslab_graph* y, double* d, char** lambda);
OSLAB_API oslab_status oslab_intersection(const oslab_graph* x, const oslab_graph* y, size_t cert_length, long* i,
                                          int* stable);

/* Combing path from b toward a (a trivalent). A trace cut by the budget is
 * still returned, together with OSLAB_E_BUDGET. */
OSLAB_API oslab_status oslab_comb(const oslab_graph* b, const oslab_graph* a, size_t step_budget, oslab_trace** out);
OSLAB_API oslab_status oslab_trace_length(const oslab_trace* t, int* n);
OSLAB_API oslab_status oslab_trace_l_gamma(const oslab_trace* t, double* out);
/* Runs the trace checks; `passed` is 1 when all hold. With rerun, the suffix
 * check re-combs from every even vertex. */
OSLAB_API oslab_status oslab_trace_verify(oslab_trace* t, int rerun, int* passed);
/* Trace JSON, including the check results when oslab_trace_verify ran. */
OSLAB_API oslab_status oslab_trace_to_json(const oslab_trace* t, char** out);
OSLAB_API void oslab_trace_free(oslab_trace* t);

/* Batch experiments; kind is "metric" or "combing". */
OSLAB_API void oslab_experiment_config_default(oslab_experiment_config* cfg);
OSLAB_API oslab_status oslab_run_experiment(const char* kind, const oslab_experiment_config* cfg, oslab_report** out);
OSLAB_API oslab_status oslab_report_status(const oslab_report* r, int* all_passed, int* aborted);
OSLAB_API oslab_status oslab_report_to_json(const oslab_report* r, char** out);
OSLAB_API oslab_status oslab_report_to_csv(const oslab_report* r, char** out);
/* format: "csv", "json", "svg" or "all". */
OSLAB_API oslab_status oslab_report_emit(const oslab_report* r, const char* prefix, const char* format);
OSLAB_API void oslab_report_free(oslab_report* r);

#ifdef __cplusplus
}
#endif

#endif
