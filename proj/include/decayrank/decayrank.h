#ifndef DECAYRANK_DECAYRANK_H
#define DECAYRANK_DECAYRANK_H

/* C interface to the decayrank library.
 *
 * Every fallible call returns a dr_status. On failure a message is available
 * from dr_last_error() until the next call on the same thread.
 *
 * Report functions take a JSON request document and fill a dr_buffer that
 * the caller releases with dr_buffer_free. Request fields are listed in the
 * README.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(DECAYRANK_BUILDING_LIBRARY)
#    define DR_API __declspec(dllexport)
#  else
#    define DR_API __declspec(dllimport)
#  endif
#else
#  define DR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dr_status {
  DR_OK = 0,
  DR_ERR_PARAM = 1,    /* invalid argument or request field */
  DR_ERR_FORMAT = 2,   /* malformed snapshot or JSON */
  DR_ERR_BUDGET = 3,   /* enumeration exceeds its budget */
  DR_ERR_IO = 4,
  DR_ERR_INTERNAL = 5
} dr_status;

typedef enum dr_format {
  DR_FORMAT_JSON = 0,
  DR_FORMAT_CSV = 1,
  DR_FORMAT_TEXT = 2  /* bounds only */
} dr_format;

typedef struct dr_buffer {
  uint8_t* data;  /* NUL-terminated for text output; size excludes the NUL */
  size_t size;
} dr_buffer;

DR_API void dr_buffer_free(dr_buffer* buf);

DR_API const char* dr_last_error(void);
DR_API const char* dr_version(void);

DR_API dr_status dr_half_life_to_alpha(double half_life, double* alpha);

/* ---- streaming ranker ---- */

typedef struct dr_ranker dr_ranker;

/* Empty table: the first observed item takes all of the mass. */
DR_API dr_status dr_ranker_create(double alpha, dr_ranker** out);
/* Uniform start over `count` distinct ids. */
DR_API dr_status dr_ranker_create_uniform(double alpha, const char* const* items, size_t count, dr_ranker** out);
DR_API void dr_ranker_destroy(dr_ranker* ranker);

DR_API dr_status dr_ranker_observe(dr_ranker* ranker, const char* item, size_t length);
DR_API dr_status dr_ranker_set_alpha(dr_ranker* ranker, double alpha);
DR_API dr_status dr_ranker_set_eviction_floor(dr_ranker* ranker, double floor);

/* 0 for unknown items. */
DR_API dr_status dr_ranker_probability(const dr_ranker* ranker, const char* item, size_t length, double* out);
DR_API dr_status dr_ranker_step(const dr_ranker* ranker, uint64_t* out);
DR_API dr_status dr_ranker_size(const dr_ranker* ranker, size_t* out);
DR_API dr_status dr_ranker_alpha(const dr_ranker* ranker, double* out);

/* Top-k report at the current step. JSON: {"step", "top": [{"item", "probability"}]}.
 * CSV rows are step,rank,item,probability; `csv_header` toggles the header line. */
DR_API dr_status dr_ranker_report(const dr_ranker* ranker, size_t k, dr_format format, int csv_header, dr_buffer* out);

DR_API dr_status dr_ranker_snapshot(const dr_ranker* ranker, dr_buffer* out);
DR_API dr_status dr_ranker_restore(const uint8_t* bytes, size_t size, dr_ranker** out);

/* ---- reports ---- */

/* Monte Carlo walk. Request: walk configuration. */
DR_API dr_status dr_simulate(const char* request_json, dr_format format, dr_buffer* out);
/* Exact enumeration of every jump sequence. Request: walk configuration plus optional "order". */
DR_API dr_status dr_enumerate(const char* request_json, dr_format format, dr_buffer* out);
/* Reciprocal-moment probe. Request: two-vertex walk configuration. */
DR_API dr_status dr_probe(const char* request_json, dr_format format, dr_buffer* out);
/* Central moments, symmetry and root trend. Request: {"alpha", "q", "order"}. */
DR_API dr_status dr_moments(const char* request_json, dr_format format, dr_buffer* out);
/* Closed-form mean and covariance of a walk with arbitrary vertices. Request:
 * walk configuration; "steps" may be "inf". */
DR_API dr_status dr_generalized(const char* request_json, dr_format format, dr_buffer* out);
/* Covariance and kernel spectrum. Request: {"q", "alpha", "t"}. */
DR_API dr_status dr_eigen(const char* request_json, dr_format format, dr_buffer* out);
/* Tail bounds. Request: {"alpha", "q", "eps", "t"}. */
DR_API dr_status dr_bounds(const char* request_json, dr_format format, dr_buffer* out);
/* Recency boost. Request: {"alpha", "t1", "t2"}. */
DR_API dr_status dr_boost(const char* request_json, dr_format format, dr_buffer* out);
/* Regime-switch mean. Request: {"alpha", "x", "p1", "p2", "t1", "t2"}. JSON only. */
DR_API dr_status dr_regime(const char* request_json, dr_format format, dr_buffer* out);

/* ---- acceptance suite ---- */

typedef struct dr_check {
  int criterion;
  const char* name;
  int passed;
  double residual;
  double tolerance;
  const char* detail;
  double seconds;
} dr_check;

typedef void (*dr_check_callback)(const dr_check* check, void* user);

/* Runs every check; `full` selects the full budget. *all_passed is 1 when
 * every check passed. */
DR_API dr_status dr_verify(int full, dr_check_callback callback, void* user, int* all_passed);

#ifdef __cplusplus
}
#endif

#endif
