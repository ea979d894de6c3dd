/*
 * C interface to the v2xsched simulator.
 *
 * Handles are opaque and owned by the caller once returned. Every function
 * that can fail returns a v2x_status; on failure v2x_last_error() describes
 * the problem. The error text is per thread, so distinct runs may execute on
 * distinct threads sharing one (read-only) config handle.
 */
#ifndef V2XSCHED_H
#define V2XSCHED_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32) || defined(__CYGWIN__)
#  ifdef V2XSCHED_BUILDING
#    define V2X_API __declspec(dllexport)
#  else
#    define V2X_API __declspec(dllimport)
#  endif
#elif defined(__GNUC__) && __GNUC__ >= 4
#  define V2X_API __attribute__((visibility("default")))
#else
#  define V2X_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum v2x_status {
  V2X_OK = 0,
  V2X_ERR_ARGUMENT = 1,  /* null handle, index out of range */
  V2X_ERR_CONFIG = 2,    /* unknown key, bad value, failed validation */
  V2X_ERR_IO = 3,        /* file could not be read or written */
  V2X_ERR_SCHEDULER = 4, /* unknown scheduler name */
  V2X_ERR_FORMAT = 5,    /* malformed run file */
  V2X_ERR_INTERNAL = 6
} v2x_status;

typedef struct v2x_config v2x_config;
typedef struct v2x_result v2x_result;

/* Message of the last failure on the calling thread; "" if none. */
V2X_API const char* v2x_last_error(void);
V2X_API const char* v2x_status_name(v2x_status status);

/* Configuration. A config starts from the built-in defaults. */
V2X_API v2x_status v2x_config_new(v2x_config** out);
V2X_API v2x_status v2x_config_parse(const char* text, v2x_config** out);
V2X_API v2x_status v2x_config_load(const char* path, v2x_config** out);
V2X_API v2x_status v2x_config_set(v2x_config* config, const char* key, const char* value);
/* V2X_ERR_CONFIG with one diagnostic per line if any invariant is violated. */
V2X_API v2x_status v2x_config_validate(const v2x_config* config);
/* Copies the "key = value" text into buf (NUL-terminated, truncated to cap).
 * *needed, if given, receives the full length including the terminator. */
V2X_API v2x_status v2x_config_serialize(const v2x_config* config, char* buf, size_t cap, size_t* needed);
V2X_API v2x_status v2x_config_write(const v2x_config* config, const char* path);
V2X_API void v2x_config_free(v2x_config* config);

V2X_API size_t v2x_scheduler_count(void);
/* NULL when index is out of range. */
V2X_API const char* v2x_scheduler_name(size_t index);

typedef struct v2x_run_stats {
  uint64_t tx_events;
  uint64_t rx_records;
  uint64_t received_while_transmitting;
  uint64_t reselections;
  uint64_t mode4_selections;
  uint64_t candidate_floor_violations;
  int64_t min_candidates; /* -1 if no mode-4 selection happened */
  double min_lifetime_s;  /* 0 if no reselection happened */
  double max_lifetime_s;
} v2x_run_stats;

/* One full simulation. trace_path may be NULL; otherwise one line per
 * reception record is written there. */
V2X_API v2x_status v2x_run(const v2x_config* config, const char* scheduler, uint64_t seed,
                           const char* trace_path, v2x_result** out);
V2X_API const char* v2x_result_scheduler(const v2x_result* result);
V2X_API uint64_t v2x_result_seed(const v2x_result* result);
V2X_API size_t v2x_result_bin_count(const v2x_result* result);
V2X_API v2x_status v2x_result_bin(const v2x_result* result, size_t index, double* center_m,
                                  uint64_t* expected, uint64_t* received);
V2X_API v2x_status v2x_result_stats(const v2x_result* result, v2x_run_stats* out);
/* Per-run delimited file: scheduler,seed,bin_center_m,expected,received,prr */
V2X_API v2x_status v2x_result_write(const v2x_result* result, const char* path);
V2X_API void v2x_result_free(v2x_result* result);

/* Reads per-run files, writes summary_<scheduler>.csv for every scheduler
 * found plus comparison.csv into out_dir (which must exist). The z-score
 * comes from config, or the default when config is NULL. Nothing is left
 * behind on failure. */
V2X_API v2x_status v2x_summarize(const v2x_config* config, const char* const* run_paths, size_t count,
                                 const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif
