/* C interface to the esdcbf simulation library.
 *
 * Objects are opaque handles created and destroyed through this API. Every
 * fallible call returns an esd_status; on failure esd_last_error() returns a
 * message for the calling thread, valid until that thread's next call.
 * Handles are not internally synchronized: use one handle per thread, or
 * serialize access. Distinct handles may be used concurrently.
 */
#ifndef ESDCBF_H
#define ESDCBF_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(ESDCBF_BUILDING)
#    define ESD_API __declspec(dllexport)
#  else
#    define ESD_API __declspec(dllimport)
#  endif
#else
#  define ESD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum esd_status {
  ESD_OK = 0,
  ESD_ERR_INVALID_ARGUMENT = 1,
  ESD_ERR_UNKNOWN_SCENARIO = 2,
  ESD_ERR_CONFIG = 3,
  ESD_ERR_SINGULAR = 4,
  ESD_ERR_DEGENERATE = 5,
  ESD_ERR_INFEASIBLE = 6,
  ESD_ERR_INSUFFICIENT_TRANSIENT = 7,
  ESD_ERR_EMPTY_LOG = 8,
  ESD_ERR_IO = 9,
  ESD_ERR_INTERNAL = 10
} esd_status;

typedef enum esd_waveform {
  ESD_WAVEFORM_NONE = 0,
  ESD_WAVEFORM_CONSTANT = 1,
  ESD_WAVEFORM_SINUSOID = 2
} esd_waveform;

typedef struct esd_scenario esd_scenario;
typedef struct esd_log esd_log;

#define ESD_MAX_BARRIERS 16
#define ESD_NAME_LEN 32

typedef struct esd_report {
  int scenario_id;
  double alpha;
  size_t barrier_count;
  char barrier_names[ESD_MAX_BARRIERS][ESD_NAME_LEN];
  double min_h[ESD_MAX_BARRIERS]; /* mm, over steps with the filter gate engaged */
  int has_gate_time;
  double gate_time; /* s */
  int has_violation;
  double first_violation_time; /* s */
  double max_tracking_error;   /* mm/s */
  int has_settle_time;
  double tracking_settle_time; /* s, first time below 5% of the initial peak */
  int has_decay_rate;
  double decay_rate; /* 1/s */
  double path_completion;
  double deviation_integral; /* mm */
  int safe;                  /* every enforced barrier >= -1e-3 mm */
} esd_report;

ESD_API const char* esd_version(void);
ESD_API const char* esd_last_error(void);
ESD_API const char* esd_status_string(esd_status status);

/* Scenarios */
ESD_API esd_status esd_scenario_from_catalog(int id, esd_scenario** out);
ESD_API esd_status esd_scenario_load(const char* path, esd_scenario** out);
ESD_API esd_status esd_scenario_parse(const char* text, esd_scenario** out);
ESD_API esd_status esd_scenario_save(const esd_scenario* s, const char* path);
ESD_API esd_status esd_scenario_clone(const esd_scenario* s, esd_scenario** out);
ESD_API void esd_scenario_destroy(esd_scenario* s);

ESD_API esd_status esd_scenario_id(const esd_scenario* s, int* id);
ESD_API esd_status esd_scenario_alpha(const esd_scenario* s, double* alpha);
ESD_API esd_status esd_scenario_set_alpha(esd_scenario* s, double alpha);
ESD_API esd_status esd_scenario_set_filter_enabled(esd_scenario* s, int enabled);
ESD_API esd_status esd_scenario_set_disturbance(esd_scenario* s, esd_waveform waveform, const double amplitude[3],
                                                double frequency, uint64_t seed);

/* Simulation. On a failed run, *failed_step (if non-null) receives the index
 * of the step that failed and *out stays null. */
ESD_API esd_status esd_run(const esd_scenario* s, esd_log** out, int64_t* failed_step);
ESD_API void esd_log_destroy(esd_log* log);
ESD_API esd_status esd_log_size(const esd_log* log, size_t* records);
ESD_API esd_status esd_log_barrier_count(const esd_log* log, size_t* count);
/* Copies record i: t, x[3], xdot[3], xdot_d[3], xdot_s[3], h[barrier_count]. */
ESD_API esd_status esd_log_record(const esd_log* log, size_t i, double* t, double x[3], double xdot[3],
                                  double xdot_d[3], double xdot_s[3], double* h);
ESD_API esd_status esd_log_equal(const esd_log* a, const esd_log* b, int* equal);

ESD_API esd_status esd_summarize(const esd_log* log, const esd_scenario* s, esd_report* out);
ESD_API esd_status esd_export_csv(const esd_log* log, const char* path);
ESD_API esd_status esd_read_csv(const char* path, esd_log** out);
ESD_API esd_status esd_export_plot_data(const esd_log* log, const esd_scenario* s, const char* dir);

/* Oracle verification suites. The callback (may be null) is invoked once per
 * suite in order. *failures receives the number of failed suites. */
typedef void (*esd_suite_callback)(const char* name, int passed, const char* detail, void* user);
ESD_API size_t esd_verify_suite_count(void);
ESD_API const char* esd_verify_suite_name(size_t i);
ESD_API esd_status esd_verify(int corrupt_gravity_sign, esd_suite_callback cb, void* user, int* failures);

#ifdef __cplusplus
}
#endif

#endif /* ESDCBF_H */
