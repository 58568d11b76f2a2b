#ifndef CIRCUMNAV_H
#define CIRCUMNAV_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CircumnavStatus {
  CIRCUMNAV_STATUS_OK = 0,
  CIRCUMNAV_STATUS_NULL_POINTER = 1,
  CIRCUMNAV_STATUS_INVALID_ARGUMENT = 2,
  CIRCUMNAV_STATUS_SINGULARITY = 3,
  CIRCUMNAV_STATUS_CONFIG = 4,
  CIRCUMNAV_STATUS_IO = 5,
  CIRCUMNAV_STATUS_SERIALIZATION = 6,
  CIRCUMNAV_STATUS_OUT_OF_RANGE = 7,
  CIRCUMNAV_STATUS_PANIC = 8,
} CircumnavStatus;

// Result of a Monte Carlo batch.
typedef struct CircumnavBatch CircumnavBatch;

// Resolved scenario.
typedef struct CircumnavScenario CircumnavScenario;

// Samples of one simulated run.
typedef struct CircumnavTrace CircumnavTrace;

// One trace sample. `rdot_est` and `lyap` are NaN when undefined.
typedef struct CircumnavSample {
  double t;
  double x;
  double y;
  double psi;
  double r;
  double theta_b;
  double omega;
  double rdot_true;
  double rdot_est;
  double lyap;
} CircumnavSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Valid until the
// next failing call on the same thread.
const char *circumnav_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed already.
void circumnav_string_free(char *s);

// Steady orbit radius of the smooth law.
//
// # Safety
// `out` must be valid for writes.
enum CircumnavStatus circumnav_predicted_radius(double r_d, double k, double *out);

// Commanded radius that makes the smooth law settle on `r_d`.
//
// # Safety
// `out` must be valid for writes.
enum CircumnavStatus circumnav_compensated_rd(double r_d, double k, double *out);

// Reference smooth-law scenario.
//
// # Safety
// `out` must be valid for writes.
enum CircumnavStatus circumnav_scenario_default(struct CircumnavScenario **out);

// Parses a JSON scenario. Omitted keys take the reference values.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be valid for writes.
enum CircumnavStatus circumnav_scenario_from_json(const char *json, struct CircumnavScenario **out);

// # Safety
// `scenario` must come from this library or be null.
void circumnav_scenario_free(struct CircumnavScenario *scenario);

// Orbit radius the monitors expect for this scenario.
//
// # Safety
// `scenario` must be a live handle; `out` must be valid for writes.
enum CircumnavStatus circumnav_scenario_expected_radius(const struct CircumnavScenario *scenario,
                                                        double *out);

// Simulates run `index` of the scenario.
//
// # Safety
// `scenario` must be a live handle; `out` must be valid for writes.
enum CircumnavStatus circumnav_run(const struct CircumnavScenario *scenario,
                                   size_t index,
                                   struct CircumnavTrace **out);

// # Safety
// `trace` must come from this library or be null.
void circumnav_trace_free(struct CircumnavTrace *trace);

// # Safety
// `trace` must be a live handle; `out` must be valid for writes.
enum CircumnavStatus circumnav_trace_len(const struct CircumnavTrace *trace, size_t *out);

// # Safety
// `trace` must be a live handle; `out` must be valid for writes.
enum CircumnavStatus circumnav_trace_sample(const struct CircumnavTrace *trace,
                                            size_t index,
                                            struct CircumnavSample *out);

// Runs every run of the scenario without writing trace files.
//
// # Safety
// `scenario` must be a live handle; `out` must be valid for writes.
enum CircumnavStatus circumnav_run_batch(const struct CircumnavScenario *scenario,
                                         struct CircumnavBatch **out);

// # Safety
// `batch` must come from this library or be null.
void circumnav_batch_free(struct CircumnavBatch *batch);

// Whether every run completed and passed every verdict.
//
// # Safety
// `batch` must be a live handle; `out` must be valid for writes.
enum CircumnavStatus circumnav_batch_all_pass(const struct CircumnavBatch *batch, bool *out);

// The batch report as JSON, identical to the CLI's `report.json`. Release
// with [`circumnav_string_free`].
//
// # Safety
// `batch` must be a live handle; `out` must be valid for writes.
enum CircumnavStatus circumnav_batch_report_json(const struct CircumnavBatch *batch, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CIRCUMNAV_H */
