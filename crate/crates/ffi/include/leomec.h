#ifndef LEOMEC_H
#define LEOMEC_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LeomecStatus {
  LEOMEC_STATUS_OK = 0,
  LEOMEC_STATUS_CONFIG_ERROR = 1,
  LEOMEC_STATUS_NUMERICAL_ERROR = 2,
  LEOMEC_STATUS_NULL_POINTER = 3,
  LEOMEC_STATUS_INVALID_ARGUMENT = 4,
  LEOMEC_STATUS_PANIC = 5,
} LeomecStatus;

typedef enum LeomecVariant {
  LEOMEC_VARIANT_INTEGRATED = 0,
  LEOMEC_VARIANT_SAT_ONLY = 1,
  LEOMEC_VARIANT_CS_ONLY = 2,
} LeomecVariant;

typedef struct LeomecAnalysis LeomecAnalysis;

/**
 * A validated scenario together with the document it was built from.
 */
typedef struct LeomecScenario LeomecScenario;

typedef struct LeomecSimulation LeomecSimulation;

/**
 * Closed-form results for one task class. `t_avg` is NaN when a tier
 * carrying traffic is unstable.
 */
typedef struct LeomecTaskResult {
  uint32_t task_id;
  uint32_t satellites_of_type;
  double p_ofld;
  double n_offloadable;
  double a_sat;
  double a_cs;
  double cov_sat_down;
  double cov_cs_down;
  double cov_sat_up;
  double cov_cs_up;
  double t_avg;
} LeomecTaskResult;

/**
 * Monte Carlo estimate with its 95% interval.
 */
typedef struct LeomecEstimate {
  double mean;
  double lower;
  double upper;
} LeomecEstimate;

typedef struct LeomecSimTaskResult {
  uint32_t task_id;
  uint64_t trials;
  struct LeomecEstimate a_sat;
  struct LeomecEstimate cov_sat_down;
  struct LeomecEstimate cov_cs_down;
  struct LeomecEstimate cov_sat_up;
  struct LeomecEstimate cov_cs_up;
} LeomecSimTaskResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next failing call on the same thread.
 */
const char *leomec_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *leomec_version(void);

/**
 * Creates the bundled reference scenario.
 */
enum LeomecStatus leomec_scenario_default(struct LeomecScenario **out);

/**
 * Parses a scenario from TOML text.
 *
 * # Safety
 * `toml` must be a NUL-terminated string.
 */
enum LeomecStatus leomec_scenario_from_toml(const char *toml, struct LeomecScenario **out);

/**
 * Applies `key=value` (TOML literal) to the scenario. On error the
 * scenario is left unchanged.
 *
 * # Safety
 * `scenario` must come from this library; `assignment` must be a
 * NUL-terminated string.
 */
enum LeomecStatus leomec_scenario_set(struct LeomecScenario *scenario, const char *assignment);

/**
 * # Safety
 * `scenario` must come from this library or be null.
 */
void leomec_scenario_free(struct LeomecScenario *scenario);

/**
 * Evaluates the closed forms.
 *
 * # Safety
 * `scenario` must come from this library.
 */
enum LeomecStatus leomec_analyze(const struct LeomecScenario *scenario,
                                 enum LeomecVariant variant,
                                 struct LeomecAnalysis **out);

/**
 * # Safety
 * `analysis` must come from this library.
 */
size_t leomec_analysis_task_count(const struct LeomecAnalysis *analysis);

/**
 * # Safety
 * `analysis` must come from this library; `out` must be writable.
 */
enum LeomecStatus leomec_analysis_task(const struct LeomecAnalysis *analysis,
                                       size_t index,
                                       struct LeomecTaskResult *out);

/**
 * Probability-weighted mean delay over task classes.
 *
 * # Safety
 * `analysis` must come from this library; `out` must be writable.
 */
enum LeomecStatus leomec_analysis_mean_delay(const struct LeomecAnalysis *analysis, double *out);

/**
 * # Safety
 * `analysis` must come from this library or be null.
 */
void leomec_analysis_free(struct LeomecAnalysis *analysis);

/**
 * Runs the Monte Carlo simulator with `trials` per task class and the
 * given master seed.
 *
 * # Safety
 * `scenario` must come from this library.
 */
enum LeomecStatus leomec_simulate(const struct LeomecScenario *scenario,
                                  uint64_t trials,
                                  uint64_t seed,
                                  struct LeomecSimulation **out);

/**
 * # Safety
 * `simulation` must come from this library.
 */
size_t leomec_simulation_task_count(const struct LeomecSimulation *simulation);

/**
 * # Safety
 * `simulation` must come from this library; `out` must be writable.
 */
enum LeomecStatus leomec_simulation_task(const struct LeomecSimulation *simulation,
                                         size_t index,
                                         struct LeomecSimTaskResult *out);

/**
 * # Safety
 * `simulation` must come from this library or be null.
 */
void leomec_simulation_free(struct LeomecSimulation *simulation);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LEOMEC_H */
