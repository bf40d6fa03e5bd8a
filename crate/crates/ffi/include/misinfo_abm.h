#ifndef MISINFO_ABM_H
#define MISINFO_ABM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MabmStatus {
  MABM_STATUS_OK = 0,
  MABM_STATUS_INVALID_ARGUMENT = 1,
  MABM_STATUS_INVALID_CONFIG = 2,
  MABM_STATUS_IO = 3,
  MABM_STATUS_PARSE = 4,
  MABM_STATUS_NULL_POINTER = 5,
  MABM_STATUS_PANIC = 6,
  MABM_STATUS_USAGE = 7,
} MabmStatus;

// Batch plan: simulation parameters plus algorithms, iterations, seed, output directory.
typedef struct MabmConfig MabmConfig;

// One running simulation.
typedef struct MabmSimulation MabmSimulation;

// Metrics of one simulated step.
typedef struct MabmStepMetrics {
  uint32_t step;
  uint64_t n_susceptible;
  uint64_t n_exposed;
  uint64_t n_infected;
  double msp;
  double mrd;
  double mc;
  uint64_t n_contents;
  uint64_t n_fake_contents;
  uint64_t n_interactions_step;
} MabmStepMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *mabm_version(void);

// Message for the last failed call on this thread, or NULL. The pointer is
// valid until the next call into the library from the same thread.
const char *mabm_last_error_message(void);

// Creates a config holding the default parameters.
//
// # Safety
// `out` must be valid for writes.
enum MabmStatus mabm_config_new(struct MabmConfig **out);

// # Safety
// `cfg` must be NULL or a pointer from [`mabm_config_new`] not yet freed.
void mabm_config_free(struct MabmConfig *cfg);

// Sets one `key`/`value` pair using the config-file keys.
//
// # Safety
// `cfg` must be a live config; `key` and `value` NUL-terminated strings.
enum MabmStatus mabm_config_set(struct MabmConfig *cfg, const char *key, const char *value);

// Applies a `key=value` config file on top of the current settings.
//
// # Safety
// `cfg` must be a live config; `path` a NUL-terminated string.
enum MabmStatus mabm_config_load_file(struct MabmConfig *cfg, const char *path);

// # Safety
// `cfg` must be a live config.
enum MabmStatus mabm_config_validate(const struct MabmConfig *cfg);

// Builds a single simulation of `algorithm` from the config's parameters.
//
// # Safety
// `cfg` must be a live config, `algorithm` a NUL-terminated string and `out`
// valid for writes.
enum MabmStatus mabm_simulation_new(const struct MabmConfig *cfg,
                                    const char *algorithm,
                                    uint64_t seed,
                                    struct MabmSimulation **out);

// Advances one step and writes its metrics to `out` when it is not NULL.
//
// # Safety
// `sim` must be a live simulation; `out` NULL or valid for writes.
enum MabmStatus mabm_simulation_step(struct MabmSimulation *sim, struct MabmStepMetrics *out);

// Number of completed steps, 0 for NULL.
//
// # Safety
// `sim` must be NULL or a live simulation.
uint32_t mabm_simulation_current_step(const struct MabmSimulation *sim);

// # Safety
// `sim` must be NULL or a pointer from [`mabm_simulation_new`] not yet freed.
void mabm_simulation_free(struct MabmSimulation *sim);

// Runs the whole batch and writes its CSV files to the configured `out` directory.
//
// # Safety
// `cfg` must be a live config.
enum MabmStatus mabm_run_batch(const struct MabmConfig *cfg);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MISINFO_ABM_H */
