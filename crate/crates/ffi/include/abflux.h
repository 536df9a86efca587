#ifndef ABFLUX_H
#define ABFLUX_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Status codes. 0 to 4 match the command-line exit codes.
 */
typedef enum AbfluxStatus {
  ABFLUX_STATUS_OK = 0,
  ABFLUX_STATUS_VERDICT_FAILED = 1,
  ABFLUX_STATUS_CONFIG_ERROR = 2,
  ABFLUX_STATUS_NUMERICAL_ERROR = 3,
  ABFLUX_STATUS_IO_ERROR = 4,
  ABFLUX_STATUS_NULL_POINTER = 5,
  ABFLUX_STATUS_INVALID_UTF8 = 6,
  ABFLUX_STATUS_OUT_OF_RANGE = 7,
  ABFLUX_STATUS_PANIC = 8,
} AbfluxStatus;

/**
 * Parsed scenario configuration.
 */
typedef struct AbfluxConfig AbfluxConfig;

/**
 * Result of a scenario run.
 */
typedef struct AbfluxReport AbfluxReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *abflux_version(void);

/**
 * Copies the last error message of this thread into `buf`.
 *
 * Returns the buffer size needed, including the terminating NUL; 1 when
 * there is no error.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t abflux_last_error(char *buf, size_t len);

/**
 * Number of scenarios.
 */
size_t abflux_scenario_count(void);

/**
 * Static name of scenario `index`, or null when out of range.
 */
const char *abflux_scenario_name(size_t index);

/**
 * Parses `key=value` text into a new configuration handle.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum AbfluxStatus abflux_config_parse(const char *text, struct AbfluxConfig **out);

/**
 * Default configuration for the named scenario.
 *
 * # Safety
 * `scenario` must be a NUL-terminated string and `out` a valid pointer.
 */
enum AbfluxStatus abflux_config_default(const char *scenario, struct AbfluxConfig **out);

/**
 * Writes the fully resolved configuration as `key=value` text.
 *
 * Returns the size needed including the NUL, or 0 when `config` is null.
 *
 * # Safety
 * `config` must be a live handle or null; `buf` null or `len` writable bytes.
 */
size_t abflux_config_echo(const struct AbfluxConfig *config, char *buf, size_t len);

/**
 * # Safety
 * `config` must be null or a handle from this library not yet freed.
 */
void abflux_config_free(struct AbfluxConfig *config);

/**
 * Runs the configured scenario. When `out_dir` is non-null the report, CSV
 * series, snapshots and config echo are written there.
 *
 * On success or verdict failure `*out` receives a report handle; the return
 * value is `Ok` when every verdict passed and `VerdictFailed` otherwise.
 *
 * # Safety
 * `config` must be a live handle, `out_dir` null or a NUL-terminated string,
 * `out` a valid pointer.
 */
enum AbfluxStatus abflux_run(const struct AbfluxConfig *config,
                             const char *out_dir,
                             struct AbfluxReport **out);

/**
 * Number of verdicts in `report`, or 0 when it is null.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
size_t abflux_report_verdict_count(const struct AbfluxReport *report);

/**
 * Reads verdict `index`. Any output pointer may be null.
 *
 * # Safety
 * `report` must be a live handle; non-null outputs must be valid.
 */
enum AbfluxStatus abflux_report_verdict(const struct AbfluxReport *report,
                                        size_t index,
                                        bool *passed,
                                        double *measured,
                                        double *tolerance);

/**
 * Writes the report as JSON. Returns the size needed including the NUL, or 0
 * when `report` is null.
 *
 * # Safety
 * `report` must be null or a live handle; `buf` null or `len` writable bytes.
 */
size_t abflux_report_json(const struct AbfluxReport *report, char *buf, size_t len);

/**
 * # Safety
 * `report` must be null or a handle from this library not yet freed.
 */
void abflux_report_free(struct AbfluxReport *report);

/**
 * Rotor level `E = ½[n²/I_c + (m − λn)²/I_e]`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum AbfluxStatus abflux_rotor_energy(double inertia_c,
                                      double inertia_e,
                                      double lambda,
                                      int64_t n,
                                      int64_t m,
                                      double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ABFLUX_H */
