#ifndef TWISTCONN_H
#define TWISTCONN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum TwcStatus {
  TWC_STATUS_OK = 0,
  TWC_STATUS_NULL_POINTER = 1,
  TWC_STATUS_INVALID_UTF8 = 2,
  TWC_STATUS_INVALID_SCENARIO = 3,
  TWC_STATUS_UNKNOWN_COMMAND = 4,
  TWC_STATUS_PANIC = 5,
} TwcStatus;

/**
 * The outcome of running checks on a scenario.
 */
typedef struct TwcReport TwcReport;

/**
 * A validated scenario.
 */
typedef struct TwcScenario TwcScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message of the most recent error on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *twc_last_error(void);

/**
 * Parses a TOML scenario.
 *
 * # Safety
 * `text` must be a nul-terminated string and `out` a valid pointer.
 */
enum TwcStatus twc_scenario_load(const char *text, struct TwcScenario **out);

/**
 * Overrides the caps of a loaded scenario.
 *
 * # Safety
 * `scenario` must come from [`twc_scenario_load`].
 */
enum TwcStatus twc_scenario_set_caps(struct TwcScenario *scenario,
                                     uint32_t max_exponent,
                                     uint32_t max_degree);

/**
 * # Safety
 * `scenario` must come from [`twc_scenario_load`] or be null.
 */
void twc_scenario_free(struct TwcScenario *scenario);

/**
 * Runs the checks of a subcommand such as `"theorem"` or `"run"`.
 *
 * # Safety
 * `scenario` must come from [`twc_scenario_load`], `command` must be a
 * nul-terminated string and `out` a valid pointer.
 */
enum TwcStatus twc_run(const struct TwcScenario *scenario,
                       const char *command,
                       struct TwcReport **out);

/**
 * `0` when no check found a counterexample, `1` otherwise, `-1` for null.
 *
 * # Safety
 * `report` must come from [`twc_run`] or be null.
 */
int32_t twc_report_exit_code(const struct TwcReport *report);

/**
 * Number of checks in a report.
 *
 * # Safety
 * `report` must come from [`twc_run`] or be null.
 */
uintptr_t twc_report_check_count(const struct TwcReport *report);

/**
 * The JSON form of a report, to be released with [`twc_string_free`].
 *
 * # Safety
 * `report` must come from [`twc_run`] and `out` must be a valid pointer.
 */
enum TwcStatus twc_report_json(const struct TwcReport *report, char **out);

/**
 * # Safety
 * `report` must come from [`twc_run`] or be null.
 */
void twc_report_free(struct TwcReport *report);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void twc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TWISTCONN_H */
