#ifndef RPMSIM_H
#define RPMSIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. The numeric values of `Io`, `Format` and `Validation`
 * match the command-line exit codes.
 */
typedef enum RpmsimStatus {
  RPMSIM_STATUS_OK = 0,
  RPMSIM_STATUS_NULL_ARGUMENT = 1,
  RPMSIM_STATUS_INVALID_UTF8 = 2,
  RPMSIM_STATUS_IO = 3,
  RPMSIM_STATUS_FORMAT = 4,
  RPMSIM_STATUS_VALIDATION = 5,
  RPMSIM_STATUS_NOT_FOUND = 6,
  RPMSIM_STATUS_CONFLICT = 7,
  RPMSIM_STATUS_INVALID_MODE = 8,
  RPMSIM_STATUS_BAD_REQUEST = 9,
  RPMSIM_STATUS_PANIC = 10,
} RpmsimStatus;

typedef enum RpmsimAction {
  RPMSIM_ACTION_CALL_PATIENT = 0,
  RPMSIM_ACTION_ADJUST_MEDICATION = 1,
  RPMSIM_ACTION_CONTACT_COLLEAGUE = 2,
  RPMSIM_ACTION_DISMISS = 3,
} RpmsimAction;

/**
 * Opaque cohort handle.
 */
typedef struct RpmsimCohort RpmsimCohort;

/**
 * Snapshot of a cohort's progress and sizes.
 */
typedef struct RpmsimInfo {
  uint32_t days_simulated;
  uint32_t duration_days;
  bool complete;
  bool interactive;
  uint64_t patient_count;
  uint64_t measurement_count;
  uint64_t alert_count;
  uint64_t open_alert_count;
  uint64_t response_count;
  double alert_rate;
} RpmsimInfo;

/**
 * Outcome of [`rpmsim_cohort_advance`].
 */
typedef struct RpmsimDayReport {
  uint32_t days_advanced;
  uint64_t new_measurements;
  uint64_t new_alerts;
  bool halted;
  bool complete;
} RpmsimDayReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Owned by the
 * library; valid until the next call on this thread.
 */
const char *rpmsim_last_error(void);

/**
 * Library version as a static string.
 */
const char *rpmsim_version(void);

/**
 * Simulates a cohort from a JSON config object. `config_json` may be null
 * for the defaults; missing fields take their defaults. Batch cohorts run
 * to completion, interactive ones to their first halt.
 *
 * # Safety
 * `config_json` is null or a nul-terminated string; `out` is writable.
 */
enum RpmsimStatus rpmsim_cohort_new(const char *config_json, struct RpmsimCohort **out);

/**
 * Imports a bundle directory.
 *
 * # Safety
 * `dir` is a nul-terminated string; `out` is writable.
 */
enum RpmsimStatus rpmsim_cohort_import(const char *dir, struct RpmsimCohort **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `cohort` came from this library and is not used afterwards.
 */
void rpmsim_cohort_free(struct RpmsimCohort *cohort);

/**
 * # Safety
 * `cohort` is a live handle; `out` is writable.
 */
enum RpmsimStatus rpmsim_cohort_info(const struct RpmsimCohort *cohort, struct RpmsimInfo *out);

/**
 * Resumes an interactive cohort for up to `days` days. Fails with
 * `Conflict` while alerts are open. `out` may be null.
 *
 * # Safety
 * `cohort` is a live handle; `out` is null or writable.
 */
enum RpmsimStatus rpmsim_cohort_advance(struct RpmsimCohort *cohort,
                                        uint32_t days,
                                        struct RpmsimDayReport *out);

/**
 * Records an HCP response to alert number `alert_id` (the digits of
 * `A000042`) by HCP number `hcp_id`, at the next free working slot.
 * `note` may be null for a generated note.
 *
 * # Safety
 * `cohort` is a live handle; `note` is null or a nul-terminated string.
 */
enum RpmsimStatus rpmsim_cohort_respond(struct RpmsimCohort *cohort,
                                        uint32_t alert_id,
                                        uint32_t hcp_id,
                                        enum RpmsimAction action,
                                        const char *note);

/**
 * Writes the cohort as a bundle into the existing directory `dir`, with
 * the configured messiness applied to the written copy.
 *
 * # Safety
 * `cohort` is a live handle; `dir` is a nul-terminated string.
 */
enum RpmsimStatus rpmsim_cohort_export(const struct RpmsimCohort *cohort, const char *dir);

/**
 * Cohort statistics as a JSON object. Free with [`rpmsim_string_free`].
 *
 * # Safety
 * `cohort` is a live handle; `out` is writable.
 */
enum RpmsimStatus rpmsim_cohort_stats_json(const struct RpmsimCohort *cohort, char **out);

/**
 * Alerts, oldest first, as a JSON array; only open ones when `open_only`.
 * Free with [`rpmsim_string_free`].
 *
 * # Safety
 * `cohort` is a live handle; `out` is writable.
 */
enum RpmsimStatus rpmsim_cohort_alerts_json(const struct RpmsimCohort *cohort,
                                            bool open_only,
                                            char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` came from this library and is not used afterwards.
 */
void rpmsim_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RPMSIM_H */
