#ifndef KVC_H
#define KVC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KvcStatus {
  KVC_STATUS_OK = 0,
  KVC_STATUS_NULL_POINTER = 1,
  KVC_STATUS_INVALID_UTF8 = 2,
  KVC_STATUS_CONFIG = 3,
  KVC_STATUS_NUMERICAL = 4,
  KVC_STATUS_CONTRACT = 5,
  KVC_STATUS_IO = 6,
  KVC_STATUS_OUT_OF_RANGE = 7,
  KVC_STATUS_PANIC = 8,
} KvcStatus;

// Check records in check_id order, with their ids kept as C strings.
typedef struct KvcReport KvcReport;

// A validated scenario config.
typedef struct KvcScenario KvcScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static C string.
const char *kvc_version(void);

// Message of the last failed call on this thread, or NULL. Valid until the
// next failing call on the same thread.
const char *kvc_last_error(void);

// Parses and validates a JSON scenario. On success `*out` owns a new handle.
//
// # Safety
// `json` must be NUL-terminated and `out` writable.
enum KvcStatus kvc_scenario_from_json(const char *json, struct KvcScenario **out);

// Replaces the scenario seed.
//
// # Safety
// `scenario` must be a live handle.
enum KvcStatus kvc_scenario_set_seed(struct KvcScenario *scenario, uint64_t seed);

// Writes the 64 hex digits of the config hash and a NUL into `buf`, which
// must hold at least 65 bytes.
//
// # Safety
// `scenario` must be a live handle and `buf` writable for `len` bytes.
enum KvcStatus kvc_scenario_hash(const struct KvcScenario *scenario, char *buf, size_t len);

// # Safety
// `scenario` must be NULL or a handle not yet freed.
void kvc_scenario_free(struct KvcScenario *scenario);

// Fixed-state identity checks.
//
// # Safety
// `scenario` must be a live handle and `out` writable.
enum KvcStatus kvc_run_identities(const struct KvcScenario *scenario, struct KvcReport **out);

// Variation formulas against finite differences.
//
// # Safety
// `scenario` must be a live handle and `out` writable.
enum KvcStatus kvc_run_variations(const struct KvcScenario *scenario, struct KvcReport **out);

// Flow run and its checks. A run that aborts part way still produces a
// report; see `kvc_report_abort`.
//
// # Safety
// `scenario` must be a live handle and `out` writable.
enum KvcStatus kvc_run_flow(const struct KvcScenario *scenario, struct KvcReport **out);

// Number of check records, or 0 for NULL.
//
// # Safety
// `report` must be NULL or a live handle.
size_t kvc_report_len(const struct KvcReport *report);

// 1 if every hard check passed, 0 otherwise (and for NULL).
//
// # Safety
// `report` must be NULL or a live handle.
int kvc_report_all_pass(const struct KvcReport *report);

// Abort message of a flow run, or NULL if it ran to the end. Owned by the report.
//
// # Safety
// `report` must be NULL or a live handle.
const char *kvc_report_abort(const struct KvcReport *report);

// check_id of record `index`, or NULL when out of range. Owned by the report.
//
// # Safety
// `report` must be NULL or a live handle.
const char *kvc_report_check_id(const struct KvcReport *report, size_t index);

// Residual, tolerance and verdict of record `index`. `pass` is 1 for a
// pass, 0 for a failure and 2 for a soft (diagnostic) record. Any output
// pointer may be NULL.
//
// # Safety
// `report` must be a live handle; non-NULL outputs must be writable.
enum KvcStatus kvc_report_record(const struct KvcReport *report,
                                 size_t index,
                                 double *residual,
                                 double *tolerance,
                                 int *pass);

// Index of the record with this check_id.
//
// # Safety
// `report` must be a live handle, `check_id` NUL-terminated and `index` writable.
enum KvcStatus kvc_report_find(const struct KvcReport *report, const char *check_id, size_t *index);

// The report as CSV. Release the string with `kvc_string_free`.
//
// # Safety
// `report` must be a live handle and `out` writable.
enum KvcStatus kvc_report_csv(const struct KvcReport *report, char **out);

// # Safety
// `report` must be NULL or a handle not yet freed.
void kvc_report_free(struct KvcReport *report);

// # Safety
// `s` must be NULL or a string returned by this library and not yet freed.
void kvc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KVC_H */
