#ifndef ONTOTERM_H
#define ONTOTERM_H

#include <stdbool.h>

typedef enum OtStatus {
  OT_STATUS_OK = 0,
  OT_STATUS_NULL_ARGUMENT = 1,
  OT_STATUS_INVALID_UTF8 = 2,
  OT_STATUS_SYNTAX = 3,
  OT_STATUS_DUP_NAME = 4,
  OT_STATUS_MULTIPLE_GENUS = 5,
  OT_STATUS_UNSUPPORTED = 6,
  OT_STATUS_UNKNOWN_GENUS = 7,
  OT_STATUS_UNKNOWN_AXIS = 8,
  OT_STATUS_BAD_VALUE = 9,
  OT_STATUS_UNKNOWN_CONCEPT = 10,
  OT_STATUS_UNKNOWN_TERM = 11,
  OT_STATUS_UNKNOWN_REF = 12,
  OT_STATUS_CYCLE = 13,
  OT_STATUS_NO_CORPUS = 14,
  OT_STATUS_ENCODING = 15,
  OT_STATUS_BAD_PATTERN = 16,
  OT_STATUS_TYPE = 17,
  OT_STATUS_UNRESOLVABLE = 18,
  OT_STATUS_INCONSISTENT = 19,
  OT_STATUS_CONFIG = 20,
  OT_STATUS_IO = 21,
  OT_STATUS_JSON = 22,
  OT_STATUS_PANIC = 23,
} OtStatus;

typedef enum OtExportFormat {
  OT_EXPORT_FORMAT_OWL = 0,
  OT_EXPORT_FORMAT_KIF = 1,
} OtExportFormat;

/*
 Parsed ontology handle.
 */
typedef struct OtOntology OtOntology;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Parses ontology source text into a new handle written to `out`.

 # Safety
 `source` must be a NUL-terminated string; `out` must be writable.
 */
enum OtStatus ot_ontology_parse(const char *source, struct OtOntology **out);

/*
 Releases a handle. Null is ignored.

 # Safety
 `ontology` must come from `ot_ontology_parse` and not be used afterwards.
 */
void ot_ontology_free(struct OtOntology *ontology);

/*
 Writes the consistency violations as a JSON array to `out_json`.

 # Safety
 `ontology` must be a live handle; `out_json` must be writable.
 */
enum OtStatus ot_ontology_check(const struct OtOntology *ontology, char **out_json);

/*
 Sets `out` to whether `general` subsumes `specific`.

 # Safety
 `ontology` must be a live handle; strings NUL-terminated; `out` writable.
 */
enum OtStatus ot_ontology_subsumes(const struct OtOntology *ontology,
                                   const char *general,
                                   const char *specific,
                                   bool *out);

/*
 Writes the similarity of two concepts as JSON to `out_json`.

 # Safety
 `ontology` must be a live handle; strings NUL-terminated; `out_json` writable.
 */
enum OtStatus ot_ontology_similarity(const struct OtOntology *ontology,
                                     const char *a,
                                     const char *b,
                                     char **out_json);

/*
 Serializes the ontology as OWL functional syntax or KIF. `iri` may be
 null for the default namespace; KIF ignores it.

 # Safety
 `ontology` must be a live handle; `iri` null or NUL-terminated; `out` writable.
 */
enum OtStatus ot_ontology_export(const struct OtOntology *ontology,
                                 enum OtExportFormat format,
                                 const char *iri,
                                 char **out);

/*
 Aligns a term label with the ontology and writes the result as JSON.

 # Safety
 `ontology` must be a live handle; `term` NUL-terminated; `out_json` writable.
 */
enum OtStatus ot_align_term(const struct OtOntology *ontology, const char *term, char **out_json);

/*
 Classifies an object given as JSON `{"id", "concept", "state"}` and
 writes `{"classes", "sets"}` to `out_json`.

 # Safety
 `ontology` must be a live handle; `instance_json` NUL-terminated; `out_json` writable.
 */
enum OtStatus ot_classify_object(const struct OtOntology *ontology,
                                 const char *instance_json,
                                 char **out_json);

/*
 Runs the whole pipeline from a TOML config file and writes the manifest
 as JSON to `out_manifest_json`.

 # Safety
 `config_path` must be NUL-terminated; `out_manifest_json` writable.
 */
enum OtStatus ot_run_pipeline(const char *config_path, char **out_manifest_json);

/*
 Message of the last failed call on this thread, or null. Valid until the
 next call into this library on the same thread.
 */
const char *ot_last_error_message(void);

/*
 Stable code string for a status, e.g. `E_UNKNOWN_CONCEPT`.
 */
const char *ot_status_code(enum OtStatus status);

/*
 Releases a string returned by this library. Null is ignored.

 # Safety
 `s` must come from this library and not be used afterwards.
 */
void ot_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ONTOTERM_H */
