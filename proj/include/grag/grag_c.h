/* C API for the grag shared library.
 *
 * All entry points are thread-compatible: one grag_session must not be used
 * from two threads at once, but independent sessions may run concurrently.
 * Functions return GRAG_OK on success; on failure they return a status code
 * and store a message retrievable with grag_last_error(). Strings returned
 * through out-parameters are heap-allocated and must be released with
 * grag_string_free().
 */
#ifndef GRAG_C_H
#define GRAG_C_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct grag_session grag_session;

typedef enum grag_status {
    GRAG_OK = 0,
    GRAG_ERR_INVALID_ARGUMENT = 1,
    GRAG_ERR_IO = 2,
    GRAG_ERR_PARSE = 3,
    GRAG_ERR_VALIDATION = 4,
    GRAG_ERR_BACKEND = 5,
    GRAG_ERR_NOT_FOUND = 6,
    GRAG_ERR_INTERNAL = 7
} grag_status;

/* Library version string (static storage; do not free). */
const char* grag_version(void);

/* Creates a session from a run-config JSON document (or "{}" for defaults).
 * On failure *out_session is NULL and a description is written to *out_error
 * when out_error is non-NULL (free it with grag_string_free). */
grag_status grag_session_create(const char* config_json, grag_session** out_session,
                                char** out_error);

void grag_session_destroy(grag_session* session);

/* Message describing the session's most recent failure (static storage owned
 * by the session; valid until the next call on it). */
const char* grag_last_error(const grag_session* session);

/* Converts an upstream benchmark file into the canonical test-set format.
 * task is one of "noise", "integration", "rejection", "counterfactual".
 * out_summary (optional) receives a JSON summary. */
grag_status grag_ingest(grag_session* session, const char* upstream_path, const char* task,
                        const char* out_path, char** out_summary);

/* Runs the session's configured task; writes the run directory and returns
 * the manifest JSON through out_manifest (optional). */
grag_status grag_run(grag_session* session, const char* out_dir, char** out_manifest);

/* Renders a run directory; format is "table", "machine", or "plotdata". */
grag_status grag_report(grag_session* session, const char* run_dir, const char* format,
                        char** out_text);

/* Dumps the stored docset/graph/communities/context/prompt/response bundles
 * for one case id. */
grag_status grag_inspect(grag_session* session, const char* run_dir, const char* case_id,
                         char** out_text);

/* Removes cached LLM responses under cache_dir (NULL: the session's cache
 * directory). */
grag_status grag_cache_purge(grag_session* session, const char* cache_dir, char** out_summary);

void grag_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* GRAG_C_H */
