/* qotlab: desk-scale simulator of commitment-based quantum oblivious
 * transfer and the known receiver-side attacks on it.
 *
 * C API for the shared library. All functions are thread-compatible:
 * distinct runners may be used from distinct threads, a single runner
 * must not be shared. Strings returned through const char* stay owned
 * by the runner and remain valid until the next call on that runner or
 * its destruction.
 */

#ifndef QOTLAB_H
#define QOTLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define QOTLAB_API __declspec(dllexport)
#else
#define QOTLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qot_status {
    QOT_OK = 0,
    QOT_ERROR_INVALID_ARGUMENT = 1,
    QOT_ERROR_INFEASIBLE = 2,
    QOT_ERROR_IO = 3,
    QOT_ERROR_INTERNAL = 4
} qot_status;

/* Opaque handle for configuring and running one scenario. */
typedef struct qot_runner qot_runner;

QOTLAB_API const char *qot_version(void);

/* Comma-separated list of scenario names accepted by
 * qot_runner_set_scenario. */
QOTLAB_API const char *qot_scenario_names(void);

QOTLAB_API qot_status qot_runner_create(qot_runner **out_runner);
QOTLAB_API void qot_runner_destroy(qot_runner *runner);

QOTLAB_API qot_status qot_runner_set_scenario(qot_runner *runner, const char *name);
QOTLAB_API qot_status qot_runner_set_n(qot_runner *runner, int n);
QOTLAB_API qot_status qot_runner_set_trials(qot_runner *runner, long long trials);
QOTLAB_API qot_status qot_runner_set_seed(qot_runner *runner, uint64_t seed);
/* "non-bccc" or "bccc". Must agree with the scenario preset when the
 * scenario pins a mode. */
QOTLAB_API qot_status qot_runner_set_bc_mode(qot_runner *runner, const char *mode);
/* "aon" or "12ot". Must agree with the scenario preset. */
QOTLAB_API qot_status qot_runner_set_variant(qot_runner *runner, const char *variant);

/* Debug dump: per-session transcripts (and cheat-report lines for
 * entangling scenarios) for the first `limit` sessions, written to
 * `path` during the run. Pass NULL to disable. */
QOTLAB_API qot_status qot_runner_set_session_dump(qot_runner *runner, const char *path,
                                                  long long limit);

QOTLAB_API qot_status qot_runner_run(qot_runner *runner);

/* JSON summary of the last run (one object, fixed key order), or NULL
 * before a successful run. */
QOTLAB_API const char *qot_runner_summary_json(qot_runner *runner);

/* Writes the last run's report. format is "json" or "csv". */
QOTLAB_API qot_status qot_runner_write_report(qot_runner *runner, const char *path,
                                              const char *format);

/* Message for the last failed call on this runner ("" if none). */
QOTLAB_API const char *qot_runner_last_error(const qot_runner *runner);

/* Full verification suite. The callback (may be NULL) receives one line
 * per criterion; *out_failed gets the number of failed criteria. */
typedef void (*qot_acceptance_cb)(int id, const char *name, int passed, const char *detail,
                                  void *user);
QOTLAB_API qot_status qot_acceptance_run(uint64_t master_seed, qot_acceptance_cb callback,
                                         void *user, int *out_failed);

#ifdef __cplusplus
}
#endif

#endif /* QOTLAB_H */
