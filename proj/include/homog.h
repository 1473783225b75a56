/* C interface to the stochastic-homogenization workbench.
 *
 * All entry points are thread-safe and exception-free. Functions report
 * outcomes through homog_status; on any failure the thread-local message
 * returned by homog_last_error() describes what went wrong. Objects are
 * opaque handles created and destroyed by the matching *_free call; output
 * parameters are written only on success unless a function documents
 * otherwise.
 */
#ifndef HOMOG_H
#define HOMOG_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HOMOG_API __declspec(dllexport)
#else
#define HOMOG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum homog_status {
  HOMOG_OK = 0,
  HOMOG_ERR_INVALID = 1,  /* bad argument (null handle, index out of range) */
  HOMOG_ERR_CONFIG = 2,   /* configuration cannot be parsed or validated */
  HOMOG_ERR_SAMPLES = 3,  /* run finished but more than 10% of samples failed */
  HOMOG_ERR_IO = 4,       /* file cannot be read, written, or decoded */
  HOMOG_ERR_INTERNAL = 5  /* unexpected failure inside the library */
} homog_status;

/* Library version tag, e.g. "homog-workbench 0.1.0". Static storage. */
HOMOG_API const char* homog_version(void);

/* Message describing this thread's most recent failure. Static storage per
 * thread; overwritten by the next failing call on the same thread. */
HOMOG_API const char* homog_last_error(void);

/* Frees a string returned through a char** output parameter. NULL is ok. */
HOMOG_API void homog_string_free(char* s);

/* ---- experiment configuration ------------------------------------------ */

typedef struct homog_config homog_config;

/* Parses a configuration document. On success *out owns the new handle. */
HOMOG_API homog_status homog_config_parse_string(const char* text,
                                                 homog_config** out);
HOMOG_API homog_status homog_config_parse_file(const char* path,
                                               homog_config** out);

/* Applies one top-level override (kind, samples, seed, threads, out,
 * dump-fields) after parsing, exactly as a command line would. */
HOMOG_API homog_status homog_config_override(homog_config* cfg, const char* key,
                                             const char* value);

/* Checks the configuration against the per-experiment requirements. */
HOMOG_API homog_status homog_config_validate(const homog_config* cfg);

/* 64-bit digest of the numerical identity of the configuration (experiment,
 * seed, ensemble, grid, sweep). Execution controls (threads, output
 * directory, field dumps) do not contribute. Returns 0 on a null handle. */
HOMOG_API uint64_t homog_config_hash(const homog_config* cfg);

/* Canonical round-trippable form of the configuration. *out receives a
 * malloc'd string to release with homog_string_free. */
HOMOG_API homog_status homog_config_canonical(const homog_config* cfg,
                                              char** out);

/* Number of samples the configuration requests. 0 on a null handle. */
HOMOG_API uint64_t homog_config_samples(const homog_config* cfg);

/* Output directory of the configuration. Borrowed pointer, valid until the
 * next override or homog_config_free. NULL on a null handle. */
HOMOG_API const char* homog_config_out_dir(const homog_config* cfg);

HOMOG_API void homog_config_free(homog_config* cfg);

/* ---- experiment runs ---------------------------------------------------- */

typedef struct homog_report homog_report;

/* Runs the configured experiment: samples the ensemble, solves every
 * requested problem, and writes samples.csv, aggregate.csv, and manifest.txt
 * under the configured output directory. *out is set whenever the run
 * completed, including the HOMOG_ERR_SAMPLES outcome, so the report can be
 * inspected; it stays NULL on configuration or internal errors. */
HOMOG_API homog_status homog_run(const homog_config* cfg, homog_report** out);

HOMOG_API uint64_t homog_report_samples(const homog_report* rep);
HOMOG_API uint64_t homog_report_failures(const homog_report* rep);
HOMOG_API uint64_t homog_report_hash(const homog_report* rep);
HOMOG_API size_t homog_report_columns(const homog_report* rep);

/* Borrowed pointer into the report; valid until homog_report_free. NULL when
 * the index is out of range. */
HOMOG_API const char* homog_report_column_name(const homog_report* rep,
                                               size_t index);

/* Mean, standard error, and count of successful samples for one column. */
HOMOG_API homog_status homog_report_aggregate(const homog_report* rep,
                                              size_t index, double* mean,
                                              double* se, uint64_t* count);

/* Value of one column for one sample; fails for failed samples. */
HOMOG_API homog_status homog_report_value(const homog_report* rep,
                                          uint64_t sample, size_t column,
                                          double* value);

/* Directory the run wrote its outputs to. Borrowed pointer, valid until
 * homog_report_free. NULL on a null handle. */
HOMOG_API const char* homog_report_out_dir(const homog_report* rep);

HOMOG_API void homog_report_free(homog_report* rep);

/* Renders the human-readable summary of a finished run directory (reads
 * manifest.txt and aggregate.csv). *out receives a malloc'd string to
 * release with homog_string_free. */
HOMOG_API homog_status homog_report_render(const char* out_dir, char** out);

/* ---- scalar field containers -------------------------------------------- */

typedef struct homog_field homog_field;

/* Reads or writes the binary field container format (.hgf1). */
HOMOG_API homog_status homog_field_load(const char* path, homog_field** out);
HOMOG_API homog_status homog_field_dump(const homog_field* f, const char* path);

/* Grid metadata: dimension, cells per axis, spacing, and the domain kind
 * (0 torus, 1 slab, 2 box, 3 corner box). Any output pointer may be NULL. */
HOMOG_API homog_status homog_field_info(const homog_field* f, int* d, int n[3],
                                        double* h, int* domain_kind);

/* Borrowed pointer to the cell values (row-major, last axis fastest) and
 * their count; valid until homog_field_free. NULL on a null handle. */
HOMOG_API const double* homog_field_data(const homog_field* f, size_t* count);

/* Draws one coefficient-field sample from the configured ensemble on the
 * configured grid and extracts entry (i, j) of the matrix at every cell. */
HOMOG_API homog_status homog_sample_coefficient(const homog_config* cfg,
                                                uint64_t sample, int i, int j,
                                                homog_field** out);

HOMOG_API void homog_field_free(homog_field* f);

#ifdef __cplusplus
}
#endif

#endif /* HOMOG_H */
