/* tsdist — time-series dataset distances.
 *
 * C interface to the tsdist core: datasets are loaded or assembled in
 * memory, normalized, sampled into fixed-length windows, summarized as a
 * fitted Gaussian (mean + covariance), and compared through the
 * 2-Wasserstein distance or the baseline metrics (mean-Euclidean, mean-DTW,
 * linkage min/avg/max). Full pairwise matrices, heatmap/layout/scatter SVG
 * exports and correlation reports are available behind opaque handles.
 *
 * All functions returning tsdist_status report TSDIST_OK (0) on success.
 * On failure, tsdist_last_error() returns a thread-local message describing
 * what went wrong; the message is valid until the next failing call on the
 * same thread. Out-pointers are written only on success. Strings returned
 * through const char* out-params are owned by the handle they came from.
 */

#ifndef TSDIST_H
#define TSDIST_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define TSDIST_API __declspec(dllexport)
#else
#define TSDIST_API __attribute__((visibility("default")))
#endif

typedef enum tsdist_status {
  TSDIST_OK = 0,
  TSDIST_ERR_IO = 1,      /* file missing / unreadable / unwritable */
  TSDIST_ERR_PARSE = 2,   /* malformed input file */
  TSDIST_ERR_INVALID = 3, /* argument or input data violates a contract */
  TSDIST_ERR_NUMERIC = 4, /* iteration failure, matrix not PSD, ... */
  TSDIST_ERR_NOMEM = 5,
  TSDIST_ERR_INTERNAL = 6
} tsdist_status;

/* Nonzero when the status describes a caller/input problem rather than an
 * internal failure; CLIs typically map these to distinct exit codes. */
TSDIST_API int tsdist_status_is_user_error(tsdist_status status);

TSDIST_API const char* tsdist_version(void);
TSDIST_API const char* tsdist_last_error(void);

typedef struct tsdist_dataset tsdist_dataset;
typedef struct tsdist_samples tsdist_samples;
typedef struct tsdist_mvn tsdist_mvn;
typedef struct tsdist_dmatrix tsdist_dmatrix;
typedef struct tsdist_layout tsdist_layout;
typedef struct tsdist_correlation tsdist_correlation;

/* ---- datasets ---------------------------------------------------------- */

/* format: "jsonl", "csv-long", or "auto" (by file extension). */
TSDIST_API tsdist_status tsdist_dataset_load(const char* path, const char* format,
                                             tsdist_dataset** out);
TSDIST_API tsdist_status tsdist_dataset_create(const char* name, tsdist_dataset** out);
TSDIST_API tsdist_status tsdist_dataset_add_series(tsdist_dataset* ds, const char* id,
                                                   const double* values, size_t count);
/* Global min-max rescaling to [0,1]; fails on all-constant datasets. */
TSDIST_API tsdist_status tsdist_dataset_normalize(tsdist_dataset* ds);
TSDIST_API tsdist_status tsdist_dataset_name(const tsdist_dataset* ds, const char** out);
TSDIST_API tsdist_status tsdist_dataset_series_count(const tsdist_dataset* ds, size_t* out);
TSDIST_API void tsdist_dataset_free(tsdist_dataset* ds);

/* ---- window sampling ---------------------------------------------------- */

typedef struct tsdist_sampling_config {
  uint32_t window_length;        /* default 48 */
  uint32_t sample_count;         /* default 20000 */
  uint64_t seed;                 /* default 42 */
  uint32_t max_resample_attempts; /* default 1000 */
} tsdist_sampling_config;

TSDIST_API void tsdist_sampling_config_init(tsdist_sampling_config* cfg);

/* Draw sample_count windows from a normalized dataset. Deterministic for a
 * given (seed, dataset name), independent of processing order. */
TSDIST_API tsdist_status tsdist_dataset_sample(const tsdist_dataset* ds,
                                               const tsdist_sampling_config* cfg,
                                               tsdist_samples** out);
TSDIST_API tsdist_status tsdist_samples_shape(const tsdist_samples* s, size_t* rows,
                                              size_t* cols);
/* Borrowed pointer to row-major data; valid while the handle lives. */
TSDIST_API tsdist_status tsdist_samples_data(const tsdist_samples* s, const double** out);
TSDIST_API void tsdist_samples_free(tsdist_samples* s);

/* ---- fitted Gaussian sketches ------------------------------------------ */

TSDIST_API tsdist_status tsdist_mvn_fit(const tsdist_samples* s, tsdist_mvn** out);
TSDIST_API tsdist_status tsdist_mvn_save(const tsdist_mvn* m, const char* path);
TSDIST_API tsdist_status tsdist_mvn_load(const char* path, tsdist_mvn** out);
TSDIST_API tsdist_status tsdist_mvn_dim(const tsdist_mvn* m, size_t* out);
TSDIST_API tsdist_status tsdist_mvn_name(const tsdist_mvn* m, const char** out);
TSDIST_API void tsdist_mvn_free(tsdist_mvn* m);

/* ---- distances ---------------------------------------------------------- */

TSDIST_API tsdist_status tsdist_wasserstein(const tsdist_mvn* a, const tsdist_mvn* b,
                                            double* out);
TSDIST_API tsdist_status tsdist_euclidean_mean(const tsdist_mvn* a, const tsdist_mvn* b,
                                               double* out);
TSDIST_API tsdist_status tsdist_dtw_mean(const tsdist_mvn* a, const tsdist_mvn* b, double* out);
TSDIST_API tsdist_status tsdist_dtw(const double* x, size_t nx, const double* y, size_t ny,
                                    double* out);
/* kind: "min" | "avg" | "max". threads: 0 = machine parallelism.
 * subsample_rows: 0 = exact; otherwise both sides are capped to their first
 * subsample_rows windows (approximate). */
TSDIST_API tsdist_status tsdist_linkage(const tsdist_samples* a, const tsdist_samples* b,
                                        const char* kind, int threads, size_t subsample_rows,
                                        double* out);

/* ---- pairwise distance matrices ----------------------------------------- */

/* metric: "wasserstein" | "euclidean" | "dtw" (sketch-based), plus
 * "link-min" | "link-avg" | "link-max" for the samples-based builder. */
TSDIST_API tsdist_status tsdist_dmatrix_from_mvns(const tsdist_mvn* const* mvns, size_t count,
                                                  const char* metric, int threads,
                                                  tsdist_dmatrix** out);
TSDIST_API tsdist_status tsdist_dmatrix_from_samples(const tsdist_samples* const* samples,
                                                     size_t count, const char* metric,
                                                     int threads, size_t linkage_subsample,
                                                     tsdist_dmatrix** out);
TSDIST_API tsdist_status tsdist_dmatrix_load(const char* path, tsdist_dmatrix** out);
/* format: "csv" | "json". */
TSDIST_API tsdist_status tsdist_dmatrix_save(const tsdist_dmatrix* m, const char* path,
                                             const char* format);
TSDIST_API tsdist_status tsdist_dmatrix_save_heatmap(const tsdist_dmatrix* m, const char* path);
TSDIST_API tsdist_status tsdist_dmatrix_size(const tsdist_dmatrix* m, size_t* out);
TSDIST_API tsdist_status tsdist_dmatrix_label(const tsdist_dmatrix* m, size_t i,
                                              const char** out);
TSDIST_API tsdist_status tsdist_dmatrix_metric(const tsdist_dmatrix* m, const char** out);
TSDIST_API tsdist_status tsdist_dmatrix_value(const tsdist_dmatrix* m, size_t i, size_t j,
                                              double* out);
TSDIST_API void tsdist_dmatrix_free(tsdist_dmatrix* m);

/* ---- force-directed layout ---------------------------------------------- */

TSDIST_API tsdist_status tsdist_layout_compute(const tsdist_dmatrix* m, uint64_t seed,
                                               tsdist_layout** out);
TSDIST_API tsdist_status tsdist_layout_save(const tsdist_layout* l, const char* path);
/* color_map_path: optional CSV of "label,css_color" rows, or NULL. */
TSDIST_API tsdist_status tsdist_layout_save_svg(const tsdist_layout* l,
                                                const tsdist_dmatrix* m,
                                                const char* color_map_path, const char* path);
TSDIST_API tsdist_status tsdist_layout_stress(const tsdist_layout* l, double* out);
TSDIST_API tsdist_status tsdist_layout_position(const tsdist_layout* l, size_t i, double* x,
                                                double* y);
TSDIST_API void tsdist_layout_free(tsdist_layout* l);

/* ---- correlation against external per-dataset losses -------------------- */

/* Joins row `source_label` of the matrix against (labels[i], losses[i]);
 * datasets missing from the table are recorded, the rest are correlated. */
TSDIST_API tsdist_status tsdist_correlate(const tsdist_dmatrix* m, const char* source_label,
                                          const char* const* labels, const double* losses,
                                          size_t count, tsdist_correlation** out);
TSDIST_API tsdist_status tsdist_correlation_stats(const tsdist_correlation* c, double* pearson_r,
                                                  double* spearman_r, double* slope,
                                                  double* intercept, size_t* n_used);
TSDIST_API tsdist_status tsdist_correlation_missing_count(const tsdist_correlation* c,
                                                          size_t* out);
TSDIST_API tsdist_status tsdist_correlation_missing_label(const tsdist_correlation* c, size_t i,
                                                          const char** out);
TSDIST_API tsdist_status tsdist_correlation_save(const tsdist_correlation* c, const char* path);
TSDIST_API tsdist_status tsdist_correlation_save_svg(const tsdist_correlation* c,
                                                     const char* path);
TSDIST_API void tsdist_correlation_free(tsdist_correlation* c);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TSDIST_H */
