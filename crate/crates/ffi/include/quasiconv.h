#ifndef QUASICONV_H
#define QUASICONV_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QcNorm {
  QC_NORM_L1 = 1,
  QC_NORM_L2 = 2,
  QC_NORM_INF = 3,
} QcNorm;

typedef enum QcStatus {
  QC_STATUS_OK = 0,
  QC_STATUS_NULL_POINTER = 1,
  QC_STATUS_INVALID_UTF8 = 2,
  QC_STATUS_USAGE = 3,
  QC_STATUS_PARSE = 4,
  QC_STATUS_EVAL = 5,
  QC_STATUS_NO_VALID_SAMPLES = 6,
  QC_STATUS_SAMPLING = 7,
  QC_STATUS_IO = 8,
  QC_STATUS_CONFIG = 9,
  QC_STATUS_PANIC = 10,
} QcStatus;

typedef enum QcVerdictStatus {
  QC_VERDICT_STATUS_HOLDS = 0,
  QC_VERDICT_STATUS_VIOLATED = 1,
  QC_VERDICT_STATUS_VACUOUS = 2,
  QC_VERDICT_STATUS_SKIPPED = 3,
} QcVerdictStatus;

/**
 * Opaque field handle.
 */
typedef struct QcField QcField;

typedef struct QcCheckConfig {
  double sigma;
  double tol;
  double min_sep;
  /**
   * Size of the dyadic λ grid k/(m+1).
   */
  size_t lambda_points;
  enum QcNorm norm;
} QcCheckConfig;

typedef struct QcVerdict {
  enum QcVerdictStatus status;
  /**
   * Zero when the verdict carries no margin (vacuous or skipped).
   */
  int32_t has_margin;
  double margin;
} QcVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library defaults: σ = 0, tol 1e-9, min_sep 1e-6, 63 λ points, L2.
 */
struct QcCheckConfig qc_check_config_default(void);

/**
 * Version string; static, do not free.
 */
const char *qc_version(void);

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next failing call on the same thread.
 */
const char *qc_last_error(void);

/**
 * Catalog field `name` in dimension `dim` (0 for its default dimension).
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum QcStatus qc_field_from_catalog(const char *name, size_t dim, struct QcField **out);

/**
 * Field given by an expression in `x1..x{dim}` on the box `[lower, upper]`
 * (each of length `dim`).
 *
 * # Safety
 * `expr` must be NUL-terminated, `lower`/`upper` must point to `dim`
 * doubles and `out` must be valid.
 */
enum QcStatus qc_field_from_expr(const char *expr,
                                 size_t dim,
                                 const double *lower,
                                 const double *upper,
                                 struct QcField **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `f` must come from this library and not be used afterwards.
 */
void qc_field_free(struct QcField *f);

/**
 * Dimension of the field, or 0 for null.
 *
 * # Safety
 * `f` must be null or a live handle.
 */
size_t qc_field_dim(const struct QcField *f);

/**
 * # Safety
 * `x` must point to `n` doubles, `out` to one.
 */
enum QcStatus qc_field_eval(const struct QcField *f, const double *x, size_t n, double *out);

/**
 * Writes the `n` gradient components to `out`.
 *
 * # Safety
 * `x` and `out` must each point to `n` doubles.
 */
enum QcStatus qc_field_gradient(const struct QcField *f, const double *x, size_t n, double *out);

/**
 * Segment-inequality margin at a single λ.
 *
 * # Safety
 * `x`, `y` must point to `n` doubles; `cfg` and `out` must be valid.
 */
enum QcStatus qc_margin_a(const struct QcField *f,
                          const double *x,
                          const double *y,
                          size_t n,
                          double lambda,
                          const struct QcCheckConfig *cfg,
                          double *out);

/**
 * Condition (a) over the configured λ grid.
 *
 * # Safety
 * `x`, `y` must point to `n` doubles; `cfg` and `out` must be valid.
 */
enum QcStatus qc_check_a(const struct QcField *f,
                         const double *x,
                         const double *y,
                         size_t n,
                         const struct QcCheckConfig *cfg,
                         struct QcVerdict *out);

/**
 * # Safety
 * As for [`qc_check_a`].
 */
enum QcStatus qc_check_b(const struct QcField *f,
                         const double *x,
                         const double *y,
                         size_t n,
                         const struct QcCheckConfig *cfg,
                         struct QcVerdict *out);

/**
 * # Safety
 * As for [`qc_check_a`].
 */
enum QcStatus qc_check_c(const struct QcField *f,
                         const double *x,
                         const double *y,
                         size_t n,
                         const struct QcCheckConfig *cfg,
                         struct QcVerdict *out);

/**
 * σ* estimate from `pairs` uniformly sampled pairs on the field's box.
 *
 * # Safety
 * `cfg` and `out` must be valid.
 */
enum QcStatus qc_sigma_star_estimate(const struct QcField *f,
                                     uint64_t seed,
                                     size_t pairs,
                                     const struct QcCheckConfig *cfg,
                                     double *out);

/**
 * Runs a CLI command (`check`, `sigma`, ...) with a JSON run config and
 * returns the JSON report in `*out_json` and its exit code in
 * `*exit_code`. Free the string with `qc_string_free`.
 *
 * # Safety
 * Strings must be NUL-terminated; output pointers must be valid.
 */
enum QcStatus qc_run_json(const char *command,
                          const char *config_json,
                          char **out_json,
                          int32_t *exit_code);

/**
 * Frees a string returned by this library; null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void qc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUASICONV_H */
