#ifndef QUASIQUAD_H
#define QUASIQUAD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum QqStatus {
  QQ_STATUS_OK = 0,
  QQ_STATUS_DOMAIN = 1,
  QQ_STATUS_VALIDITY = 2,
  QQ_STATUS_INCONSISTENT = 3,
  QQ_STATUS_EVALUATION = 4,
  QQ_STATUS_UNSUPPORTED_ORDER = 5,
  QQ_STATUS_ORACLE_FAILURE = 6,
  QQ_STATUS_BUDGET_EXHAUSTED = 7,
  QQ_STATUS_PARSE = 8,
  QQ_STATUS_NULL_POINTER = 9,
  QQ_STATUS_INVALID_UTF8 = 10,
  QQ_STATUS_PANIC = 11,
} QqStatus;

typedef enum QqBoundKind {
  QQ_BOUND_KIND_V1 = 1,
  QQ_BOUND_KIND_V2 = 2,
  QQ_BOUND_KIND_V3 = 3,
} QqBoundKind;

/**
 * Opaque certified quadrature result.
 */
typedef struct QqCertifiedResult QqCertifiedResult;

/**
 * Opaque test function.
 */
typedef struct QqFunction QqFunction;

/**
 * The three bounds and their minimum. `v1`/`v3` are meaningful only when
 * the matching `has_` flag is set.
 */
typedef struct QqBoundBreakdown {
  bool has_v1;
  double v1;
  double v2;
  bool has_v3;
  double v3;
  double best;
  enum QqBoundKind winner;
} QqBoundBreakdown;

typedef struct QqLocalBound {
  size_t index;
  double left;
  double right;
  double local_bound;
  enum QqBoundKind winner;
} QqLocalBound;

typedef struct QqMeansRecord {
  double lhs;
  double rhs;
  double margin;
  bool holds;
  bool quasiconvex;
} QqMeansRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *qq_last_error_message(void);

/**
 * Euler Beta function.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum QqStatus qq_beta(double x, double y, double *out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum QqStatus qq_conjugate_exponent(double q, double *out);

/**
 * Smallest defined bound on the trapezoid defect over `[a, b]`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum QqStatus qq_best_bound(double a,
                            double b,
                            double q,
                            double d2a,
                            double d2b,
                            struct QqBoundBreakdown *out);

/**
 * Power-mean bound; `statement_exponent` selects `(q-1)/q` instead of `1/q`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum QqStatus qq_bound_v2(double a,
                          double b,
                          double q,
                          double d2a,
                          double d2b,
                          bool statement_exponent,
                          double *out);

/**
 * Parses `poly:c0,c1,...`, `exp:c,k`, `recip:s` or `g`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum QqStatus qq_function_parse(const char *spec, struct QqFunction **out);

/**
 * # Safety
 * `f` must be null or a handle from [`qq_function_parse`] not yet freed.
 */
void qq_function_free(struct QqFunction *f);

/**
 * # Safety
 * `f` must be a live handle; `out` valid for writes.
 */
enum QqStatus qq_function_evaluate(const struct QqFunction *f,
                                   double x,
                                   uint8_t order,
                                   double *out);

/**
 * # Safety
 * `f` must be a live handle; `out` valid for writes.
 */
enum QqStatus qq_reference_integral(const struct QqFunction *f, double a, double b, double *out);

/**
 * Composite trapezoid sum on `n` uniform subintervals.
 *
 * # Safety
 * `f` must be a live handle; `out` valid for writes.
 */
enum QqStatus qq_trapezoid_sum(const struct QqFunction *f,
                               double a,
                               double b,
                               size_t n,
                               double *out);

/**
 * Certified trapezoid integration. On `BudgetExhausted` a handle to the
 * best attempt is still written to `out`; free it either way.
 *
 * # Safety
 * `f` must be a live handle; `out` valid for writes.
 */
enum QqStatus qq_integrate_certified(const struct QqFunction *f,
                                     double a,
                                     double b,
                                     double q,
                                     double eps,
                                     size_t max_n,
                                     struct QqCertifiedResult **out);

/**
 * # Safety
 * `r` must be null or a live result handle.
 */
void qq_result_free(struct QqCertifiedResult *r);

/**
 * Trapezoid value, or NaN for a null handle.
 *
 * # Safety
 * `r` must be null or a live result handle.
 */
double qq_result_value(const struct QqCertifiedResult *r);

/**
 * Certificate total, or NaN for a null handle.
 *
 * # Safety
 * `r` must be null or a live result handle.
 */
double qq_result_certificate(const struct QqCertifiedResult *r);

/**
 * Number of subintervals, or 0 for a null handle.
 *
 * # Safety
 * `r` must be null or a live result handle.
 */
size_t qq_result_subintervals(const struct QqCertifiedResult *r);

/**
 * Whether `|f''|` passed the grid quasi-convexity test.
 *
 * # Safety
 * `r` must be null or a live result handle.
 */
bool qq_result_quasiconvex(const struct QqCertifiedResult *r);

/**
 * # Safety
 * `r` must be a live handle; `out` valid for writes.
 */
enum QqStatus qq_result_local_bound(const struct QqCertifiedResult *r,
                                    size_t index,
                                    struct QqLocalBound *out);

/**
 * Special-means check for `xⁿ`; `proposition` is 5, 6 or 7.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum QqStatus qq_check_means(uint32_t proposition,
                             double a,
                             double b,
                             uint32_t n,
                             double q,
                             struct QqMeansRecord *out);

/**
 * Runs the verification harness and writes the JSON report to `out`.
 * `manifest` is corpus manifest text, or null for the shipped corpus.
 * `passed` (nullable) receives whether the run had no violations or failed
 * checks.
 *
 * # Safety
 * `manifest` must be null or NUL-terminated; `q_grid` must point to
 * `q_len` doubles; `out` must be valid for writes. Free the string with
 * [`qq_string_free`].
 */
enum QqStatus qq_verify_json(const char *manifest,
                             const double *q_grid,
                             size_t q_len,
                             char **out,
                             bool *passed);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void qq_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUASIQUAD_H */
