#ifndef FRACGRAD_H
#define FRACGRAD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum FgStatus {
  FG_STATUS_OK = 0,
  FG_STATUS_NULL_POINTER = 1,
  FG_STATUS_INVALID_ARGUMENT = 2,
  FG_STATUS_GRID_MISMATCH = 3,
  FG_STATUS_DIVERGENT = 4,
  FG_STATUS_PARSE = 5,
  FG_STATUS_INTERNAL = 6,
  FG_STATUS_PANIC = 7,
} FgStatus;

/**
 * Uniform grid handle.
 */
typedef struct FgGrid FgGrid;

/**
 * Antisymmetric pair field handle.
 */
typedef struct FgOdField FgOdField;

/**
 * Scalar field handle.
 */
typedef struct FgScalarField FgScalarField;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (NUL
 * terminated, truncated to `len - 1` bytes) and returns the full message
 * length in bytes. `buf` may be null to query the length.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t fg_last_error(char *buf, size_t len);

/**
 * Creates a `dim`-dimensional grid on `[-half_width, half_width]^dim` with
 * `points` nodes per axis.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum FgStatus fg_grid_new(size_t dim, double half_width, size_t points, struct FgGrid **out);

/**
 * Number of grid nodes, 0 for a null handle.
 *
 * # Safety
 * `grid` must be null or a live handle.
 */
size_t fg_grid_node_count(const struct FgGrid *grid);

/**
 * # Safety
 * `grid` must be null or a handle not yet freed.
 */
void fg_grid_free(struct FgGrid *grid);

/**
 * Scalar field from `len` node values (row-major over the node index).
 *
 * # Safety
 * `values` must point to `len` readable doubles; `out` must be valid.
 */
enum FgStatus fg_scalar_from_values(const struct FgGrid *grid,
                                    const double *values,
                                    size_t len,
                                    struct FgScalarField **out);

/**
 * Samples a named test function such as `"gaussian(width=2)"`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string; `out` must be valid.
 */
enum FgStatus fg_scalar_sample(const struct FgGrid *grid,
                               const char *spec,
                               struct FgScalarField **out);

/**
 * Copies up to `len` node values into `out` and stores the node count in
 * `count` (either may be null).
 *
 * # Safety
 * `out` must be null or point to `len` writable doubles.
 */
enum FgStatus fg_scalar_values(const struct FgScalarField *field,
                               double *out,
                               size_t len,
                               size_t *count);

/**
 * # Safety
 * `field` must be null or a handle not yet freed.
 */
void fg_scalar_free(struct FgScalarField *field);

/**
 * Samples a named pair test function such as
 * `"disjoint_bumps(b=bump(center=-2), c=bump(center=2))"`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string; `out` must be valid.
 */
enum FgStatus fg_od_sample(const struct FgGrid *grid, const char *spec, struct FgOdField **out);

/**
 * Value at node pair `(a, b)`; zero on the diagonal.
 *
 * # Safety
 * `field` must be a live handle; `out` must be valid.
 */
enum FgStatus fg_od_get(const struct FgOdField *field, size_t a, size_t b, double *out);

/**
 * # Safety
 * `field` must be null or a handle not yet freed.
 */
void fg_od_free(struct FgOdField *field);

/**
 * `d_s u`.
 *
 * # Safety
 * Handles must be live; `out` must be valid.
 */
enum FgStatus fg_frac_gradient(const struct FgScalarField *u, double s, struct FgOdField **out);

/**
 * `div_s G`.
 *
 * # Safety
 * Handles must be live; `out` must be valid.
 */
enum FgStatus fg_frac_divergence(const struct FgOdField *g, double s, struct FgScalarField **out);

/**
 * `div_s d_s u` by the lattice singular integral.
 *
 * # Safety
 * Handles must be live; `out` must be valid.
 */
enum FgStatus fg_frac_laplacian(const struct FgScalarField *u,
                                double s,
                                struct FgScalarField **out);

/**
 * `∫ u v dx`.
 *
 * # Safety
 * Handles must be live; `out` must be valid.
 */
enum FgStatus fg_pair_scalar(const struct FgScalarField *u,
                             const struct FgScalarField *v,
                             double *out);

/**
 * `∬ F G dx dy / |x-y|^n`.
 *
 * # Safety
 * Handles must be live; `out` must be valid.
 */
enum FgStatus fg_pair_od(const struct FgOdField *f, const struct FgOdField *g, double *out);

/**
 * `‖u‖_{L^p}`; pass `INFINITY` for the max norm.
 *
 * # Safety
 * Handles must be live; `out` must be valid.
 */
enum FgStatus fg_lp_norm(const struct FgScalarField *u, double p, double *out);

/**
 * `‖F‖_{L^p_od}`.
 *
 * # Safety
 * Handles must be live; `out` must be valid.
 */
enum FgStatus fg_lp_od_norm(const struct FgOdField *f, double p, double *out);

/**
 * `‖d_s u‖_{L^p_od}`.
 *
 * # Safety
 * Handles must be live; `out` must be valid.
 */
enum FgStatus fg_gagliardo_seminorm(const struct FgScalarField *u, double s, double p, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FRACGRAD_H */
