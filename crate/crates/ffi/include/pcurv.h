#ifndef PCURV_H
#define PCURV_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PcurvStatus {
  PCURV_STATUS_OK = 0,
  PCURV_STATUS_NULL_POINTER = 1,
  PCURV_STATUS_INVALID_PARAMETER = 2,
  PCURV_STATUS_SHAPE_MISMATCH = 3,
  PCURV_STATUS_NOT_CLOSED = 4,
  PCURV_STATUS_DEGENERATE_JET = 5,
  PCURV_STATUS_DEGENERATE_STEP = 6,
  PCURV_STATUS_NUMERICAL = 7,
  PCURV_STATUS_PANIC = 8,
} PcurvStatus;

typedef enum PcurvFunctional {
  PCURV_FUNCTIONAL_EP = 0,
  PCURV_FUNCTIONAL_WP = 1,
} PcurvFunctional;

/**
 * Termination of [`pcurv_minimize`].
 */
typedef enum PcurvOptStatus {
  PCURV_OPT_STATUS_CONVERGED_PS = 0,
  PCURV_OPT_STATUS_CONVERGED_ENERGY = 1,
  PCURV_OPT_STATUS_MAX_ITERS = 2,
  PCURV_OPT_STATUS_DEGENERATE_STEP = 3,
} PcurvOptStatus;

/**
 * Opaque surface handle.
 */
typedef struct PcurvSurface PcurvSurface;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *pcurv_version(void);

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len − 1` bytes) and returns the full message length.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t pcurv_last_error(char *buf, size_t len);

/**
 * Closed-form sphere of radius `radius` with `m` profile nodes.
 *
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum PcurvStatus pcurv_sphere_new(double radius, size_t m, struct PcurvSurface **out);

/**
 * Sampled torus of revolution in `R^n` on an `n1 × n2` grid.
 *
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum PcurvStatus pcurv_torus_new(size_t n,
                                 double big_r,
                                 double a,
                                 size_t n1,
                                 size_t n2,
                                 struct PcurvSurface **out);

/**
 * Surface from a CLI shape spec such as `torus:R=2,a=1,N=64`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string; `out` a valid handle slot.
 */
enum PcurvStatus pcurv_surface_from_spec(const char *spec,
                                         double p,
                                         enum PcurvFunctional functional,
                                         uint64_t seed,
                                         struct PcurvSurface **out);

/**
 * Smooth random normal perturbation of `src` (sampled copy), seeded.
 *
 * # Safety
 * `src` must be a live handle; `out` a valid handle slot.
 */
enum PcurvStatus pcurv_surface_perturb(const struct PcurvSurface *src,
                                       double amplitude,
                                       uint64_t seed,
                                       struct PcurvSurface **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `s` must be null or a handle not yet freed.
 */
void pcurv_surface_free(struct PcurvSurface *s);

/**
 * Number of quadrature nodes, 0 for a null handle.
 *
 * # Safety
 * `s` must be null or a live handle.
 */
size_t pcurv_surface_node_count(const struct PcurvSurface *s);

/**
 * Number of nodal dofs, 0 for a null handle.
 *
 * # Safety
 * `s` must be null or a live handle.
 */
size_t pcurv_surface_dof_count(const struct PcurvSurface *s);

/**
 * Copies the nodal dofs into `buf`, which must hold exactly the dof count.
 *
 * # Safety
 * `s` must be a live handle and `buf` point to `len` writable doubles.
 */
enum PcurvStatus pcurv_surface_dofs(const struct PcurvSurface *s, double *buf, size_t len);

/**
 * `E^p` or `W^p` of the surface.
 *
 * # Safety
 * `s` must be a live handle and `out` a valid pointer.
 */
enum PcurvStatus pcurv_energy(const struct PcurvSurface *s,
                              enum PcurvFunctional functional,
                              double p,
                              double *out);

/**
 * Willmore energy and Gauss–Bonnet defect of a closed surface.
 *
 * # Safety
 * `s` must be a live handle; outputs valid pointers.
 */
enum PcurvStatus pcurv_willmore(const struct PcurvSurface *s,
                                double *willmore_out,
                                double *gb_defect);

/**
 * Discrete gradient with respect to the nodal dofs; `grad` must hold exactly
 * the dof count.
 *
 * # Safety
 * `s` must be a live handle and `grad` point to `len` writable doubles.
 */
enum PcurvStatus pcurv_gradient(const struct PcurvSurface *s,
                                enum PcurvFunctional functional,
                                double p,
                                double *grad,
                                size_t len);

/**
 * Dictionary lower bound on the dual norm of the first variation.
 *
 * # Safety
 * `s` must be a live handle and `out` a valid pointer.
 */
enum PcurvStatus pcurv_ps_surrogate(const struct PcurvSurface *s,
                                    enum PcurvFunctional functional,
                                    double p,
                                    size_t dictionary_size,
                                    uint64_t seed,
                                    double *out);

/**
 * Steepest descent with default settings except `max_iters`. On success
 * `*out` receives a new handle with the final surface.
 *
 * # Safety
 * `s` must be a live handle; outputs valid pointers.
 */
enum PcurvStatus pcurv_minimize(const struct PcurvSurface *s,
                                enum PcurvFunctional functional,
                                double p,
                                size_t max_iters,
                                struct PcurvSurface **out,
                                double *final_energy,
                                enum PcurvOptStatus *status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PCURV_H */
