#ifndef CONEFOLD_H
#define CONEFOLD_H

/* Generated by cbindgen from conefold-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes for every FFI entry point.
 */
typedef enum ConefoldStatus {
  CONEFOLD_STATUS_OK = 0,
  CONEFOLD_STATUS_NULL_POINTER = 1,
  CONEFOLD_STATUS_INVALID_ARGUMENT = 2,
  CONEFOLD_STATUS_INFEASIBLE_BRANCH = 3,
  CONEFOLD_STATUS_DEGENERATE = 4,
  CONEFOLD_STATUS_FOLD_AT_INFINITY = 5,
  CONEFOLD_STATUS_INTERNAL = 6,
} ConefoldStatus;

/*
 Opaque synthesized configuration.
 */
typedef struct ConefoldConfig ConefoldConfig;

/*
 Opaque built strip at one fold state.
 */
typedef struct ConefoldStrip ConefoldStrip;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Synthesize a configuration from the free tangents. `coupling_n` selects
 the second multilinear coupling factor when nonzero.

 # Safety
 `out` must be a valid pointer; on success it receives a handle that must
 later be passed to [`conefold_config_free`].
 */
enum ConefoldStatus conefold_synthesize(uint32_t u,
                                        uint32_t v,
                                        uint32_t coupling_n,
                                        double m,
                                        double s1,
                                        double s3,
                                        double t1,
                                        struct ConefoldConfig **out);

/*
 # Safety
 `config` must come from [`conefold_synthesize`] and not be freed twice.
 */
void conefold_config_free(struct ConefoldConfig *config);

/*
 Copy the seven half-angle tangents (m, s1, s2, s3, t1, t2, t3).

 # Safety
 `entries` must point to at least 7 writable doubles.
 */
enum ConefoldStatus conefold_config_entries(const struct ConefoldConfig *config, double *entries);

/*
 Second fold tangent coupled to `d1` along the synthesized motion.

 # Safety
 `d2` must be a valid pointer.
 */
enum ConefoldStatus conefold_fold_couple(const struct ConefoldConfig *config,
                                         double d1,
                                         double *d2);

/*
 Both coplanarity determinants at a fold state.

 # Safety
 `det_alpha` and `det_beta` must be valid pointers.
 */
enum ConefoldStatus conefold_determinants(const struct ConefoldConfig *config,
                                          double d1,
                                          double d2,
                                          double *det_alpha,
                                          double *det_beta);

/*
 The two flat fold states as (d1, d2) pairs; half-turn angles are encoded
 as IEEE infinity.

 # Safety
 `states` must point to at least 4 writable doubles.
 */
enum ConefoldStatus conefold_flat_states(const struct ConefoldConfig *config, double *states);

/*
 Build an n-face strip at fold tangent d1 with symmetric end openings.

 # Safety
 `out` must be a valid pointer; the handle must be released with
 [`conefold_strip_free`].
 */
enum ConefoldStatus conefold_strip_build(const struct ConefoldConfig *config,
                                         uint32_t faces,
                                         double d1,
                                         double end_opening,
                                         struct ConefoldStrip **out);

/*
 # Safety
 `strip` must come from [`conefold_strip_build`] and not be freed twice.
 */
void conefold_strip_free(struct ConefoldStrip *strip);

/*
 Vertex and quad counts of the strip mesh.

 # Safety
 `vertices` and `quads` must be valid pointers.
 */
enum ConefoldStatus conefold_strip_mesh_counts(const struct ConefoldStrip *strip,
                                               uint32_t *vertices,
                                               uint32_t *quads);

/*
 Fill caller-provided buffers with xyz vertex data and quad indices.

 # Safety
 `vertices` must hold 3·vertex-count doubles and `quads` 4·quad-count
 indices, per [`conefold_strip_mesh_counts`].
 */
enum ConefoldStatus conefold_strip_mesh_fill(const struct ConefoldStrip *strip,
                                             double *vertices,
                                             uint32_t *quads);

/*
 Closure residuals of the strip: germ mirror residual, period-four
 closure, and the max distance of section points to their cutting plane.

 # Safety
 `mirror`, `period4`, `section_plane` must be valid pointers.
 */
enum ConefoldStatus conefold_strip_closure(const struct ConefoldStrip *strip,
                                           double *mirror,
                                           double *period4,
                                           double *section_plane);

/*
 Planarity residual of the cross-ratio-λ pencil section.

 # Safety
 `residual` must be a valid pointer.
 */
enum ConefoldStatus conefold_pencil_residual(const struct ConefoldStrip *strip,
                                             double lambda,
                                             double *residual);

/*
 Max normalized torsion of a uniformly sampled curve (xyz triples).

 # Safety
 `points` must hold 3·count doubles; `residual` must be valid.
 */
enum ConefoldStatus conefold_torsion_residual(const double *points,
                                              uint32_t count,
                                              double step,
                                              double *residual);

/*
 Static human-readable description of a status code.
 */
const char *conefold_status_message(enum ConefoldStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONEFOLD_H */
