#ifndef HFREP_H
#define HFREP_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum HfrepStatus {
  HFREP_STATUS_OK = 0,
  HFREP_STATUS_NULL_POINTER = 1,
  HFREP_STATUS_INVALID_ARGUMENT = 2,
  HFREP_STATUS_DOMAIN = 3,
  HFREP_STATUS_EMPTY_BOUNDARY = 4,
  HFREP_STATUS_NON_CONVERGENCE = 5,
  HFREP_STATUS_LIPSCHITZ = 6,
  HFREP_STATUS_UNKNOWN_MODEL = 7,
  HFREP_STATUS_IO = 8,
  HFREP_STATUS_FORMAT = 9,
  HFREP_STATUS_PANIC = 10,
} HfrepStatus;

/**
 * Unsigned distance route used by [`hfrep_field_build`].
 */
typedef enum HfrepRoute {
  HFREP_ROUTE_DT = 0,
  HFREP_ROUTE_FIM = 1,
  HFREP_ROUTE_HFIM_ADF = 2,
  HFREP_ROUTE_IDF = 3,
} HfrepRoute;

/**
 * A built field.
 */
typedef struct HfrepField HfrepField;

/**
 * A sampled field lattice.
 */
typedef struct HfrepGrid HfrepGrid;

/**
 * A named catalog model.
 */
typedef struct HfrepModel HfrepModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length, 0 if none.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t hfrep_last_error(char *buf, size_t len);

/**
 * Looks up a catalog model by name.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum HfrepStatus hfrep_model_new(const char *name, struct HfrepModel **out);

/**
 * # Safety
 * `m` must come from [`hfrep_model_new`] and not be used afterwards.
 */
void hfrep_model_free(struct HfrepModel *m);

/**
 * Spatial dimension of the model (2 or 3), 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live model handle.
 */
uint32_t hfrep_model_dim(const struct HfrepModel *m);

/**
 * FRep value at `p` (`dim` coordinates).
 *
 * # Safety
 * `p` must point to as many doubles as the model dimension; `out` must be writable.
 */
enum HfrepStatus hfrep_model_eval(const struct HfrepModel *m, const double *p, double *out);

/**
 * Builds the field of a model over its own box. `slope <= 0` selects the
 * default sigmoid slope.
 *
 * # Safety
 * `m` must be a live model handle; `out` must be writable.
 */
enum HfrepStatus hfrep_field_build(const struct HfrepModel *m,
                                   enum HfrepRoute route,
                                   uint32_t res,
                                   double slope,
                                   struct HfrepField **out);

/**
 * # Safety
 * `f` must come from [`hfrep_field_build`] and not be used afterwards.
 */
void hfrep_field_free(struct HfrepField *f);

/**
 * Field value at `p`; points outside the box give `HFREP_STATUS_DOMAIN`.
 *
 * # Safety
 * `p` must point to as many doubles as the field dimension; `out` must be writable.
 */
enum HfrepStatus hfrep_field_eval(const struct HfrepField *f, const double *p, double *out);

/**
 * Samples the field on `res` nodes per axis over its box.
 *
 * # Safety
 * `f` must be a live field handle; `out` must be writable.
 */
enum HfrepStatus hfrep_field_sample(const struct HfrepField *f,
                                    uint32_t res,
                                    struct HfrepGrid **out);

/**
 * # Safety
 * `g` must come from [`hfrep_field_sample`] and not be used afterwards.
 */
void hfrep_grid_free(struct HfrepGrid *g);

/**
 * Number of nodes, 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live grid handle.
 */
size_t hfrep_grid_len(const struct HfrepGrid *g);

/**
 * Node values, x index fastest. The pointer lives as long as the grid.
 *
 * # Safety
 * `g` must be null or a live grid handle.
 */
const double *hfrep_grid_values(const struct HfrepGrid *g);

/**
 * Writes the grid as an HFRF file.
 *
 * # Safety
 * `g` must be a live grid handle and `path` a NUL-terminated string.
 */
enum HfrepStatus hfrep_grid_write(const struct HfrepGrid *g, const char *path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HFREP_H */
