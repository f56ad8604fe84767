#ifndef PLCURV_H
#define PLCURV_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a call.
 */
typedef enum PlcStatus {
  PLC_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  PLC_STATUS_NULL_POINTER = 1,
  /**
   * Input could not be parsed.
   */
  PLC_STATUS_PARSE_ERROR = 2,
  /**
   * Input parsed but is not a valid surface, metric or argument.
   */
  PLC_STATUS_INVALID_INPUT = 3,
  /**
   * A flow stopped at its step budget.
   */
  PLC_STATUS_MAX_STEPS = 4,
  /**
   * Numerical failure: step size underflow, stalled solve.
   */
  PLC_STATUS_NUMERICAL_FAILURE = 5,
  /**
   * Target not admissible (α·R̄ has a positive entry).
   */
  PLC_STATUS_UNSUPPORTED = 6,
  /**
   * An output buffer has the wrong length.
   */
  PLC_STATUS_SIZE_MISMATCH = 7,
  /**
   * A Rust panic was caught at the boundary.
   */
  PLC_STATUS_PANIC = 8,
} PlcStatus;

typedef enum PlcFormat {
  PLC_FORMAT_OFF = 0,
  PLC_FORMAT_OBJ = 1,
  PLC_FORMAT_LENGTHS_JSON = 2,
} PlcFormat;

typedef enum PlcFlowKind {
  PLC_FLOW_KIND_YAMABE = 0,
  PLC_FLOW_KIND_CALABI = 1,
} PlcFlowKind;

/**
 * Opaque mesh handle.
 */
typedef struct PlcMesh PlcMesh;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. The pointer
 * stays valid until the next `plc_*` call on the same thread.
 */
const char *plc_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *plc_version(void);

/**
 * Parses `len` bytes in the given format. A `u` field in LENGTHS_JSON
 * input becomes the initial log-factors. On success `*out` receives a new
 * handle, to be released with `plc_mesh_free`.
 *
 * # Safety
 * `data` must point to `len` readable bytes and `out` must be writable.
 */
enum PlcStatus plc_mesh_from_buffer(const uint8_t *data,
                                    size_t len,
                                    enum PlcFormat format,
                                    struct PlcMesh **out);

/**
 * Reads a mesh file; the format follows the extension (.off, .obj, .json).
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` must be writable.
 */
enum PlcStatus plc_mesh_load(const char *path, struct PlcMesh **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `mesh` must come from this library and not be used afterwards.
 */
void plc_mesh_free(struct PlcMesh *mesh);

/**
 * Vertex count, or 0 for a null handle.
 *
 * # Safety
 * `mesh` must be null or a live handle.
 */
size_t plc_mesh_vertex_count(const struct PlcMesh *mesh);

/**
 * # Safety
 * `mesh` must be null or a live handle.
 */
size_t plc_mesh_face_count(const struct PlcMesh *mesh);

/**
 * # Safety
 * `mesh` must be null or a live handle.
 */
size_t plc_mesh_edge_count(const struct PlcMesh *mesh);

/**
 * # Safety
 * `mesh` must be null or a live handle.
 */
int64_t plc_mesh_euler_characteristic(const struct PlcMesh *mesh);

/**
 * Replaces the log-factors. `len` must equal the vertex count.
 *
 * # Safety
 * `u` must point to `len` readable doubles.
 */
enum PlcStatus plc_mesh_set_u(struct PlcMesh *mesh, const double *u, size_t len);

/**
 * Copies the log-factors into `out` (length = vertex count).
 *
 * # Safety
 * `out` must point to `len` writable doubles.
 */
enum PlcStatus plc_mesh_get_u(const struct PlcMesh *mesh, double *out, size_t len);

/**
 * Writes K (and R_α when `r_out` is not null) for the current metric.
 * Both buffers have length `len` = vertex count.
 *
 * # Safety
 * Non-null buffers must hold `len` writable doubles.
 */
enum PlcStatus plc_curvature(const struct PlcMesh *mesh,
                             double alpha,
                             double *k_out,
                             double *r_out,
                             size_t len);

/**
 * Flips the current metric to a Delaunay triangulation. `flips` (nullable)
 * receives the number of flips.
 *
 * # Safety
 * `flips` must be null or writable.
 */
enum PlcStatus plc_make_delaunay(struct PlcMesh *mesh, size_t *flips);

/**
 * Runs a flow from the current `u` with surgery on or off and stores the
 * final state in the handle. `dt <= 0` selects the default step. Returns
 * `Ok` when converged, `MaxSteps` or `NumericalFailure` otherwise (the
 * handle then holds the last state). `steps` is nullable.
 *
 * # Safety
 * `steps` must be null or writable.
 */
enum PlcStatus plc_flow(struct PlcMesh *mesh,
                        enum PlcFlowKind kind,
                        double alpha,
                        double dt,
                        double tol,
                        size_t max_steps,
                        bool surgery_on,
                        size_t *steps);

/**
 * Newton solve for a per-vertex target (`target` of length vertex count) or
 * the constant target (`target` null). Stores the solution in the handle.
 *
 * # Safety
 * `target` must be null or point to `len` readable doubles.
 */
enum PlcStatus plc_solve(struct PlcMesh *mesh,
                         double alpha,
                         const double *target,
                         size_t len,
                         double tol,
                         size_t max_iter);

/**
 * The handle as a LENGTHS_JSON document (base lengths plus `u`). Free the
 * result with `plc_string_free`. Returns null for a null handle.
 *
 * # Safety
 * `mesh` must be null or a live handle.
 */
char *plc_mesh_to_json(const struct PlcMesh *mesh);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from `plc_mesh_to_json` and not be used afterwards.
 */
void plc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PLCURV_H */
