#ifndef RESIDUUM_H
#define RESIDUUM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RsdStatus {
  RSD_STATUS_OK = 0,
  RSD_STATUS_NULL_POINTER = 1,
  RSD_STATUS_INVALID_UTF8 = 2,
  RSD_STATUS_PARSE = 3,
  RSD_STATUS_INPUT = 4,
  RSD_STATUS_TRUNCATION = 5,
  RSD_STATUS_BUFFER_TOO_SMALL = 6,
  RSD_STATUS_INTERNAL = 7,
} RsdStatus;

// Branch parametrizations of one plane singularity.
typedef struct RsdBranchSystem RsdBranchSystem;

// A validated dual graph.
typedef struct RsdGraph RsdGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failing call on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *rsd_last_error(void);

// Static library version string.
const char *rsd_version(void);

// # Safety
// `s` must be null or a string returned by this library, freed once.
void rsd_string_free(char *s);

// Parses a curve document and builds its dual graph.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum RsdStatus rsd_graph_from_json(const char *json, struct RsdGraph **out);

// # Safety
// `g` must be null or a handle from [`rsd_graph_from_json`], freed once.
void rsd_graph_free(struct RsdGraph *g);

// Number of components.
//
// # Safety
// `g` must be a live graph handle and `out` writable.
enum RsdStatus rsd_graph_vertex_count(const struct RsdGraph *g, size_t *out);

// Number of nodes.
//
// # Safety
// `g` must be a live graph handle and `out` writable.
enum RsdStatus rsd_graph_edge_count(const struct RsdGraph *g, size_t *out);

// First Betti number of the dual graph.
//
// # Safety
// `g` must be a live graph handle and `out` writable.
enum RsdStatus rsd_graph_betti1(const struct RsdGraph *g, size_t *out);

// # Safety
// `g` must be a live graph handle and `out` writable.
enum RsdStatus rsd_graph_arithmetic_genus(const struct RsdGraph *g, size_t *out);

// Dimension of the space of global dualizing sections; all components must
// be rational.
//
// # Safety
// `g` must be a live graph handle and `out` writable.
enum RsdStatus rsd_graph_dualizing_dim(const struct RsdGraph *g, size_t *out);

// Catalog singularity (`node`, `cusp`, `tacnode`) at the given truncation.
//
// # Safety
// `name` must be a NUL-terminated string; `out` must be writable.
enum RsdStatus rsd_branch_system_catalog(const char *name,
                                         size_t truncation,
                                         struct RsdBranchSystem **out);

// # Safety
// `b` must be null or a handle from this library, freed once.
void rsd_branch_system_free(struct RsdBranchSystem *b);

// Conductor exponents (one per branch) and δ. `len` receives the branch
// count; if it exceeds `cap` nothing is written to `exponents` and
// `BUFFER_TOO_SMALL` is returned.
//
// # Safety
// `b` must be a live handle, `exponents` valid for `cap` writes, `len` and
// `delta` writable.
enum RsdStatus rsd_branch_system_conductor(const struct RsdBranchSystem *b,
                                           uint32_t *exponents,
                                           size_t cap,
                                           size_t *len,
                                           uint32_t *delta);

// Runs one CLI command and returns its JSON report.
//
// `document` may be null for `conductor` and `selftest`. `options_json` is
// null or an object with any of `k`, `params`, `singularity`,
// `differential`, `trunc`. On `OK`, `*report_json` holds the report and
// `*exit_code` the code the CLI would exit with.
//
// # Safety
// String arguments must be null or NUL-terminated; `report_json` and
// `exit_code` must be writable.
enum RsdStatus rsd_run_command(const char *command,
                               const char *document,
                               const char *options_json,
                               char **report_json,
                               int32_t *exit_code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RESIDUUM_H */
