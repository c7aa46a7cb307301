#ifndef FORESTFIRE_H
#define FORESTFIRE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible function.
typedef enum FfcStatus {
  FFC_STATUS_OK = 0,
  // A required pointer argument was null.
  FFC_STATUS_NULL_POINTER = 1,
  // Input data or labels are malformed.
  FFC_STATUS_INVALID_INPUT = 2,
  // A numeric parameter is out of range.
  FFC_STATUS_INVALID_PARAMETER = 3,
  // Arguments violate an operation's preconditions.
  FFC_STATUS_CONTRACT_VIOLATION = 4,
  // The requested metric is undefined for the input.
  FFC_STATUS_METRIC_UNDEFINED = 5,
  // A caller buffer is too small.
  FFC_STATUS_BUFFER_TOO_SMALL = 6,
  // Unexpected internal failure.
  FFC_STATUS_INTERNAL = 7,
} FfcStatus;

// Values for [`FfcKernel::kind`].
typedef enum FfcKernelKind {
  FFC_KERNEL_KIND_GAUSSIAN = 0,
  FFC_KERNEL_KIND_ADAPTIVE = 1,
} FfcKernelKind;

// Cluster labels plus heat trace.
typedef struct FfcClustering FfcClustering;

// Row-major data matrix.
typedef struct FfcData FfcData;

// Affinity graph with degrees and thresholds.
typedef struct FfcGraph FfcGraph;

// Monte Carlo validation report.
typedef struct FfcReport FfcReport;

// Kernel description: `kind` is an [`FfcKernelKind`] value; `sigma` is
// used by the Gaussian kernel, `k` and `alpha` by the adaptive one.
typedef struct FfcKernel {
  uint32_t kind;
  double sigma;
  size_t k;
  double alpha;
} FfcKernel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on the calling thread (empty after a
// success). The pointer stays valid until the next call on this thread.
const char *ffc_last_error_message(void);

// Library version as a NUL-terminated string.
const char *ffc_version(void);

// Copies an `n × m` row-major array into a new data handle.
//
// # Safety
// `values` must point to `n * m` doubles; `out` must be writable.
enum FfcStatus ffc_data_new(const double *values, size_t n, size_t m, struct FfcData **out);

// # Safety
// `data` must be null or a handle from [`ffc_data_new`] not yet freed.
void ffc_data_free(struct FfcData *data);

// Builds the affinity graph of `data` under `kernel`.
//
// # Safety
// `data` and `kernel` must be valid pointers; `out` must be writable.
enum FfcStatus ffc_graph_new(const struct FfcData *data,
                             const struct FfcKernel *kernel,
                             struct FfcGraph **out);

// # Safety
// `graph` must be null or a live graph handle.
void ffc_graph_free(struct FfcGraph *graph);

// Number of vertices, or 0 for a null handle.
//
// # Safety
// `graph` must be null or a live graph handle.
size_t ffc_graph_len(const struct FfcGraph *graph);

// Copies the per-vertex acceptance thresholds (`+inf` for isolated vertices).
//
// # Safety
// `graph` must be a live handle; `out` must hold `capacity` doubles.
enum FfcStatus ffc_graph_thresholds(const struct FfcGraph *graph, double *out, size_t capacity);

// Clusters every vertex of `graph` with fire temperature `c`.
//
// # Safety
// `graph` must be a live handle; `out` must be writable.
enum FfcStatus ffc_cluster(const struct FfcGraph *graph,
                           double c,
                           uint64_t rng_seed,
                           struct FfcClustering **out);

// # Safety
// `result` must be null or a live clustering handle.
void ffc_clustering_free(struct FfcClustering *result);

// Number of labeled points, or 0 for a null handle.
//
// # Safety
// `result` must be null or a live clustering handle.
size_t ffc_clustering_len(const struct FfcClustering *result);

// Number of clusters (ids run 1..=count), or 0 for a null handle.
//
// # Safety
// `result` must be null or a live clustering handle.
uint32_t ffc_clustering_num_clusters(const struct FfcClustering *result);

// Copies the labels (one per point, ids starting at 1).
//
// # Safety
// `result` must be a live handle; `out` must hold `capacity` values.
enum FfcStatus ffc_clustering_labels(const struct FfcClustering *result,
                                     uint32_t *out,
                                     size_t capacity);

// Copies the heat trace in labeling order: vertex index, cluster id and
// heat at acceptance (`+inf` for seeds). Each buffer needs one slot per point;
// any of them may be null to skip it.
//
// # Safety
// `result` must be a live handle; non-null buffers must hold `capacity` values.
enum FfcStatus ffc_clustering_trace(const struct FfcClustering *result,
                                    size_t *vertices,
                                    uint32_t *clusters,
                                    double *heats,
                                    size_t capacity);

// Monte Carlo validation of `result` on `graph`.
//
// # Safety
// `graph` and `result` must be live handles; `out` must be writable.
enum FfcStatus ffc_validate(const struct FfcGraph *graph,
                            const struct FfcClustering *result,
                            uint32_t trials,
                            uint64_t rng_seed,
                            struct FfcReport **out);

// # Safety
// `report` must be null or a live report handle.
void ffc_report_free(struct FfcReport *report);

// Number of points in the report, or 0 for a null handle.
//
// # Safety
// `report` must be null or a live report handle.
size_t ffc_report_len(const struct FfcReport *report);

// Copies per-point statistics: `p_value` (unreached trials count as
// mismatches), `posterior_p_value` (over reaching trials only), entropy in
// nats and coverage. Any buffer may be null to skip it.
//
// # Safety
// `report` must be a live handle; non-null buffers must hold `capacity` values.
enum FfcStatus ffc_report_points(const struct FfcReport *report,
                                 double *p_values,
                                 double *posterior_p_values,
                                 double *entropies,
                                 uint32_t *coverage,
                                 size_t capacity);

// Writes `1` where `p_value <= alpha`, else `0`.
//
// # Safety
// `report` must be a live handle; `out` must hold `capacity` bytes.
enum FfcStatus ffc_report_significant(const struct FfcReport *report,
                                      double alpha,
                                      uint8_t *out,
                                      size_t capacity);

// Assigns the rows of `new_points` in order, given a labeled training set.
// `labels_out` receives one label per new point; `novel_out` (may be null)
// receives `1` where the label is a cluster opened for the stream.
//
// # Safety
// Handles must be live; `train_labels` must hold one label per training
// row; non-null buffers must hold `capacity` values.
enum FfcStatus ffc_online_assign(const struct FfcData *train,
                                 const uint32_t *train_labels,
                                 const struct FfcData *new_points,
                                 const struct FfcKernel *kernel,
                                 double c,
                                 uint32_t *labels_out,
                                 uint8_t *novel_out,
                                 size_t capacity);

// Purity of `pred` against `truth`.
//
// # Safety
// `pred` and `truth` must hold `n` labels; `out` must be writable.
enum FfcStatus ffc_purity(const uint32_t *pred, const uint32_t *truth, size_t n, double *out);

// Adjusted Rand index between `pred` and `truth`.
//
// # Safety
// `pred` and `truth` must hold `n` labels; `out` must be writable.
enum FfcStatus ffc_adjusted_rand_index(const uint32_t *pred,
                                       const uint32_t *truth,
                                       size_t n,
                                       double *out);

// Mean Euclidean silhouette of `labels` (one per row of `data`).
//
// # Safety
// `data` must be a live handle, `labels` must hold one label per row and
// `out` must be writable.
enum FfcStatus ffc_silhouette(const struct FfcData *data, const uint32_t *labels, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FORESTFIRE_H */
