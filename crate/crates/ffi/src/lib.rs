//! C interface to `forestfire`.
//!
//! Objects are exposed as opaque handles created by `ffc_*_new`-style
//! functions and released with the matching `ffc_*_free`. Every fallible
//! function returns an [`FfcStatus`]; on failure a description is available
//! from [`ffc_last_error_message`] on the same thread. Results are written
//! through out-pointers, and arrays are copied into caller-owned buffers whose
//! length the caller states.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use forestfire::{
    adjusted_rand_index, cluster, online_assign, purity, silhouette, validate, AffinityGraph,
    ClusterResult, DataMatrix, Error, FireParams, KernelSpec, ValidationReport,
};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FfcStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Input data or labels are malformed.
    InvalidInput = 2,
    /// A numeric parameter is out of range.
    InvalidParameter = 3,
    /// Arguments violate an operation's preconditions.
    ContractViolation = 4,
    /// The requested metric is undefined for the input.
    MetricUndefined = 5,
    /// A caller buffer is too small.
    BufferTooSmall = 6,
    /// Unexpected internal failure.
    Internal = 7,
}

/// Values for [`FfcKernel::kind`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FfcKernelKind {
    Gaussian = 0,
    Adaptive = 1,
}

/// Kernel description: `kind` is an [`FfcKernelKind`] value; `sigma` is
/// used by the Gaussian kernel, `k` and `alpha` by the adaptive one.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FfcKernel {
    pub kind: u32,
    pub sigma: f64,
    pub k: usize,
    pub alpha: f64,
}

impl FfcKernel {
    fn spec(&self) -> Result<KernelSpec, Failure> {
        match self.kind {
            k if k == FfcKernelKind::Gaussian as u32 => {
                Ok(KernelSpec::Gaussian { sigma: self.sigma })
            }
            k if k == FfcKernelKind::Adaptive as u32 => Ok(KernelSpec::Adaptive {
                k: self.k,
                alpha: self.alpha,
            }),
            other => Err(Failure(
                FfcStatus::InvalidParameter,
                format!("unknown kernel kind {other}"),
            )),
        }
    }
}

/// Row-major data matrix.
pub struct FfcData(DataMatrix);
/// Affinity graph with degrees and thresholds.
pub struct FfcGraph(AffinityGraph);
/// Cluster labels plus heat trace.
pub struct FfcClustering(ClusterResult);
/// Monte Carlo validation report.
pub struct FfcReport(ValidationReport);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).unwrap_or_default());
}

struct Failure(FfcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Validation(_) | Error::Parse { .. } | Error::Io { .. } => {
                FfcStatus::InvalidInput
            }
            Error::Parameter { .. } => FfcStatus::InvalidParameter,
            Error::Contract(_) => FfcStatus::ContractViolation,
            Error::MetricUndefined(_) => FfcStatus::MetricUndefined,
        };
        Failure(status, e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(FfcStatus::NullPointer, format!("`{name}` is null"))
}

/// Runs `body`, converting errors and panics into a status code and the
/// thread's last-error message.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> FfcStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            FfcStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            FfcStatus::Internal
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    // SAFETY: the caller guarantees `p` is null or a live handle/value.
    unsafe { p.as_ref() }.ok_or_else(|| null(name))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    // SAFETY: the caller guarantees `p` points to `len` readable elements.
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    // SAFETY: `out` is non-null and the caller guarantees it is writable.
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

unsafe fn copy_into<T: Copy>(src: &[T], dst: *mut T, capacity: usize) -> Result<(), Failure> {
    if capacity < src.len() {
        return Err(Failure(
            FfcStatus::BufferTooSmall,
            format!("buffer holds {capacity} elements, {} needed", src.len()),
        ));
    }
    if src.is_empty() {
        return Ok(());
    }
    if dst.is_null() {
        return Err(null("buffer"));
    }
    // SAFETY: `dst` has room for `capacity >= src.len()` elements.
    unsafe { ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len()) };
    Ok(())
}

unsafe fn free_handle<T>(p: *mut T) {
    if !p.is_null() {
        // SAFETY: `p` came from `Box::into_raw` in this library.
        drop(unsafe { Box::from_raw(p) });
    }
}

/// Message for the most recent failure on the calling thread (empty after a
/// success). The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn ffc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a NUL-terminated string.
#[no_mangle]
pub extern "C" fn ffc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies an `n × m` row-major array into a new data handle.
///
/// # Safety
/// `values` must point to `n * m` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ffc_data_new(
    values: *const f64,
    n: usize,
    m: usize,
    out: *mut *mut FfcData,
) -> FfcStatus {
    guard(|| {
        let len = n
            .checked_mul(m)
            .ok_or_else(|| Failure(FfcStatus::InvalidInput, "n * m overflows".into()))?;
        let values = unsafe { slice(values, len, "values") }?.to_vec();
        let data = DataMatrix::new(values, n, m)?;
        unsafe { write_out(out, FfcData(data)) }
    })
}

/// # Safety
/// `data` must be null or a handle from [`ffc_data_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ffc_data_free(data: *mut FfcData) {
    unsafe { free_handle(data) }
}

/// Builds the affinity graph of `data` under `kernel`.
///
/// # Safety
/// `data` and `kernel` must be valid pointers; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ffc_graph_new(
    data: *const FfcData,
    kernel: *const FfcKernel,
    out: *mut *mut FfcGraph,
) -> FfcStatus {
    guard(|| {
        let data = unsafe { as_ref(data, "data") }?;
        let kernel = unsafe { as_ref(kernel, "kernel") }?;
        let graph = kernel.spec()?.build(&data.0)?;
        unsafe { write_out(out, FfcGraph(graph)) }
    })
}

/// # Safety
/// `graph` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn ffc_graph_free(graph: *mut FfcGraph) {
    unsafe { free_handle(graph) }
}

/// Number of vertices, or 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn ffc_graph_len(graph: *const FfcGraph) -> usize {
    unsafe { graph.as_ref() }.map_or(0, |g| g.0.len())
}

/// Copies the per-vertex acceptance thresholds (`+inf` for isolated vertices).
///
/// # Safety
/// `graph` must be a live handle; `out` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn ffc_graph_thresholds(
    graph: *const FfcGraph,
    out: *mut f64,
    capacity: usize,
) -> FfcStatus {
    guard(|| {
        let graph = unsafe { as_ref(graph, "graph") }?;
        unsafe { copy_into(graph.0.thresholds(), out, capacity) }
    })
}

/// Clusters every vertex of `graph` with fire temperature `c`.
///
/// # Safety
/// `graph` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ffc_cluster(
    graph: *const FfcGraph,
    c: f64,
    rng_seed: u64,
    out: *mut *mut FfcClustering,
) -> FfcStatus {
    guard(|| {
        let graph = unsafe { as_ref(graph, "graph") }?;
        let result = cluster(&graph.0, FireParams::new(c, rng_seed)?)?;
        unsafe { write_out(out, FfcClustering(result)) }
    })
}

/// # Safety
/// `result` must be null or a live clustering handle.
#[no_mangle]
pub unsafe extern "C" fn ffc_clustering_free(result: *mut FfcClustering) {
    unsafe { free_handle(result) }
}

/// Number of labeled points, or 0 for a null handle.
///
/// # Safety
/// `result` must be null or a live clustering handle.
#[no_mangle]
pub unsafe extern "C" fn ffc_clustering_len(result: *const FfcClustering) -> usize {
    unsafe { result.as_ref() }.map_or(0, |r| r.0.labels.len())
}

/// Number of clusters (ids run 1..=count), or 0 for a null handle.
///
/// # Safety
/// `result` must be null or a live clustering handle.
#[no_mangle]
pub unsafe extern "C" fn ffc_clustering_num_clusters(result: *const FfcClustering) -> u32 {
    unsafe { result.as_ref() }.map_or(0, |r| r.0.num_clusters)
}

/// Copies the labels (one per point, ids starting at 1).
///
/// # Safety
/// `result` must be a live handle; `out` must hold `capacity` values.
#[no_mangle]
pub unsafe extern "C" fn ffc_clustering_labels(
    result: *const FfcClustering,
    out: *mut u32,
    capacity: usize,
) -> FfcStatus {
    guard(|| {
        let result = unsafe { as_ref(result, "result") }?;
        unsafe { copy_into(&result.0.labels, out, capacity) }
    })
}

/// Copies the heat trace in labeling order: vertex index, cluster id and
/// heat at acceptance (`+inf` for seeds). Each buffer needs one slot per point;
/// any of them may be null to skip it.
///
/// # Safety
/// `result` must be a live handle; non-null buffers must hold `capacity` values.
#[no_mangle]
pub unsafe extern "C" fn ffc_clustering_trace(
    result: *const FfcClustering,
    vertices: *mut usize,
    clusters: *mut u32,
    heats: *mut f64,
    capacity: usize,
) -> FfcStatus {
    guard(|| {
        let result = unsafe { as_ref(result, "result") }?;
        let entries = result.0.trace.entries();
        let v: Vec<usize> = entries.iter().map(|e| e.vertex).collect();
        let c: Vec<u32> = entries.iter().map(|e| e.cluster).collect();
        let h: Vec<f64> = entries.iter().map(|e| e.heat).collect();
        if !vertices.is_null() {
            unsafe { copy_into(&v, vertices, capacity) }?;
        }
        if !clusters.is_null() {
            unsafe { copy_into(&c, clusters, capacity) }?;
        }
        if !heats.is_null() {
            unsafe { copy_into(&h, heats, capacity) }?;
        }
        Ok(())
    })
}

/// Monte Carlo validation of `result` on `graph`.
///
/// # Safety
/// `graph` and `result` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ffc_validate(
    graph: *const FfcGraph,
    result: *const FfcClustering,
    trials: u32,
    rng_seed: u64,
    out: *mut *mut FfcReport,
) -> FfcStatus {
    guard(|| {
        let graph = unsafe { as_ref(graph, "graph") }?;
        let result = unsafe { as_ref(result, "result") }?;
        let report = validate(&graph.0, &result.0, trials, rng_seed)?;
        unsafe { write_out(out, FfcReport(report)) }
    })
}

/// # Safety
/// `report` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn ffc_report_free(report: *mut FfcReport) {
    unsafe { free_handle(report) }
}

/// Number of points in the report, or 0 for a null handle.
///
/// # Safety
/// `report` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn ffc_report_len(report: *const FfcReport) -> usize {
    unsafe { report.as_ref() }.map_or(0, |r| r.0.points.len())
}

/// Copies per-point statistics: `p_value` (unreached trials count as
/// mismatches), `posterior_p_value` (over reaching trials only), entropy in
/// nats and coverage. Any buffer may be null to skip it.
///
/// # Safety
/// `report` must be a live handle; non-null buffers must hold `capacity` values.
#[no_mangle]
pub unsafe extern "C" fn ffc_report_points(
    report: *const FfcReport,
    p_values: *mut f64,
    posterior_p_values: *mut f64,
    entropies: *mut f64,
    coverage: *mut u32,
    capacity: usize,
) -> FfcStatus {
    guard(|| {
        let points = &unsafe { as_ref(report, "report") }?.0.points;
        let p: Vec<f64> = points.iter().map(|x| x.p_value).collect();
        let q: Vec<f64> = points.iter().map(|x| x.posterior_p_value).collect();
        let h: Vec<f64> = points.iter().map(|x| x.entropy).collect();
        let k: Vec<u32> = points.iter().map(|x| x.coverage).collect();
        if !p_values.is_null() {
            unsafe { copy_into(&p, p_values, capacity) }?;
        }
        if !posterior_p_values.is_null() {
            unsafe { copy_into(&q, posterior_p_values, capacity) }?;
        }
        if !entropies.is_null() {
            unsafe { copy_into(&h, entropies, capacity) }?;
        }
        if !coverage.is_null() {
            unsafe { copy_into(&k, coverage, capacity) }?;
        }
        Ok(())
    })
}

/// Writes `1` where `p_value <= alpha`, else `0`.
///
/// # Safety
/// `report` must be a live handle; `out` must hold `capacity` bytes.
#[no_mangle]
pub unsafe extern "C" fn ffc_report_significant(
    report: *const FfcReport,
    alpha: f64,
    out: *mut u8,
    capacity: usize,
) -> FfcStatus {
    guard(|| {
        let report = unsafe { as_ref(report, "report") }?;
        let mask: Vec<u8> = forestfire::significant_mask(&report.0, alpha)
            .into_iter()
            .map(u8::from)
            .collect();
        unsafe { copy_into(&mask, out, capacity) }
    })
}

/// Assigns the rows of `new_points` in order, given a labeled training set.
/// `labels_out` receives one label per new point; `novel_out` (may be null)
/// receives `1` where the label is a cluster opened for the stream.
///
/// # Safety
/// Handles must be live; `train_labels` must hold one label per training
/// row; non-null buffers must hold `capacity` values.
#[no_mangle]
pub unsafe extern "C" fn ffc_online_assign(
    train: *const FfcData,
    train_labels: *const u32,
    new_points: *const FfcData,
    kernel: *const FfcKernel,
    c: f64,
    labels_out: *mut u32,
    novel_out: *mut u8,
    capacity: usize,
) -> FfcStatus {
    guard(|| {
        let train = unsafe { as_ref(train, "train") }?;
        let new_points = unsafe { as_ref(new_points, "new_points") }?;
        let kernel = unsafe { as_ref(kernel, "kernel") }?;
        let labels = unsafe { slice(train_labels, train.0.nrows(), "train_labels") }?;
        let out = online_assign(&train.0, labels, &new_points.0, kernel.spec()?, c)?;
        unsafe { copy_into(&out.labels, labels_out, capacity) }?;
        if !novel_out.is_null() {
            let novel: Vec<u8> = out.novel.iter().map(|&b| u8::from(b)).collect();
            unsafe { copy_into(&novel, novel_out, capacity) }?;
        }
        Ok(())
    })
}

unsafe fn metric(
    pred: *const u32,
    truth: *const u32,
    n: usize,
    out: *mut f64,
    f: fn(&[u32], &[u32]) -> forestfire::Result<f64>,
) -> FfcStatus {
    guard(|| {
        let pred = unsafe { slice(pred, n, "pred") }?;
        let truth = unsafe { slice(truth, n, "truth") }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let value = f(pred, truth)?;
        // SAFETY: checked non-null above.
        unsafe { *out = value };
        Ok(())
    })
}

/// Purity of `pred` against `truth`.
///
/// # Safety
/// `pred` and `truth` must hold `n` labels; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ffc_purity(
    pred: *const u32,
    truth: *const u32,
    n: usize,
    out: *mut f64,
) -> FfcStatus {
    unsafe { metric(pred, truth, n, out, purity) }
}

/// Adjusted Rand index between `pred` and `truth`.
///
/// # Safety
/// `pred` and `truth` must hold `n` labels; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ffc_adjusted_rand_index(
    pred: *const u32,
    truth: *const u32,
    n: usize,
    out: *mut f64,
) -> FfcStatus {
    unsafe { metric(pred, truth, n, out, adjusted_rand_index) }
}

/// Mean Euclidean silhouette of `labels` (one per row of `data`).
///
/// # Safety
/// `data` must be a live handle, `labels` must hold one label per row and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ffc_silhouette(
    data: *const FfcData,
    labels: *const u32,
    out: *mut f64,
) -> FfcStatus {
    guard(|| {
        let data = unsafe { as_ref(data, "data") }?;
        let labels = unsafe { slice(labels, data.0.nrows(), "labels") }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let value = silhouette(&data.0, labels)?;
        // SAFETY: checked non-null above.
        unsafe { *out = value };
        Ok(())
    })
}
