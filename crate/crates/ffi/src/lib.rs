//! C ABI over the `qfs` library.
//!
//! Objects cross the boundary as opaque handles created by `qfs_*_new`-style
//! constructors and released with the matching `qfs_*_free`. Every fallible
//! function returns a [`QfsStatus`]; on failure the message is available from
//! [`qfs_last_error_message`] on the same thread until the next failing call.
//! Panics are caught and reported as [`QfsStatus::Panic`].
//!
//! Arrays are passed as pointer plus length. Matrices are dense `n×n`
//! row-major. Bit vectors are `uint8_t` arrays of 0/1.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qfs::data::{self, LabelColumn, SynthSpec};
use qfs::qubo::{self, ExportFormat};
use qfs::selection::Threshold;
use qfs::solve::{self, AnnealingParams, SolverConfig, SolverKind, TabuParams};
use qfs::{
    Dataset, ImportanceVector, MuPolicy, MutualInformation, QfsError, QuboInstance,
    RedundancyMatrix,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QfsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Malformed = 4,
    TooLarge = 5,
    UnreachableK = 6,
    NonMonotone = 7,
    BufferTooSmall = 8,
    Numerical = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QfsSolverKind {
    Exhaustive = 0,
    Annealing = 1,
    TabuDecomposition = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QfsMuPolicy {
    /// μ is the largest entry of `Q(α)` before substitution.
    MaxEntry = 0,
    /// μ is the supplied value.
    Fixed = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QfsExportFormat {
    Json = 0,
    CoordinateList = 1,
}

/// Solver settings; obtain defaults from [`qfs_solver_config_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfsSolverConfig {
    pub kind: QfsSolverKind,
    pub shots: usize,
    pub seed: u64,
    pub sweeps: usize,
    pub subproblem_size: usize,
    pub tenure: usize,
    pub stall_rounds: usize,
}

pub struct QfsDataset(Dataset);

pub struct QfsMutualInformation(MutualInformation);

pub struct QfsQubo(QuboInstance);

struct Failure {
    status: QfsStatus,
    message: String,
}

impl Failure {
    fn new(status: QfsStatus, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }
}

impl From<QfsError> for Failure {
    fn from(e: QfsError) -> Self {
        let status = match &e {
            QfsError::Io { .. } => QfsStatus::Io,
            QfsError::Csv { .. }
            | QfsError::UnparseableCell { .. }
            | QfsError::MissingLabelColumn(_)
            | QfsError::Malformed(_) => QfsStatus::Malformed,
            QfsError::InvalidArgument(_)
            | QfsError::DimensionMismatch { .. }
            | QfsError::IndexOutOfRange { .. } => QfsStatus::InvalidArgument,
            QfsError::TooLarge { .. } => QfsStatus::TooLarge,
            QfsError::NotPositiveDefinite(_) => QfsStatus::Numerical,
            QfsError::UnreachableK { .. } => QfsStatus::UnreachableK,
            QfsError::NonMonotone { .. } => QfsStatus::NonMonotone,
        };
        let mut message = e.to_string();
        if let QfsError::Io { source, .. } = &e {
            message = format!("{message}: {source}");
        }
        Failure::new(status, message)
    }
}

type FfiResult<T = ()> = Result<T, Failure>;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).expect("interior nuls removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
}

fn guard(body: impl FnOnce() -> FfiResult) -> QfsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => QfsStatus::Ok,
        Ok(Err(f)) => {
            set_last_error(&f.message);
            f.status
        }
        Err(payload) => {
            let what = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("panic: {what}"));
            QfsStatus::Panic
        }
    }
}

fn null(name: &str) -> Failure {
    Failure::new(QfsStatus::NullPointer, format!("{name} is null"))
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, name: &str) -> FfiResult<&'a [T]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, name: &str) -> FfiResult<&'a mut [T]> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn string<'a>(p: *const c_char, name: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(QfsStatus::InvalidArgument, format!("{name} is not UTF-8")))
}

unsafe fn write_out<T>(out: *mut *mut T, value: T, name: &str) -> FfiResult {
    if out.is_null() {
        return Err(null(name));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn check_len(len: usize, needed: usize, name: &str) -> FfiResult {
    if len < needed {
        return Err(Failure::new(
            QfsStatus::BufferTooSmall,
            format!("{name} holds {len} values, {needed} needed"),
        ));
    }
    Ok(())
}

/// Message of the last failure on this thread, or null if none occurred. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qfs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qfs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---------------------------------------------------------------- datasets

/// Loads a headered CSV. `label` names the label column by header or
/// 0-based index; null selects the last column.
///
/// # Safety
/// `path` and a non-null `label` must be nul-terminated strings; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn qfs_dataset_load_csv(
    path: *const c_char,
    label: *const c_char,
    out: *mut *mut QfsDataset,
) -> QfsStatus {
    guard(|| {
        let path = string(path, "path")?;
        let label = if label.is_null() {
            LabelColumn::Last
        } else {
            string(label, "label")?
                .parse()
                .expect("label parsing is infallible")
        };
        let d = data::load_csv(path, &label)?;
        write_out(out, QfsDataset(d), "out")
    })
}

/// Generates a synthetic dataset. When `informative` is non-null its first
/// `d_inf` entries receive the informative feature indices.
///
/// # Safety
/// `out` must be writable; a non-null `informative` must hold `d_inf` values.
#[no_mangle]
pub unsafe extern "C" fn qfs_dataset_gen_synth(
    n: usize,
    d_inf: usize,
    n_samples: usize,
    seed: u64,
    out: *mut *mut QfsDataset,
    informative: *mut usize,
) -> QfsStatus {
    guard(|| {
        let spec = SynthSpec::new(n, d_inf, n_samples, seed)?;
        let (d, truth) = data::gen_synth(&spec)?;
        if !informative.is_null() {
            slice_mut(informative, d_inf, "informative")?.copy_from_slice(&truth);
        }
        write_out(out, QfsDataset(d), "out")
    })
}

/// # Safety
/// `d` must be a live dataset handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn qfs_dataset_n_features(d: *const QfsDataset) -> usize {
    d.as_ref().map_or(0, |d| d.0.n_features())
}

/// # Safety
/// `d` must be a live dataset handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn qfs_dataset_n_samples(d: *const QfsDataset) -> usize {
    d.as_ref().map_or(0, |d| d.0.n_samples())
}

/// # Safety
/// `d` must come from this library and not have been freed; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qfs_dataset_free(d: *mut QfsDataset) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

// ----------------------------------------------------- mutual information

/// Bins every feature into `n_bins` quantile bins and measures importance
/// and redundancy.
///
/// # Safety
/// `d` must be a live dataset handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qfs_mi_compute(
    d: *const QfsDataset,
    n_bins: usize,
    out: *mut *mut QfsMutualInformation,
) -> QfsStatus {
    guard(|| {
        let d = deref(d, "dataset")?;
        let binned = data::discretize(&d.0, n_bins)?;
        write_out(
            out,
            QfsMutualInformation(MutualInformation::compute(&binned)),
            "out",
        )
    })
}

/// Wraps caller-supplied importance (`n` values) and redundancy (`n×n`).
///
/// # Safety
/// `importance` must hold `n` values and `redundancy` `n*n`; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn qfs_mi_from_arrays(
    n: usize,
    importance: *const f64,
    redundancy: *const f64,
    out: *mut *mut QfsMutualInformation,
) -> QfsStatus {
    guard(|| {
        let imp = slice(importance, n, "importance")?.to_vec();
        let red = slice(redundancy, n * n, "redundancy")?.to_vec();
        let mi =
            MutualInformation::new(ImportanceVector(imp), RedundancyMatrix::from_dense(n, red)?)?;
        write_out(out, QfsMutualInformation(mi), "out")
    })
}

/// # Safety
/// `mi` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn qfs_mi_n(mi: *const QfsMutualInformation) -> usize {
    mi.as_ref().map_or(0, |m| m.0.n())
}

/// Copies the `n` importance values into `out`.
///
/// # Safety
/// `mi` must be a live handle; `out` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn qfs_mi_importance(
    mi: *const QfsMutualInformation,
    out: *mut f64,
    len: usize,
) -> QfsStatus {
    guard(|| {
        let mi = deref(mi, "mi")?;
        let n = mi.0.n();
        check_len(len, n, "out")?;
        slice_mut(out, n, "out")?.copy_from_slice(mi.0.importance.values());
        Ok(())
    })
}

/// Copies the `n×n` redundancy matrix into `out`, row-major.
///
/// # Safety
/// `mi` must be a live handle; `out` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn qfs_mi_redundancy(
    mi: *const QfsMutualInformation,
    out: *mut f64,
    len: usize,
) -> QfsStatus {
    guard(|| {
        let mi = deref(mi, "mi")?;
        let n = mi.0.n();
        check_len(len, n * n, "out")?;
        slice_mut(out, n * n, "out")?.copy_from_slice(mi.0.redundancy.as_slice());
        Ok(())
    })
}

/// # Safety
/// `mi` must come from this library and not have been freed; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qfs_mi_free(mi: *mut QfsMutualInformation) {
    if !mi.is_null() {
        drop(Box::from_raw(mi));
    }
}

// ------------------------------------------------------------------ QUBOs

fn mu_policy(policy: QfsMuPolicy, mu: f64) -> MuPolicy {
    match policy {
        QfsMuPolicy::MaxEntry => MuPolicy::MaxEntry,
        QfsMuPolicy::Fixed => MuPolicy::Fixed(mu),
    }
}

/// `Q(α)` without the ε/μ substitution.
///
/// # Safety
/// `mi` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qfs_qubo_build(
    mi: *const QfsMutualInformation,
    alpha: f64,
    out: *mut *mut QfsQubo,
) -> QfsStatus {
    guard(|| {
        let mi = deref(mi, "mi")?;
        let q = qubo::build(&mi.0.importance, &mi.0.redundancy, alpha)?;
        write_out(out, QfsQubo(q), "out")
    })
}

/// `Q(α)` with every diagonal whose `α·Iᵢ < epsilon` replaced by μ. `mu` is
/// read only for [`QfsMuPolicy::Fixed`].
///
/// # Safety
/// `mi` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qfs_qubo_build_thresholded(
    mi: *const QfsMutualInformation,
    alpha: f64,
    epsilon: f64,
    policy: QfsMuPolicy,
    mu: f64,
    out: *mut *mut QfsQubo,
) -> QfsStatus {
    guard(|| {
        let mi = deref(mi, "mi")?;
        let q = qubo::build_with_threshold(
            &mi.0.importance,
            &mi.0.redundancy,
            alpha,
            epsilon,
            mu_policy(policy, mu),
        )?;
        write_out(out, QfsQubo(q), "out")
    })
}

/// A QUBO from a symmetric dense `n×n` matrix and constant offset.
///
/// # Safety
/// `values` must hold `n*n` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qfs_qubo_from_dense(
    n: usize,
    values: *const f64,
    offset: f64,
    out: *mut *mut QfsQubo,
) -> QfsStatus {
    guard(|| {
        let v = slice(values, n * n, "values")?.to_vec();
        let q = QuboInstance::from_dense(n, v)?.with_offset(offset);
        write_out(out, QfsQubo(q), "out")
    })
}

/// # Safety
/// `q` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn qfs_qubo_n(q: *const QfsQubo) -> usize {
    q.as_ref().map_or(0, |q| q.0.n())
}

/// `xᵀQx + offset`.
///
/// # Safety
/// `q` must be a live handle, `x` must hold `len` bytes, `energy` writable.
#[no_mangle]
pub unsafe extern "C" fn qfs_qubo_energy(
    q: *const QfsQubo,
    x: *const u8,
    len: usize,
    energy: *mut f64,
) -> QfsStatus {
    guard(|| {
        let q = deref(q, "qubo")?;
        let e = q.0.energy(slice(x, len, "x")?)?;
        *energy.as_mut().ok_or_else(|| null("energy"))? = e;
        Ok(())
    })
}

/// Ising form over spins `s = 1 − 2x`: couplings `a` (symmetric `n×n`, zero
/// diagonal, each unordered pair counted once), fields `b` and offset `c`.
///
/// # Safety
/// `q` must be a live handle; `a` must hold `a_len` values, `b` `b_len`, and
/// `c` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qfs_qubo_to_ising(
    q: *const QfsQubo,
    a: *mut f64,
    a_len: usize,
    b: *mut f64,
    b_len: usize,
    c: *mut f64,
) -> QfsStatus {
    guard(|| {
        let q = deref(q, "qubo")?;
        let n = q.0.n();
        check_len(a_len, n * n, "a")?;
        check_len(b_len, n, "b")?;
        let ising = q.0.to_ising();
        slice_mut(a, n * n, "a")?.copy_from_slice(&ising.a);
        slice_mut(b, n, "b")?.copy_from_slice(&ising.b);
        *c.as_mut().ok_or_else(|| null("c"))? = ising.c;
        Ok(())
    })
}

fn export_format(f: QfsExportFormat) -> ExportFormat {
    match f {
        QfsExportFormat::Json => ExportFormat::Json,
        QfsExportFormat::CoordinateList => ExportFormat::CoordinateList,
    }
}

/// Serializes the QUBO; release the string with [`qfs_string_free`].
///
/// # Safety
/// `q` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qfs_qubo_export(
    q: *const QfsQubo,
    format: QfsExportFormat,
    out: *mut *mut c_char,
) -> QfsStatus {
    guard(|| {
        let q = deref(q, "qubo")?;
        let text = CString::new(q.0.export(export_format(format))).expect("no nul in output");
        *out.as_mut().ok_or_else(|| null("out"))? = text.into_raw();
        Ok(())
    })
}

/// Parses text written by [`qfs_qubo_export`].
///
/// # Safety
/// `text` must be nul-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qfs_qubo_import(
    text: *const c_char,
    format: QfsExportFormat,
    out: *mut *mut QfsQubo,
) -> QfsStatus {
    guard(|| {
        let q = QuboInstance::import(string(text, "text")?, export_format(format))?;
        write_out(out, QfsQubo(q), "out")
    })
}

/// # Safety
/// `q` must come from this library and not have been freed; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qfs_qubo_free(q: *mut QfsQubo) {
    if !q.is_null() {
        drop(Box::from_raw(q));
    }
}

// ---------------------------------------------------------------- solving

/// Library defaults for `kind`.
#[no_mangle]
pub extern "C" fn qfs_solver_config_default(kind: QfsSolverKind) -> QfsSolverConfig {
    let cfg = SolverConfig::new(solver_kind(kind));
    QfsSolverConfig {
        kind,
        shots: cfg.shots,
        seed: cfg.seed,
        sweeps: cfg.annealing.sweeps,
        subproblem_size: cfg.tabu.subproblem_size,
        tenure: cfg.tabu.tenure,
        stall_rounds: cfg.tabu.stall_rounds,
    }
}

fn solver_kind(kind: QfsSolverKind) -> SolverKind {
    match kind {
        QfsSolverKind::Exhaustive => SolverKind::Exhaustive,
        QfsSolverKind::Annealing => SolverKind::Annealing,
        QfsSolverKind::TabuDecomposition => SolverKind::TabuDecomposition,
    }
}

/// The subproblem size is capped at the instance size.
fn solver_config(c: &QfsSolverConfig, n: usize) -> SolverConfig {
    SolverConfig {
        kind: solver_kind(c.kind),
        shots: c.shots,
        seed: c.seed,
        annealing: AnnealingParams {
            sweeps: c.sweeps,
            ..AnnealingParams::default()
        },
        tabu: TabuParams {
            tenure: c.tenure,
            subproblem_size: c.subproblem_size.min(n),
            stall_rounds: c.stall_rounds,
            ..TabuParams::default()
        },
    }
}

/// Solves and reports the lowest-energy state over all shots.
///
/// # Safety
/// `q` and `config` must be valid; `best_x` must hold `len` bytes and
/// `best_energy` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qfs_qubo_solve(
    q: *const QfsQubo,
    config: *const QfsSolverConfig,
    best_x: *mut u8,
    len: usize,
    best_energy: *mut f64,
) -> QfsStatus {
    guard(|| {
        let q = deref(q, "qubo")?;
        let cfg = solver_config(deref(config, "config")?, q.0.n());
        check_len(len, q.0.n(), "best_x")?;
        let set = solve::solve(&q.0, &cfg)?;
        let best = set.best();
        slice_mut(best_x, q.0.n(), "best_x")?.copy_from_slice(&best.x);
        *best_energy.as_mut().ok_or_else(|| null("best_energy"))? = best.energy;
        Ok(())
    })
}

/// Searches α for a minimizer with exactly `k` features. On success writes
/// the α found and the selection bit vector.
///
/// # Safety
/// `mi` and `config` must be valid; `x` must hold `len` bytes and `alpha`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn qfs_select_k(
    mi: *const QfsMutualInformation,
    k: usize,
    config: *const QfsSolverConfig,
    epsilon: f64,
    policy: QfsMuPolicy,
    mu: f64,
    alpha: *mut f64,
    x: *mut u8,
    len: usize,
) -> QfsStatus {
    guard(|| {
        let mi = deref(mi, "mi")?;
        let n = mi.0.n();
        let cfg = solver_config(deref(config, "config")?, n);
        check_len(len, n, "x")?;
        let threshold = Threshold {
            epsilon,
            mu: mu_policy(policy, mu),
        };
        let r = qfs::select_k(&mi.0.importance, &mi.0.redundancy, k, &cfg, &threshold)?;
        slice_mut(x, n, "x")?.copy_from_slice(&r.x_star);
        *alpha.as_mut().ok_or_else(|| null("alpha"))? = r.alpha_star;
        Ok(())
    })
}
