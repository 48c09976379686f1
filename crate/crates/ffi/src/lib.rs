//! C ABI over `hom_negativity`.
//!
//! States are opaque `HomState` handles created by the `hom_state_*`
//! constructors and released with [`hom_state_free`]. Every fallible function
//! returns a [`HomStatus`]; on failure [`hom_last_error_message`] describes the
//! error on the calling thread. Output pointers are written only on success.
//!
//! Density matrices cross the boundary as 32 doubles, row-major, each entry as
//! `(re, im)`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hom_negativity::generators::{bell, random_mixed, random_pure, werner};
use hom_negativity::interferometer::{
    outcome_distribution, run_pipeline, sample, ConfigId, Configuration, PipelineOptions,
    DEFAULT_BATCH_SIZE,
};
use hom_negativity::invariants::{invariants_from_decomposition, invariants_from_g};
use hom_negativity::multicopy::{g_exact, g_table};
use hom_negativity::negativity::{coeffs_from_g, solve_negativity, witness, WitnessObservables};
use hom_negativity::qstate::{negativity_oracle, pauli_decompose, CMatrix4, DensityMatrix};
use hom_negativity::{BellKind, Error, Pairing};
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomStatus {
    Ok = 0,
    InvalidState = 1,
    InvalidParameter = 2,
    InvalidPairing = 3,
    AmbiguousRoots = 4,
    InvalidZ = 5,
    UnknownConfiguration = 6,
    MissingObservable = 7,
    Io = 8,
    Parse = 9,
    NullPointer = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomBell {
    PsiPlus = 0,
    PsiMinus = 1,
    PhiPlus = 2,
    PhiMinus = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomInvariantPath {
    Decomposition = 0,
    Multicopy = 1,
}

/// Summary of one sampled pipeline run.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HomSimulation {
    pub negativity: f64,
    pub negativity_std: f64,
    pub det_pt: f64,
    pub det_pt_std: f64,
    pub entangled: bool,
    pub ambiguous: bool,
}

/// Opaque validated two-qubit density matrix.
pub struct HomState(DensityMatrix);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> HomStatus {
    match e {
        Error::InvalidState(_) => HomStatus::InvalidState,
        Error::InvalidParameter(_) => HomStatus::InvalidParameter,
        Error::InvalidPairing(_) => HomStatus::InvalidPairing,
        Error::AmbiguousRoots { .. } => HomStatus::AmbiguousRoots,
        Error::InvalidZ(_) => HomStatus::InvalidZ,
        Error::UnknownConfiguration(_) => HomStatus::UnknownConfiguration,
        Error::MissingObservable(_) => HomStatus::MissingObservable,
        Error::Io(_) => HomStatus::Io,
        Error::Json(_) | Error::Csv(_) => HomStatus::Parse,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> HomStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HomStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            HomStatus::NullPointer
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            HomStatus::Panic
        }
    }
}

unsafe fn state_ref<'a>(state: *const HomState) -> Result<&'a DensityMatrix, Failure> {
    state.as_ref().map(|s| &s.0).ok_or(Failure::Null("state"))
}

unsafe fn out_slice<'a, T>(
    ptr: *mut T,
    len: usize,
    what: &'static str,
) -> Result<&'a mut [T], Failure> {
    if ptr.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts_mut(ptr, len))
}

unsafe fn emit_state(rho: DensityMatrix, out: *mut *mut HomState) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    *out = Box::into_raw(Box::new(HomState(rho)));
    Ok(())
}

fn config_from_char(c: c_char) -> Result<ConfigId, Failure> {
    let s = char::from(c as u8).to_string();
    Ok(s.parse::<ConfigId>()?)
}

/// Builds a state from 32 doubles; the matrix must be Hermitian, unit-trace
/// and positive semidefinite.
///
/// # Safety
/// `entries` must point to 32 readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hom_state_from_matrix(
    entries: *const f64,
    out: *mut *mut HomState,
) -> HomStatus {
    guard(|| {
        if entries.is_null() {
            return Err(Failure::Null("entries"));
        }
        let e = std::slice::from_raw_parts(entries, 32);
        let m =
            CMatrix4::from_fn(|r, c| Complex64::new(e[2 * (4 * r + c)], e[2 * (4 * r + c) + 1]));
        emit_state(DensityMatrix::validate(m)?, out)
    })
}

/// Parses the JSON state-file format `{"matrix": [[[re, im], ...], ...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hom_state_from_json(
    json: *const c_char,
    out: *mut *mut HomState,
) -> HomStatus {
    guard(|| {
        if json.is_null() {
            return Err(Failure::Null("json"));
        }
        let s = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| Error::InvalidParameter("state JSON is not UTF-8".into()))?;
        emit_state(DensityMatrix::from_json(s)?, out)
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hom_state_bell(kind: HomBell, out: *mut *mut HomState) -> HomStatus {
    guard(|| {
        let k = match kind {
            HomBell::PsiPlus => BellKind::PsiPlus,
            HomBell::PsiMinus => BellKind::PsiMinus,
            HomBell::PhiPlus => BellKind::PhiPlus,
            HomBell::PhiMinus => BellKind::PhiMinus,
        };
        emit_state(bell(k), out)
    })
}

/// `p |Psi-><Psi-| + (1 - p) I/4`, `p` in `[0, 1]`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hom_state_werner(p: f64, out: *mut *mut HomState) -> HomStatus {
    guard(|| emit_state(werner(p)?, out))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hom_state_random_pure(seed: u64, out: *mut *mut HomState) -> HomStatus {
    guard(|| emit_state(random_pure(seed), out))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hom_state_random_mixed(seed: u64, out: *mut *mut HomState) -> HomStatus {
    guard(|| emit_state(random_mixed(seed), out))
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `state` must come from a `hom_state_*` constructor and not be used again.
#[no_mangle]
pub unsafe extern "C" fn hom_state_free(state: *mut HomState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// # Safety
/// `state` must be a live handle; `out` must hold 32 doubles.
#[no_mangle]
pub unsafe extern "C" fn hom_state_matrix(state: *const HomState, out: *mut f64) -> HomStatus {
    guard(|| {
        let rho = state_ref(state)?;
        let out = out_slice(out, 32, "out")?;
        for r in 0..4 {
            for c in 0..4 {
                let z = rho.entry(r, c);
                out[2 * (4 * r + c)] = z.re;
                out[2 * (4 * r + c) + 1] = z.im;
            }
        }
        Ok(())
    })
}

/// The 13 canonical observables in field order
/// `g12 g13 g14 g24 g13_24 g13_46 g14_23 g14_36 g14_36_52 g13_46_57
/// g24_35_68 g13_46_57_28 g14_36_58`.
///
/// # Safety
/// `state` must be a live handle; `out` must hold 13 doubles.
#[no_mangle]
pub unsafe extern "C" fn hom_g_table(state: *const HomState, out: *mut f64) -> HomStatus {
    guard(|| {
        let g = g_table(state_ref(state)?);
        out_slice(out, 13, "out")?.copy_from_slice(&g.values());
        Ok(())
    })
}

/// Expectation of the product of singlet projectors on `n_pairs` qubit pairs
/// (1-based, `2 * n_pairs` entries) over `n_copies` copies.
///
/// # Safety
/// `state` must be a live handle; `pairs` must hold `2 * n_pairs` values.
#[no_mangle]
pub unsafe extern "C" fn hom_g(
    state: *const HomState,
    n_copies: usize,
    pairs: *const u32,
    n_pairs: usize,
    out: *mut f64,
) -> HomStatus {
    guard(|| {
        let rho = state_ref(state)?;
        if pairs.is_null() && n_pairs > 0 {
            return Err(Failure::Null("pairs"));
        }
        let raw = if n_pairs == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(pairs, 2 * n_pairs)
        };
        let list: Vec<(usize, usize)> = raw
            .chunks(2)
            .map(|p| (p[0] as usize, p[1] as usize))
            .collect();
        let pairing = Pairing::new(n_copies, &list)?;
        out_slice(out, 1, "out")?[0] = g_exact(rho, &pairing);
        Ok(())
    })
}

/// Invariants `i1 i2 i3 i4 i5 i7 i8 i12 i14`.
///
/// # Safety
/// `state` must be a live handle; `out` must hold 9 doubles.
#[no_mangle]
pub unsafe extern "C" fn hom_invariants(
    state: *const HomState,
    path: HomInvariantPath,
    out: *mut f64,
) -> HomStatus {
    guard(|| {
        let rho = state_ref(state)?;
        let inv = match path {
            HomInvariantPath::Decomposition => invariants_from_decomposition(&pauli_decompose(rho)),
            HomInvariantPath::Multicopy => invariants_from_g(&g_table(rho)),
        };
        out_slice(out, 9, "out")?.copy_from_slice(&inv.values());
        Ok(())
    })
}

/// Negativity from the quartic on the multicopy table.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hom_negativity(state: *const HomState, out: *mut f64) -> HomStatus {
    guard(|| {
        let n = solve_negativity(&coeffs_from_g(&g_table(state_ref(state)?)))?;
        out_slice(out, 1, "out")?[0] = n;
        Ok(())
    })
}

/// Negativity from the eigenvalues of the partial transpose.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hom_negativity_oracle(state: *const HomState, out: *mut f64) -> HomStatus {
    guard(|| {
        out_slice(out, 1, "out")?[0] = negativity_oracle(state_ref(state)?);
        Ok(())
    })
}

/// `det` of the partial transpose from the eight witness observables, and
/// whether it certifies entanglement.
///
/// # Safety
/// `state` must be a live handle; both outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn hom_witness(
    state: *const HomState,
    det_pt: *mut f64,
    entangled: *mut bool,
) -> HomStatus {
    guard(|| {
        let w = witness(&WitnessObservables::from(&g_table(state_ref(state)?)));
        let d = out_slice(det_pt, 1, "det_pt")?;
        let e = out_slice(entangled, 1, "entangled")?;
        d[0] = w.det_pt;
        e[0] = w.entangled;
        Ok(())
    })
}

/// Exact probabilities of the 16 outcomes of configuration `'a'..'d'`;
/// bit `k` of the index is set when detector `k + 1` saw anti-coalescence.
///
/// # Safety
/// `state` must be a live handle; `out` must hold 16 doubles.
#[no_mangle]
pub unsafe extern "C" fn hom_outcome_distribution(
    state: *const HomState,
    config: c_char,
    out: *mut f64,
) -> HomStatus {
    guard(|| {
        let rho = state_ref(state)?;
        let cfg = Configuration::canonical(config_from_char(config)?);
        out_slice(out, 16, "out")?.copy_from_slice(&outcome_distribution(rho, &cfg).probs);
        Ok(())
    })
}

/// Seeded counts of `z` events in one configuration.
///
/// # Safety
/// `state` must be a live handle; `out` must hold 16 integers.
#[no_mangle]
pub unsafe extern "C" fn hom_sample_counts(
    state: *const HomState,
    config: c_char,
    z: u64,
    seed: u64,
    out: *mut u64,
) -> HomStatus {
    guard(|| {
        let rho = state_ref(state)?;
        let cfg = Configuration::canonical(config_from_char(config)?);
        let rec = sample(&outcome_distribution(rho, &cfg), z, seed)?;
        out_slice(out, 16, "out")?.copy_from_slice(&rec.counts);
        Ok(())
    })
}

/// Full sampled pipeline: four configurations with `z` events each and
/// `bootstrap` resamples.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hom_simulate(
    state: *const HomState,
    z: u64,
    seed: u64,
    bootstrap: u32,
    out: *mut HomSimulation,
) -> HomStatus {
    guard(|| {
        let rho = state_ref(state)?;
        let opts = PipelineOptions {
            z,
            seed,
            bootstrap: bootstrap as usize,
            batch_size: DEFAULT_BATCH_SIZE,
        };
        let r = run_pipeline(rho, &opts)?;
        out_slice(out, 1, "out")?[0] = HomSimulation {
            negativity: r.analysis.negativity.negativity,
            negativity_std: r.uncertainty.negativity_std,
            det_pt: r.analysis.witness.det_pt,
            det_pt_std: r.uncertainty.det_pt_std,
            entangled: r.analysis.witness.entangled,
            ambiguous: r.analysis.negativity.ambiguous,
        };
        Ok(())
    })
}

/// Message for the last failure on this thread, or null. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn hom_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn hom_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
