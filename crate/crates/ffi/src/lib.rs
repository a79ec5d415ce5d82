//! C interface.
//!
//! States live behind opaque `EntState` handles. Every fallible call returns
//! an `EntStatus`; on failure `ent_last_error` describes the problem until the
//! next call on the same thread. Array outputs take a caller buffer plus its
//! capacity and always report the required length through `written`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use entangled::correlation::{
    canonical_basis, joint_distribution, quantum_index_per_qubit, shannon_index, LogBase,
    MeasurementBasis,
};
use entangled::io::{read_dataset, read_state, write_state};
use entangled::linalg::C64;
use entangled::pauli_hs::hs_decompose;
use entangled::schmidt::{schmidt, Bipartition};
use entangled::states::{make_named_state, NamedState, PureState, State};
use entangled::tomography::{estimate_expectations, reconstruct};
use entangled::Error;

/// Opaque state handle.
pub struct EntState {
    state: State,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidState = 3,
    DimensionMismatch = 4,
    ZeroOverlap = 5,
    MalformedDocument = 6,
    Numerical = 7,
    BufferTooSmall = 8,
    Io = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntBasis {
    /// Schmidt bases for two-qubit pure states, reduced-state eigenbases otherwise.
    Schmidt = 0,
    Z = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> EntStatus {
    match err {
        Error::DimensionMismatch(_) => EntStatus::DimensionMismatch,
        Error::NotHermitian(_) | Error::InvalidState(_) => EntStatus::InvalidState,
        Error::NoConvergence { .. } => EntStatus::Numerical,
        Error::InvalidArgument(_) | Error::InvalidRotation(_) | Error::IncompleteExpectations(_) => {
            EntStatus::InvalidArgument
        }
        Error::ZeroOverlap(_) => EntStatus::ZeroOverlap,
        Error::Document { .. } => EntStatus::MalformedDocument,
        Error::Io(_) => EntStatus::Io,
    }
}

enum Failure {
    Lib(Error),
    Status(EntStatus, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(EntStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> EntStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EntStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            let status = status_of(&e);
            set_error(e.to_string());
            status
        }
        Ok(Err(Failure::Status(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            EntStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Status(EntStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn state_arg<'a>(p: *const EntState) -> Result<&'a State, Failure> {
    p.as_ref().map(|h| &h.state).ok_or_else(|| null("state"))
}

unsafe fn emit_state(out: *mut *mut EntState, state: State) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(EntState { state }));
    Ok(())
}

unsafe fn emit_slice(values: &[f64], out: *mut f64, capacity: usize, written: *mut usize) -> Result<(), Failure> {
    if !written.is_null() {
        *written = values.len();
    }
    if values.len() > capacity {
        return Err(Failure::Status(
            EntStatus::BufferTooSmall,
            format!("need {} values, buffer holds {capacity}", values.len()),
        ));
    }
    if out.is_null() && !values.is_empty() {
        return Err(null("out"));
    }
    if !values.is_empty() {
        ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    }
    Ok(())
}

/// Message for the most recent failure on this thread, or NULL.
#[no_mangle]
pub extern "C" fn ent_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// `singlet`, `triplet_m0` or `ghz:N`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ent_state_named(name: *const c_char, out: *mut *mut EntState) -> EntStatus {
    guard(|| {
        let named = match str_arg(name, "name")? {
            "singlet" => NamedState::Singlet,
            "triplet_m0" => NamedState::TripletM0,
            other => match other.strip_prefix("ghz:").and_then(|n| n.parse().ok()) {
                Some(n) => NamedState::Ghz(n),
                None => {
                    return Err(Failure::Status(
                        EntStatus::InvalidArgument,
                        format!("unknown state {other:?}"),
                    ))
                }
            },
        };
        emit_state(out, State::Pure(make_named_state(named)?))
    })
}

/// `C₁|1⟩|2⟩ + C₂|2⟩|1⟩` with `|C₁|² + |C₂|² = 1`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ent_state_single_excitation(
    c1_re: f64,
    c1_im: f64,
    c2_re: f64,
    c2_im: f64,
    out: *mut *mut EntState,
) -> EntStatus {
    guard(|| {
        let named = NamedState::SingleExcitation {
            c1: C64::new(c1_re, c1_im),
            c2: C64::new(c2_re, c2_im),
        };
        emit_state(out, State::Pure(make_named_state(named)?))
    })
}

/// Pure state from `len` interleaved `(re, im)` pairs; `len` must be `2^n`.
///
/// # Safety
/// `re_im` must point to `2 * len` doubles and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ent_state_from_amplitudes(
    re_im: *const f64,
    len: usize,
    out: *mut *mut EntState,
) -> EntStatus {
    guard(|| {
        if re_im.is_null() {
            return Err(null("re_im"));
        }
        let raw = std::slice::from_raw_parts(re_im, 2 * len);
        let amps = raw.chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect();
        emit_state(out, State::Pure(PureState::new(amps)?))
    })
}

/// Parses a JSON state document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ent_state_from_document(json: *const c_char, out: *mut *mut EntState) -> EntStatus {
    guard(|| emit_state(out, read_state(str_arg(json, "json")?)?))
}

/// Serializes to a JSON state document; release it with `ent_string_free`.
///
/// # Safety
/// `state` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ent_state_to_document(state: *const EntState, out: *mut *mut c_char) -> EntStatus {
    guard(|| {
        let text = write_state(state_arg(state)?)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = CString::new(text).expect("JSON has no NUL").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn ent_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `state` must come from this library or be NULL; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn ent_state_free(state: *mut EntState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Qubit count, or 0 for NULL.
///
/// # Safety
/// `state` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn ent_state_n_qubits(state: *const EntState) -> usize {
    state.as_ref().map_or(0, |h| h.state.n_qubits())
}

/// All `4^n` coefficients `Tr(ρ P_w)`, word index base 4 with qubit a most
/// significant (entry 0 is the identity coefficient, always 1).
///
/// # Safety
/// `out` must hold `capacity` doubles; `written` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn ent_hs_decompose(
    state: *const EntState,
    out: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> EntStatus {
    guard(|| {
        let tensor = hs_decompose(&state_arg(state)?.to_density());
        emit_slice(tensor.coeffs(), out, capacity, written)
    })
}

/// `Σ_k S(ρ_k) − S(ρ)` with each qubit a party, in nats.
///
/// # Safety
/// `state` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ent_quantum_index(state: *const EntState, out: *mut f64) -> EntStatus {
    guard(|| {
        let value = quantum_index_per_qubit(&state_arg(state)?.to_density())?;
        *out.as_mut().ok_or_else(|| null("out"))? = value;
        Ok(())
    })
}

/// Shannon mutual information of per-qubit outcomes; nats unless `bits` is nonzero.
///
/// # Safety
/// `state` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ent_shannon_index(
    state: *const EntState,
    basis: EntBasis,
    bits: c_int,
    out: *mut f64,
) -> EntStatus {
    guard(|| {
        let state = state_arg(state)?;
        let measurement = match basis {
            EntBasis::Schmidt => canonical_basis(state)?,
            EntBasis::Z => MeasurementBasis::z(state.n_qubits()),
        };
        let unit = if bits != 0 { LogBase::Bits } else { LogBase::Nats };
        let value = shannon_index(&joint_distribution(state, &measurement)?, unit);
        *out.as_mut().ok_or_else(|| null("out"))? = value;
        Ok(())
    })
}

/// Schmidt coefficients (descending) across a split such as `"a|bc"`.
///
/// # Safety
/// `split` must be NUL-terminated; `out` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn ent_schmidt_coefficients(
    state: *const EntState,
    split: *const c_char,
    out: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> EntStatus {
    guard(|| {
        let state = state_arg(state)?;
        let psi = state.as_pure().ok_or_else(|| {
            Failure::Status(EntStatus::InvalidState, "Schmidt decomposition needs a pure state".into())
        })?;
        let bip = Bipartition::parse(psi.n_qubits(), str_arg(split, "split")?)?;
        emit_slice(&schmidt(psi, &bip)?.coefficients, out, capacity, written)
    })
}

/// Linear-inversion reconstruction from a JSON dataset document. With
/// `repair` nonzero, negative eigenvalues are clipped and the trace restored.
/// `pure_defect` and `min_eigenvalue` may be NULL.
///
/// # Safety
/// `dataset_json` must be NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ent_tomography_reconstruct(
    dataset_json: *const c_char,
    repair: c_int,
    out: *mut *mut EntState,
    pure_defect: *mut f64,
    min_eigenvalue: *mut f64,
) -> EntStatus {
    guard(|| {
        let data = read_dataset(str_arg(dataset_json, "dataset_json")?)?;
        let rec = reconstruct(&estimate_expectations(&data)?, repair != 0)?;
        let rho = entangled::states::DensityMatrix::new(rec.matrix().clone())?;
        if let Some(p) = pure_defect.as_mut() {
            *p = rec.pure_defect;
        }
        if let Some(m) = min_eigenvalue.as_mut() {
            *m = rec.min_eigenvalue;
        }
        emit_state(out, State::Density(rho))
    })
}
