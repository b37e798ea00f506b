//! C ABI over the oblix toolkit.
//!
//! Matrices and subspaces are opaque handles created and destroyed through
//! this interface; every fallible call returns an [`OblixStatus`] and
//! writes results through out-pointers. After a non-`Ok` status,
//! [`oblix_last_error_message`] returns a thread-local description valid
//! until the next failing call on the same thread.
//!
//! Complex data crosses the boundary as interleaved doubles
//! `[re0, im0, re1, im1, ...]` in row-major entry order.

use std::cell::RefCell;
use std::ffi::{c_char, CString};

use oblix::{
    angle_pair, frame_bounds, ljance_ptak_norm, riesz_constant, stewart_oleary,
    weighted_projection, ComplexMatrix, DiagonalWeight, Error, FrameSystem, SamplingConfig,
    Scalar, Subspace, Tolerance,
};

/// Status codes shared across the C surface.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OblixStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    AmbientMismatch = 3,
    SingularGram = 4,
    InvalidWeight = 5,
    Incompatible = 6,
    InvalidParameter = 7,
    DegenerateAngle = 8,
    PreconditionFailed = 9,
    TooLarge = 10,
    NotFullRank = 11,
    NumericalUnderflow = 12,
    NotAFrame = 13,
    IdentityViolation = 14,
    ParseError = 15,
    IoError = 16,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(err: &Error) -> OblixStatus {
    let status = match err {
        Error::InvalidInput(_) => OblixStatus::InvalidInput,
        Error::AmbientMismatch { .. } => OblixStatus::AmbientMismatch,
        Error::SingularGram(_) => OblixStatus::SingularGram,
        Error::InvalidWeight(_) => OblixStatus::InvalidWeight,
        Error::Incompatible(_) => OblixStatus::Incompatible,
        Error::InvalidParameter(_) => OblixStatus::InvalidParameter,
        Error::DegenerateAngle => OblixStatus::DegenerateAngle,
        Error::PreconditionFailed(_) => OblixStatus::PreconditionFailed,
        Error::TooLarge { .. } => OblixStatus::TooLarge,
        Error::NotFullRank(_) => OblixStatus::NotFullRank,
        Error::NumericalUnderflow => OblixStatus::NumericalUnderflow,
        Error::NotAFrame(_) => OblixStatus::NotAFrame,
        Error::IdentityViolation { .. } => OblixStatus::IdentityViolation,
        Error::Parse { .. } => OblixStatus::ParseError,
        Error::Io(_) => OblixStatus::IoError,
    };
    let message = CString::new(err.to_string()).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
    status
}

fn invalid(msg: &str) -> OblixStatus {
    let message = CString::new(msg).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
    OblixStatus::InvalidInput
}

/// Message of the most recent failure on this thread, or NULL when the
/// last call succeeded. The pointer stays valid until the next failing
/// call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn oblix_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |s| s.as_ptr())
    })
}

/// Opaque dense complex matrix handle.
pub struct OblixMatrix(ComplexMatrix);

/// Opaque subspace handle (orthonormal column basis).
pub struct OblixSubspace(Subspace);

/// Friedrichs/Dixmier angle data for a pair of subspaces.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct OblixAnglePair {
    pub friedrichs_cos: f64,
    pub dixmier_cos: f64,
    pub friedrichs_sin: f64,
    pub intersection_dim: usize,
}

/// Enumerated and sampled weighted-projection bounds for a subspace.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct OblixBoundReport {
    pub max_over_q: f64,
    pub min_m_i: f64,
    pub k_constant: f64,
    pub sup_sampled: f64,
}

/// Creates a rows×cols matrix from interleaved complex entries
/// (`2 * rows * cols` doubles, row-major).
///
/// # Safety
/// `entries` must point to `2 * rows * cols` readable doubles and `out`
/// must be a valid location for a pointer.
#[no_mangle]
pub unsafe extern "C" fn oblix_matrix_new(
    rows: usize,
    cols: usize,
    entries: *const f64,
    out: *mut *mut OblixMatrix,
) -> OblixStatus {
    if out.is_null() || (entries.is_null() && rows * cols > 0) {
        return invalid("null pointer argument");
    }
    let raw = std::slice::from_raw_parts(entries, 2 * rows * cols);
    let complex: Vec<Scalar> = raw
        .chunks_exact(2)
        .map(|pair| Scalar::new(pair[0], pair[1]))
        .collect();
    match ComplexMatrix::new(rows, cols, complex) {
        Ok(m) => {
            *out = Box::into_raw(Box::new(OblixMatrix(m)));
            OblixStatus::Ok
        }
        Err(e) => set_error(&e),
    }
}

/// # Safety
/// `matrix` must be a live handle from this library or NULL.
#[no_mangle]
pub unsafe extern "C" fn oblix_matrix_free(matrix: *mut OblixMatrix) {
    if !matrix.is_null() {
        drop(Box::from_raw(matrix));
    }
}

/// # Safety
/// `matrix` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn oblix_matrix_rows(matrix: *const OblixMatrix) -> usize {
    matrix.as_ref().map_or(0, |m| m.0.rows())
}

/// # Safety
/// `matrix` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn oblix_matrix_cols(matrix: *const OblixMatrix) -> usize {
    matrix.as_ref().map_or(0, |m| m.0.cols())
}

/// Reads one entry.
///
/// # Safety
/// `matrix` must be a live handle; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oblix_matrix_get(
    matrix: *const OblixMatrix,
    row: usize,
    col: usize,
    re: *mut f64,
    im: *mut f64,
) -> OblixStatus {
    let Some(m) = matrix.as_ref() else {
        return invalid("null matrix handle");
    };
    if re.is_null() || im.is_null() {
        return invalid("null output pointer");
    }
    if row >= m.0.rows() || col >= m.0.cols() {
        return invalid("entry index out of range");
    }
    let z = m.0.get(row, col);
    *re = z.re;
    *im = z.im;
    OblixStatus::Ok
}

/// Largest singular value.
///
/// # Safety
/// `matrix` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oblix_operator_norm(
    matrix: *const OblixMatrix,
    out: *mut f64,
) -> OblixStatus {
    let Some(m) = matrix.as_ref() else {
        return invalid("null matrix handle");
    };
    if out.is_null() {
        return invalid("null output pointer");
    }
    *out = oblix::operator_norm(&m.0);
    OblixStatus::Ok
}

/// Moore-Penrose pseudoinverse with the given relative rank cutoff
/// (pass 0 for the default).
///
/// # Safety
/// `matrix` must be a live handle; `out` must be a valid location.
#[no_mangle]
pub unsafe extern "C" fn oblix_pinv(
    matrix: *const OblixMatrix,
    rel_rank: f64,
    out: *mut *mut OblixMatrix,
) -> OblixStatus {
    let Some(m) = matrix.as_ref() else {
        return invalid("null matrix handle");
    };
    if out.is_null() {
        return invalid("null output pointer");
    }
    let rel = if rel_rank > 0.0 {
        rel_rank
    } else {
        Tolerance::DEFAULT_REL_RANK
    };
    let tol = match Tolerance::new(rel, Tolerance::DEFAULT_ABS_EQ) {
        Ok(t) => t,
        Err(e) => return set_error(&e),
    };
    let p = oblix::pinv(&m.0, &tol);
    *out = Box::into_raw(Box::new(OblixMatrix(p)));
    OblixStatus::Ok
}

/// Subspace spanned by the columns of `matrix` (orthonormalized).
///
/// # Safety
/// `matrix` must be a live handle; `out` must be a valid location.
#[no_mangle]
pub unsafe extern "C" fn oblix_subspace_from_columns(
    matrix: *const OblixMatrix,
    out: *mut *mut OblixSubspace,
) -> OblixStatus {
    let Some(m) = matrix.as_ref() else {
        return invalid("null matrix handle");
    };
    if out.is_null() {
        return invalid("null output pointer");
    }
    if m.0.is_empty() {
        return invalid("spanning matrix must be nonempty");
    }
    let s = Subspace::from_span(&m.0, Tolerance::default());
    *out = Box::into_raw(Box::new(OblixSubspace(s)));
    OblixStatus::Ok
}

/// # Safety
/// `subspace` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn oblix_subspace_free(subspace: *mut OblixSubspace) {
    if !subspace.is_null() {
        drop(Box::from_raw(subspace));
    }
}

/// # Safety
/// `subspace` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn oblix_subspace_ambient_dim(subspace: *const OblixSubspace) -> usize {
    subspace.as_ref().map_or(0, |s| s.0.ambient_dim())
}

/// # Safety
/// `subspace` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn oblix_subspace_dim(subspace: *const OblixSubspace) -> usize {
    subspace.as_ref().map_or(0, |s| s.0.dim())
}

/// Friedrichs/Dixmier angles between two subspaces.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oblix_angle_pair(
    m: *const OblixSubspace,
    n: *const OblixSubspace,
    out: *mut OblixAnglePair,
) -> OblixStatus {
    let (Some(m), Some(n)) = (m.as_ref(), n.as_ref()) else {
        return invalid("null subspace handle");
    };
    if out.is_null() {
        return invalid("null output pointer");
    }
    match angle_pair(&m.0, &n.0) {
        Ok(pair) => {
            *out = OblixAnglePair {
                friedrichs_cos: pair.friedrichs_cos,
                dixmier_cos: pair.dixmier_cos,
                friedrichs_sin: pair.friedrichs_sin,
                intersection_dim: pair.intersection_dim,
            };
            OblixStatus::Ok
        }
        Err(e) => set_error(&e),
    }
}

/// Weighted projection A (A*DA)^{-1} A*D for a positive diagonal weight
/// (`weights`: one strictly positive double per row of A). On success
/// writes the projection matrix handle and, optionally, its operator norm.
///
/// # Safety
/// `a` must be a live handle, `weights` must hold `rows(A)` doubles,
/// `out` must be a valid location; `norm_out` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn oblix_weighted_projection(
    a: *const OblixMatrix,
    weights: *const f64,
    out: *mut *mut OblixMatrix,
    norm_out: *mut f64,
) -> OblixStatus {
    let Some(a) = a.as_ref() else {
        return invalid("null matrix handle");
    };
    if weights.is_null() || out.is_null() {
        return invalid("null pointer argument");
    }
    let w = std::slice::from_raw_parts(weights, a.0.rows()).to_vec();
    let d = match DiagonalWeight::positive_definite(w) {
        Ok(d) => d,
        Err(e) => return set_error(&e),
    };
    match weighted_projection(&a.0, &d) {
        Ok(p) => {
            if !norm_out.is_null() {
                *norm_out = p.norm();
            }
            *out = Box::into_raw(Box::new(OblixMatrix(p.matrix().clone())));
            OblixStatus::Ok
        }
        Err(e) => set_error(&e),
    }
}

/// Ljance-Ptak norm of an idempotent matrix (validated).
///
/// # Safety
/// `matrix` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oblix_ljance_ptak_norm(
    matrix: *const OblixMatrix,
    out: *mut f64,
) -> OblixStatus {
    let Some(m) = matrix.as_ref() else {
        return invalid("null matrix handle");
    };
    if out.is_null() {
        return invalid("null output pointer");
    }
    let p = match oblix::ObliqueProjection::from_matrix(m.0.clone(), Tolerance::default()) {
        Ok(p) => p,
        Err(e) => return set_error(&e),
    };
    match ljance_ptak_norm(&p) {
        Ok(v) => {
            *out = v;
            OblixStatus::Ok
        }
        Err(e) => set_error(&e),
    }
}

/// Stewart-O'Leary sweep: enumerated max ‖P_{Q,S}‖, min m_I, K and the
/// seeded sampled supremum estimate.
///
/// # Safety
/// `subspace` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oblix_stewart_oleary(
    subspace: *const OblixSubspace,
    samples: usize,
    seed: u64,
    out: *mut OblixBoundReport,
) -> OblixStatus {
    let Some(s) = subspace.as_ref() else {
        return invalid("null subspace handle");
    };
    if out.is_null() {
        return invalid("null output pointer");
    }
    match stewart_oleary(&s.0, &SamplingConfig { samples, seed }) {
        Ok(report) => {
            *out = OblixBoundReport {
                max_over_q: report.max_over_q,
                min_m_i: report.min_m_i,
                k_constant: report.k_constant,
                sup_sampled: report.sup_estimate,
            };
            OblixStatus::Ok
        }
        Err(e) => set_error(&e),
    }
}

/// Optimal frame bounds of the synthesis matrix (columns are the frame
/// vectors).
///
/// # Safety
/// `synthesis` must be a live handle; `lower` and `upper` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn oblix_frame_bounds(
    synthesis: *const OblixMatrix,
    lower: *mut f64,
    upper: *mut f64,
) -> OblixStatus {
    let Some(m) = synthesis.as_ref() else {
        return invalid("null matrix handle");
    };
    if lower.is_null() || upper.is_null() {
        return invalid("null output pointer");
    }
    let frame = match FrameSystem::new(m.0.clone(), Tolerance::default()) {
        Ok(f) => f,
        Err(e) => return set_error(&e),
    };
    match frame_bounds(&frame) {
        Ok(b) => {
            *lower = b.lower;
            *upper = b.upper;
            OblixStatus::Ok
        }
        Err(e) => set_error(&e),
    }
}

/// Riesz constant (exhaustive minimum over nonempty subfamilies) of the
/// frame given by its synthesis matrix.
///
/// # Safety
/// `synthesis` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oblix_riesz_constant(
    synthesis: *const OblixMatrix,
    out: *mut f64,
) -> OblixStatus {
    let Some(m) = synthesis.as_ref() else {
        return invalid("null matrix handle");
    };
    if out.is_null() {
        return invalid("null output pointer");
    }
    let frame = match FrameSystem::new(m.0.clone(), Tolerance::default()) {
        Ok(f) => f,
        Err(e) => return set_error(&e),
    };
    match riesz_constant(&frame) {
        Ok((value, _witness)) => {
            *out = value;
            OblixStatus::Ok
        }
        Err(e) => set_error(&e),
    }
}
