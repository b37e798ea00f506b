//! Angles between subspaces, intersections, position P' and the
//! alternating-projection identity.
//!
//! Angles are computed from the principal-angle SVD of `B_M* B_N` rather
//! than from projector products: conditioning near 0 and π/2 is much
//! better. The projector-product formulas are kept alive as cross-check
//! oracles in the test suite.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Tolerance};
use crate::matrix::ComplexMatrix;

/// Singular values of `B_M* B_N` at or above `1 - INTERSECTION_TOL` are
/// treated as common directions of the two subspaces.
///
/// This is the single most numerically sensitive knob in the crate: it
/// separates cos θ = 1 from cos θ = 1 - δ at double precision.
pub const INTERSECTION_TOL: f64 = 1e-8;

/// A subspace of C^n carried by an orthonormal column basis.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient_dim: usize,
    basis: ComplexMatrix,
    tol: Tolerance,
}

impl Subspace {
    /// Wraps an already-orthonormal basis, validating `B* B = I` within
    /// `tol.abs_eq`.
    pub fn from_orthonormal(basis: ComplexMatrix, tol: Tolerance) -> Result<Self> {
        if basis.cols() > basis.rows() {
            return Err(Error::invalid(format!(
                "{} basis columns exceed ambient dimension {}",
                basis.cols(),
                basis.rows()
            )));
        }
        let defect = orthonormality_defect(&basis);
        if defect > tol.abs_eq {
            return Err(Error::invalid(format!(
                "basis is not orthonormal (defect {defect:.3e})"
            )));
        }
        Ok(Self::from_orthonormal_unchecked(basis, tol))
    }

    pub(crate) fn from_orthonormal_unchecked(basis: ComplexMatrix, tol: Tolerance) -> Self {
        Self {
            ambient_dim: basis.rows(),
            basis,
            tol,
        }
    }

    /// Span of the columns of an arbitrary matrix (orthonormalized via SVD).
    pub fn from_span(m: &ComplexMatrix, tol: Tolerance) -> Self {
        linalg::orthonormal_range(m, &tol)
    }

    /// The zero subspace of C^n.
    pub fn zero(ambient_dim: usize, tol: Tolerance) -> Self {
        Self {
            ambient_dim,
            basis: ComplexMatrix::zeros(ambient_dim, 0),
            tol,
        }
    }

    /// The full space C^n.
    pub fn full(ambient_dim: usize, tol: Tolerance) -> Self {
        Self {
            ambient_dim,
            basis: ComplexMatrix::identity(ambient_dim),
            tol,
        }
    }

    /// Coordinate subspace spanned by the given standard basis vectors.
    pub fn coordinate(ambient_dim: usize, indices: &[usize], tol: Tolerance) -> Result<Self> {
        let mut basis = ComplexMatrix::zeros(ambient_dim, indices.len());
        let mut seen = vec![false; ambient_dim];
        for (j, &i) in indices.iter().enumerate() {
            if i >= ambient_dim {
                return Err(Error::invalid(format!(
                    "coordinate index {i} out of range for ambient dimension {ambient_dim}"
                )));
            }
            if seen[i] {
                return Err(Error::invalid(format!("duplicate coordinate index {i}")));
            }
            seen[i] = true;
            basis.0[(i, j)] = num_complex::Complex64::new(1.0, 0.0);
        }
        Ok(Self::from_orthonormal_unchecked(basis, tol))
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn tol(&self) -> Tolerance {
        self.tol
    }

    /// Orthogonal projector `P = B B*`.
    pub fn projector(&self) -> ComplexMatrix {
        &self.basis * &self.basis.adjoint()
    }

    /// Orthogonal complement, computed as N(B*).
    pub fn complement(&self) -> Subspace {
        if self.dim() == 0 {
            return Subspace::full(self.ambient_dim, self.tol);
        }
        linalg::nullspace(&self.basis.adjoint(), &self.tol)
    }
}

fn orthonormality_defect(basis: &ComplexMatrix) -> f64 {
    if basis.cols() == 0 {
        return 0.0;
    }
    let gram = &basis.adjoint() * basis;
    linalg::operator_norm(&(&gram - &ComplexMatrix::identity(basis.cols())))
}

/// Friedrichs and Dixmier cosines with the associated sine and the
/// dimension of M ∩ N, all from one principal-angle SVD.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AnglePair {
    pub friedrichs_cos: f64,
    pub dixmier_cos: f64,
    pub friedrichs_sin: f64,
    pub intersection_dim: usize,
}

/// Shared principal-angle data for a pair of subspaces.
struct Principal {
    /// Singular values of `B_M* B_N`, clamped to [0, 1], nonincreasing.
    cosines: Vec<f64>,
    /// Number of cosines within `INTERSECTION_TOL` of 1.
    intersection_dim: usize,
    /// `B_M` rotated onto principal directions (columns 0..r span M ∩ N).
    m_rotated: ComplexMatrix,
}

fn principal(m: &Subspace, n: &Subspace) -> Result<Principal> {
    if m.ambient_dim() != n.ambient_dim() {
        return Err(Error::AmbientMismatch {
            left: m.ambient_dim(),
            right: n.ambient_dim(),
        });
    }
    if m.dim() == 0 || n.dim() == 0 {
        return Ok(Principal {
            cosines: Vec::new(),
            intersection_dim: 0,
            m_rotated: m.basis().clone(),
        });
    }
    let cross = &m.basis().adjoint() * n.basis();
    let d = linalg::svd(&cross)?;
    let cosines: Vec<f64> = d
        .singular_values
        .iter()
        .map(|&s| s.clamp(0.0, 1.0))
        .collect();
    let intersection_dim = cosines
        .iter()
        .filter(|&&c| c >= 1.0 - INTERSECTION_TOL)
        .count();
    let m_rotated = m.basis() * &d.left;
    Ok(Principal {
        cosines,
        intersection_dim,
        m_rotated,
    })
}

/// Orthogonal projector onto S.
pub fn orthogonal_projector(s: &Subspace) -> ComplexMatrix {
    s.projector()
}

/// Orthonormal basis of M ∩ N: the principal directions whose cosine is
/// within `INTERSECTION_TOL` of 1.
pub fn intersect(m: &Subspace, n: &Subspace) -> Result<Subspace> {
    let p = principal(m, n)?;
    let basis = ComplexMatrix::from_inner(
        p.m_rotated.inner().columns(0, p.intersection_dim).into_owned(),
    );
    Ok(Subspace::from_orthonormal_unchecked(basis, m.tol()))
}

/// Dixmier (minimal-angle) cosine c₀[M, N] = ‖P_M P_N‖, clamped to [0, 1].
pub fn dixmier_cos(m: &Subspace, n: &Subspace) -> Result<f64> {
    let p = principal(m, n)?;
    Ok(p.cosines.first().copied().unwrap_or(0.0))
}

/// Friedrichs cosine c[M, N] = ‖P_M P_N P_{(M∩N)^⊥}‖: the largest principal
/// cosine once common directions are removed. Zero when M ⊆ N or N ⊆ M.
pub fn friedrichs_cos(m: &Subspace, n: &Subspace) -> Result<f64> {
    let p = principal(m, n)?;
    Ok(p.cosines.get(p.intersection_dim).copied().unwrap_or(0.0))
}

/// Friedrichs sine s[M, N] = (1 - c[M, N]²)^{1/2}, evaluated without the
/// cancellation of `1 - c²`: it is the smallest singular value of
/// `B_{N^⊥}* B_{M ⊖ (M∩N)}`, exact even when the angle is tiny.
pub fn friedrichs_sin(m: &Subspace, n: &Subspace) -> Result<f64> {
    let p = principal(m, n)?;
    let reduced_dim = p.m_rotated.cols() - p.intersection_dim;
    if reduced_dim == 0 {
        return Ok(1.0);
    }
    let m_reduced = ComplexMatrix::from_inner(
        p.m_rotated
            .inner()
            .columns(p.intersection_dim, reduced_dim)
            .into_owned(),
    );
    let n_perp = n.complement();
    if n_perp.dim() == 0 {
        // M ⊖ (M∩N) nonzero with N = C^n cannot happen; defensive zero.
        return Ok(0.0);
    }
    let cross = &n_perp.basis().adjoint() * &m_reduced;
    let d = linalg::svd(&cross)?;
    Ok(d.singular_values
        .last()
        .copied()
        .unwrap_or(1.0)
        .clamp(0.0, 1.0))
}

/// Both cosines, the sine and dim(M ∩ N), consistently from one SVD of
/// `B_M* B_N`.
pub fn angle_pair(m: &Subspace, n: &Subspace) -> Result<AnglePair> {
    let p = principal(m, n)?;
    let dixmier = p.cosines.first().copied().unwrap_or(0.0);
    let friedrichs = p.cosines.get(p.intersection_dim).copied().unwrap_or(0.0);
    Ok(AnglePair {
        friedrichs_cos: friedrichs,
        dixmier_cos: dixmier,
        friedrichs_sin: (1.0 - friedrichs * friedrichs).max(0.0).sqrt(),
        intersection_dim: p.intersection_dim,
    })
}

/// True iff M and N are in position P': M ∩ N^⊥ = M^⊥ ∩ N = {0}.
pub fn position_pprime(m: &Subspace, n: &Subspace) -> Result<bool> {
    if m.ambient_dim() != n.ambient_dim() {
        return Err(Error::AmbientMismatch {
            left: m.ambient_dim(),
            right: n.ambient_dim(),
        });
    }
    let first = intersect(m, &n.complement())?.dim();
    let second = intersect(&m.complement(), n)?.dim();
    Ok(first == 0 && second == 0)
}

/// ‖(P_M P_N)^k - P_{M∩N}‖; the alternating-projection identity says this
/// equals c[M, N]^{2k-1}.
pub fn alternating_projection_error(m: &Subspace, n: &Subspace, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::invalid("alternating projections need k >= 1"));
    }
    if m.ambient_dim() != n.ambient_dim() {
        return Err(Error::AmbientMismatch {
            left: m.ambient_dim(),
            right: n.ambient_dim(),
        });
    }
    let pm = m.projector();
    let pn = n.projector();
    let step = &pm * &pn;
    let mut power = step.clone();
    for _ in 1..k {
        power = &power * &step;
    }
    let meet = intersect(m, n)?.projector();
    Ok(linalg::operator_norm(&(&power - &meet)))
}
