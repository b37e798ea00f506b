//! Construction and analysis of D-selfadjoint projections onto a subspace:
//! the compatibility test, the block formula for the distinguished member,
//! the full projection family, the Ljance-Ptak norm identity and the
//! compression property.
//!
//! For a selfadjoint D written in S ⊕ S^⊥ blocks as `[[a, b], [b*, c]]`, the
//! pair (D, S) is compatible exactly when R(b) ⊆ R(a); the distinguished
//! D-selfadjoint projection onto S is then `[[1, d], [0, 0]]` with `d` the
//! reduced solution of `a x = b`. With closed ranges (always, here) the
//! reduced solution is `a† b`, so one code path covers positive definite,
//! positive semidefinite and diagonal 0/1 weights uniformly.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Tolerance};
use crate::matrix::{ComplexMatrix, Scalar};
use crate::subspace::{self, Subspace};

/// Weight classes accepted by the projection constructors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum WeightKind {
    /// Real entries, all strictly positive.
    PositiveDefinite,
    /// Real entries, all nonnegative.
    PositiveSemidefinite,
    /// Nonzero complex entries z with |Im z| <= mu * Re z.
    MuCone(f64),
}

/// Diagonal weight D: the diagonal of a (semi)definite or sector-bounded
/// complex diagonal operator.
#[derive(Clone, Debug)]
pub struct DiagonalWeight {
    entries: Vec<Scalar>,
    kind: WeightKind,
}

impl DiagonalWeight {
    pub fn positive_definite(entries: Vec<f64>) -> Result<Self> {
        for &x in &entries {
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::InvalidWeight(format!(
                    "positive definite weight needs finite entries > 0, got {x}"
                )));
            }
        }
        Ok(Self {
            entries: entries.iter().map(|&x| Scalar::new(x, 0.0)).collect(),
            kind: WeightKind::PositiveDefinite,
        })
    }

    pub fn positive_semidefinite(entries: Vec<f64>) -> Result<Self> {
        for &x in &entries {
            if !(x.is_finite() && x >= 0.0) {
                return Err(Error::InvalidWeight(format!(
                    "positive semidefinite weight needs finite entries >= 0, got {x}"
                )));
            }
        }
        Ok(Self {
            entries: entries.iter().map(|&x| Scalar::new(x, 0.0)).collect(),
            kind: WeightKind::PositiveSemidefinite,
        })
    }

    /// Weight with entries in the sector C_mu = {z != 0 : |Im z| <= mu Re z}.
    pub fn mu_cone(entries: Vec<Scalar>, mu: f64) -> Result<Self> {
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(Error::InvalidWeight(format!("mu must be >= 0, got {mu}")));
        }
        for &z in &entries {
            if !(z.re.is_finite() && z.im.is_finite()) || z == Scalar::new(0.0, 0.0) {
                return Err(Error::InvalidWeight(format!(
                    "mu-cone entries must be finite and nonzero, got {z}"
                )));
            }
            if z.im.abs() > mu * z.re {
                return Err(Error::InvalidWeight(format!(
                    "entry {z} outside the cone |Im z| <= {mu} Re z"
                )));
            }
        }
        Ok(Self {
            entries,
            kind: WeightKind::MuCone(mu),
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn as_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&self.entries)
    }

    /// D + epsilon I, used for the semidefinite limit paths. The shift of a
    /// (semi)definite weight is positive definite.
    pub fn shifted(&self, epsilon: f64) -> Result<Self> {
        match self.kind {
            WeightKind::MuCone(_) => Err(Error::InvalidWeight(
                "shift is only defined for real (semi)definite weights".into(),
            )),
            _ => DiagonalWeight::positive_definite(
                self.entries.iter().map(|z| z.re + epsilon).collect(),
            ),
        }
    }

    /// Entrywise inverse; the cone C_mu is stable under z -> 1/z.
    pub fn inverse(&self) -> Result<Self> {
        match self.kind {
            WeightKind::MuCone(mu) => Self::mu_cone(
                self.entries.iter().map(|z| z.inv()).collect(),
                // rounding can push |Im| a hair past mu * Re for boundary entries
                mu * (1.0 + 1e-12),
            ),
            WeightKind::PositiveDefinite => Self::positive_definite(
                self.entries.iter().map(|z| 1.0 / z.re).collect(),
            ),
            WeightKind::PositiveSemidefinite => Err(Error::InvalidWeight(
                "semidefinite weights are not invertible".into(),
            )),
        }
    }
}

/// An idempotent matrix together with its range and nullspace.
#[derive(Clone, Debug)]
pub struct ObliqueProjection {
    matrix: ComplexMatrix,
    range: Subspace,
    nullsp: Subspace,
}

impl ObliqueProjection {
    /// Validating constructor for externally supplied idempotents. The
    /// idempotency defect is measured relative to ‖P‖², which is the size
    /// of the rounding noise P² actually carries.
    pub fn from_matrix(matrix: ComplexMatrix, tol: Tolerance) -> Result<Self> {
        if matrix.rows() != matrix.cols() {
            return Err(Error::invalid("projection matrix must be square"));
        }
        let norm = linalg::operator_norm(&matrix);
        let defect = linalg::operator_norm(&(&(&matrix * &matrix) - &matrix));
        if defect > tol.abs_eq * (norm * norm).max(1.0) {
            return Err(Error::invalid(format!(
                "matrix is not idempotent (defect {defect:.3e})"
            )));
        }
        let range = linalg::orthonormal_range(&matrix, &tol);
        let nullsp = linalg::nullspace(&matrix, &tol);
        if range.dim() + nullsp.dim() != matrix.rows() {
            return Err(Error::invalid(
                "rank and nullity of the idempotent do not partition the space",
            ));
        }
        Ok(Self {
            matrix,
            range,
            nullsp,
        })
    }

    /// Trusted constructor for projections assembled from exact data.
    pub(crate) fn from_parts(matrix: ComplexMatrix, range: Subspace, nullsp: Subspace) -> Self {
        debug_assert_eq!(matrix.rows(), matrix.cols());
        debug_assert_eq!(range.dim() + nullsp.dim(), matrix.rows());
        Self {
            matrix,
            range,
            nullsp,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn range(&self) -> &Subspace {
        &self.range
    }

    pub fn nullspace(&self) -> &Subspace {
        &self.nullsp
    }

    pub fn ambient_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn norm(&self) -> f64 {
        linalg::operator_norm(&self.matrix)
    }
}

/// Outcome of the compatibility block test for a pair (D, S).
#[derive(Clone, Debug)]
pub struct CompatibilityReport {
    pub compatible: bool,
    /// dim(N(D) ∩ S), the freedom of the projection family.
    pub n_subspace_dim: usize,
    /// The block d = a† b of the distinguished projection, in the frame
    /// [basis_S | basis_S⊥].
    pub reduced_solution: ComplexMatrix,
}

/// The weighted projection P = A (A*DA)^{-1} A*D onto R(A).
///
/// For positive definite D this is the unique D-orthogonal projection onto
/// R(A); its nullspace is [D*(R(A))]^⊥. `SingularGram` is only reachable
/// for mu-cone weights (guarded by a condition-number cap) or rank-deficient
/// input.
///
/// Positive definite weights are evaluated through the square root,
/// P = A · (D^{1/2}A)† · D^{1/2}, which avoids squaring the condition
/// number in A*DA; the complex sector weights have no positive square
/// root and keep the Gram route behind the condition guard.
pub fn weighted_projection(a: &ComplexMatrix, d: &DiagonalWeight) -> Result<ObliqueProjection> {
    let tol = Tolerance::default();
    if d.dim() != a.rows() {
        return Err(Error::AmbientMismatch {
            left: a.rows(),
            right: d.dim(),
        });
    }
    if matches!(d.kind(), WeightKind::PositiveSemidefinite) {
        return Err(Error::InvalidWeight(
            "weighted_projection needs an invertible weight; use distinguished_projection for semidefinite D".into(),
        ));
    }
    let n = a.cols();
    if n == 0 || linalg::numerical_rank(a, &tol) < n {
        return Err(Error::NotFullRank(format!(
            "A is {}x{} with numerical rank < {}",
            a.rows(),
            a.cols(),
            n
        )));
    }
    let matrix = match d.kind() {
        WeightKind::PositiveDefinite => {
            let root: Vec<f64> = d.entries().iter().map(|z| z.re.sqrt()).collect();
            let mut wa = a.clone();
            for (r, &w) in root.iter().enumerate() {
                for c in 0..n {
                    wa.0[(r, c)] *= Scalar::new(w, 0.0);
                }
            }
            let wd = linalg::svd(&wa)?;
            if wd.rank(&tol) < n {
                return Err(Error::SingularGram(format!(
                    "D^(1/2)A has numerical rank {} < {}",
                    wd.rank(&tol),
                    n
                )));
            }
            let mut pinv_w = linalg::pinv(&wa, &tol); // n x m
            for r in 0..n {
                for (c, &w) in root.iter().enumerate() {
                    pinv_w.0[(r, c)] *= Scalar::new(w, 0.0);
                }
            }
            a * &pinv_w
        }
        WeightKind::MuCone(_) => {
            let dm = d.as_matrix();
            let ad = &a.adjoint() * &dm;
            let gram = &ad * a;
            let gd = linalg::svd(&gram)?;
            let smax = gd.singular_values.first().copied().unwrap_or(0.0);
            let smin = gd.singular_values.last().copied().unwrap_or(0.0);
            if gd.rank(&tol) < n {
                return Err(Error::SingularGram(format!(
                    "A*DA has numerical rank {} < {}",
                    gd.rank(&tol),
                    n
                )));
            }
            if smax > 1e12 * smin {
                return Err(Error::SingularGram(format!(
                    "A*DA condition number {:.3e} beyond the 1e12 guard",
                    smax / smin
                )));
            }
            &(a * &linalg::pinv(&gram, &tol)) * &ad
        }
        WeightKind::PositiveSemidefinite => unreachable!("rejected above"),
    };
    let range = linalg::orthonormal_range(a, &tol);
    // N(P) = N(A*D) = [D*(R(A))]^⊥
    let ad = &a.adjoint() * &d.as_matrix();
    let nullsp = linalg::nullspace(&ad, &tol);
    Ok(ObliqueProjection::from_parts(matrix, range, nullsp))
}

/// Checks selfadjointness and positive semidefiniteness of a dense D.
fn validate_psd(d: &ComplexMatrix, tol: &Tolerance) -> Result<f64> {
    if d.rows() != d.cols() {
        return Err(Error::InvalidWeight("D must be square".into()));
    }
    let scale = linalg::operator_norm(d);
    if linalg::operator_norm(&(&d.adjoint() - d)) > tol.abs_eq * scale.max(1.0) {
        return Err(Error::InvalidWeight("D is not selfadjoint".into()));
    }
    // smallest eigenvalue of a Hermitian matrix via lambda_min = s - ||sI - D||
    if d.rows() > 0 && scale > 0.0 {
        let shifted = &ComplexMatrix::identity(d.rows()).scale(Scalar::new(scale, 0.0)) - d;
        let lambda_min = scale - linalg::operator_norm(&shifted);
        if lambda_min < -tol.abs_eq * scale.max(1.0) {
            return Err(Error::InvalidWeight(format!(
                "D has a negative eigenvalue ({lambda_min:.3e})"
            )));
        }
    }
    Ok(scale)
}

/// Block compatibility test for a positive semidefinite D and a subspace S.
///
/// Decomposes D into `a = P_S D P_S`, `b = P_S D P_{S⊥}` in the frame
/// [basis_S | basis_S⊥]; the pair is compatible iff rank [a | b] = rank a
/// (always true here in finite dimension), and the reduced solution is a†b.
pub fn compatibility(d: &ComplexMatrix, s: &Subspace) -> Result<CompatibilityReport> {
    let tol = s.tol();
    if d.rows() != s.ambient_dim() {
        return Err(Error::AmbientMismatch {
            left: d.rows(),
            right: s.ambient_dim(),
        });
    }
    validate_psd(d, &tol)?;
    let u = s.basis();
    let w_basis = s.complement();
    let w = w_basis.basis();
    let a = &(&u.adjoint() * d) * u;
    let b = &(&u.adjoint() * d) * w;
    let compatible = if s.dim() == 0 || b.cols() == 0 {
        true
    } else {
        let stacked = a.hcat(&b)?;
        linalg::numerical_rank(&stacked, &tol) == linalg::numerical_rank(&a, &tol)
    };
    let reduced_solution = if s.dim() == 0 || b.cols() == 0 {
        ComplexMatrix::zeros(s.dim(), w.cols())
    } else {
        &linalg::pinv(&a, &tol) * &b
    };
    let kernel = linalg::nullspace(d, &tol);
    let n_subspace_dim = subspace::intersect(&kernel, s)?.dim();
    Ok(CompatibilityReport {
        compatible,
        n_subspace_dim,
        reduced_solution,
    })
}

/// The distinguished D-selfadjoint projection P_{D,S} assembled from the
/// block formula: P = U U* + U d W* with d = a†b and [U | W] the
/// orthonormal frame of S ⊕ S^⊥.
pub fn distinguished_projection(d: &ComplexMatrix, s: &Subspace) -> Result<ObliqueProjection> {
    let report = compatibility(d, s)?;
    if !report.compatible {
        return Err(Error::Incompatible(
            "R(b) is not contained in R(a)".into(),
        ));
    }
    let tol = s.tol();
    let u = s.basis();
    let w = s.complement();
    let matrix = &s.projector() + &(&(u * &report.reduced_solution) * &w.basis().adjoint());
    // N(P) = D^{-1}(S^⊥) ⊖ (N(D) ∩ S); computed from the assembled matrix,
    // the containment checks live in the tests.
    let nullsp = linalg::nullspace(&matrix, &tol);
    Ok(ObliqueProjection::from_parts(matrix, s.clone(), nullsp))
}

/// Same as [`distinguished_projection`] with a diagonal weight.
pub fn distinguished_projection_diag(
    d: &DiagonalWeight,
    s: &Subspace,
) -> Result<ObliqueProjection> {
    if matches!(d.kind(), WeightKind::MuCone(_)) {
        return Err(Error::InvalidWeight(
            "distinguished projections are defined for selfadjoint weights".into(),
        ));
    }
    distinguished_projection(&d.as_matrix(), s)
}

/// The member Q = P_{D,S} + z of the projection family, where z must map
/// S^⊥ into N = N(D) ∩ S and vanish on S.
///
/// When D is invertible N = {0}, so z = 0 is the only admissible parameter
/// and the family collapses to the distinguished projection.
pub fn projection_family(
    d: &ComplexMatrix,
    s: &Subspace,
    z: &ComplexMatrix,
) -> Result<ObliqueProjection> {
    let tol = s.tol();
    let base = distinguished_projection(d, s)?;
    if z.rows() != s.ambient_dim() || z.cols() != s.ambient_dim() {
        return Err(Error::InvalidParameter(format!(
            "z must be {0}x{0} in the ambient frame",
            s.ambient_dim()
        )));
    }
    let z_scale = linalg::operator_norm(z).max(1.0);
    // z kills S ...
    let on_s = linalg::operator_norm(&(z * s.basis()));
    if on_s > tol.abs_eq * z_scale {
        return Err(Error::InvalidParameter(format!(
            "z does not vanish on S (‖z|_S‖ = {on_s:.3e})"
        )));
    }
    // ... and lands in N(D) ∩ S
    let kernel = linalg::nullspace(d, &tol);
    let n_sub = subspace::intersect(&kernel, s)?;
    let off_n = linalg::operator_norm(
        &(&(&ComplexMatrix::identity(s.ambient_dim()) - &n_sub.projector()) * z),
    );
    if off_n > tol.abs_eq * z_scale {
        return Err(Error::InvalidParameter(format!(
            "R(z) is not contained in N(D) ∩ S (defect {off_n:.3e})"
        )));
    }
    let matrix = &base.matrix + z;
    let nullsp = linalg::nullspace(&matrix, &tol);
    Ok(ObliqueProjection::from_parts(matrix, s.clone(), nullsp))
}

/// Cosine threshold at which the norm formula is considered collapsed.
const DEGENERATE_COS: f64 = 1.0 - 1e-12;

/// Ljance-Ptak norm ‖Q‖ = (1 - c₀[R(Q), N(Q)]²)^{-1/2}.
///
/// Internally evaluated through the complementary sine
/// s = σ_min(B_{N⊥}* B_R), which does not cancel when the angle is small;
/// the returned value is 1/s.
pub fn ljance_ptak_norm(p: &ObliqueProjection) -> Result<f64> {
    if p.range.dim() == 0 {
        return Err(Error::invalid(
            "the Ljance-Ptak formula applies to nonzero projections",
        ));
    }
    let n_perp = p.nullsp.complement();
    let cross = &n_perp.basis().adjoint() * p.range.basis();
    let d = linalg::svd(&cross)?;
    let s = d
        .singular_values
        .last()
        .copied()
        .unwrap_or(1.0)
        .clamp(0.0, 1.0);
    let cos = (1.0 - s * s).max(0.0).sqrt();
    if cos >= DEGENERATE_COS {
        return Err(Error::DegenerateAngle);
    }
    Ok(1.0 / s)
}

/// Compression property: with S ⊆ T and D commuting with P_T, the
/// distinguished projection in the ambient space equals the zero-padded
/// distinguished projection of the compression of D to T.
pub fn compression_check(d: &ComplexMatrix, s: &Subspace, t: &Subspace) -> Result<bool> {
    let tol = s.tol();
    if s.ambient_dim() != t.ambient_dim() || d.rows() != s.ambient_dim() {
        return Err(Error::AmbientMismatch {
            left: s.ambient_dim(),
            right: t.ambient_dim(),
        });
    }
    // S ⊆ T
    let outside = linalg::operator_norm(
        &(&(&ComplexMatrix::identity(t.ambient_dim()) - &t.projector()) * s.basis()),
    );
    if outside > tol.abs_eq {
        return Err(Error::PreconditionFailed(format!(
            "S is not contained in T (defect {outside:.3e})"
        )));
    }
    // P_T D = D P_T
    let pt = t.projector();
    let comm = linalg::operator_norm(&(&(&pt * d) - &(d * &pt)));
    if comm > tol.abs_eq * linalg::operator_norm(d).max(1.0) {
        return Err(Error::PreconditionFailed(format!(
            "D does not commute with P_T (defect {comm:.3e})"
        )));
    }

    let ambient = distinguished_projection(d, s)?;

    let ut = t.basis();
    let d1 = &(&ut.adjoint() * d) * ut;
    let s_in_t = Subspace::from_orthonormal(&ut.adjoint() * s.basis(), tol)?;
    let compressed = distinguished_projection(&d1, &s_in_t)?;
    let padded = &(ut * compressed.matrix()) * &ut.adjoint();

    let diff = linalg::operator_norm(&(&padded - ambient.matrix()));
    Ok(diff <= tol.abs_eq)
}
