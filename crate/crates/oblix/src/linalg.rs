//! Dense complex linear-algebra primitives.
//!
//! Everything downstream (angles, oblique projections, enumeration bounds,
//! frame diagnostics) is expressed through the handful of operations here:
//! SVD with a deterministic phase convention, numerical rank, Moore-Penrose
//! pseudoinverse, operator norm, reduced minimum modulus, and orthonormal
//! bases for ranges and nullspaces.
//!
//! All decompositions are deterministic: after the SVD, each singular-vector
//! pair is rescaled by a unit phase so that the largest-magnitude entry of
//! the left vector (ties broken by lowest index) is real positive. This
//! makes golden-file output reproducible.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, Scalar};
use crate::subspace::Subspace;

/// Rank and equality tolerances threaded through the crate.
///
/// `rel_rank` is the relative singular-value cutoff (relative to the largest
/// singular value); `abs_eq` is the absolute tolerance for matrix-equality
/// and selfadjointness checks. Defaults leave headroom for the chained
/// products in the bound identities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub rel_rank: f64,
    pub abs_eq: f64,
}

impl Tolerance {
    pub const DEFAULT_REL_RANK: f64 = 1e-10;
    pub const DEFAULT_ABS_EQ: f64 = 1e-8;

    pub fn new(rel_rank: f64, abs_eq: f64) -> Result<Self> {
        if !(rel_rank > 0.0 && rel_rank < 1.0) {
            return Err(Error::invalid(format!(
                "rel_rank must lie in (0, 1), got {rel_rank}"
            )));
        }
        if !(abs_eq > 0.0 && abs_eq.is_finite()) {
            return Err(Error::invalid(format!(
                "abs_eq must be strictly positive, got {abs_eq}"
            )));
        }
        Ok(Self { rel_rank, abs_eq })
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel_rank: Self::DEFAULT_REL_RANK,
            abs_eq: Self::DEFAULT_ABS_EQ,
        }
    }
}

/// Full singular value decomposition `M = left · Σ · right*`.
///
/// `left` is m×m unitary, `right` is n×n unitary and `singular_values` holds
/// the min(m, n) singular values in nonincreasing order. Columns beyond the
/// thin factor are deterministic orthonormal completions.
#[derive(Clone, Debug)]
pub struct SvdResult {
    pub left: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub right: ComplexMatrix,
}

impl SvdResult {
    /// `left · Σ · right*` with the rectangular Σ.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let m = self.left.rows();
        let n = self.right.rows();
        let k = self.singular_values.len();
        let mut sigma = DMatrix::<Scalar>::zeros(m, n);
        for i in 0..k {
            sigma[(i, i)] = Scalar::new(self.singular_values[i], 0.0);
        }
        ComplexMatrix::from_inner(self.left.inner() * sigma * self.right.inner().adjoint())
    }

    /// Singular values strictly above the relative cutoff.
    pub fn rank(&self, tol: &Tolerance) -> usize {
        let cutoff = self.rank_cutoff(tol);
        self.singular_values.iter().filter(|&&s| s > cutoff).count()
    }

    fn rank_cutoff(&self, tol: &Tolerance) -> f64 {
        tol.rel_rank * self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// First `k` columns of the left factor.
    pub fn left_columns(&self, k: usize) -> ComplexMatrix {
        ComplexMatrix::from_inner(self.left.inner().columns(0, k).into_owned())
    }

    /// First `k` columns of the right factor.
    pub fn right_columns(&self, k: usize) -> ComplexMatrix {
        ComplexMatrix::from_inner(self.right.inner().columns(0, k).into_owned())
    }
}

/// Full SVD of a nonempty matrix.
///
/// The kernel is a one-sided Jacobi iteration: right rotations orthogonalize
/// the columns of the working copy, singular values are the final column
/// norms, and the right factor is the accumulated product of rotations.
/// This stays accurate on the heavily degenerate spectra (projectors,
/// 0/1 diagonals, cross-Grams of orthonormal bases) the crate lives on,
/// where shift-based iterations can silently misconverge.
///
/// Errors with `InvalidInput` on empty shapes or non-finite entries (the
/// latter can appear after overflow in user arithmetic even though
/// construction validates).
pub fn svd(m: &ComplexMatrix) -> Result<SvdResult> {
    if m.is_empty() {
        return Err(Error::invalid("svd of an empty matrix"));
    }
    if m.has_non_finite() {
        return Err(Error::invalid("svd input has non-finite entries"));
    }
    let (rows, cols) = (m.rows(), m.cols());
    let k = rows.min(cols);

    let (mut left, singular_values, mut right) = jacobi_svd(m.inner());

    // Shared unit phase per (u_j, v_j) pair keeps u σ v* invariant.
    for j in 0..k {
        let phase = dominant_phase(&left, j);
        scale_column(&mut left, j, phase.conj());
        scale_column(&mut right, j, phase.conj());
    }
    for j in k..rows {
        let phase = dominant_phase(&left, j);
        scale_column(&mut left, j, phase.conj());
    }
    for j in k..cols {
        let phase = dominant_phase(&right, j);
        scale_column(&mut right, j, phase.conj());
    }

    Ok(SvdResult {
        left: ComplexMatrix::from_inner(left),
        singular_values,
        right: ComplexMatrix::from_inner(right),
    })
}

/// Relative off-diagonal threshold at which a column pair counts as
/// orthogonal.
const JACOBI_TOL: f64 = 1e-15;
const JACOBI_MAX_SWEEPS: usize = 128;

/// One-sided Jacobi SVD. Returns (U m×m, σ of length min(m, n)
/// nonincreasing, V n×n) with both factors fully unitary.
fn jacobi_svd(a: &DMatrix<Scalar>) -> (DMatrix<Scalar>, Vec<f64>, DMatrix<Scalar>) {
    let (m, n) = (a.nrows(), a.ncols());
    let mut work = a.clone();
    let mut v = DMatrix::<Scalar>::identity(n, n);

    // Columns that fall this far below the overall scale are exact zeros.
    // A column contained in the span of the others shrinks geometrically
    // and would otherwise chase denormals without ever passing the relative
    // orthogonality test.
    let deflate_below = work.norm() * 1e-150;

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n.saturating_sub(1) {
            for j in (i + 1)..n {
                let mut aii = 0.0f64;
                let mut ajj = 0.0f64;
                let mut g = Scalar::new(0.0, 0.0);
                for r in 0..m {
                    let wi = work[(r, i)];
                    let wj = work[(r, j)];
                    aii += wi.norm_sqr();
                    ajj += wj.norm_sqr();
                    g += wi.conj() * wj;
                }
                if aii.sqrt() <= deflate_below {
                    zero_column(&mut work, i);
                    continue;
                }
                if ajj.sqrt() <= deflate_below {
                    zero_column(&mut work, j);
                    continue;
                }
                let scale = (aii * ajj).sqrt();
                if scale == 0.0 || g.norm() <= JACOBI_TOL * scale {
                    continue;
                }
                rotated = true;
                // reduce to the real symmetric 2x2 case by absorbing the
                // phase of g into column j
                let gn = g.norm();
                let phase = Scalar::new(g.re / gn, g.im / gn);
                let zeta = (ajj - aii) / (2.0 * gn);
                let t = if zeta.abs() > 1e100 {
                    // asymptotic form; zeta^2 would overflow
                    0.5 / zeta
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (cc, ss) = (Scalar::new(c, 0.0), Scalar::new(s, 0.0));
                let ph = phase.conj();
                for r in 0..m {
                    let wi = work[(r, i)];
                    let wj = work[(r, j)] * ph;
                    work[(r, i)] = cc * wi - ss * wj;
                    work[(r, j)] = ss * wi + cc * wj;
                }
                for r in 0..n {
                    let vi = v[(r, i)];
                    let vj = v[(r, j)] * ph;
                    v[(r, i)] = cc * vi - ss * vj;
                    v[(r, j)] = ss * vi + cc * vj;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    // Sort columns by singular value, stable so ties keep sweep order.
    let mut norms: Vec<f64> = (0..n).map(|j| work.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap());
    let work = permute_columns(&work, &order);
    let v = permute_columns(&v, &order);
    norms.sort_by(|x, y| y.partial_cmp(x).unwrap());

    let k = m.min(n);
    let singular_values: Vec<f64> = norms[..k].to_vec();

    // U: normalized nonzero columns, orthonormal completion for the rest.
    let mut u = DMatrix::<Scalar>::zeros(m, m);
    let mut filled = 0usize;
    for j in 0..k {
        if norms[j] > 0.0 {
            let inv = Scalar::new(1.0 / norms[j], 0.0);
            for r in 0..m {
                u[(r, j)] = work[(r, j)] * inv;
            }
            filled += 1;
        } else {
            break;
        }
    }
    if filled < m {
        complete_orthonormal(&mut u, filled);
    }

    (u, singular_values, v)
}

fn zero_column(m: &mut DMatrix<Scalar>, col: usize) {
    for r in 0..m.nrows() {
        m[(r, col)] = Scalar::new(0.0, 0.0);
    }
}

fn permute_columns(m: &DMatrix<Scalar>, order: &[usize]) -> DMatrix<Scalar> {
    let mut out = DMatrix::<Scalar>::zeros(m.nrows(), order.len());
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..m.nrows() {
            out[(r, dst)] = m[(r, src)];
        }
    }
    out
}

/// Fills columns `filled..` of `u` with an orthonormal completion of the
/// first `filled` columns. Greedy on standard basis vectors: each round
/// picks the candidate with the largest residual after (twice-applied)
/// projection, which is deterministic and well conditioned.
fn complete_orthonormal(u: &mut DMatrix<Scalar>, mut filled: usize) {
    let m = u.nrows();
    while filled < m {
        let mut best: Option<(f64, Vec<Scalar>)> = None;
        for cand in 0..m {
            let mut r: Vec<Scalar> = (0..m)
                .map(|i| {
                    if i == cand {
                        Scalar::new(1.0, 0.0)
                    } else {
                        Scalar::new(0.0, 0.0)
                    }
                })
                .collect();
            for _ in 0..2 {
                for j in 0..filled {
                    let mut coef = Scalar::new(0.0, 0.0);
                    for i in 0..m {
                        coef += u[(i, j)].conj() * r[i];
                    }
                    for i in 0..m {
                        r[i] -= coef * u[(i, j)];
                    }
                }
            }
            let norm = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if best.as_ref().is_none_or(|(b, _)| norm > *b) {
                best = Some((norm, r));
            }
        }
        let (norm, r) = best.expect("nonzero residual exists below full rank");
        for i in 0..m {
            u[(i, filled)] = r[i] / Scalar::new(norm, 0.0);
        }
        filled += 1;
    }
}

/// Unit phase of the largest-magnitude entry of a column (lowest index on
/// ties).
fn dominant_phase(m: &DMatrix<Scalar>, col: usize) -> Scalar {
    let mut best = Scalar::new(0.0, 0.0);
    let mut best_mag = 0.0f64;
    for i in 0..m.nrows() {
        let z = m[(i, col)];
        let mag = z.norm();
        if mag > best_mag {
            best_mag = mag;
            best = z;
        }
    }
    if best_mag == 0.0 {
        Scalar::new(1.0, 0.0)
    } else {
        best / Scalar::new(best_mag, 0.0)
    }
}

fn scale_column(m: &mut DMatrix<Scalar>, col: usize, factor: Scalar) {
    for i in 0..m.nrows() {
        m[(i, col)] *= factor;
    }
}

/// Number of singular values above the relative cutoff; 0 for empty or zero
/// matrices.
pub fn numerical_rank(m: &ComplexMatrix, tol: &Tolerance) -> usize {
    if m.is_empty() || m.max_abs() == 0.0 {
        return 0;
    }
    svd(m).map(|d| d.rank(tol)).unwrap_or(0)
}

/// Moore-Penrose pseudoinverse with singular values below the cutoff
/// treated as exact zeros.
pub fn pinv(m: &ComplexMatrix, tol: &Tolerance) -> ComplexMatrix {
    if m.is_empty() || m.max_abs() == 0.0 {
        return ComplexMatrix::zeros(m.cols(), m.rows());
    }
    let d = svd(m).expect("finite nonempty matrix");
    let r = d.rank(tol);
    if r == 0 {
        return ComplexMatrix::zeros(m.cols(), m.rows());
    }
    let u = d.left_columns(r);
    let v = d.right_columns(r);
    let mut scaled = v.inner().clone();
    for j in 0..r {
        let inv = Scalar::new(1.0 / d.singular_values[j], 0.0);
        for i in 0..scaled.nrows() {
            scaled[(i, j)] *= inv;
        }
    }
    ComplexMatrix::from_inner(scaled * u.inner().adjoint())
}

/// Largest singular value; 0 for empty or zero matrices.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    if m.is_empty() || m.max_abs() == 0.0 {
        return 0.0;
    }
    let d = svd(m).expect("finite nonempty matrix");
    d.singular_values.first().copied().unwrap_or(0.0)
}

/// Reduced minimum modulus γ(T): the smallest singular value above the rank
/// cutoff, i.e. inf ‖Tξ‖ over unit ξ ⟂ N(T).
///
/// Returns `+∞` when T = 0 (the infimum over the empty set), so frame-bound
/// minima degrade gracefully.
pub fn reduced_min_modulus(m: &ComplexMatrix, tol: &Tolerance) -> f64 {
    if m.is_empty() || m.max_abs() == 0.0 {
        return f64::INFINITY;
    }
    let d = svd(m).expect("finite nonempty matrix");
    let r = d.rank(tol);
    if r == 0 {
        f64::INFINITY
    } else {
        d.singular_values[r - 1]
    }
}

/// Orthonormal basis of R(M): the left singular vectors with singular value
/// above the cutoff.
pub fn orthonormal_range(m: &ComplexMatrix, tol: &Tolerance) -> Subspace {
    if m.is_empty() || m.max_abs() == 0.0 {
        return Subspace::zero(m.rows(), *tol);
    }
    let d = svd(m).expect("finite nonempty matrix");
    let r = d.rank(tol);
    Subspace::from_orthonormal_unchecked(d.left_columns(r), *tol)
}

/// Orthonormal basis of N(M); its dimension is `cols - numerical_rank(M)`.
pub fn nullspace(m: &ComplexMatrix, tol: &Tolerance) -> Subspace {
    let n = m.cols();
    if n == 0 {
        return Subspace::zero(0, *tol);
    }
    if m.rows() == 0 || m.max_abs() == 0.0 {
        return Subspace::full(n, *tol);
    }
    let d = svd(m).expect("finite nonempty matrix");
    let r = d.rank(tol);
    let basis = ComplexMatrix::from_inner(d.right.inner().columns(r, n - r).into_owned());
    Subspace::from_orthonormal_unchecked(basis, *tol)
}
