//! Frame bounds, subfamily bounds, Riesz-frame constants and the
//! equivalence between Riesz frames and nullspace compatibility.
//!
//! A frame of the d-dimensional space is carried by its synthesis matrix T
//! (d×m, column k is the frame vector ξ_k; surjectivity is the frame
//! condition). The optimal bounds are B = ‖T‖² and A = γ(T)². For a
//! subfamily selected by J the bounds of the subfamily as a frame of its
//! own span are γ(T P_J)² and ‖T P_J‖²; a frame is Riesz when the lower
//! bounds of all subfamilies admit one uniform positive floor. The bridge
//! to compatibility is the sandwich
//! γ(T)·s ≤ γ(T P_J) ≤ ‖T‖·s, s = sin of the angle between N(T) and H_J,
//! which ties the Riesz floor to the compatibility constant of N(T).

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{self, IndexSet};
use crate::error::{Error, Result};
use crate::linalg::{self, Tolerance};
use crate::matrix::ComplexMatrix;
use crate::subspace::{self, Subspace};

/// A frame presented through its synthesis matrix.
#[derive(Clone, Debug)]
pub struct FrameSystem {
    synthesis: ComplexMatrix,
    tol: Tolerance,
}

impl FrameSystem {
    /// Wraps a d×m synthesis matrix; fails with `NotAFrame` unless it is
    /// surjective (numerical rank d).
    pub fn new(synthesis: ComplexMatrix, tol: Tolerance) -> Result<Self> {
        let (d, m) = (synthesis.rows(), synthesis.cols());
        if d == 0 || m < d {
            return Err(Error::NotAFrame(format!(
                "synthesis is {d}x{m}; a frame needs at least d vectors"
            )));
        }
        if linalg::numerical_rank(&synthesis, &tol) < d {
            return Err(Error::NotAFrame(format!(
                "synthesis is {d}x{m} with numerical rank < {d}"
            )));
        }
        Ok(Self { synthesis, tol })
    }

    pub fn synthesis(&self) -> &ComplexMatrix {
        &self.synthesis
    }

    /// Dimension d of the framed space.
    pub fn space_dim(&self) -> usize {
        self.synthesis.rows()
    }

    /// Number m of frame vectors.
    pub fn len(&self) -> usize {
        self.synthesis.cols()
    }

    pub fn is_empty(&self) -> bool {
        false // a validated frame has at least one vector
    }

    pub fn tol(&self) -> Tolerance {
        self.tol
    }

    /// Frame operator T T*.
    pub fn frame_operator(&self) -> ComplexMatrix {
        &self.synthesis * &self.synthesis.adjoint()
    }

    /// Nullspace of the synthesis operator inside coefficient space.
    pub fn analysis_nullspace(&self) -> Subspace {
        linalg::nullspace(&self.synthesis, &self.tol)
    }
}

/// Optimal frame constants A ≤ B.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

impl FrameBounds {
    /// True for subfamilies spanning the zero space (lower bound is the
    /// +∞ sentinel).
    pub fn is_degenerate(&self) -> bool {
        self.lower.is_infinite()
    }
}

/// Optimal bounds lower = γ(T)², upper = ‖T‖², cross-checked against the
/// eigenvalue extremes of the frame operator T T*.
pub fn frame_bounds(f: &FrameSystem) -> Result<FrameBounds> {
    let tol = f.tol();
    let gamma = linalg::reduced_min_modulus(f.synthesis(), &tol);
    let norm = linalg::operator_norm(f.synthesis());
    let bounds = FrameBounds {
        lower: gamma * gamma,
        upper: norm * norm,
    };
    // T surjective: TT* is positive definite, its eigenvalues are the
    // squared singular values of T
    let op = f.frame_operator();
    let d = linalg::svd(&op)?;
    let lam_max = d.singular_values.first().copied().unwrap_or(0.0);
    let lam_min = d.singular_values.last().copied().unwrap_or(0.0);
    let scale = lam_max.max(1.0);
    if (lam_max - bounds.upper).abs() > tol.abs_eq * scale
        || (lam_min - bounds.lower).abs() > tol.abs_eq * scale
    {
        return Err(Error::identity(
            "frame bounds vs frame-operator spectrum",
            format!(
                "A = {}, B = {} but the spectrum of TT* spans [{lam_min}, {lam_max}]",
                bounds.lower, bounds.upper
            ),
        ));
    }
    Ok(bounds)
}

/// Bounds of the subfamily {ξ_k : k ∈ J} as a frame of its own span:
/// lower = γ(T P_J)², upper = ‖T P_J‖². A vanishing subfamily yields the
/// +∞ sentinel lower bound (flagged via [`FrameBounds::is_degenerate`]).
pub fn subset_bounds(f: &FrameSystem, j: &IndexSet) -> Result<FrameBounds> {
    if j.is_empty() {
        return Err(Error::invalid("subset bounds need a nonempty index set"));
    }
    if j.ambient_dim() != f.len() {
        return Err(Error::AmbientMismatch {
            left: j.ambient_dim(),
            right: f.len(),
        });
    }
    // zero columns of T P_J do not change nonzero singular values
    let cols = f.synthesis().select_columns(j.indices());
    let gamma = linalg::reduced_min_modulus(&cols, &f.tol());
    let norm = linalg::operator_norm(&cols);
    Ok(FrameBounds {
        lower: gamma * gamma,
        upper: norm * norm,
    })
}

/// The Riesz constant: min over all nonempty J of the subfamily lower
/// bound (degenerate subfamilies excluded), with a witnessing J.
///
/// This is the brute force over all 2^m − 1 subsets; any future fast path
/// must reproduce it exactly.
pub fn riesz_constant(f: &FrameSystem) -> Result<(f64, IndexSet)> {
    let m = f.len();
    let cap = bounds::enum_cap();
    if m > cap {
        return Err(Error::TooLarge { size: m, cap });
    }
    let acc = (1u64..(1u64 << m))
        .into_par_iter()
        .map(|mask| -> Result<(f64, u64)> {
            let set = IndexSet::from_mask(m, mask);
            let b = subset_bounds(f, &set)?;
            if b.is_degenerate() {
                Ok((f64::INFINITY, u64::MAX))
            } else {
                Ok((b.lower, mask))
            }
        })
        .try_reduce(
            || (f64::INFINITY, u64::MAX),
            |a, b| {
                Ok(match a.0.partial_cmp(&b.0) {
                    Some(std::cmp::Ordering::Less) => a,
                    Some(std::cmp::Ordering::Greater) => b,
                    _ => (a.0, a.1.min(b.1)),
                })
            },
        )?;
    if acc.1 == u64::MAX {
        return Err(Error::NotAFrame(
            "every subfamily spans the zero space".into(),
        ));
    }
    Ok((acc.0, IndexSet::from_mask(m, acc.1)))
}

/// Quantitative form of the Riesz-frame / compatibility equivalence.
#[derive(Clone, Debug, Serialize)]
pub struct RieszEquivalenceReport {
    /// min over J of γ(T P_J) (vanishing subfamilies excluded).
    pub min_subset_gamma: f64,
    #[serde(rename = "witness_J")]
    pub witness: IndexSet,
    /// max over J of c[N(T), H_J].
    pub max_nullspace_cos: f64,
    /// K[N(T)] = (1 - max_cos²)^{-1/2}.
    #[serde(rename = "K")]
    pub k_constant: f64,
    /// γ(T) / K ≤ min_subset_gamma ≤ ‖T‖ / K.
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub sandwich_checked: usize,
    pub max_lower_violation: f64,
    pub max_upper_violation: f64,
    pub sandwich_ok: bool,
}

/// Sweeps every nonempty J, asserting the γ-sandwich
/// γ(T)·s_J ≤ γ(T P_J) ≤ ‖T‖·s_J with s_J = sin c[N(T), H_J], and reports
/// the two-sided bound relating the Riesz floor to K[N(T)].
pub fn riesz_compatibility_equivalence(f: &FrameSystem) -> Result<RieszEquivalenceReport> {
    let m = f.len();
    let cap = bounds::enum_cap();
    if m > cap {
        return Err(Error::TooLarge { size: m, cap });
    }
    let tol = f.tol();
    let kernel = f.analysis_nullspace();
    let gamma_t = linalg::reduced_min_modulus(f.synthesis(), &tol);
    let norm_t = linalg::operator_norm(f.synthesis());

    struct Acc {
        min_gamma: f64,
        witness: u64,
        max_cos: f64,
        checked: usize,
        lower_violation: f64,
        upper_violation: f64,
    }
    let zero = || Acc {
        min_gamma: f64::INFINITY,
        witness: u64::MAX,
        max_cos: 0.0,
        checked: 0,
        lower_violation: 0.0,
        upper_violation: 0.0,
    };

    let acc = (1u64..(1u64 << m))
        .into_par_iter()
        .map(|mask| -> Result<Acc> {
            let mut acc = zero();
            let set = IndexSet::from_mask(m, mask);
            let h_j = set.subspace(tol);
            acc.max_cos = subspace::friedrichs_cos(&kernel, &h_j)?;
            let cols = f.synthesis().select_columns(set.indices());
            let gamma_j = linalg::reduced_min_modulus(&cols, &tol);
            if gamma_j.is_finite() {
                let sine = subspace::friedrichs_sin(&kernel, &h_j)?;
                acc.min_gamma = gamma_j;
                acc.witness = mask;
                acc.checked = 1;
                acc.lower_violation = (gamma_t * sine - gamma_j).max(0.0);
                acc.upper_violation = (gamma_j - norm_t * sine).max(0.0);
            }
            Ok(acc)
        })
        .try_reduce(zero, |a, b| {
            let (min_gamma, witness) = match a.min_gamma.partial_cmp(&b.min_gamma) {
                Some(std::cmp::Ordering::Less) => (a.min_gamma, a.witness),
                Some(std::cmp::Ordering::Greater) => (b.min_gamma, b.witness),
                _ => (a.min_gamma, a.witness.min(b.witness)),
            };
            Ok(Acc {
                min_gamma,
                witness,
                max_cos: a.max_cos.max(b.max_cos),
                checked: a.checked + b.checked,
                lower_violation: a.lower_violation.max(b.lower_violation),
                upper_violation: a.upper_violation.max(b.upper_violation),
            })
        })?;

    if acc.witness == u64::MAX {
        return Err(Error::NotAFrame(
            "every subfamily spans the zero space".into(),
        ));
    }
    let k_constant = 1.0 / (1.0 - acc.max_cos * acc.max_cos).max(0.0).sqrt();
    Ok(RieszEquivalenceReport {
        min_subset_gamma: acc.min_gamma,
        witness: IndexSet::from_mask(m, acc.witness),
        max_nullspace_cos: acc.max_cos,
        k_constant,
        lower_bound: gamma_t / k_constant,
        upper_bound: norm_t / k_constant,
        sandwich_checked: acc.checked,
        max_lower_violation: acc.lower_violation,
        max_upper_violation: acc.upper_violation,
        sandwich_ok: acc.lower_violation <= bounds::SANDWICH_TOL
            && acc.upper_violation <= bounds::SANDWICH_TOL,
    })
}

/// One point of the nullspace-tail curve.
#[derive(Clone, Debug, Serialize)]
pub struct TailPoint {
    pub dim: usize,
    pub riesz_constant: f64,
    pub max_cos: f64,
    #[serde(rename = "K")]
    pub k_constant: f64,
}

/// For each m builds the epimorphism T_m : C^m → C^{m-1} whose nullspace
/// is the span of the truncated tail vector (rows are a deterministic
/// orthonormal basis of the complement, conjugate-transposed), and
/// records the Riesz constant together with the nullspace compatibility
/// data. Genuine tails drive the Riesz constant to 0 while finitely
/// supported rules freeze the curve beyond their support.
pub fn nullspace_tail_experiment(rule: &bounds::TailRule, dims: &[usize]) -> Result<Vec<TailPoint>> {
    rule.validate()?;
    let tol = Tolerance::default();
    let cap = bounds::enum_cap();
    let mut out = Vec::with_capacity(dims.len());
    for &m in dims {
        if m > cap {
            return Err(Error::TooLarge { size: m, cap });
        }
        if m < 2 {
            return Err(Error::invalid(
                "tail experiments need dimension at least 2",
            ));
        }
        let v = rule.truncated(m);
        if !v.iter().any(|&x| x != 0.0) {
            return Err(Error::invalid(format!(
                "tail rule truncates to zero in dimension {m}"
            )));
        }
        let kernel = Subspace::from_span(&ComplexMatrix::from_real(m, 1, &v)?, tol);
        let synthesis = kernel.complement().basis().adjoint();
        let frame = FrameSystem::new(synthesis, tol)?;
        let (riesz, _) = riesz_constant(&frame)?;
        let report = riesz_compatibility_equivalence(&frame)?;
        out.push(TailPoint {
            dim: m,
            riesz_constant: riesz,
            max_cos: report.max_nullspace_cos,
            k_constant: report.k_constant,
        });
    }
    Ok(out)
}
