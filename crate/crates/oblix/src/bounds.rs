//! Combinatorial machinery for scaled-projection bounds: enumeration of
//! diagonal projections, the convex-hull decomposition of weighted
//! projections over invertible square subsystems, the sup/max identity
//! tying weighted-projection norms to minimal singular values of basis row
//! subsets, complex-weight duality, and truncation-growth experiments.
//!
//! Exact enumeration is the proof device here, so problem sizes are capped:
//! operations that sweep all 2^n index subsets refuse to run past
//! [`enum_cap`]. Sweeps run in parallel; reductions are associative
//! max/min with a total (value, mask) order, so results are deterministic
//! regardless of scheduling.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, Tolerance};
use crate::matrix::{ComplexMatrix, Scalar};
use crate::oblique::{self, DiagonalWeight, ObliqueProjection, WeightKind};
use crate::subspace::{self, Subspace};

/// Hard enumeration cap: at most 2^20 subsets per sweep.
pub const DEFAULT_ENUM_CAP: usize = 20;

/// Environment variable that lowers the enumeration cap.
pub const ENUM_CAP_ENV: &str = "OBLIX_ENUM_CAP";

/// Effective enumeration cap; `OBLIX_ENUM_CAP` can lower (never raise) it.
pub fn enum_cap() -> usize {
    match std::env::var(ENUM_CAP_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) => n.min(DEFAULT_ENUM_CAP),
            Err(_) => DEFAULT_ENUM_CAP,
        },
        Err(_) => DEFAULT_ENUM_CAP,
    }
}

fn check_cap(size: usize) -> Result<()> {
    let cap = enum_cap();
    if size > cap {
        Err(Error::TooLarge { size, cap })
    } else {
        Ok(())
    }
}

/// Sorted subset of {0, …, ambient_dim − 1}, identifying a diagonal
/// projection Q_J and the coordinate subspace H_J.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSet {
    ambient_dim: usize,
    indices: Vec<usize>,
}

impl IndexSet {
    pub fn new(ambient_dim: usize, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        for pair in indices.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::invalid(format!("duplicate index {}", pair[0])));
            }
        }
        if let Some(&last) = indices.last() {
            if last >= ambient_dim {
                return Err(Error::invalid(format!(
                    "index {last} out of range for ambient dimension {ambient_dim}"
                )));
            }
        }
        Ok(Self {
            ambient_dim,
            indices,
        })
    }

    pub fn from_mask(ambient_dim: usize, mask: u64) -> Self {
        let indices = (0..ambient_dim).filter(|i| mask >> i & 1 == 1).collect();
        Self {
            ambient_dim,
            indices,
        }
    }

    pub fn mask(&self) -> u64 {
        self.indices.iter().fold(0u64, |m, &i| m | 1 << i)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn complement(&self) -> Self {
        let indices = (0..self.ambient_dim)
            .filter(|i| !self.indices.contains(i))
            .collect();
        Self {
            ambient_dim: self.ambient_dim,
            indices,
        }
    }

    /// The coordinate subspace H_J spanned by the selected basis vectors.
    pub fn subspace(&self, tol: Tolerance) -> Subspace {
        Subspace::coordinate(self.ambient_dim, &self.indices, tol)
            .expect("validated index set")
    }
}

impl Serialize for IndexSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.indices.serialize(serializer)
    }
}

/// One member of the Ben-Tal–Teboulle hull: a diagonal projection index
/// set, its convex weight, and the projection A (QA)^{-1} Q.
#[derive(Clone, Debug)]
pub struct HullMember {
    pub index_set: IndexSet,
    pub weight: f64,
    pub projection: ObliqueProjection,
}

/// Convex-hull decomposition of a weighted projection.
#[derive(Clone, Debug)]
pub struct HullDecomposition {
    pub members: Vec<HullMember>,
}

impl HullDecomposition {
    /// Σ λ_Q P_Q.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.members[0].projection.ambient_dim();
        let mut acc = ComplexMatrix::zeros(n, n);
        for member in &self.members {
            acc = &acc + &member.projection.matrix().scale(Scalar::new(member.weight, 0.0));
        }
        acc
    }

    pub fn weight_sum(&self) -> f64 {
        self.members.iter().map(|m| m.weight).sum()
    }
}

/// The subsets Q of row indices for which the square subsystem QA is
/// invertible. By the position-P' characterization this coincides with the
/// subsets whose coordinate subspace is in position P' with R(A); both
/// classifications are computed and must agree.
pub fn enumerate_ja(a: &ComplexMatrix, tol: &Tolerance) -> Result<Vec<IndexSet>> {
    let (m, n) = (a.rows(), a.cols());
    check_cap(m)?;
    if n == 0 || linalg::numerical_rank(a, tol) < n {
        return Err(Error::NotFullRank(format!(
            "A is {m}x{n} with numerical rank < {n}"
        )));
    }
    let range_basis = linalg::orthonormal_range(a, tol);
    let u = range_basis.basis();
    let mut out = Vec::new();
    for mask in 0u64..(1 << m) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let q = IndexSet::from_mask(m, mask);
        let det_test = linalg::numerical_rank(&a.select_rows(q.indices()), tol) == n;
        let pprime_test = linalg::numerical_rank(&u.select_rows(q.indices()), tol) == n;
        if det_test != pprime_test {
            return Err(Error::identity(
                "subset classification (det vs position P')",
                format!("subset {:?} classified inconsistently", q.indices()),
            ));
        }
        if det_test {
            out.push(q);
        }
    }
    Ok(out)
}

/// Ben-Tal–Teboulle hull decomposition of A (A*DA)^{-1} A*D:
/// weights det(D_Q) |det(A_Q)|² (normalized), members A (QA)^{-1} Q.
///
/// Weights are accumulated in log space and normalized by max-log
/// subtraction, since the determinant products overflow doubles for wide
/// weight ranges.
pub fn bental_teboulle(a: &ComplexMatrix, d: &DiagonalWeight) -> Result<HullDecomposition> {
    let tol = Tolerance::default();
    if !matches!(d.kind(), WeightKind::PositiveDefinite) {
        return Err(Error::InvalidWeight(
            "the hull decomposition needs a positive definite diagonal weight".into(),
        ));
    }
    if d.dim() != a.rows() {
        return Err(Error::AmbientMismatch {
            left: a.rows(),
            right: d.dim(),
        });
    }
    let subsets = enumerate_ja(a, &tol)?;
    let range = linalg::orthonormal_range(a, &tol);

    let mut log_weights = Vec::with_capacity(subsets.len());
    for q in &subsets {
        let mut lw = 0.0f64;
        for &i in q.indices() {
            lw += d.entries()[i].re.ln();
        }
        let sub = a.select_rows(q.indices());
        let dsub = linalg::svd(&sub)?;
        for s in &dsub.singular_values {
            lw += 2.0 * s.ln();
        }
        log_weights.push(lw);
    }
    let max_log = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scaled: Vec<f64> = log_weights.iter().map(|&l| (l - max_log).exp()).collect();
    let total: f64 = scaled.iter().sum();
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::NumericalUnderflow);
    }

    let mut members = Vec::with_capacity(subsets.len());
    for (q, w) in subsets.into_iter().zip(scaled) {
        let sub = a.select_rows(q.indices());
        let inv = linalg::pinv(&sub, &tol);
        let prod = a * &inv; // m x n
        let mut matrix = ComplexMatrix::zeros(a.rows(), a.rows());
        for (pos, &col) in q.indices().iter().enumerate() {
            for r in 0..a.rows() {
                matrix.0[(r, col)] = prod.0[(r, pos)];
            }
        }
        let nullsp = q.complement().subspace(tol);
        let projection = ObliqueProjection::from_parts(matrix, range.clone(), nullsp);
        members.push(HullMember {
            index_set: q,
            weight: w / total,
            projection,
        });
    }
    Ok(HullDecomposition { members })
}

/// m_I: the minimal nonzero singular value of the rows of the orthonormal
/// basis of S selected by I; `+∞` when the row subselection vanishes.
pub fn m_i(s: &Subspace, i: &IndexSet) -> Result<f64> {
    if i.is_empty() {
        return Err(Error::invalid("m_I needs a nonempty index set"));
    }
    if i.ambient_dim() != s.ambient_dim() {
        return Err(Error::AmbientMismatch {
            left: i.ambient_dim(),
            right: s.ambient_dim(),
        });
    }
    let rows = s.basis().select_rows(i.indices());
    Ok(linalg::reduced_min_modulus(&rows, &s.tol()))
}

/// Seeded sampling parameters for the supremum estimate.
#[derive(Clone, Copy, Debug)]
pub struct SamplingConfig {
    pub samples: usize,
    pub seed: u64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            samples: 2000,
            seed: 0,
        }
    }
}

/// Enumerated and sampled bounds for sup_D ‖P_{D,S}‖.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    #[serde(rename = "max_over_Q")]
    pub max_over_q: f64,
    #[serde(rename = "min_mI")]
    pub min_m_i: f64,
    #[serde(rename = "K")]
    pub k_constant: f64,
    #[serde(rename = "sup_sampled")]
    pub sup_estimate: f64,
    pub samples: usize,
    pub seed: u64,
    #[serde(rename = "witness_Q")]
    pub witness_q: IndexSet,
    #[serde(rename = "witness_I")]
    pub witness_i: IndexSet,
}

struct SweepAcc {
    min_mi: f64,
    wit_i: u64,
    max_q: f64,
    wit_q: u64,
}

impl SweepAcc {
    fn empty() -> Self {
        Self {
            min_mi: f64::INFINITY,
            wit_i: u64::MAX,
            max_q: f64::NEG_INFINITY,
            wit_q: u64::MAX,
        }
    }

    fn combine(a: Self, b: Self) -> Self {
        let (min_mi, wit_i) = match a.min_mi.partial_cmp(&b.min_mi) {
            Some(std::cmp::Ordering::Less) => (a.min_mi, a.wit_i),
            Some(std::cmp::Ordering::Greater) => (b.min_mi, b.wit_i),
            _ => (a.min_mi, a.wit_i.min(b.wit_i)),
        };
        let (max_q, wit_q) = match a.max_q.partial_cmp(&b.max_q) {
            Some(std::cmp::Ordering::Greater) => (a.max_q, a.wit_q),
            Some(std::cmp::Ordering::Less) => (b.max_q, b.wit_q),
            _ => (a.max_q, a.wit_q.min(b.wit_q)),
        };
        Self {
            min_mi,
            wit_i,
            max_q,
            wit_q,
        }
    }
}

/// Full subset sweep: max ‖P_{Q,S}‖ over diagonal projections in position
/// P' with S, and min m_I over all nonempty I.
pub(crate) fn enumeration_bounds(s: &Subspace) -> Result<(f64, IndexSet, f64, IndexSet)> {
    let n = s.ambient_dim();
    let p = s.dim();
    check_cap(n)?;
    if p == 0 {
        return Err(Error::invalid(
            "enumeration bounds need a nonzero subspace",
        ));
    }
    let tol = s.tol();
    let u = s.basis().clone();

    let acc = (1u64..(1u64 << n))
        .into_par_iter()
        .map(|mask| -> Result<SweepAcc> {
            let mut acc = SweepAcc::empty();
            let set = IndexSet::from_mask(n, mask);
            let rows = u.select_rows(set.indices());
            let mi = linalg::reduced_min_modulus(&rows, &tol);
            if mi.is_finite() {
                acc.min_mi = mi;
                acc.wit_i = mask;
            }
            if set.len() == p && linalg::numerical_rank(&rows, &tol) == p {
                // position P' with S: assemble P_{Q,S} = U (U_J)^{-1} R_J
                let inv = linalg::pinv(&rows, &tol);
                let prod = &u * &inv; // n x p
                let mut matrix = ComplexMatrix::zeros(n, n);
                for (pos, &col) in set.indices().iter().enumerate() {
                    for r in 0..n {
                        matrix.0[(r, col)] = prod.0[(r, pos)];
                    }
                }
                let nullsp = set.complement().subspace(tol);
                let proj = ObliqueProjection::from_parts(matrix.clone(), s.clone(), nullsp);
                let lp = oblique::ljance_ptak_norm(&proj)?;
                let op = linalg::operator_norm(&matrix);
                // internal cross-check of the norm identity; the tolerance
                // scales with K^2 * eps, the rounding the assembly carries
                let guard = 1e-8f64.max(lp * lp * 1e-13);
                if (lp - op).abs() > guard {
                    return Err(Error::identity(
                        "projection norm formula",
                        format!(
                            "subset {:?}: ‖P‖ = {op}, angle formula gives {lp}",
                            set.indices()
                        ),
                    ));
                }
                acc.max_q = lp;
                acc.wit_q = mask;
            }
            Ok(acc)
        })
        .try_reduce(SweepAcc::empty, |a, b| Ok(SweepAcc::combine(a, b)))?;

    if acc.wit_q == u64::MAX {
        return Err(Error::identity(
            "position P' enumeration",
            "no diagonal projection of rank dim S is in position P' with S",
        ));
    }
    Ok((
        acc.max_q,
        IndexSet::from_mask(n, acc.wit_q),
        acc.min_mi,
        IndexSet::from_mask(n, acc.wit_i),
    ))
}

/// ‖U (U*DU)^{-1} U* D‖ for a diagonal weight given by `entries`,
/// evaluated through the square root of D to keep the conditioning linear
/// in the weight ratio.
fn sampled_projection_norm(u: &ComplexMatrix, entries: &[f64], tol: &Tolerance) -> Result<f64> {
    let p = u.cols();
    let root: Vec<f64> = entries.iter().map(|&x| x.sqrt()).collect();
    let mut wu = u.clone();
    for (r, &w) in root.iter().enumerate() {
        for c in 0..p {
            wu.0[(r, c)] *= Scalar::new(w, 0.0);
        }
    }
    let mut pinv_w = linalg::pinv(&wu, tol); // p x n
    for r in 0..p {
        for (c, &w) in root.iter().enumerate() {
            pinv_w.0[(r, c)] *= Scalar::new(w, 0.0);
        }
    }
    let matrix = u * &pinv_w;
    Ok(linalg::operator_norm(&matrix))
}

/// Log-uniform positive weights on [1e-6, 1e6]: the suprema live at extreme
/// weight ratios, and log-uniform sampling probes ratios uniformly.
fn sample_positive_diagonal(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let (lo, hi) = ((1e-6f64).ln(), (1e6f64).ln());
    (0..n).map(|_| (lo + rng.gen::<f64>() * (hi - lo)).exp()).collect()
}

/// Stewart–O'Leary sweep for a subspace: exact enumeration of
/// max ‖P_{Q,S}‖ and min m_I (their product must be 1), plus a seeded
/// sampled estimate of sup ‖P_{D,S}‖ over positive diagonal weights.
pub fn stewart_oleary(s: &Subspace, cfg: &SamplingConfig) -> Result<BoundReport> {
    let (max_over_q, witness_q, min_m_i, witness_i) = enumeration_bounds(s)?;

    // the identity itself, with precision degrading as K² eps
    let product = max_over_q * min_m_i;
    let guard = 1e-8f64.max(max_over_q * max_over_q * 1e-14);
    if (product - 1.0).abs() > guard {
        return Err(Error::identity(
            "max ‖P_Q‖ · min m_I = 1",
            format!("product is {product}"),
        ));
    }

    let tol = s.tol();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let draws: Vec<Vec<f64>> = (0..cfg.samples)
        .map(|_| sample_positive_diagonal(&mut rng, s.ambient_dim()))
        .collect();
    let sup_estimate = draws
        .par_iter()
        .map(|entries| sampled_projection_norm(s.basis(), entries, &tol))
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;

    Ok(BoundReport {
        max_over_q,
        min_m_i,
        k_constant: max_over_q,
        sup_estimate,
        samples: cfg.samples,
        seed: cfg.seed,
        witness_q,
        witness_i,
    })
}

/// Checks that ‖P_{D_k,S}‖ for D_k = D0 + (1/k)I converges to the
/// semidefinite-path value ‖P_{D0,S}‖ and that the whole family respects
/// the enumerated bound.
///
/// The block formula makes the convergence O(1/k), so at k = 1000 the gap
/// is typically still ~1e-3. Convergence is accepted when either the last
/// gap is below 1e-6 outright (constant sequences) or the gaps keep
/// halving per decade of k, which a sequence heading to a wrong limit
/// cannot do.
pub fn semidefinite_limit_check(s: &Subspace, d0: &DiagonalWeight) -> Result<bool> {
    if matches!(d0.kind(), WeightKind::MuCone(_)) {
        return Err(Error::InvalidWeight(
            "the limit path is defined for real semidefinite weights".into(),
        ));
    }
    if d0.dim() != s.ambient_dim() {
        return Err(Error::AmbientMismatch {
            left: d0.dim(),
            right: s.ambient_dim(),
        });
    }
    let (max_over_q, _, _, _) = enumeration_bounds(s)?;
    let limit_norm = oblique::distinguished_projection_diag(d0, s)?.norm();
    if limit_norm > max_over_q + 1e-8 {
        return Ok(false);
    }
    let mut gaps = Vec::with_capacity(4);
    for k in [1.0f64, 10.0, 100.0, 1000.0] {
        let dk = d0.shifted(1.0 / k)?;
        let norm = oblique::distinguished_projection_diag(&dk, s)?.norm();
        if norm > max_over_q + 1e-8 {
            return Ok(false);
        }
        gaps.push((norm - limit_norm).abs());
    }
    let converged_outright = gaps[3] <= 1e-6;
    let shrinking = gaps[3] <= 0.5 * gaps[2] && gaps[2] <= 0.5 * gaps[1];
    Ok(converged_outright || shrinking)
}

/// Per-sample duality record for complex sector weights.
#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    pub mu: f64,
    pub samples: usize,
    pub accepted: usize,
    /// Samples rejected by the Gram condition guard (not failures).
    pub rejected: usize,
    /// Accepted samples whose two norms disagreed beyond tolerance.
    pub violations: usize,
    pub max_discrepancy: f64,
    pub chi_a_estimate: f64,
    pub chi_z_estimate: f64,
    pub seed: u64,
}

/// Per-sample tolerance for the two-sided norm equality.
pub const DUALITY_TOL: f64 = 1e-7;

/// Complex-weight duality: for D in the sector class, the weighted
/// projection norm onto R(A) under D equals the one onto R(A)^⊥ under
/// D^{-1}. Verified per sample, not merely in supremum.
pub fn complex_cone_duality(
    a: &ComplexMatrix,
    mu: f64,
    samples: usize,
    seed: u64,
) -> Result<DualityReport> {
    let tol = Tolerance::default();
    let (m, n) = (a.rows(), a.cols());
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(Error::invalid(format!("mu must be >= 0, got {mu}")));
    }
    if n == 0 || m <= n {
        return Err(Error::invalid(
            "duality needs a strictly tall full-rank matrix (m > n)",
        ));
    }
    if linalg::numerical_rank(a, &tol) < n {
        return Err(Error::NotFullRank(format!("A is {m}x{n} with rank < {n}")));
    }
    let z = linalg::nullspace(&a.adjoint(), &tol);
    let z_basis = z.basis().clone();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = ((1e-3f64).ln(), (1e3f64).ln());
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    let mut violations = 0usize;
    let mut max_discrepancy = 0.0f64;
    let mut chi_a = 0.0f64;
    let mut chi_z = 0.0f64;

    for _ in 0..samples {
        let entries: Vec<Scalar> = (0..m)
            .map(|_| {
                let re = (lo + rng.gen::<f64>() * (hi - lo)).exp();
                let im = if mu == 0.0 {
                    0.0
                } else {
                    rng.gen_range(-mu * re..mu * re)
                };
                Scalar::new(re, im)
            })
            .collect();
        let d = DiagonalWeight::mu_cone(entries, mu)?;
        let lhs = match oblique::weighted_projection(a, &d) {
            Ok(p) => p.norm(),
            Err(Error::SingularGram(_)) => {
                rejected += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let rhs = match oblique::weighted_projection(&z_basis, &d.inverse()?) {
            Ok(p) => p.norm(),
            Err(Error::SingularGram(_)) => {
                rejected += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        accepted += 1;
        let disc = (lhs - rhs).abs();
        max_discrepancy = max_discrepancy.max(disc);
        if disc > DUALITY_TOL {
            violations += 1;
        }
        chi_a = chi_a.max(lhs);
        chi_z = chi_z.max(rhs);
    }

    Ok(DualityReport {
        mu,
        samples,
        accepted,
        rejected,
        violations,
        max_discrepancy,
        chi_a_estimate: chi_a,
        chi_z_estimate: chi_z,
        seed,
    })
}

/// Rule generating the truncated vectors of the growth experiments.
#[derive(Clone, Debug)]
pub enum TailRule {
    /// Entries ratio^k, k = 0, 1, 2, …
    Geometric { ratio: f64 },
    /// Finitely many prescribed entries, zero beyond.
    FiniteSupport { entries: Vec<f64> },
}

impl TailRule {
    pub fn validate(&self) -> Result<()> {
        match self {
            TailRule::Geometric { ratio } => {
                if !(ratio.is_finite() && *ratio > 0.0 && *ratio < 1.0) {
                    return Err(Error::invalid(format!(
                        "geometric ratio must lie in (0, 1), got {ratio}"
                    )));
                }
            }
            TailRule::FiniteSupport { entries } => {
                if entries.iter().any(|x| !x.is_finite()) {
                    return Err(Error::invalid("finite-support entries must be finite"));
                }
                if !entries.iter().any(|&x| x != 0.0) {
                    return Err(Error::invalid("finite-support rule must be nonzero"));
                }
            }
        }
        Ok(())
    }

    /// First `m` entries of the infinite vector.
    pub fn truncated(&self, m: usize) -> Vec<f64> {
        match self {
            TailRule::Geometric { ratio } => (0..m).map(|k| ratio.powi(k as i32)).collect(),
            TailRule::FiniteSupport { entries } => (0..m)
                .map(|k| entries.get(k).copied().unwrap_or(0.0))
                .collect(),
        }
    }
}

/// One point of the truncation-growth curve.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthPoint {
    pub dim: usize,
    #[serde(rename = "K")]
    pub k_constant: f64,
    #[serde(rename = "min_mI")]
    pub min_m_i: f64,
}

/// Growth of the compatibility constant K for the span of a truncated,
/// normalized tail vector as the ambient dimension grows. A diverging
/// curve witnesses non-compatibility of the infinite-dimensional limit; a
/// rule supported in the first n coordinates freezes the curve at m ≥ n.
pub fn truncation_growth(rule: &TailRule, dims: &[usize]) -> Result<Vec<GrowthPoint>> {
    rule.validate()?;
    let tol = Tolerance::default();
    let mut out = Vec::with_capacity(dims.len());
    for &m in dims {
        check_cap(m)?;
        let v = rule.truncated(m);
        if !v.iter().any(|&x| x != 0.0) {
            return Err(Error::invalid(format!(
                "tail rule truncates to zero in dimension {m}"
            )));
        }
        let col = ComplexMatrix::from_real(m, 1, &v)?;
        let s = Subspace::from_span(&col, tol);
        let (max_over_q, _, min_m_i, _) = enumeration_bounds(&s)?;
        out.push(GrowthPoint {
            dim: m,
            k_constant: max_over_q,
            min_m_i,
        });
    }
    Ok(out)
}

/// Suprema of Friedrichs angles over classes of diagonal projections, with
/// the γ-sandwich verified along the way.
#[derive(Clone, Debug, Serialize)]
pub struct Equi2Report {
    /// sup over all index sets J of c[S, H_J].
    pub sup_all: f64,
    /// Same sup over finite-rank diagonal projections (every one, here).
    pub sup_finite: f64,
    /// Sup restricted to J with H_J ∩ S = {0}.
    pub sup_avoiding: f64,
    #[serde(rename = "K")]
    pub k_from_angles: f64,
    pub sandwich_checked: usize,
    pub max_lower_violation: f64,
    pub max_upper_violation: f64,
    pub sandwich_ok: bool,
}

/// Slack allowed on each side of the γ-sandwich.
pub const SANDWICH_TOL: f64 = 1e-10;

/// Equivalence sweep: the angle suprema over all / finite / S-avoiding
/// diagonal projections, plus the sandwich
/// γ(T) s ≤ γ(T P_{H_J}) ≤ ‖T‖ s with T = I − P_S and s = sin c[S, H_J].
pub fn equi2_check(s: &Subspace) -> Result<Equi2Report> {
    let n = s.ambient_dim();
    check_cap(n)?;
    let tol = s.tol();
    let t = &ComplexMatrix::identity(n) - &s.projector();
    let gamma_t = linalg::reduced_min_modulus(&t, &tol);
    let norm_t = linalg::operator_norm(&t);
    let proper = s.dim() < n; // T = 0 otherwise, the sandwich is vacuous

    struct Acc {
        sup_all: f64,
        sup_avoiding: f64,
        checked: usize,
        lower_violation: f64,
        upper_violation: f64,
    }
    let zero = || Acc {
        sup_all: 0.0,
        sup_avoiding: 0.0,
        checked: 0,
        lower_violation: 0.0,
        upper_violation: 0.0,
    };

    let acc = (0u64..(1u64 << n))
        .into_par_iter()
        .map(|mask| -> Result<Acc> {
            let mut acc = zero();
            let set = IndexSet::from_mask(n, mask);
            if set.is_empty() {
                return Ok(acc); // H_∅ = {0}: angle 0
            }
            let h_j = set.subspace(tol);
            let pair = subspace::angle_pair(s, &h_j)?;
            acc.sup_all = pair.friedrichs_cos;
            if pair.intersection_dim == 0 {
                acc.sup_avoiding = pair.friedrichs_cos;
            }
            if proper {
                let t_cols = t.select_columns(set.indices());
                let gamma_tp = linalg::reduced_min_modulus(&t_cols, &tol);
                if gamma_tp.is_finite() {
                    let sine = subspace::friedrichs_sin(s, &h_j)?;
                    acc.checked = 1;
                    acc.lower_violation = (gamma_t * sine - gamma_tp).max(0.0);
                    acc.upper_violation = (gamma_tp - norm_t * sine).max(0.0);
                }
            }
            Ok(acc)
        })
        .try_reduce(zero, |a, b| {
            Ok(Acc {
                sup_all: a.sup_all.max(b.sup_all),
                sup_avoiding: a.sup_avoiding.max(b.sup_avoiding),
                checked: a.checked + b.checked,
                lower_violation: a.lower_violation.max(b.lower_violation),
                upper_violation: a.upper_violation.max(b.upper_violation),
            })
        })?;

    let sup_all = acc.sup_all;
    let k_from_angles = 1.0 / (1.0 - sup_all * sup_all).max(0.0).sqrt();
    Ok(Equi2Report {
        sup_all,
        sup_finite: sup_all,
        sup_avoiding: acc.sup_avoiding,
        k_from_angles,
        sandwich_checked: acc.checked,
        max_lower_violation: acc.lower_violation,
        max_upper_violation: acc.upper_violation,
        sandwich_ok: acc.lower_violation <= SANDWICH_TOL && acc.upper_violation <= SANDWICH_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn line(entries: &[f64]) -> Subspace {
        let col = ComplexMatrix::from_real(entries.len(), 1, entries).unwrap();
        Subspace::from_span(&col, tol())
    }

    #[test]
    fn index_set_validation() {
        assert!(IndexSet::new(3, vec![2, 0]).is_ok());
        assert!(IndexSet::new(3, vec![0, 0]).is_err());
        assert!(IndexSet::new(3, vec![3]).is_err());
        let s = IndexSet::new(4, vec![3, 1]).unwrap();
        assert_eq!(s.indices(), &[1, 3]);
        assert_eq!(s.complement().indices(), &[0, 2]);
        assert_eq!(IndexSet::from_mask(4, s.mask()), s);
    }

    #[test]
    fn enumerate_ja_column_vector() {
        let a = ComplexMatrix::from_real(2, 1, &[1.0, 1.0]).unwrap();
        let ja = enumerate_ja(&a, &tol()).unwrap();
        let got: Vec<&[usize]> = ja.iter().map(|q| q.indices()).collect();
        assert_eq!(got, vec![&[0][..], &[1][..]]);
    }

    #[test]
    fn enumerate_ja_identity() {
        let ja = enumerate_ja(&ComplexMatrix::identity(3), &tol()).unwrap();
        assert_eq!(ja.len(), 1);
        assert_eq!(ja[0].indices(), &[0, 1, 2]);
    }

    #[test]
    fn enumerate_ja_three_by_two() {
        let a = ComplexMatrix::from_real(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]).unwrap();
        let ja = enumerate_ja(&a, &tol()).unwrap();
        assert_eq!(ja.len(), 3);
    }

    #[test]
    fn bental_teboulle_hand_instance() {
        // A = (1,1)^T, D = diag(1,2): weights 1/3, 2/3
        let a = ComplexMatrix::from_real(2, 1, &[1.0, 1.0]).unwrap();
        let d = DiagonalWeight::positive_definite(vec![1.0, 2.0]).unwrap();
        let hull = bental_teboulle(&a, &d).unwrap();
        assert_eq!(hull.members.len(), 2);
        assert_abs_diff_eq!(hull.members[0].weight, 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(hull.members[1].weight, 2.0 / 3.0, epsilon = 1e-12);
        let expected =
            ComplexMatrix::from_real(2, 2, &[1.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0]).unwrap();
        assert!(linalg::operator_norm(&(&hull.reconstruct() - &expected)) <= 1e-12);
        // member projections themselves
        let p0 = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 1.0, 0.0]).unwrap();
        assert!(linalg::operator_norm(&(hull.members[0].projection.matrix() - &p0)) <= 1e-12);
    }

    #[test]
    fn bental_teboulle_identity_case() {
        let a = ComplexMatrix::identity(2);
        let d = DiagonalWeight::positive_definite(vec![1.0, 1.0]).unwrap();
        let hull = bental_teboulle(&a, &d).unwrap();
        assert_eq!(hull.members.len(), 1);
        assert_abs_diff_eq!(hull.members[0].weight, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn bental_teboulle_reconstructs_weighted_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..20 {
            let entries: Vec<Scalar> = (0..8)
                .map(|_| Scalar::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let a = ComplexMatrix::new(4, 2, entries).unwrap();
            let d = DiagonalWeight::positive_definite(
                (0..4).map(|_| rng.gen_range(0.1..10.0)).collect(),
            )
            .unwrap();
            let hull = bental_teboulle(&a, &d).unwrap();
            let direct = oblique::weighted_projection(&a, &d).unwrap();
            let err = linalg::operator_norm(&(&hull.reconstruct() - direct.matrix()));
            assert!(err <= 1e-8, "reconstruction error {err}");
            assert!((hull.weight_sum() - 1.0).abs() <= 1e-12);
            assert!(hull.members.iter().all(|m| m.weight > 0.0));
        }
    }

    #[test]
    fn m_i_cases() {
        let s = line(&[1.0, 1.0]);
        let i0 = IndexSet::new(2, vec![0]).unwrap();
        assert_abs_diff_eq!(m_i(&s, &i0).unwrap(), 1.0 / 2f64.sqrt(), epsilon = 1e-12);

        let e1 = line(&[1.0, 0.0]);
        assert_abs_diff_eq!(m_i(&e1, &i0).unwrap(), 1.0, epsilon = 1e-12);
        let i1 = IndexSet::new(2, vec![1]).unwrap();
        assert!(m_i(&e1, &i1).unwrap().is_infinite());
        assert!(m_i(&e1, &IndexSet::new(2, vec![]).unwrap()).is_err());
    }

    #[test]
    fn stewart_oleary_diagonal_line() {
        let s = line(&[1.0, 1.0]);
        let report = stewart_oleary(&s, &SamplingConfig { samples: 200, seed: 7 }).unwrap();
        assert_abs_diff_eq!(report.max_over_q, 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(report.min_m_i, 1.0 / 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(report.k_constant, 2f64.sqrt(), epsilon = 1e-12);
        // deterministic witnesses: ties resolved toward the smaller mask
        assert_eq!(report.witness_q.indices(), &[0]);
        assert_eq!(report.witness_i.indices(), &[0]);
        assert!(report.sup_estimate <= report.max_over_q + 1e-8);
    }

    #[test]
    fn stewart_oleary_coordinate_line() {
        let s = line(&[1.0, 0.0]);
        let report = stewart_oleary(&s, &SamplingConfig { samples: 50, seed: 3 }).unwrap();
        assert_abs_diff_eq!(report.max_over_q, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(report.min_m_i, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn stewart_oleary_respects_env_cap() {
        // lowering only; parsing runs per call so the var can be set here
        std::env::set_var(ENUM_CAP_ENV, "3");
        let s = line(&[1.0, 1.0, 1.0, 1.0]);
        let got = stewart_oleary(&s, &SamplingConfig { samples: 10, seed: 1 });
        std::env::remove_var(ENUM_CAP_ENV);
        assert!(matches!(got, Err(Error::TooLarge { size: 4, cap: 3 })));
    }

    #[test]
    fn semidefinite_limit_cases() {
        let s = line(&[1.0, 1.0]);
        let identity = DiagonalWeight::positive_definite(vec![1.0, 1.0]).unwrap();
        assert!(semidefinite_limit_check(&s, &identity).unwrap());

        // D0 = diag(1,0): the limit is ‖P_{Q,S}‖ = sqrt(2)
        let d0 = DiagonalWeight::positive_semidefinite(vec![1.0, 0.0]).unwrap();
        assert!(semidefinite_limit_check(&s, &d0).unwrap());

        // D0 = 0: the projection collapses to P_S
        let zero = DiagonalWeight::positive_semidefinite(vec![0.0, 0.0]).unwrap();
        assert!(semidefinite_limit_check(&s, &zero).unwrap());
    }

    #[test]
    fn duality_zero_mu() {
        let a = ComplexMatrix::from_real(4, 2, &[1.0, 0.5, 0.0, 1.0, 1.0, -1.0, 0.5, 0.25])
            .unwrap();
        let report = complex_cone_duality(&a, 0.0, 100, 42).unwrap();
        assert_eq!(report.rejected, 0);
        assert_eq!(report.violations, 0);
        assert!(report.max_discrepancy <= DUALITY_TOL);
    }

    #[test]
    fn duality_coordinate_vector() {
        // A = e1 in C^2: both projections are diagonal with norm 1
        let a = ComplexMatrix::from_real(2, 1, &[1.0, 0.0]).unwrap();
        let report = complex_cone_duality(&a, 0.5, 50, 11).unwrap();
        assert_eq!(report.violations, 0);
        assert_abs_diff_eq!(report.chi_a_estimate, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(report.chi_z_estimate, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn duality_sector_weights() {
        let a = ComplexMatrix::from_real(4, 2, &[1.0, 0.5, 0.0, 1.0, 1.0, -1.0, 0.5, 0.25])
            .unwrap();
        let report = complex_cone_duality(&a, 1.0, 300, 5).unwrap();
        assert_eq!(report.violations, 0, "max discrepancy {}", report.max_discrepancy);
    }

    #[test]
    fn truncation_growth_rules() {
        // rule e1: contained in H_1, K ≡ 1
        let rule = TailRule::FiniteSupport { entries: vec![1.0] };
        let curve = truncation_growth(&rule, &[2, 3, 4]).unwrap();
        for point in &curve {
            assert_abs_diff_eq!(point.k_constant, 1.0, epsilon = 1e-10);
        }

        // geometric tail: strictly increasing K; closed form for a line is
        // K = 1 / min nonzero |v_i|
        let rule = TailRule::Geometric { ratio: 0.5 };
        let dims: Vec<usize> = (2..=6).collect();
        let curve = truncation_growth(&rule, &dims).unwrap();
        for (point, &m) in curve.iter().zip(&dims) {
            let expected = ((4f64.powi(m as i32) - 1.0) / 3.0).sqrt();
            assert_abs_diff_eq!(point.k_constant, expected, epsilon = 1e-9);
        }
        for pair in curve.windows(2) {
            assert!(pair[1].k_constant > pair[0].k_constant);
        }

        // finitely supported in H_3: constant for m >= 3
        let rule = TailRule::FiniteSupport {
            entries: vec![1.0, 0.5, 0.25],
        };
        let curve = truncation_growth(&rule, &[3, 4, 5, 6]).unwrap();
        for point in &curve[1..] {
            assert_abs_diff_eq!(point.k_constant, curve[0].k_constant, epsilon = 1e-10);
        }
    }

    #[test]
    fn equi2_coordinate_line() {
        let report = equi2_check(&line(&[1.0, 0.0])).unwrap();
        assert_abs_diff_eq!(report.sup_all, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(report.sup_avoiding, 0.0, epsilon = 1e-12);
        assert!(report.sandwich_ok);
    }

    #[test]
    fn equi2_diagonal_line() {
        let report = equi2_check(&line(&[1.0, 1.0])).unwrap();
        let c = 1.0 / 2f64.sqrt();
        assert_abs_diff_eq!(report.sup_all, c, epsilon = 1e-12);
        assert_abs_diff_eq!(report.sup_avoiding, c, epsilon = 1e-12);
        assert_abs_diff_eq!(report.sup_finite, report.sup_all, epsilon = 0.0);
        assert_abs_diff_eq!(report.k_from_angles, 2f64.sqrt(), epsilon = 1e-12);
        assert!(report.sandwich_ok);
    }

    fn random_subspace(ambient: usize, dim: usize, seed: u64) -> Subspace {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let entries: Vec<Scalar> = (0..ambient * dim)
            .map(|_| Scalar::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        Subspace::from_span(&ComplexMatrix::new(ambient, dim, entries).unwrap(), tol())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn stewart_identity_and_sampling(seed in 0u64..2000, n in 2usize..6) {
            let p = 1 + (seed as usize) % (n - 1);
            let s = random_subspace(n, p, seed);
            prop_assume!(s.dim() == p);
            let report = stewart_oleary(&s, &SamplingConfig { samples: 300, seed }).unwrap();
            prop_assert!((report.max_over_q * report.min_m_i - 1.0).abs() <= 1e-8);
            prop_assert!(report.sup_estimate <= report.max_over_q + 1e-8);
        }

        #[test]
        fn k_from_angles_matches_enumeration(seed in 0u64..2000, n in 2usize..6) {
            // the finite-dimensional main identity:
            // sup_D ‖P_{D,S}‖ = (1 - sup_J c[S,H_J]^2)^{-1/2}
            let p = 1 + (seed as usize) % (n - 1);
            let s = random_subspace(n, p, seed.wrapping_add(1));
            prop_assume!(s.dim() == p);
            let (max_q, _, _, _) = enumeration_bounds(&s).unwrap();
            let report = equi2_check(&s).unwrap();
            prop_assert!((max_q - report.k_from_angles).abs() <= 1e-6 * max_q.max(1.0),
                "enumeration {max_q} vs angles {}", report.k_from_angles);
            prop_assert!(report.sandwich_ok);
            prop_assert!(report.sup_avoiding <= report.sup_all + 1e-12);
        }

        #[test]
        fn dual_compatibility_constant(seed in 0u64..2000, n in 2usize..6, p in 1usize..3) {
            // c[S, D] = c[S^⊥, D]: identical K computed from angles
            let p = p.min(n - 1);
            let s = random_subspace(n, p, seed.wrapping_add(2));
            prop_assume!(s.dim() == p);
            let k_s = equi2_check(&s).unwrap().k_from_angles;
            let k_perp = equi2_check(&s.complement()).unwrap().k_from_angles;
            prop_assert!((k_s - k_perp).abs() <= 1e-8 * k_s.max(1.0), "K {k_s} vs K^⊥ {k_perp}");
        }
    }
}
