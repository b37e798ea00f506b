//! Dense complex matrix carrier.
//!
//! `ComplexMatrix` is the universal operator type of the crate: weights,
//! projections, bases and general operators are all stored as one of these.
//! Entries are kept in a `nalgebra::DMatrix<Complex64>`; construction
//! validates finiteness so downstream numerics never meet NaN/Inf.
//!
//! The shared on-disk form is JSON, row-major:
//!
//! ```text
//! {"rows": m, "cols": n, "entries": [[re, im], ...]}
//! ```

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Index, Mul, Sub};

use crate::error::{Error, Result};

/// Complex scalar used everywhere in the crate.
pub type Scalar = Complex64;

/// Dense complex matrix with validated (finite) entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(pub(crate) DMatrix<Scalar>);

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    ///
    /// Fails when the entry count does not match `rows * cols` or when any
    /// entry is non-finite.
    pub fn new(rows: usize, cols: usize, entries: Vec<Scalar>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::invalid(format!(
                "expected {} entries for a {}x{} matrix, got {}",
                rows * cols,
                rows,
                cols,
                entries.len()
            )));
        }
        if let Some(z) = entries.iter().find(|z| !is_finite(z)) {
            return Err(Error::invalid(format!("non-finite entry {z}")));
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, &entries)))
    }

    /// Builds a real matrix from row-major `f64` entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            entries.iter().map(|&x| Scalar::new(x, 0.0)).collect(),
        )
    }

    /// Column vector from a complex slice.
    pub fn column(entries: &[Scalar]) -> Result<Self> {
        Self::new(entries.len(), 1, entries.to_vec())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    /// Diagonal square matrix from the given diagonal entries.
    pub fn from_diagonal(diag: &[Scalar]) -> Self {
        let n = diag.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        Self(m)
    }

    pub(crate) fn from_inner(inner: DMatrix<Scalar>) -> Self {
        Self(inner)
    }

    pub(crate) fn inner(&self) -> &DMatrix<Scalar> {
        &self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    /// True when either dimension is zero.
    pub fn is_empty(&self) -> bool {
        self.rows() == 0 || self.cols() == 0
    }

    pub fn get(&self, row: usize, col: usize) -> Scalar {
        self.0[(row, col)]
    }

    /// Entries in row-major order.
    pub fn entries_row_major(&self) -> Vec<Scalar> {
        let (m, n) = (self.rows(), self.cols());
        let mut out = Vec::with_capacity(m * n);
        for i in 0..m {
            for j in 0..n {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, factor: Scalar) -> Self {
        Self(self.0.map(|z| z * factor))
    }

    /// Largest absolute entry; cheap size gauge used for relative checks.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// True when any entry overflowed to NaN/Inf during arithmetic.
    pub fn has_non_finite(&self) -> bool {
        self.0.iter().any(|z| !is_finite(z))
    }

    /// Rows selected by `indices`, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut m = DMatrix::zeros(indices.len(), self.cols());
        for (out_i, &i) in indices.iter().enumerate() {
            for j in 0..self.cols() {
                m[(out_i, j)] = self.0[(i, j)];
            }
        }
        Self(m)
    }

    /// Columns selected by `indices`, in the given order.
    pub fn select_columns(&self, indices: &[usize]) -> Self {
        let mut m = DMatrix::zeros(self.rows(), indices.len());
        for (out_j, &j) in indices.iter().enumerate() {
            for i in 0..self.rows() {
                m[(i, out_j)] = self.0[(i, j)];
            }
        }
        Self(m)
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &Self) -> Result<Self> {
        if self.rows() != other.rows() {
            return Err(Error::invalid("hcat: row counts differ"));
        }
        let mut m = DMatrix::zeros(self.rows(), self.cols() + other.cols());
        m.view_mut((0, 0), (self.rows(), self.cols()))
            .copy_from(&self.0);
        m.view_mut((0, self.cols()), (other.rows(), other.cols()))
            .copy_from(&other.0);
        Ok(Self(m))
    }
}

fn is_finite(z: &Scalar) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Scalar;
    fn index(&self, idx: (usize, usize)) -> &Scalar {
        &self.0[idx]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix({}x{}){}", self.rows(), self.cols(), self.0)
    }
}

#[derive(Serialize, Deserialize)]
struct Wire {
    rows: usize,
    cols: usize,
    entries: Vec<[f64; 2]>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let wire = Wire {
            rows: self.rows(),
            cols: self.cols(),
            entries: self
                .entries_row_major()
                .iter()
                .map(|z| [z.re, z.im])
                .collect(),
        };
        wire.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = Wire::deserialize(deserializer)?;
        let entries = wire
            .entries
            .iter()
            .map(|&[re, im]| Scalar::new(re, im))
            .collect();
        ComplexMatrix::new(wire.rows, wire.cols, entries).map_err(D::Error::custom)
    }
}
