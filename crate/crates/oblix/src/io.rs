//! File input: matrix literals (JSON or CSV), subspace bases, diagonal
//! weights, and frame inputs (synthesis matrix or generator spec).
//!
//! The matrix JSON form is shared project-wide:
//! `{"rows": m, "cols": n, "entries": [[re, im], ...]}` row-major. CSV is
//! accepted for real matrices, one row per line, comma-separated.

use std::path::Path;

use serde::Deserialize;

use crate::bounds::TailRule;
use crate::error::{Error, Result};
use crate::frames::FrameSystem;
use crate::linalg::{self, Tolerance};
use crate::matrix::{ComplexMatrix, Scalar};
use crate::oblique::DiagonalWeight;
use crate::subspace::Subspace;

fn parse_err(path: &Path, detail: impl std::fmt::Display) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        detail: detail.to_string(),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| parse_err(path, e))
}

fn parse_csv_matrix(path: &Path, text: &str) -> Result<ComplexMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        for (field, token) in line.split(',').enumerate() {
            let value: f64 = token.trim().parse().map_err(|_| {
                parse_err(
                    path,
                    format!("line {}, field {}: not a number: {token:?}", lineno + 1, field + 1),
                )
            })?;
            row.push(value);
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(parse_err(
                    path,
                    format!(
                        "line {}: expected {} fields, got {}",
                        lineno + 1,
                        first.len(),
                        row.len()
                    ),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err(path, "no data rows"));
    }
    let (m, n) = (rows.len(), rows[0].len());
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    ComplexMatrix::from_real(m, n, &flat).map_err(|e| parse_err(path, e))
}

/// Loads a matrix from JSON (by content) or CSV.
pub fn load_matrix(path: &Path) -> Result<ComplexMatrix> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        serde_json::from_str(&text).map_err(|e| parse_err(path, e))
    } else {
        parse_csv_matrix(path, &text)
    }
}

/// Loads a subspace given by a matrix of spanning columns.
///
/// Returns the subspace and whether orthonormalization changed the basis
/// beyond 1e-8 (the caller is expected to warn in that case).
pub fn load_subspace(path: &Path, tol: Tolerance) -> Result<(Subspace, bool)> {
    let m = load_matrix(path)?;
    if m.cols() == 0 || m.rows() == 0 {
        return Err(parse_err(path, "subspace basis must be a nonempty matrix"));
    }
    let gram = &m.adjoint() * &m;
    let defect = linalg::operator_norm(&(&gram - &ComplexMatrix::identity(m.cols())));
    let corrected = defect > 1e-8;
    let s = Subspace::from_span(&m, tol);
    if s.dim() < m.cols() && !corrected {
        // orthonormal input cannot be rank deficient; belt and braces
        return Err(parse_err(path, "spanning columns are rank deficient"));
    }
    Ok((s, corrected))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum WeightEntries {
    Complex(Vec<[f64; 2]>),
    Real(Vec<f64>),
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum WeightKindWire {
    PositiveDefinite,
    PositiveSemidefinite,
    MuCone(f64),
}

#[derive(Deserialize)]
struct WeightWire {
    entries: WeightEntries,
    kind: WeightKindWire,
}

/// Loads a diagonal weight from JSON:
/// `{"entries": [1.0, 2.0] | [[re, im], ...], "kind": "positive_definite" |
/// "positive_semidefinite" | {"mu_cone": 0.5}}`.
pub fn load_weight(path: &Path) -> Result<DiagonalWeight> {
    let text = read(path)?;
    let wire: WeightWire = serde_json::from_str(&text).map_err(|e| parse_err(path, e))?;
    let complex_entries: Vec<Scalar> = match &wire.entries {
        WeightEntries::Complex(v) => v.iter().map(|&[re, im]| Scalar::new(re, im)).collect(),
        WeightEntries::Real(v) => v.iter().map(|&x| Scalar::new(x, 0.0)).collect(),
    };
    let real_entries: Vec<f64> = complex_entries.iter().map(|z| z.re).collect();
    let imag_norm: f64 = complex_entries.iter().map(|z| z.im.abs()).sum();
    let weight = match wire.kind {
        WeightKindWire::PositiveDefinite => {
            if imag_norm != 0.0 {
                return Err(parse_err(path, "positive definite weights must be real"));
            }
            DiagonalWeight::positive_definite(real_entries)
        }
        WeightKindWire::PositiveSemidefinite => {
            if imag_norm != 0.0 {
                return Err(parse_err(path, "semidefinite weights must be real"));
            }
            DiagonalWeight::positive_semidefinite(real_entries)
        }
        WeightKindWire::MuCone(mu) => DiagonalWeight::mu_cone(complex_entries, mu),
    };
    weight.map_err(|e| parse_err(path, e))
}

#[derive(Deserialize)]
struct GeneratorWire {
    kind: String,
    rule: String,
    #[serde(default)]
    ratio: Option<f64>,
    #[serde(default)]
    entries: Option<Vec<f64>>,
    dim: usize,
}

/// Frame input: either a matrix file (columns are the frame vectors) or a
/// generator spec like
/// `{"kind": "nullspace_tail", "rule": "geometric", "ratio": 0.5, "dim": 5}`.
pub fn load_frame(path: &Path, tol: Tolerance) -> Result<FrameSystem> {
    let text = read(path)?;
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') && text.contains("\"kind\"") {
        let wire: GeneratorWire = serde_json::from_str(&text).map_err(|e| parse_err(path, e))?;
        if wire.kind != "nullspace_tail" {
            return Err(parse_err(
                path,
                format!("unknown generator kind {:?}", wire.kind),
            ));
        }
        let rule = tail_rule_from_parts(&wire.rule, wire.ratio, wire.entries.clone())
            .map_err(|e| parse_err(path, e))?;
        let v = rule.truncated(wire.dim);
        if wire.dim < 2 || !v.iter().any(|&x| x != 0.0) {
            return Err(parse_err(path, "generator dimension too small for the rule"));
        }
        let kernel = Subspace::from_span(&ComplexMatrix::from_real(wire.dim, 1, &v)?, tol);
        let synthesis = kernel.complement().basis().adjoint();
        FrameSystem::new(synthesis, tol).map_err(|e| parse_err(path, e))
    } else {
        let m = load_matrix(path)?;
        FrameSystem::new(m, tol).map_err(|e| parse_err(path, e))
    }
}

/// Builds a tail rule from CLI-ish parts: rule name plus ratio or
/// explicit entries.
pub fn tail_rule_from_parts(
    rule: &str,
    ratio: Option<f64>,
    entries: Option<Vec<f64>>,
) -> Result<TailRule> {
    let rule = match rule {
        "geometric" => TailRule::Geometric {
            ratio: ratio.unwrap_or(0.5),
        },
        "finite" => TailRule::FiniteSupport {
            entries: entries.ok_or_else(|| {
                Error::invalid("finite-support rule needs explicit entries")
            })?,
        },
        other => {
            return Err(Error::invalid(format!(
                "unknown tail rule {other:?} (expected \"geometric\" or \"finite\")"
            )))
        }
    };
    rule.validate()?;
    Ok(rule)
}
