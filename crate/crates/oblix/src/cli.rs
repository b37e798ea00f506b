//! Batch front-end: load matrices/subspaces/weights, dispatch the library
//! operations, and emit JSON or CSV reports.
//!
//! Exit codes: 0 on success, 1 on I/O or validation errors, 2 when an
//! identity the library is built around is violated beyond tolerance (the
//! emitted report names the identity and the witness). Identical command
//! line and seed produce byte-identical reports.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bounds::{self, SamplingConfig};
use crate::error::{Error, Result};
use crate::frames;
use crate::io;
use crate::linalg::{self, Tolerance};
use crate::oblique::{self, WeightKind};
use crate::subspace;

#[derive(Parser, Debug)]
#[command(
    name = "oblix",
    about = "Weighted projections, subspace angles, scaled-projection bounds and Riesz-frame diagnostics",
    after_help = "The OBLIX_ENUM_CAP environment variable lowers the 2^20 subset-enumeration cap."
)]
pub struct Cli {
    /// Relative singular-value cutoff override.
    #[arg(long, global = true)]
    pub rel_rank: Option<f64>,
    /// Absolute equality tolerance override.
    #[arg(long, global = true)]
    pub abs_eq: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Friedrichs/Dixmier angles between two subspaces.
    Angles {
        /// Matrix file whose columns span the first subspace.
        #[arg(long = "m")]
        m: PathBuf,
        /// Matrix file whose columns span the second subspace.
        #[arg(long = "n")]
        n: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Weighted projection A (A*DA)^{-1} A*D with its norm diagnostics.
    Project {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        weight: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convex-hull decomposition of a weighted projection.
    Hull {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        weight: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerated and sampled bounds for sup_D ‖P_{D,S}‖.
    Bounds {
        /// Matrix file whose columns span S.
        #[arg(long)]
        subspace: PathBuf,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-sample duality of sector-weighted projection norms.
    Duality {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        mu: f64,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Frame bounds, Riesz constant and the compatibility equivalence.
    Frames {
        /// Synthesis matrix file or generator spec.
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Truncation-growth experiments (CSV output).
    Experiment {
        #[arg(long, value_enum)]
        kind: ExperimentKind,
        /// Tail rule: "geometric" or "finite".
        #[arg(long, default_value = "geometric")]
        rule: String,
        /// Ratio for the geometric rule.
        #[arg(long)]
        ratio: Option<f64>,
        /// Comma-separated entries for the finite-support rule.
        #[arg(long)]
        support: Option<String>,
        /// Inclusive dimension range, e.g. 2..8.
        #[arg(long, default_value = "2..8")]
        dims: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ExperimentKind {
    /// Growth of the compatibility constant K of a truncated tail span.
    Truncation,
    /// Riesz constants of frames with a prescribed analysis nullspace.
    NullspaceTail,
}

#[derive(Serialize)]
struct AnglesReport {
    friedrichs_cos: f64,
    dixmier_cos: f64,
    friedrichs_sin: f64,
    intersection_dim: usize,
    rel_rank: f64,
    abs_eq: f64,
}

#[derive(Serialize)]
struct ProjectReport {
    rows: usize,
    cols: usize,
    entries: Vec<[f64; 2]>,
    norm: f64,
    ljance_ptak_norm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    d_selfadjoint_defect: Option<f64>,
    range_dim: usize,
    nullspace_dim: usize,
    rel_rank: f64,
    abs_eq: f64,
}

#[derive(Serialize)]
struct HullReport {
    subsets: Vec<Vec<usize>>,
    weights: Vec<f64>,
    weight_sum: f64,
    reconstruction_error: f64,
    rel_rank: f64,
    abs_eq: f64,
}

#[derive(Serialize)]
struct BoundsReportOut {
    #[serde(flatten)]
    inner: bounds::BoundReport,
    rel_rank: f64,
    abs_eq: f64,
}

#[derive(Serialize)]
struct DualityReportOut {
    #[serde(flatten)]
    inner: bounds::DualityReport,
    tolerance: f64,
    rel_rank: f64,
    abs_eq: f64,
}

#[derive(Serialize)]
struct FramesReport {
    lower: f64,
    upper: f64,
    riesz_constant: f64,
    #[serde(rename = "witness_J")]
    witness_j: bounds::IndexSet,
    min_subset_gamma: f64,
    max_nullspace_cos: f64,
    #[serde(rename = "K")]
    k_constant: f64,
    lower_bound: f64,
    upper_bound: f64,
    sandwich_ok: bool,
    rel_rank: f64,
    abs_eq: f64,
}

/// Tolerance beyond which a violated identity flips the exit code to 2.
const NORM_IDENTITY_TOL: f64 = 1e-8;
const HULL_RECONSTRUCTION_TOL: f64 = 1e-8;
const HULL_WEIGHT_SUM_TOL: f64 = 1e-12;

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::invalid(format!("report serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn check_exists(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "input file {} does not exist",
            path.display()
        )))
    }
}

fn resolve_tolerance(cli: &Cli) -> Result<Tolerance> {
    Tolerance::new(
        cli.rel_rank.unwrap_or(Tolerance::DEFAULT_REL_RANK),
        cli.abs_eq.unwrap_or(Tolerance::DEFAULT_ABS_EQ),
    )
}

fn parse_dims(spec: &str) -> Result<Vec<usize>> {
    if let Some((a, b)) = spec.split_once("..") {
        let lo: usize = a.trim().parse().map_err(|_| {
            Error::invalid(format!("bad dimension range start {a:?}"))
        })?;
        let hi: usize = b.trim().parse().map_err(|_| {
            Error::invalid(format!("bad dimension range end {b:?}"))
        })?;
        if lo > hi {
            return Err(Error::invalid(format!("empty dimension range {spec:?}")));
        }
        Ok((lo..=hi).collect())
    } else {
        spec.split(',')
            .map(|tok| {
                tok.trim()
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad dimension {tok:?}")))
            })
            .collect()
    }
}

fn parse_support(spec: &str) -> Result<Vec<f64>> {
    spec.split(',')
        .map(|tok| {
            tok.trim()
                .parse()
                .map_err(|_| Error::invalid(format!("bad support entry {tok:?}")))
        })
        .collect()
}

fn csv_line(fields: &[String]) -> String {
    fields.join(",")
}

/// Runs one command and returns the report text (JSON or CSV).
pub fn run(cli: &Cli) -> Result<String> {
    let tol = resolve_tolerance(cli)?;
    match &cli.command {
        Command::Angles { m, n, out } => {
            check_exists(m)?;
            check_exists(n)?;
            let (sm, warn_m) = io::load_subspace(m, tol)?;
            let (sn, warn_n) = io::load_subspace(n, tol)?;
            if warn_m {
                eprintln!("warning: basis in {} re-orthonormalized", m.display());
            }
            if warn_n {
                eprintln!("warning: basis in {} re-orthonormalized", n.display());
            }
            let pair = subspace::angle_pair(&sm, &sn)?;
            let report = to_json(&AnglesReport {
                friedrichs_cos: pair.friedrichs_cos,
                dixmier_cos: pair.dixmier_cos,
                friedrichs_sin: pair.friedrichs_sin,
                intersection_dim: pair.intersection_dim,
                rel_rank: tol.rel_rank,
                abs_eq: tol.abs_eq,
            })?;
            emit(out.as_deref(), &report)?;
            Ok(report)
        }
        Command::Project {
            matrix,
            weight,
            out,
        } => {
            check_exists(matrix)?;
            check_exists(weight)?;
            let a = io::load_matrix(matrix)?;
            let d = io::load_weight(weight)?;
            let p = oblique::weighted_projection(&a, &d)?;
            let norm = p.norm();
            let lp = oblique::ljance_ptak_norm(&p)?;
            let d_defect = if matches!(d.kind(), WeightKind::MuCone(_)) {
                None
            } else {
                let dm = d.as_matrix();
                Some(linalg::operator_norm(
                    &(&(&dm * p.matrix()) - &(&p.matrix().adjoint() * &dm)),
                ))
            };
            let report = to_json(&ProjectReport {
                rows: p.matrix().rows(),
                cols: p.matrix().cols(),
                entries: p
                    .matrix()
                    .entries_row_major()
                    .iter()
                    .map(|z| [z.re, z.im])
                    .collect(),
                norm,
                ljance_ptak_norm: lp,
                d_selfadjoint_defect: d_defect,
                range_dim: p.range().dim(),
                nullspace_dim: p.nullspace().dim(),
                rel_rank: tol.rel_rank,
                abs_eq: tol.abs_eq,
            })?;
            emit(out.as_deref(), &report)?;
            if (norm - lp).abs() > NORM_IDENTITY_TOL {
                return Err(Error::identity(
                    "projection norm formula",
                    format!("operator norm {norm} vs angle formula {lp}"),
                ));
            }
            Ok(report)
        }
        Command::Hull {
            matrix,
            weight,
            out,
        } => {
            check_exists(matrix)?;
            check_exists(weight)?;
            let a = io::load_matrix(matrix)?;
            let d = io::load_weight(weight)?;
            let hull = bounds::bental_teboulle(&a, &d)?;
            let direct = oblique::weighted_projection(&a, &d)?;
            let err = linalg::operator_norm(&(&hull.reconstruct() - direct.matrix()));
            let weight_sum = hull.weight_sum();
            let report = to_json(&HullReport {
                subsets: hull
                    .members
                    .iter()
                    .map(|m| m.index_set.indices().to_vec())
                    .collect(),
                weights: hull.members.iter().map(|m| m.weight).collect(),
                weight_sum,
                reconstruction_error: err,
                rel_rank: tol.rel_rank,
                abs_eq: tol.abs_eq,
            })?;
            emit(out.as_deref(), &report)?;
            if err > HULL_RECONSTRUCTION_TOL {
                return Err(Error::identity(
                    "hull decomposition",
                    format!("reconstruction error {err:.3e}"),
                ));
            }
            if (weight_sum - 1.0).abs() > HULL_WEIGHT_SUM_TOL {
                return Err(Error::identity(
                    "hull weight normalization",
                    format!("weights sum to {weight_sum}"),
                ));
            }
            Ok(report)
        }
        Command::Bounds {
            subspace: path,
            samples,
            seed,
            out,
        } => {
            check_exists(path)?;
            let (s, warn) = io::load_subspace(path, tol)?;
            if warn {
                eprintln!("warning: basis in {} re-orthonormalized", path.display());
            }
            let report_data = bounds::stewart_oleary(
                &s,
                &SamplingConfig {
                    samples: *samples,
                    seed: *seed,
                },
            )?;
            let sampled_over = report_data.sup_estimate > report_data.max_over_q + 1e-8;
            let report = to_json(&BoundsReportOut {
                inner: report_data,
                rel_rank: tol.rel_rank,
                abs_eq: tol.abs_eq,
            })?;
            emit(out.as_deref(), &report)?;
            if sampled_over {
                return Err(Error::identity(
                    "sampled supremum dominated by enumeration",
                    "a sampled weight beat the enumerated maximum".to_string(),
                ));
            }
            Ok(report)
        }
        Command::Duality {
            matrix,
            mu,
            samples,
            seed,
            out,
        } => {
            check_exists(matrix)?;
            let a = io::load_matrix(matrix)?;
            let data = bounds::complex_cone_duality(&a, *mu, *samples, *seed)?;
            let violations = data.violations;
            let max_disc = data.max_discrepancy;
            let report = to_json(&DualityReportOut {
                inner: data,
                tolerance: bounds::DUALITY_TOL,
                rel_rank: tol.rel_rank,
                abs_eq: tol.abs_eq,
            })?;
            emit(out.as_deref(), &report)?;
            if violations > 0 {
                return Err(Error::identity(
                    "sector-weight duality",
                    format!("{violations} samples disagreed (max discrepancy {max_disc:.3e})"),
                ));
            }
            Ok(report)
        }
        Command::Frames { frame, out } => {
            check_exists(frame)?;
            let f = io::load_frame(frame, tol)?;
            let b = frames::frame_bounds(&f)?;
            let (riesz, witness) = frames::riesz_constant(&f)?;
            let eq = frames::riesz_compatibility_equivalence(&f)?;
            let sandwich_ok = eq.sandwich_ok;
            let report = to_json(&FramesReport {
                lower: b.lower,
                upper: b.upper,
                riesz_constant: riesz,
                witness_j: witness,
                min_subset_gamma: eq.min_subset_gamma,
                max_nullspace_cos: eq.max_nullspace_cos,
                k_constant: eq.k_constant,
                lower_bound: eq.lower_bound,
                upper_bound: eq.upper_bound,
                sandwich_ok,
                rel_rank: tol.rel_rank,
                abs_eq: tol.abs_eq,
            })?;
            emit(out.as_deref(), &report)?;
            if !sandwich_ok {
                return Err(Error::identity(
                    "gamma sandwich",
                    format!(
                        "violations: lower {:.3e}, upper {:.3e}",
                        eq.max_lower_violation, eq.max_upper_violation
                    ),
                ));
            }
            Ok(report)
        }
        Command::Experiment {
            kind,
            rule,
            ratio,
            support,
            dims,
            out,
        } => {
            let dims = parse_dims(dims)?;
            let entries = support.as_deref().map(parse_support).transpose()?;
            let rule = io::tail_rule_from_parts(rule, *ratio, entries)?;
            let report = match kind {
                ExperimentKind::Truncation => {
                    let curve = bounds::truncation_growth(&rule, &dims)?;
                    let mut lines = vec!["dim,K,min_mI".to_string()];
                    for point in &curve {
                        lines.push(csv_line(&[
                            point.dim.to_string(),
                            point.k_constant.to_string(),
                            point.min_m_i.to_string(),
                        ]));
                    }
                    lines.join("\n") + "\n"
                }
                ExperimentKind::NullspaceTail => {
                    let curve = frames::nullspace_tail_experiment(&rule, &dims)?;
                    let mut lines = vec!["dim,riesz_constant,max_cos,K".to_string()];
                    for point in &curve {
                        lines.push(csv_line(&[
                            point.dim.to_string(),
                            point.riesz_constant.to_string(),
                            point.max_cos.to_string(),
                            point.k_constant.to_string(),
                        ]));
                    }
                    lines.join("\n") + "\n"
                }
            };
            emit(out.as_deref(), &report)?;
            Ok(report)
        }
    }
}

fn emit(out: Option<&Path>, report: &str) -> Result<()> {
    if let Some(path) = out {
        std::fs::write(path, report)?;
    }
    Ok(())
}

/// Entry point used by the binary: prints the report to stdout and maps
/// errors to exit codes (1 = usage/I-O, 2 = identity violated).
pub fn main_impl(cli: &Cli) -> i32 {
    match run(cli) {
        Ok(report) => {
            print!("{report}");
            0
        }
        Err(Error::IdentityViolation { identity, detail }) => {
            let body = serde_json::json!({
                "error": "identity_violation",
                "identity": identity,
                "witness": detail,
            });
            println!("{body}");
            eprintln!("identity violated: {identity}: {detail}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
