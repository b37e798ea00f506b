//! Exercises the C surface through the exported extern "C" functions,
//! including handle lifecycle, error codes, and a compiled-and-linked C
//! smoke program.

use oblix_capi::*;

fn matrix_from_real(rows: usize, cols: usize, entries: &[f64]) -> *mut OblixMatrix {
    let interleaved: Vec<f64> = entries.iter().flat_map(|&x| [x, 0.0]).collect();
    let mut out = std::ptr::null_mut();
    let status = unsafe { oblix_matrix_new(rows, cols, interleaved.as_ptr(), &mut out) };
    assert_eq!(status, OblixStatus::Ok);
    out
}

#[test]
fn matrix_lifecycle_and_accessors() {
    let m = matrix_from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]);
    unsafe {
        assert_eq!(oblix_matrix_rows(m), 2);
        assert_eq!(oblix_matrix_cols(m), 2);
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(oblix_matrix_get(m, 1, 0, &mut re, &mut im), OblixStatus::Ok);
        assert_eq!(re, 3.0);
        assert_eq!(im, 0.0);
        assert_eq!(
            oblix_matrix_get(m, 2, 0, &mut re, &mut im),
            OblixStatus::InvalidInput
        );
        assert!(!oblix_last_error_message().is_null());
        oblix_matrix_free(m);
    }
}

#[test]
fn rejects_non_finite_entries() {
    let entries = [f64::NAN, 0.0];
    let mut out = std::ptr::null_mut();
    let status = unsafe { oblix_matrix_new(1, 1, entries.as_ptr(), &mut out) };
    assert_eq!(status, OblixStatus::InvalidInput);
    let msg = oblix_last_error_message();
    assert!(!msg.is_null());
}

#[test]
fn angle_pair_through_the_abi() {
    let m = matrix_from_real(2, 1, &[1.0, 0.0]);
    let n = matrix_from_real(2, 1, &[1.0, 1.0]);
    unsafe {
        let mut sm = std::ptr::null_mut();
        let mut sn = std::ptr::null_mut();
        assert_eq!(oblix_subspace_from_columns(m, &mut sm), OblixStatus::Ok);
        assert_eq!(oblix_subspace_from_columns(n, &mut sn), OblixStatus::Ok);
        assert_eq!(oblix_subspace_ambient_dim(sm), 2);
        assert_eq!(oblix_subspace_dim(sm), 1);

        let mut pair = OblixAnglePair {
            friedrichs_cos: 0.0,
            dixmier_cos: 0.0,
            friedrichs_sin: 0.0,
            intersection_dim: 0,
        };
        assert_eq!(oblix_angle_pair(sm, sn, &mut pair), OblixStatus::Ok);
        assert!((pair.friedrichs_cos - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(pair.intersection_dim, 0);

        oblix_subspace_free(sm);
        oblix_subspace_free(sn);
        oblix_matrix_free(m);
        oblix_matrix_free(n);
    }
}

#[test]
fn ambient_mismatch_maps_to_status() {
    let m = matrix_from_real(2, 1, &[1.0, 0.0]);
    let n = matrix_from_real(3, 1, &[1.0, 0.0, 0.0]);
    unsafe {
        let mut sm = std::ptr::null_mut();
        let mut sn = std::ptr::null_mut();
        oblix_subspace_from_columns(m, &mut sm);
        oblix_subspace_from_columns(n, &mut sn);
        let mut pair = OblixAnglePair {
            friedrichs_cos: 0.0,
            dixmier_cos: 0.0,
            friedrichs_sin: 0.0,
            intersection_dim: 0,
        };
        assert_eq!(
            oblix_angle_pair(sm, sn, &mut pair),
            OblixStatus::AmbientMismatch
        );
        oblix_subspace_free(sm);
        oblix_subspace_free(sn);
        oblix_matrix_free(m);
        oblix_matrix_free(n);
    }
}

#[test]
fn weighted_projection_hand_instance() {
    let a = matrix_from_real(2, 1, &[1.0, 1.0]);
    let weights = [1.0, 2.0];
    unsafe {
        let mut p = std::ptr::null_mut();
        let mut norm = 0.0;
        assert_eq!(
            oblix_weighted_projection(a, weights.as_ptr(), &mut p, &mut norm),
            OblixStatus::Ok
        );
        assert!((norm - 10f64.sqrt() / 3.0).abs() < 1e-12);
        let (mut re, mut im) = (0.0, 0.0);
        oblix_matrix_get(p, 0, 1, &mut re, &mut im);
        assert!((re - 2.0 / 3.0).abs() < 1e-12);

        let mut lp = 0.0;
        assert_eq!(oblix_ljance_ptak_norm(p, &mut lp), OblixStatus::Ok);
        assert!((lp - norm).abs() < 1e-10);

        // rejects a non-positive weight
        let bad = [1.0, 0.0];
        let mut q = std::ptr::null_mut();
        assert_eq!(
            oblix_weighted_projection(a, bad.as_ptr(), &mut q, std::ptr::null_mut()),
            OblixStatus::InvalidWeight
        );

        oblix_matrix_free(p);
        oblix_matrix_free(a);
    }
}

#[test]
fn stewart_oleary_through_the_abi() {
    let a = matrix_from_real(2, 1, &[1.0, 1.0]);
    unsafe {
        let mut s = std::ptr::null_mut();
        oblix_subspace_from_columns(a, &mut s);
        let mut report = OblixBoundReport {
            max_over_q: 0.0,
            min_m_i: 0.0,
            k_constant: 0.0,
            sup_sampled: 0.0,
        };
        assert_eq!(oblix_stewart_oleary(s, 200, 7, &mut report), OblixStatus::Ok);
        assert!((report.max_over_q - 2f64.sqrt()).abs() < 1e-12);
        assert!((report.min_m_i - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        assert!(report.sup_sampled <= report.max_over_q + 1e-8);
        oblix_subspace_free(s);
        oblix_matrix_free(a);
    }
}

#[test]
fn frame_functions_through_the_abi() {
    // Mercedes-Benz frame: tight with bound 3/2, Riesz constant 1/2
    let h = 3f64.sqrt() / 2.0;
    let t = matrix_from_real(2, 3, &[0.0, -h, h, 1.0, -0.5, -0.5]);
    unsafe {
        let (mut lower, mut upper) = (0.0, 0.0);
        assert_eq!(oblix_frame_bounds(t, &mut lower, &mut upper), OblixStatus::Ok);
        assert!((lower - 1.5).abs() < 1e-12);
        assert!((upper - 1.5).abs() < 1e-12);
        let mut riesz = 0.0;
        assert_eq!(oblix_riesz_constant(t, &mut riesz), OblixStatus::Ok);
        assert!((riesz - 0.5).abs() < 1e-12);

        // a rank-deficient synthesis is not a frame
        let flat = matrix_from_real(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert_eq!(
            oblix_frame_bounds(flat, &mut lower, &mut upper),
            OblixStatus::NotAFrame
        );
        oblix_matrix_free(flat);
        oblix_matrix_free(t);
    }
}

/// Compiles a real C program against the generated header and the
/// staticlib, runs it, and checks its output.
#[test]
fn c_program_links_and_runs() {
    let manifest = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header_dir = manifest.join("include");
    let lib_dir = manifest.join("../../target/debug");
    let staticlib = lib_dir.join("liboblix_capi.a");
    assert!(
        staticlib.is_file(),
        "staticlib not built at {}",
        staticlib.display()
    );

    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include "oblix.h"

int main(void) {
    double entries[4] = {1.0, 0.0, 1.0, 0.0}; /* (1, 1)^T */
    OblixMatrix *a = NULL;
    if (oblix_matrix_new(2, 1, entries, &a) != OBLIX_STATUS_OK) return 1;

    double weights[2] = {1.0, 2.0};
    OblixMatrix *p = NULL;
    double norm = 0.0;
    if (oblix_weighted_projection(a, weights, &p, &norm) != OBLIX_STATUS_OK) return 2;
    printf("norm=%.12f\n", norm);

    OblixSubspace *s = NULL;
    if (oblix_subspace_from_columns(a, &s) != OBLIX_STATUS_OK) return 3;
    OblixBoundReport report;
    if (oblix_stewart_oleary(s, 100, 7, &report) != OBLIX_STATUS_OK) return 4;
    printf("K=%.12f\n", report.k_constant);

    oblix_subspace_free(s);
    oblix_matrix_free(p);
    oblix_matrix_free(a);
    return 0;
}
"#,
    )
    .unwrap();

    let exe = dir.path().join("smoke");
    let compile = std::process::Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&header_dir)
        .arg(staticlib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&exe)
        .output()
        .expect("cc available");
    assert!(
        compile.status.success(),
        "cc failed: {}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = std::process::Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "smoke exited {:?}", run.status.code());
    let stdout = String::from_utf8(run.stdout).unwrap();
    assert!(stdout.contains("norm=1.054092553389"), "stdout: {stdout}");
    assert!(stdout.contains("K=1.414213562373"), "stdout: {stdout}");
}
