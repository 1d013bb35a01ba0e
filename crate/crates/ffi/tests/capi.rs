use std::ffi::CStr;
use std::os::raw::c_char;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use fsw_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    unsafe {
        fsw_last_error(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn measure(dim: usize, points: &[f64], weights: Option<&[f64]>) -> *mut FswMeasure {
    let mut out = ptr::null_mut();
    let n = points.len() / dim;
    let w = weights.map_or(ptr::null(), |w| w.as_ptr());
    let status = unsafe { fsw_measure_new(dim, n, points.as_ptr(), w, &mut out) };
    assert_eq!(status, FswStatus::Ok, "{}", last_error());
    out
}

#[test]
fn embed_matches_core() {
    let mut params = ptr::null_mut();
    assert_eq!(unsafe { fsw_params_new(2, 7, 11, &mut params) }, FswStatus::Ok);
    assert_eq!(unsafe { fsw_params_m(params) }, 7);
    assert_eq!(unsafe { fsw_params_dim(params) }, 2);
    let pts = [0.0, 0.0, 1.0, 0.5, -0.3, 0.2];
    let mu = measure(2, &pts, None);
    let mut out = vec![0.0; 7];
    assert_eq!(unsafe { fsw_embed(params, mu, out.as_mut_ptr(), out.len()) }, FswStatus::Ok);

    let core_params = fsw_core::EmbeddingParams::sample(2, 7, 11).unwrap();
    let core_mu = fsw_core::ProbabilityMeasure::from_multiset(2, pts.to_vec()).unwrap();
    let expected = fsw_core::embed(&core_mu, &core_params).unwrap();
    assert_eq!(out, expected.coords);

    let mut short = vec![0.0; 3];
    assert_eq!(unsafe { fsw_embed(params, mu, short.as_mut_ptr(), short.len()) }, FswStatus::BufferTooSmall);
    assert!(last_error().contains("need 7"));

    let mut mass = vec![0.0; 7];
    let status = unsafe { fsw_embed_measure(params, mu, 0.5, FswMassMode::Homogeneous, mass.as_mut_ptr(), mass.len()) };
    assert_eq!(status, FswStatus::Ok);
    let norm = mass[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
    assert!((mass[0] - norm).abs() <= 1e-15 * norm.max(1.0));

    unsafe {
        fsw_measure_free(mu);
        fsw_params_free(params);
    }
}

#[test]
fn wasserstein_and_plan() {
    let a = measure(1, &[0.0, 1.0], None);
    let b = measure(1, &[0.5], None);
    let mut cost = f64::NAN;
    let mut plan = [f64::NAN; 2];
    let status = unsafe { fsw_wasserstein(a, b, 2.0, &mut cost, plan.as_mut_ptr(), plan.len()) };
    assert_eq!(status, FswStatus::Ok);
    assert!((cost - 0.5).abs() < 1e-12);
    assert_eq!(plan, [0.5, 0.5]);

    let mut est = 0.0;
    let mut se = -1.0;
    assert_eq!(unsafe { fsw_sliced_wasserstein(a, b, 10, 3, &mut est, &mut se) }, FswStatus::Ok);
    assert!((est - 0.5).abs() < 1e-12);
    assert_eq!(se, 0.0);
    unsafe {
        fsw_measure_free(a);
        fsw_measure_free(b);
    }
}

#[test]
fn error_codes() {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { fsw_params_new(0, 4, 1, &mut out) }, FswStatus::InvalidInput);
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { fsw_params_new(2, 4, 1, ptr::null_mut()) }, FswStatus::NullPointer);
    assert_eq!(last_error(), "out is null");

    let neg = [1.0, -1.0];
    let mut m = ptr::null_mut();
    let status = unsafe { fsw_measure_new(1, 2, [0.0, 1.0].as_ptr(), neg.as_ptr(), &mut m) };
    assert_eq!(status, FswStatus::InvalidInput);
    assert!(m.is_null());

    let a = measure(1, &[0.0], None);
    let b = measure(2, &[0.0, 1.0], None);
    let mut cost = 0.0;
    let status = unsafe { fsw_wasserstein(a, b, 2.0, &mut cost, ptr::null_mut(), 0) };
    assert_eq!(status, FswStatus::DimensionMismatch);

    let unnormalized = measure(1, &[0.0, 1.0], Some(&[0.2, 0.2]));
    let mut params = ptr::null_mut();
    unsafe { fsw_params_new(1, 3, 0, &mut params) };
    let mut buf = [0.0; 3];
    assert_eq!(unsafe { fsw_embed(params, unnormalized, buf.as_mut_ptr(), 3) }, FswStatus::InvalidInput);

    let big: Vec<f64> = (0..200).map(f64::from).collect();
    let (x, y) = (measure(1, &big, None), measure(1, &big[..100], None));
    assert_eq!(unsafe { fsw_wasserstein(x, y, 2.0, &mut cost, ptr::null_mut(), 0) }, FswStatus::TooLarge);

    unsafe {
        for h in [a, b, unnormalized, x, y] {
            fsw_measure_free(h);
        }
        fsw_params_free(params);
        fsw_params_free(ptr::null_mut());
    }
    assert_eq!(unsafe { fsw_params_m(ptr::null()) }, 0);
}

#[test]
fn truncated_error_message() {
    let mut out = ptr::null_mut();
    unsafe { fsw_params_new(2, 4, 1, ptr::null_mut()) };
    let mut buf = [0 as c_char; 4];
    let full = unsafe { fsw_last_error(buf.as_mut_ptr(), buf.len()) };
    assert_eq!(full, "out is null".len());
    assert_eq!(unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap(), "out");
    assert_eq!(unsafe { fsw_params_new(2, 4, 1, &mut out) }, FswStatus::Ok);
    assert_eq!(unsafe { fsw_last_error(ptr::null_mut(), 0) }, 0);
    unsafe { fsw_params_free(out) };
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include "fsw.h"

int main(void) {
    FswParams *params = NULL;
    FswMeasure *mu = NULL;
    double pts[4] = {0.0, 0.0, 1.0, 1.0};
    double out[5];
    if (fsw_params_new(2, 5, 42, &params) != FSW_STATUS_OK) return 10;
    if (fsw_measure_new(2, 2, pts, NULL, &mu) != FSW_STATUS_OK) return 11;
    if (fsw_embed(params, mu, out, 5) != FSW_STATUS_OK) return 12;
    if (fsw_embed(params, mu, out, 2) != FSW_STATUS_BUFFER_TOO_SMALL) return 13;
    char msg[64];
    fsw_last_error(msg, sizeof msg);
    for (int i = 0; i < 5; i++) printf("%.17g\n", out[i]);
    fsw_measure_free(mu);
    fsw_params_free(params);
    return 0;
}
"#;

/// Compiles a small C program against the generated header and static library.
#[test]
fn c_program_links_against_header() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|p| p.parent()).unwrap().to_path_buf();
    let lib = profile_dir.join("libfsw_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.exists() {
        eprintln!("skipping: no C compiler or {} missing", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let bin = dir.path().join("main");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());

    let params = fsw_core::EmbeddingParams::sample(2, 5, 42).unwrap();
    let mu = fsw_core::ProbabilityMeasure::from_multiset(2, vec![0.0, 0.0, 1.0, 1.0]).unwrap();
    let expected = fsw_core::embed(&mu, &params).unwrap();
    let got: Vec<f64> = String::from_utf8(run.stdout).unwrap().lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(got, expected.coords);
}
