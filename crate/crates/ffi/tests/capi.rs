use std::ffi::{CStr, CString};
use std::ptr;

use ssvpkit_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(ssvp_last_error()) }.to_str().unwrap().to_owned()
}

fn matrix(rows: usize, cols: usize, data: &[f64]) -> *mut SsvpMatrix {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { ssvp_matrix_new(rows, cols, data.as_ptr(), &mut m) }, SsvpStatus::Ok);
    m
}

fn sigmas_of(m: *const SsvpMatrix, n: usize) -> Vec<f64> {
    let mut s = vec![0.0; n];
    assert_eq!(unsafe { ssvp_singular_values(m, s.as_mut_ptr(), n) }, SsvpStatus::Ok);
    s
}

#[test]
fn matrix_round_trip() {
    let data = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
    let m = matrix(2, 3, &data);
    let (mut r, mut c) = (0, 0);
    unsafe {
        assert_eq!(ssvp_matrix_shape(m, &mut r, &mut c), SsvpStatus::Ok);
        assert_eq!((r, c), (2, 3));
        let mut out = [0.0; 6];
        assert_eq!(ssvp_matrix_data(m, out.as_mut_ptr(), 6), SsvpStatus::Ok);
        assert_eq!(out, data);
        assert_eq!(ssvp_matrix_data(m, out.as_mut_ptr(), 5), SsvpStatus::BufferTooSmall);
        assert!(last_error().contains("6"));
        ssvp_matrix_free(m);
    }
}

#[test]
fn null_pointers_are_reported() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(ssvp_matrix_new(2, 2, ptr::null(), &mut out), SsvpStatus::NullPointer);
        assert!(out.is_null());
        assert!(last_error().contains("null"));
        let mut r = 0;
        assert_eq!(ssvp_term_rank(ptr::null(), &mut r), SsvpStatus::NullPointer);
        assert!(!ssvp_certificate_has_ssvp(ptr::null()));
        assert!(ssvp_certificate_json(ptr::null()).is_null());
        ssvp_matrix_free(ptr::null_mut());
        ssvp_pattern_free(ptr::null_mut());
        ssvp_certificate_free(ptr::null_mut());
        ssvp_string_free(ptr::null_mut());
    }
}

#[test]
fn non_finite_entries_are_invalid() {
    let mut m = ptr::null_mut();
    let data = [1.0, f64::NAN, 0.0, 1.0];
    assert_eq!(unsafe { ssvp_matrix_new(2, 2, data.as_ptr(), &mut m) }, SsvpStatus::InvalidInput);
    assert!(!last_error().is_empty());
}

#[test]
fn check_staircase_and_zero_row() {
    unsafe {
        let a = matrix(3, 4, &[1., 1., 0., 0., 0., 1., 1., 0., 0., 0., 1., 1.]);
        let mut cert = ptr::null_mut();
        assert_eq!(ssvp_check(a, ptr::null(), true, &mut cert), SsvpStatus::Ok);
        assert!(ssvp_certificate_has_ssvp(cert));
        let json = ssvp_certificate_json(cert);
        let text = CStr::from_ptr(json).to_str().unwrap();
        let v: serde_json::Value = serde_json::from_str(text).unwrap();
        assert_eq!(v["pivot_rows"], serde_json::json!([1, 2, 3, 4, 5, 7]));
        ssvp_string_free(json);
        ssvp_certificate_free(cert);

        let b = matrix(3, 4, &[1., 1., 0., 0., 0., 1., 1., 0., 0., 0., 0., 0.]);
        let mut cert = ptr::null_mut();
        assert_eq!(ssvp_check(b, ptr::null(), true, &mut cert), SsvpStatus::Ok);
        assert!(!ssvp_certificate_has_ssvp(cert));
        ssvp_certificate_free(cert);
        ssvp_matrix_free(a);
        ssvp_matrix_free(b);
    }
}

#[test]
fn patterns_and_term_rank() {
    unsafe {
        let mut p = ptr::null_mut();
        let cells = [1u8, 1, 0, 0, 1, 1, 0, 0, 0];
        assert_eq!(ssvp_pattern_new(3, 3, cells.as_ptr(), &mut p), SsvpStatus::Ok);
        let mut r = 0;
        assert_eq!(ssvp_term_rank(p, &mut r), SsvpStatus::Ok);
        assert_eq!(r, 2);
        ssvp_pattern_free(p);

        let m = matrix(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let mut q = ptr::null_mut();
        assert_eq!(ssvp_pattern_of(m, &mut q), SsvpStatus::Ok);
        assert_eq!(ssvp_term_rank(q, &mut r), SsvpStatus::Ok);
        assert_eq!(r, 2);
        ssvp_pattern_free(q);
        ssvp_matrix_free(m);
    }
}

#[test]
fn realize_path_hits_targets() {
    let s = [3.0, 2.0, 1.0];
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { ssvp_realize_path(s.as_ptr(), 3, &mut m) }, SsvpStatus::Ok);
    let got = sigmas_of(m, 3);
    for (g, w) in got.iter().zip(&s) {
        assert!((g - w).abs() < 1e-10, "{got:?}");
    }
    unsafe { ssvp_matrix_free(m) };

    let repeated = [2.0, 2.0];
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { ssvp_realize_path(repeated.as_ptr(), 2, &mut m) }, SsvpStatus::Infeasible);
    assert!(m.is_null());
}

#[test]
fn realize_c6_and_infeasible() {
    let mut m = ptr::null_mut();
    let s = [3.0, 2.0, 1.0];
    assert_eq!(unsafe { ssvp_realize_c6(s.as_ptr(), ptr::null(), &mut m) }, SsvpStatus::Ok, "{}", last_error());
    let got = sigmas_of(m, 3);
    assert!((got[0] - 3.0).abs() < 1e-8 && (got[2] - 1.0).abs() < 1e-8, "{got:?}");
    unsafe { ssvp_matrix_free(m) };

    let flat = [1.0, 1.0, 1.0];
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { ssvp_realize_c6(flat.as_ptr(), ptr::null(), &mut m) }, SsvpStatus::Infeasible);
    assert_eq!(last_error(), "infeasible: sigma1 == sigma3");
}

#[test]
fn superpattern_and_bifurcate() {
    unsafe {
        let a = matrix(2, 3, &[2.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let mut full = ptr::null_mut();
        assert_eq!(ssvp_pattern_new(2, 3, [1u8; 6].as_ptr(), &mut full), SsvpStatus::Ok);
        let mut x = ptr::null_mut();
        assert_eq!(ssvp_superpattern(a, full, ptr::null(), &mut x), SsvpStatus::Ok, "{}", last_error());
        let mut out = [0.0; 6];
        assert_eq!(ssvp_matrix_data(x, out.as_mut_ptr(), 6), SsvpStatus::Ok);
        assert!(out.iter().all(|v| v.abs() > 1e-8), "{out:?}");
        let got = sigmas_of(x, 2);
        assert!((got[0] - 2.0).abs() < 1e-9 && (got[1] - 1.0).abs() < 1e-9);
        ssvp_matrix_free(x);

        let target = [2.05, 0.95];
        let cfg = CString::new(r#"{"residual_tol": 1e-12}"#).unwrap();
        let mut y = ptr::null_mut();
        assert_eq!(ssvp_bifurcate(a, target.as_ptr(), 2, cfg.as_ptr(), &mut y), SsvpStatus::Ok, "{}", last_error());
        let got = sigmas_of(y, 2);
        assert!((got[0] - 2.05).abs() < 1e-9 && (got[1] - 0.95).abs() < 1e-9);
        ssvp_matrix_free(y);

        let bad = CString::new(r#"{"bogus": 1}"#).unwrap();
        let mut z = ptr::null_mut();
        assert_eq!(ssvp_bifurcate(a, target.as_ptr(), 2, bad.as_ptr(), &mut z), SsvpStatus::Parse);
        ssvp_pattern_free(full);
        ssvp_matrix_free(a);
    }
}

#[test]
fn superpattern_requires_ssvp() {
    unsafe {
        let i2 = matrix(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let mut p = ptr::null_mut();
        assert_eq!(ssvp_pattern_new(2, 2, [1u8, 1, 0, 1].as_ptr(), &mut p), SsvpStatus::Ok);
        let mut x = ptr::null_mut();
        assert_eq!(ssvp_superpattern(i2, p, ptr::null(), &mut x), SsvpStatus::SsvpRequired);
        ssvp_pattern_free(p);
        ssvp_matrix_free(i2);
    }
}

#[test]
fn version_and_header() {
    let v = unsafe { CStr::from_ptr(ssvp_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/ssvpkit.h")).unwrap();
    for name in [
        "ssvp_matrix_new",
        "ssvp_check",
        "ssvp_bifurcate",
        "typedef struct SsvpMatrix SsvpMatrix",
        "SSVP_STATUS_PANIC = 17",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let dir = tempfile_dir();
    let src = dir.join("probe.c");
    std::fs::write(
        &src,
        "#include \"ssvpkit.h\"\nint main(void) { SsvpMatrix *m = 0; (void)m; return ssvp_version() == 0; }\n",
    )
    .unwrap();
    let status = std::process::Command::new(cc)
        .arg("-fsyntax-only")
        .arg(format!("-I{}/include", env!("CARGO_MANIFEST_DIR")))
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| std::process::Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
        .ok_or(())
}

fn tempfile_dir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("ssvpkit-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
