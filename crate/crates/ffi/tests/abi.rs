use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use ouest_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(ouest_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn testbed() -> *mut OuestModel {
    let mut m = ptr::null_mut();
    let st =
        unsafe { ouest_model_new(0.5, 1.0, 0.0, OuestServiceKind::Exponential, 1.0, 0, &mut m) };
    assert_eq!(st, OuestStatus::Ok);
    m
}

#[test]
fn scalar_functions() {
    let mut x = 0.0;
    assert_eq!(unsafe { ouest_g(1.0, &mut x) }, OuestStatus::Ok);
    assert!((x - 2.030_078_469_278_705).abs() < 1e-12);
    let mut back = 0.0;
    assert_eq!(unsafe { ouest_g_inv(x, &mut back) }, OuestStatus::Ok);
    assert!((back - 1.0).abs() < 1e-10);
    assert_eq!(unsafe { ouest_g_inv(0.5, &mut back) }, OuestStatus::Domain);
    assert!(!last_error().is_empty());
    assert_eq!(
        unsafe { ouest_g(1.0, ptr::null_mut()) },
        OuestStatus::NullPointer
    );
}

#[test]
fn model_metrics_and_threshold() {
    let m = testbed();
    let mut met = OuestMetrics::default();
    assert_eq!(unsafe { ouest_model_metrics(m, &mut met) }, OuestStatus::Ok);
    assert_eq!((met.mse_y, met.mse_inf, met.gamma), (0.5, 1.0, 0.5));
    let mut v = -1.0;
    assert_eq!(
        unsafe { ouest_threshold_v(m, 0.5, &mut v) },
        OuestStatus::Ok
    );
    assert_eq!(v, 0.0);
    assert_eq!(
        unsafe { ouest_threshold_v(m, 1.0, &mut v) },
        OuestStatus::Domain
    );
    let (mut a, mut b) = (0.0, 0.0);
    unsafe {
        assert_eq!(ouest_r1(m, 0.0, &mut a), OuestStatus::Ok);
        assert_eq!(ouest_r2(m, 0.0, &mut b), OuestStatus::Ok);
    }
    assert_eq!((a, b), (0.0, 0.0));
    unsafe { ouest_model_free(m) };

    let mut bad = ptr::null_mut();
    let st = unsafe {
        ouest_model_new(
            -1.0,
            1.0,
            0.0,
            OuestServiceKind::Exponential,
            1.0,
            0,
            &mut bad,
        )
    };
    assert_eq!(st, OuestStatus::Input);
    assert!(bad.is_null());
}

#[test]
fn solve_and_simulate() {
    let m = testbed();
    let mut panel = ptr::null_mut();
    assert_eq!(
        unsafe { ouest_panel_new(m, 50_000, 3, &mut panel) },
        OuestStatus::Ok
    );
    let mut s = OuestSolution::default();
    let st = unsafe { ouest_solve(panel, f64::INFINITY, OuestMethod::Newton, 0.0, true, &mut s) };
    assert_eq!(st, OuestStatus::Ok, "{}", last_error());
    assert!(s.beta > 0.5 && s.beta < 1.0);
    assert_eq!(s.lagrange_multiplier, 0.0);
    assert!(!s.constrained);
    let policy = OuestPolicy {
        kind: OuestPolicyKind::MseOptimal,
        period: 0.0,
        beta: s.beta,
        v: s.v,
    };
    let mut r = OuestSimResult::default();
    let st = unsafe { ouest_simulate(m, policy, 2_000.0, f64::INFINITY, 9, &mut r) };
    assert_eq!(st, OuestStatus::Ok, "{}", last_error());
    assert!(r.time_avg_mse > 0.5 && r.time_avg_mse < 1.0);
    unsafe {
        ouest_panel_free(panel);
        ouest_model_free(m);
        ouest_panel_free(ptr::null_mut());
    }
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/ouest.h")
}

#[test]
fn header_declares_the_abi() {
    let h = std::fs::read_to_string(header()).unwrap();
    for name in [
        "ouest_last_error_message",
        "ouest_g",
        "ouest_g_inv",
        "ouest_model_new",
        "ouest_model_free",
        "ouest_model_metrics",
        "ouest_r1",
        "ouest_r2",
        "ouest_threshold_v",
        "ouest_panel_new",
        "ouest_panel_free",
        "ouest_solve",
        "ouest_simulate",
        "typedef struct OuestModel OuestModel;",
    ] {
        assert!(h.contains(name), "{name} missing from header");
    }
}

/// Compile a C program against the header and link it with the static library.
#[test]
fn c_program_links_and_runs() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf();
    let lib = profile_dir.join("libouest_ffi.a");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if !lib.exists() || Command::new(&cc).arg("--version").output().is_err() {
        eprintln!(
            "skipping: no C compiler or static library at {}",
            lib.display()
        );
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"
#include <math.h>
#include <stdio.h>
#include "ouest.h"
int main(void) {
    OuestModel *m = NULL;
    if (ouest_model_new(0.5, 1.0, 0.0, OUEST_SERVICE_KIND_EXPONENTIAL, 1.0, 0, &m) != OUEST_STATUS_OK) return 1;
    OuestMetrics met;
    if (ouest_model_metrics(m, &met) != OUEST_STATUS_OK) return 2;
    double v = 0.0;
    if (ouest_threshold_v(m, 0.9, &v) != OUEST_STATUS_OK) return 3;
    if (ouest_threshold_v(m, 2.0, &v) != OUEST_STATUS_DOMAIN) return 4;
    printf("%.6f %.6f %s\n", met.mse_y, met.mse_inf, ouest_last_error_message());
    ouest_model_free(m);
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("main");
    let out = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    let text = String::from_utf8_lossy(&run.stdout);
    assert!(text.starts_with("0.500000 1.000000 domain error"), "{text}");
}
