use std::ffi::{CStr, CString};
use std::ptr;

use qfs_ffi::*;

fn last_error() -> String {
    let p = qfs_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn three_features() -> *mut QfsMutualInformation {
    let imp = [3.0, 2.0, 1.0];
    let red = [0.0, 0.5, 0.5, 0.5, 0.0, 0.5, 0.5, 0.5, 0.0];
    let mut mi = ptr::null_mut();
    let st = unsafe { qfs_mi_from_arrays(3, imp.as_ptr(), red.as_ptr(), &mut mi) };
    assert_eq!(st, QfsStatus::Ok);
    mi
}

#[test]
fn qubo_energy_and_ising() {
    let values = [-1.0, 2.0, 2.0, 0.0];
    let mut q = ptr::null_mut();
    unsafe {
        assert_eq!(
            qfs_qubo_from_dense(2, values.as_ptr(), 0.0, &mut q),
            QfsStatus::Ok
        );
        assert_eq!(qfs_qubo_n(q), 2);
        let mut e = 0.0;
        assert_eq!(
            qfs_qubo_energy(q, [1u8, 1].as_ptr(), 2, &mut e),
            QfsStatus::Ok
        );
        assert_eq!(e, 3.0);

        let (mut a, mut b, mut c) = ([0.0; 4], [0.0; 2], 0.0);
        assert_eq!(
            qfs_qubo_to_ising(q, a.as_mut_ptr(), 4, b.as_mut_ptr(), 2, &mut c),
            QfsStatus::Ok
        );
        assert_eq!(a, [0.0, 1.0, 1.0, 0.0]);
        assert_eq!(b, [-0.5, -1.0]);
        assert_eq!(c, 0.5);
        assert_eq!(
            qfs_qubo_to_ising(q, a.as_mut_ptr(), 3, b.as_mut_ptr(), 2, &mut c),
            QfsStatus::BufferTooSmall
        );

        let cfg = qfs_solver_config_default(QfsSolverKind::Exhaustive);
        let mut x = [9u8; 2];
        assert_eq!(
            qfs_qubo_solve(q, &cfg, x.as_mut_ptr(), 2, &mut e),
            QfsStatus::Ok
        );
        assert_eq!((x, e), ([1, 0], -1.0));
        qfs_qubo_free(q);
    }
}

#[test]
fn export_import_round_trip() {
    let values = [-0.5, 0.25, 0.25, -1.0];
    let mut q = ptr::null_mut();
    unsafe {
        assert_eq!(
            qfs_qubo_from_dense(2, values.as_ptr(), 0.0, &mut q),
            QfsStatus::Ok
        );
        let mut text = ptr::null_mut();
        assert_eq!(
            qfs_qubo_export(q, QfsExportFormat::CoordinateList, &mut text),
            QfsStatus::Ok
        );
        assert_eq!(
            CStr::from_ptr(text).to_str().unwrap(),
            "0 0 -0.5\n0 1 0.5\n1 1 -1\n"
        );
        let mut back = ptr::null_mut();
        assert_eq!(
            qfs_qubo_import(text, QfsExportFormat::CoordinateList, &mut back),
            QfsStatus::Ok
        );
        let mut e = 0.0;
        qfs_qubo_energy(back, [1u8, 1].as_ptr(), 2, &mut e);
        assert_eq!(e, -1.0);
        qfs_string_free(text);
        qfs_qubo_free(back);
        qfs_qubo_free(q);
    }
}

#[test]
fn select_on_three_features() {
    let mi = three_features();
    let cfg = qfs_solver_config_default(QfsSolverKind::Exhaustive);
    let (mut alpha, mut x) = (0.0, [0u8; 3]);
    unsafe {
        let st = qfs_select_k(
            mi,
            2,
            &cfg,
            1e-8,
            QfsMuPolicy::MaxEntry,
            0.0,
            &mut alpha,
            x.as_mut_ptr(),
            3,
        );
        assert_eq!(st, QfsStatus::Ok);
        assert_eq!((alpha, x), (0.5, [1, 1, 0]));

        let st = qfs_select_k(
            mi,
            4,
            &cfg,
            1e-8,
            QfsMuPolicy::MaxEntry,
            0.0,
            &mut alpha,
            x.as_mut_ptr(),
            3,
        );
        assert_eq!(st, QfsStatus::InvalidArgument);
        assert!(last_error().contains("k = 4"));

        let mut q = ptr::null_mut();
        assert_eq!(qfs_qubo_build(mi, 1.0, &mut q), QfsStatus::Ok);
        let mut e = 0.0;
        qfs_qubo_energy(q, [1u8, 1, 1].as_ptr(), 3, &mut e);
        assert_eq!(e, -6.0);
        qfs_qubo_free(q);
        qfs_mi_free(mi);
    }
}

#[test]
fn unreachable_size_is_reported() {
    let (imp, red) = ([0.0, 0.0], [0.0; 4]);
    let mut mi = ptr::null_mut();
    let cfg = qfs_solver_config_default(QfsSolverKind::Exhaustive);
    let (mut alpha, mut x) = (0.0, [0u8; 2]);
    unsafe {
        qfs_mi_from_arrays(2, imp.as_ptr(), red.as_ptr(), &mut mi);
        let st = qfs_select_k(
            mi,
            1,
            &cfg,
            1e-8,
            QfsMuPolicy::MaxEntry,
            0.0,
            &mut alpha,
            x.as_mut_ptr(),
            2,
        );
        assert_eq!(st, QfsStatus::UnreachableK);
        assert!(last_error().starts_with("no α produced a subset of size 1"));
        qfs_mi_free(mi);
    }
}

#[test]
fn synthetic_pipeline() {
    let mut d = ptr::null_mut();
    let mut truth = [0usize; 2];
    unsafe {
        assert_eq!(
            qfs_dataset_gen_synth(5, 2, 500, 3, &mut d, truth.as_mut_ptr()),
            QfsStatus::Ok
        );
        assert_eq!(qfs_dataset_n_features(d), 5);
        assert_eq!(qfs_dataset_n_samples(d), 500);
        assert!(truth[0] < truth[1] && truth[1] < 5);
        let mut mi = ptr::null_mut();
        assert_eq!(qfs_mi_compute(d, 20, &mut mi), QfsStatus::Ok);
        assert_eq!(qfs_mi_n(mi), 5);
        let mut imp = [0.0; 5];
        let mut red = [0.0; 25];
        assert_eq!(qfs_mi_importance(mi, imp.as_mut_ptr(), 5), QfsStatus::Ok);
        assert_eq!(qfs_mi_redundancy(mi, red.as_mut_ptr(), 25), QfsStatus::Ok);
        assert!(imp.iter().all(|&v| v >= 0.0));
        assert!((0..5).all(|i| red[i * 6] == 0.0));
        assert_eq!(
            qfs_mi_importance(mi, imp.as_mut_ptr(), 4),
            QfsStatus::BufferTooSmall
        );
        qfs_mi_free(mi);
        qfs_dataset_free(d);
    }
}

#[test]
fn errors_and_null_handles() {
    let mut d = ptr::null_mut();
    let path = CString::new("/nonexistent/data.csv").unwrap();
    unsafe {
        assert_eq!(
            qfs_dataset_load_csv(path.as_ptr(), ptr::null(), &mut d),
            QfsStatus::Io
        );
        assert!(last_error().contains("/nonexistent/data.csv"));
        assert!(d.is_null());
        let mut q = ptr::null_mut();
        assert_eq!(
            qfs_qubo_build(ptr::null(), 0.5, &mut q),
            QfsStatus::NullPointer
        );
        assert_eq!(last_error(), "mi is null");
        let asym = [0.0, 1.0, 2.0, 0.0];
        assert_eq!(
            qfs_qubo_from_dense(2, asym.as_ptr(), 0.0, &mut q),
            QfsStatus::InvalidArgument
        );
        let bad = CString::new("0 x 1").unwrap();
        assert_eq!(
            qfs_qubo_import(bad.as_ptr(), QfsExportFormat::CoordinateList, &mut q),
            QfsStatus::Malformed
        );
        assert_eq!(qfs_dataset_n_features(ptr::null()), 0);
        qfs_dataset_free(ptr::null_mut());
        qfs_string_free(ptr::null_mut());
    }
}

#[test]
fn csv_loading() {
    let dir = std::env::temp_dir().join(format!("qfs-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("d.csv");
    std::fs::write(&file, "a,b,label\n1,2,x\n3,4,y\n5,6,x\n").unwrap();
    let path = CString::new(file.to_str().unwrap()).unwrap();
    let label = CString::new("label").unwrap();
    let mut d = ptr::null_mut();
    unsafe {
        assert_eq!(
            qfs_dataset_load_csv(path.as_ptr(), label.as_ptr(), &mut d),
            QfsStatus::Ok
        );
        assert_eq!(qfs_dataset_n_features(d), 2);
        assert_eq!(qfs_dataset_n_samples(d), 3);
        qfs_dataset_free(d);
    }
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn generated_header_declares_the_api() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/qfs.h")).unwrap();
    for name in [
        "qfs_last_error_message",
        "qfs_dataset_load_csv",
        "qfs_mi_compute",
        "qfs_qubo_build_thresholded",
        "qfs_qubo_to_ising",
        "qfs_select_k",
        "typedef struct QfsQubo QfsQubo;",
        "QFS_STATUS_UNREACHABLE_K = 6",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

/// Compiles a small C program against the header to check that it parses and
/// the declared signatures accept the intended calls.
#[test]
fn header_compiles_as_c() {
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let program = r#"
#include "qfs.h"
int use_api(void) {
    QfsMutualInformation *mi = NULL;
    double imp[2] = {1.0, 0.5};
    double red[4] = {0.0, 0.1, 0.1, 0.0};
    QfsSolverConfig cfg = qfs_solver_config_default(QFS_SOLVER_KIND_EXHAUSTIVE);
    double alpha;
    uint8_t x[2];
    if (qfs_mi_from_arrays(2, imp, red, &mi) != QFS_STATUS_OK) return 1;
    QfsStatus st = qfs_select_k(mi, 1, &cfg, 1e-8, QFS_MU_POLICY_MAX_ENTRY, 0.0, &alpha, x, 2);
    qfs_mi_free(mi);
    return st == QFS_STATUS_OK ? 0 : (int)st;
}
"#;
    let dir = std::env::temp_dir().join(format!("qfs-header-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("use_api.c");
    std::fs::write(&src, program).unwrap();
    let status = std::process::Command::new("cc")
        .args([
            "-std=c99",
            "-Wall",
            "-Werror",
            "-fsyntax-only",
            "-I",
            include,
        ])
        .arg(&src)
        .status()
        .expect("a C compiler named cc on PATH");
    std::fs::remove_dir_all(&dir).ok();
    assert!(status.success());
}
