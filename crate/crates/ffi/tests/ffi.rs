use std::ffi::CStr;
use std::ptr;

use forestfire_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(ffc_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn gaussian(sigma: f64) -> FfcKernel {
    FfcKernel {
        kind: FfcKernelKind::Gaussian as u32,
        sigma,
        k: 0,
        alpha: 0.0,
    }
}

/// Two tight pairs far apart, as a row-major 4×1 matrix.
const PAIRS: [f64; 4] = [0.0, 0.1, 50.0, 50.1];

fn data(values: &[f64], n: usize, m: usize) -> *mut FfcData {
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { ffc_data_new(values.as_ptr(), n, m, &mut out) },
        FfcStatus::Ok
    );
    out
}

#[test]
fn cluster_validate_round_trip() {
    let d = data(&PAIRS, 4, 1);
    let mut g = ptr::null_mut();
    assert_eq!(
        unsafe { ffc_graph_new(d, &gaussian(1.0), &mut g) },
        FfcStatus::Ok
    );
    assert_eq!(unsafe { ffc_graph_len(g) }, 4);

    let mut r = ptr::null_mut();
    assert_eq!(unsafe { ffc_cluster(g, 5.0, 3, &mut r) }, FfcStatus::Ok);
    assert_eq!(unsafe { ffc_clustering_num_clusters(r) }, 2);
    let mut labels = [0u32; 4];
    assert_eq!(
        unsafe { ffc_clustering_labels(r, labels.as_mut_ptr(), 4) },
        FfcStatus::Ok
    );
    assert_eq!(labels[0], labels[1]);
    assert_eq!(labels[2], labels[3]);
    assert_ne!(labels[0], labels[2]);

    // same as the library called directly
    let w = forestfire::DataMatrix::new(PAIRS.to_vec(), 4, 1).unwrap();
    let lib = forestfire::cluster(
        &forestfire::KernelSpec::Gaussian { sigma: 1.0 }
            .build(&w)
            .unwrap(),
        forestfire::FireParams::new(5.0, 3).unwrap(),
    )
    .unwrap();
    assert_eq!(labels.to_vec(), lib.labels);

    let mut vertices = [0usize; 4];
    let mut heats = [0f64; 4];
    assert_eq!(
        unsafe {
            ffc_clustering_trace(
                r,
                vertices.as_mut_ptr(),
                ptr::null_mut(),
                heats.as_mut_ptr(),
                4,
            )
        },
        FfcStatus::Ok
    );
    assert_eq!(heats.iter().filter(|h| h.is_infinite()).count(), 2);
    let mut sorted = vertices;
    sorted.sort_unstable();
    assert_eq!(sorted, [0, 1, 2, 3]);

    let mut rep = ptr::null_mut();
    assert_eq!(
        unsafe { ffc_validate(g, r, 40, 1, &mut rep) },
        FfcStatus::Ok
    );
    assert_eq!(unsafe { ffc_report_len(rep) }, 4);
    let (mut p, mut q, mut h, mut cov) = ([0f64; 4], [0f64; 4], [0f64; 4], [0u32; 4]);
    assert_eq!(
        unsafe {
            ffc_report_points(
                rep,
                p.as_mut_ptr(),
                q.as_mut_ptr(),
                h.as_mut_ptr(),
                cov.as_mut_ptr(),
                4,
            )
        },
        FfcStatus::Ok
    );
    for i in 0..4 {
        assert_eq!(h[i], 0.0);
        assert_eq!(q[i], 0.0);
        assert!((p[i] - (1.0 - f64::from(cov[i]) / 40.0)).abs() < 1e-15);
    }
    let mut mask = [9u8; 4];
    assert_eq!(
        unsafe { ffc_report_significant(rep, 1.0, mask.as_mut_ptr(), 4) },
        FfcStatus::Ok
    );
    assert_eq!(mask, [1, 1, 1, 1]);

    unsafe {
        ffc_report_free(rep);
        ffc_clustering_free(r);
        ffc_graph_free(g);
        ffc_data_free(d);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { ffc_data_new(ptr::null(), 2, 2, &mut out) },
        FfcStatus::NullPointer
    );
    assert!(last_error().contains("values"));

    let nan = [0.0, f64::NAN];
    assert_eq!(
        unsafe { ffc_data_new(nan.as_ptr(), 2, 1, &mut out) },
        FfcStatus::InvalidInput
    );
    assert!(!last_error().is_empty());

    let d = data(&PAIRS, 4, 1);
    let mut g = ptr::null_mut();
    assert_eq!(
        unsafe { ffc_graph_new(d, &gaussian(-1.0), &mut g) },
        FfcStatus::InvalidParameter
    );
    assert!(last_error().contains("sigma"), "{}", last_error());
    let bogus = FfcKernel {
        kind: 7,
        ..gaussian(1.0)
    };
    assert_eq!(
        unsafe { ffc_graph_new(d, &bogus, &mut g) },
        FfcStatus::InvalidParameter
    );

    assert_eq!(
        unsafe { ffc_graph_new(d, &gaussian(1.0), &mut g) },
        FfcStatus::Ok
    );
    assert!(last_error().is_empty());
    let mut r = ptr::null_mut();
    assert_eq!(
        unsafe { ffc_cluster(g, 0.0, 0, &mut r) },
        FfcStatus::InvalidParameter
    );
    assert_eq!(unsafe { ffc_cluster(g, 1.0, 0, &mut r) }, FfcStatus::Ok);
    let mut small = [0u32; 2];
    assert_eq!(
        unsafe { ffc_clustering_labels(r, small.as_mut_ptr(), 2) },
        FfcStatus::BufferTooSmall
    );
    let mut rep = ptr::null_mut();
    assert_eq!(
        unsafe { ffc_validate(g, r, 0, 0, &mut rep) },
        FfcStatus::InvalidParameter
    );
    assert!(last_error().contains("trials"));

    unsafe {
        ffc_clustering_free(r);
        ffc_graph_free(g);
        ffc_data_free(d);
        // null handles are ignored
        ffc_data_free(ptr::null_mut());
        ffc_report_free(ptr::null_mut());
    }
    assert_eq!(unsafe { ffc_graph_len(ptr::null()) }, 0);
}

#[test]
fn metrics() {
    let pred = [1u32, 1, 2, 2];
    let truth = [1u32, 2, 1, 2];
    let mut v = 0.0;
    assert_eq!(
        unsafe { ffc_adjusted_rand_index(pred.as_ptr(), truth.as_ptr(), 4, &mut v) },
        FfcStatus::Ok
    );
    assert!((v + 0.5).abs() < 1e-15);
    assert_eq!(
        unsafe { ffc_purity(pred.as_ptr(), truth.as_ptr(), 4, &mut v) },
        FfcStatus::Ok
    );
    assert_eq!(v, 0.5);
    assert_eq!(
        unsafe { ffc_adjusted_rand_index(pred.as_ptr(), truth.as_ptr(), 1, &mut v) },
        FfcStatus::InvalidInput
    );

    let d = data(&[0.0, 1.0, 10.0, 11.0], 4, 1);
    assert_eq!(
        unsafe { ffc_silhouette(d, pred.as_ptr(), &mut v) },
        FfcStatus::Ok
    );
    assert!((v - 0.899_749_373_433_583).abs() < 1e-12);
    let one = [3u32; 4];
    assert_eq!(
        unsafe { ffc_silhouette(d, one.as_ptr(), &mut v) },
        FfcStatus::MetricUndefined
    );
    unsafe { ffc_data_free(d) };
}

#[test]
fn online_assignment() {
    let train = data(&PAIRS, 4, 1);
    let labels = [1u32, 1, 2, 2];
    let fresh = data(&[0.05, 1000.0], 2, 1);
    let mut out = [0u32; 2];
    let mut novel = [0u8; 2];
    assert_eq!(
        unsafe {
            ffc_online_assign(
                train,
                labels.as_ptr(),
                fresh,
                &gaussian(1.0),
                5.0,
                out.as_mut_ptr(),
                novel.as_mut_ptr(),
                2,
            )
        },
        FfcStatus::Ok
    );
    assert_eq!(out, [1, 3]);
    assert_eq!(novel, [0, 1]);

    let wide = data(&[0.0, 0.0, 1.0, 1.0], 2, 2);
    assert_eq!(
        unsafe {
            ffc_online_assign(
                train,
                labels.as_ptr(),
                wide,
                &gaussian(1.0),
                5.0,
                out.as_mut_ptr(),
                ptr::null_mut(),
                2,
            )
        },
        FfcStatus::InvalidInput
    );
    assert!(last_error().contains("feature"), "{}", last_error());
    unsafe {
        ffc_data_free(wide);
        ffc_data_free(fresh);
        ffc_data_free(train);
    }
}

#[test]
fn version_is_cargo_version() {
    let v = unsafe { CStr::from_ptr(ffc_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_and_links_from_c() {
    let Ok(cc) = std::process::Command::new("cc").arg("--version").output() else {
        eprintln!("no C compiler; skipping");
        return;
    };
    assert!(cc.status.success());
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let dir = tempfile_dir();
    let src = dir.join("smoke.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include "forestfire.h"
int main(void) {
    double xs[4] = {0.0, 0.1, 50.0, 50.1};
    FfcData *d = NULL; FfcGraph *g = NULL; FfcClustering *r = NULL;
    FfcKernel k = {FFC_KERNEL_KIND_GAUSSIAN, 1.0, 0, 0.0};
    if (ffc_data_new(xs, 4, 1, &d) != FFC_STATUS_OK) return 1;
    if (ffc_graph_new(d, &k, &g) != FFC_STATUS_OK) return 2;
    if (ffc_cluster(g, 5.0, 3, &r) != FFC_STATUS_OK) return 3;
    uint32_t labels[4];
    if (ffc_clustering_labels(r, labels, 4) != FFC_STATUS_OK) return 4;
    printf("%u %u\n", ffc_clustering_num_clusters(r), labels[0] == labels[1]);
    if (ffc_cluster(g, -1.0, 3, &r) != FFC_STATUS_INVALID_PARAMETER) return 5;
    printf("%s\n", ffc_last_error_message());
    ffc_clustering_free(r); ffc_graph_free(g); ffc_data_free(d);
    return 0;
}
"#,
    )
    .unwrap();
    // the static library sits next to this test's deps directory
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().unwrap().parent().unwrap();
    let archive = lib_dir.join("libforestfire_ffi.a");
    if !archive.exists() {
        eprintln!("{} not built; skipping link", archive.display());
        return;
    }
    let bin = dir.join("smoke");
    let status = std::process::Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(root.join("include"))
        .arg(&archive)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = std::process::Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("2 1"));
    assert!(lines.next().unwrap().contains("temperature"));
    let _ = std::fs::remove_dir_all(&dir);
}

fn tempfile_dir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("ffc-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
