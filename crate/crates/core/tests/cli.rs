use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn ffc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffc"))
        .args(args)
        .env("FFC_THREADS", "2")
        .output()
        .expect("ffc runs")
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// Generates a 4-component mixture and clusters it.
fn fixture(dir: &TempDir) -> (PathBuf, PathBuf, PathBuf) {
    let data = path(dir, "data.csv");
    let truth = path(dir, "truth.csv");
    let labels = path(dir, "labels.csv");
    let out = ffc(&[
        "gen",
        "--n",
        "120",
        "--k",
        "4",
        "--sigma",
        "0.08",
        "--seed",
        "3",
        "--out",
        s(&data),
        "--labels-out",
        s(&truth),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let out = ffc(&[
        "cluster",
        "--input",
        s(&data),
        "--sigma",
        "0.2",
        "--c",
        "10",
        "--seed",
        "1",
        "--labels-out",
        s(&labels),
        "--trace-out",
        s(&path(dir, "trace.csv")),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    (data, truth, labels)
}

#[test]
fn cluster_writes_labels_trace_and_summary() {
    let dir = TempDir::new().unwrap();
    let (data, _, labels) = fixture(&dir);
    let text = fs::read_to_string(&labels).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,label"));
    assert_eq!(lines.count(), 120);

    let trace = fs::read_to_string(path(&dir, "trace.csv")).unwrap();
    assert!(trace.starts_with("step,vertex,cluster,heat\n"));
    assert_eq!(trace.lines().count(), 121);
    assert!(trace.lines().nth(1).unwrap().ends_with(",inf"));

    let out = ffc(&[
        "cluster",
        "--input",
        s(&data),
        "--sigma",
        "0.2",
        "--c",
        "10",
        "--labels-out",
        s(&path(&dir, "again.csv")),
    ]);
    let summary = stdout(&out);
    assert!(summary.contains("clusters: "), "{summary}");
    assert!(summary.contains("runtime_ms: "), "{summary}");
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let (data, _, labels) = fixture(&dir);
    let again = path(&dir, "again.csv");
    let trace = path(&dir, "trace2.csv");
    let out = ffc(&[
        "cluster",
        "--input",
        s(&data),
        "--sigma",
        "0.2",
        "--c",
        "10",
        "--seed",
        "1",
        "--labels-out",
        s(&again),
        "--trace-out",
        s(&trace),
    ]);
    assert!(out.status.success());
    assert_eq!(fs::read(&labels).unwrap(), fs::read(&again).unwrap());
    assert_eq!(
        fs::read(path(&dir, "trace.csv")).unwrap(),
        fs::read(&trace).unwrap()
    );
}

#[test]
fn missing_bandwidth_names_the_flag() {
    let dir = TempDir::new().unwrap();
    let (data, _, _) = fixture(&dir);
    let out = ffc(&[
        "cluster",
        "--input",
        s(&data),
        "--c",
        "1",
        "--labels-out",
        s(&path(&dir, "x.csv")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--sigma"), "{}", stderr(&out));
    assert!(!path(&dir, "x.csv").exists());

    let out = ffc(&[
        "cluster",
        "--input",
        s(&data),
        "--kernel",
        "adaptive",
        "--alpha",
        "2",
        "--c",
        "1",
        "--labels-out",
        s(&path(&dir, "x.csv")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--k"), "{}", stderr(&out));
}

#[test]
fn invalid_parameters_exit_2() {
    let dir = TempDir::new().unwrap();
    let (data, _, labels) = fixture(&dir);
    let report = path(&dir, "report.csv");
    for bad in [["--trials", "0"], ["--trials", "-3"]] {
        let out = ffc(&[
            "validate",
            "--input",
            s(&data),
            "--labels",
            s(&labels),
            "--sigma",
            "0.2",
            "--c",
            "10",
            bad[0],
            bad[1],
            "--report-out",
            s(&report),
        ]);
        assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
        assert!(stderr(&out).contains("trials"), "{}", stderr(&out));
    }
    let out = ffc(&[
        "cluster",
        "--input",
        s(&data),
        "--sigma",
        "0",
        "--c",
        "1",
        "--labels-out",
        s(&path(&dir, "x.csv")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = ffc(&[
        "cluster",
        "--input",
        s(&data),
        "--sigma",
        "0.2",
        "--c",
        "-1",
        "--labels-out",
        s(&path(&dir, "x.csv")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = ffc(&["cluster", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_input_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad = path(&dir, "bad.csv");
    fs::write(&bad, "x0,x1\n1,2\n3,oops\n").unwrap();
    let out = ffc(&[
        "cluster",
        "--input",
        s(&bad),
        "--sigma",
        "1",
        "--c",
        "1",
        "--labels-out",
        s(&path(&dir, "x.csv")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr(&out).lines().count(), 1, "{}", stderr(&out));

    let nan = path(&dir, "nan.csv");
    fs::write(&nan, "1,2\nNaN,3\n").unwrap();
    let out = ffc(&[
        "cluster",
        "--input",
        s(&nan),
        "--sigma",
        "1",
        "--c",
        "1",
        "--labels-out",
        s(&path(&dir, "x.csv")),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_file_is_a_runtime_error() {
    let dir = TempDir::new().unwrap();
    let out = ffc(&[
        "cluster",
        "--input",
        s(&path(&dir, "absent.csv")),
        "--sigma",
        "1",
        "--c",
        "1",
        "--labels-out",
        s(&path(&dir, "x.csv")),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn validate_rejects_label_count_mismatch() {
    let dir = TempDir::new().unwrap();
    let (data, _, _) = fixture(&dir);
    let short = path(&dir, "short.csv");
    fs::write(&short, "index,label\n0,1\n1,1\n").unwrap();
    let out = ffc(&[
        "validate",
        "--input",
        s(&data),
        "--labels",
        s(&short),
        "--sigma",
        "0.2",
        "--c",
        "10",
        "--report-out",
        s(&path(&dir, "r.csv")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("rows"), "{}", stderr(&out));
}

#[test]
fn validate_report_is_well_formed() {
    let dir = TempDir::new().unwrap();
    let (data, _, labels) = fixture(&dir);
    let report = path(&dir, "report.csv");
    let out = ffc(&[
        "validate",
        "--input",
        s(&data),
        "--labels",
        s(&labels),
        "--sigma",
        "0.2",
        "--c",
        "10",
        "--trials",
        "50",
        "--seed",
        "4",
        "--report-out",
        s(&report),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("significant: "));
    let text = fs::read_to_string(&report).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("index,label,p_value,entropy,coverage,significant,posterior_p_value")
    );
    let mut rows = 0;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f.len(), 7);
        let p: f64 = f[2].parse().unwrap();
        let h: f64 = f[3].parse().unwrap();
        let cov: u32 = f[4].parse().unwrap();
        let q: f64 = f[6].parse().unwrap();
        assert!((0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&q));
        assert!(h >= 0.0);
        assert!(cov <= 50);
        assert_eq!(f[5] == "true", p <= 0.05);
        rows += 1;
    }
    assert_eq!(rows, 120);
}

#[test]
fn extend_reuses_and_opens_clusters() {
    let dir = TempDir::new().unwrap();
    let (data, _, labels) = fixture(&dir);
    let stream = path(&dir, "stream.csv");
    // the first training row again, then a point far from everything
    let first = fs::read_to_string(&data)
        .unwrap()
        .lines()
        .nth(1)
        .unwrap()
        .to_string();
    fs::write(&stream, format!("x0,x1\n{first}\n500,500\n")).unwrap();
    let out_path = path(&dir, "ext.csv");
    let out = ffc(&[
        "extend",
        "--train",
        s(&data),
        "--train-labels",
        s(&labels),
        "--input",
        s(&stream),
        "--sigma",
        "0.2",
        "--c",
        "10",
        "--labels-out",
        s(&out_path),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let train_labels = fs::read_to_string(&labels).unwrap();
    let first_label = train_labels
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap();
    let max_label: u32 = train_labels
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<u32>().unwrap())
        .max()
        .unwrap();
    let text = fs::read_to_string(&out_path).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "index,label,new_cluster");
    assert_eq!(rows[1], format!("0,{first_label},false"));
    assert_eq!(rows[2], format!("1,{},true", max_label + 1));
}

#[test]
fn gen_with_doublets_and_score() {
    let dir = TempDir::new().unwrap();
    let (data, truth, labels) = fixture(&dir);
    let out = ffc(&[
        "score",
        "--pred",
        s(&truth),
        "--truth",
        s(&truth),
        "--input",
        s(&data),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("purity: 1"), "{text}");
    assert!(text.contains("ari: 1"), "{text}");
    assert!(text.contains("silhouette: "), "{text}");

    let out = ffc(&["score", "--pred", s(&labels), "--truth", s(&truth)]);
    assert!(out.status.success());

    let dbl = path(&dir, "dbl.csv");
    let flags = path(&dir, "flags.csv");
    let out = ffc(&[
        "gen",
        "--n",
        "100",
        "--k",
        "2",
        "--doublets",
        "5",
        "--out",
        s(&dbl),
        "--flags-out",
        s(&flags),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(fs::read_to_string(&dbl).unwrap().lines().count(), 96);
    let flagged = fs::read_to_string(&flags)
        .unwrap()
        .lines()
        .filter(|l| l.ends_with(",true"))
        .count();
    assert_eq!(flagged, 5);
}

#[test]
fn floats_round_trip() {
    let dir = TempDir::new().unwrap();
    let (data, _, _) = fixture(&dir);
    for line in fs::read_to_string(&data).unwrap().lines().skip(1) {
        for field in line.split(',') {
            let v: f64 = field.parse().unwrap();
            assert_eq!(v.to_string().parse::<f64>().unwrap(), v);
            // 17 significant digits: one leading digit plus 16 after the point
            let mantissa = field.trim_start_matches('-').split('e').next().unwrap();
            assert_eq!(mantissa.len(), 18, "{field}");
        }
    }
}

#[test]
fn thread_count_does_not_change_reports() {
    let dir = TempDir::new().unwrap();
    let (data, _, labels) = fixture(&dir);
    let mut reports = Vec::new();
    for threads in ["1", "3", "0"] {
        let report = path(&dir, &format!("report{threads}.csv"));
        let out = Command::new(env!("CARGO_BIN_EXE_ffc"))
            .args([
                "validate",
                "--input",
                s(&data),
                "--labels",
                s(&labels),
                "--sigma",
                "0.2",
                "--c",
                "10",
                "--trials",
                "80",
                "--report-out",
                s(&report),
            ])
            .env("FFC_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", stderr(&out));
        reports.push(fs::read(&report).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    assert_eq!(reports[0], reports[2]);
}

#[test]
fn bad_thread_variable_exit_2() {
    let out = Command::new(env!("CARGO_BIN_EXE_ffc"))
        .args(["score", "--pred", "a.csv", "--truth", "b.csv"])
        .env("FFC_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("FFC_THREADS"));
}
