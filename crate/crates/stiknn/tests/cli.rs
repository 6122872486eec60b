use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use stiknn::core::analysis::display_order;
use stiknn::core::oracle::sti_exact_matrix;
use stiknn::core::{KnnConfig, LabelInterner, Role};
use stiknn::dataset_csv::{read_csv, read_csv_with};
use stiknn::matrix_io::read_matrix_csv;

fn stiknn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stiknn")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn text(out: &Output) -> String {
    format!("{}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Four training points on a line labelled b a b a by distance to a test
/// point labelled a.
fn fixture(dir: &Path) -> (PathBuf, PathBuf) {
    let train = dir.join("train.csv");
    let test = dir.join("test.csv");
    std::fs::write(&train, "x1,label\n1,b\n2,a\n3,b\n4,a\n").unwrap();
    std::fs::write(&test, "x1,label\n0,a\n").unwrap();
    (train, test)
}

#[test]
fn compute_matches_worked_example_and_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let (train, test) = fixture(dir.path());
    let out_path = dir.path().join("m.csv");
    let heat = dir.path().join("m.ppm");
    let out = stiknn(&["compute", "--train", p(&train), "--test", p(&test), "--k", "2", "--out", p(&out_path), "--heatmap", p(&heat)]);
    assert_eq!(code(&out), 0, "{}", text(&out));
    let stdout = text(&out);
    for key in ["pair_sum", "v(N)", "residual", "runtime_s"] {
        assert!(stdout.contains(key), "{stdout}");
    }

    let m = read_matrix_csv(&out_path).unwrap();
    let d = -1.0 / 6.0;
    #[rustfmt::skip]
    let want = [
        0.0, 0.0, 0.0, d,
        0.0, 0.5, 0.0, d,
        0.0, 0.0, 0.0, d,
        d,   d,   d,   0.5,
    ];
    for (a, b) in m.values().iter().zip(want) {
        assert!((a - b).abs() <= 1e-12, "{:?}", m.values());
    }

    let mut labels = LabelInterner::new();
    let train_ds = read_csv_with(&train, &mut labels, Role::Train).unwrap();
    let test_ds = read_csv_with(&test, &mut labels, Role::Test).unwrap();
    let exact = sti_exact_matrix(&train_ds, &test_ds, &KnnConfig::new(2)).unwrap();
    for (a, b) in m.values().iter().zip(exact.values()) {
        assert!((a - b).abs() <= 1e-12);
    }
    assert_eq!(std::fs::read(&heat).unwrap().len(), "P6\n4 4\n255\n".len() + 48);
}

#[test]
fn compute_rejects_k_above_n() {
    let dir = tempfile::tempdir().unwrap();
    let (train, test) = fixture(dir.path());
    let out = stiknn(&["compute", "--train", p(&train), "--test", p(&test), "--k", "5", "--out", p(&dir.path().join("m.csv"))]);
    assert_eq!(code(&out), 2);
    assert!(text(&out).contains("k exceeds training size"));
}

#[test]
fn missing_input_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.csv");
    let out = stiknn(&["compute", "--train", p(&missing), "--test", p(&missing), "--k", "1", "--out", p(&dir.path().join("m.csv"))]);
    assert_eq!(code(&out), 3, "{}", text(&out));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&stiknn(&["compute", "--k", "1"])), 2);
    assert_eq!(code(&stiknn(&["no-such-command"])), 2);
}

#[test]
fn display_order_permutes_rows_and_columns() {
    let dir = tempfile::tempdir().unwrap();
    let train = dir.path().join("train.csv");
    let test = dir.path().join("test.csv");
    let gen = stiknn(&["gen", "--kind", "moons", "--n", "15", "--seed", "4", "--split", "0.2", "--test-out", p(&test), "--out", p(&train)]);
    assert_eq!(code(&gen), 0, "{}", text(&gen));
    let (orig, disp) = (dir.path().join("o.csv"), dir.path().join("d.csv"));
    for (order, path) in [("original", &orig), ("display", &disp)] {
        let out = stiknn(&["compute", "--train", p(&train), "--test", p(&test), "--k", "3", "--out", p(path), "--order", order]);
        assert_eq!(code(&out), 0, "{}", text(&out));
    }
    let perm = display_order(&read_csv(&train, Role::Train).unwrap());
    let expected = read_matrix_csv(&orig).unwrap().permuted(&perm).unwrap();
    assert_eq!(read_matrix_csv(&disp).unwrap().values(), expected.values());
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for path in [&a, &b] {
        assert_eq!(code(&stiknn(&["gen", "--kind", "circles", "--n", "300", "--seed", "1", "--out", p(path)])), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(read_csv(&a, Role::Train).unwrap().len(), 600);
}

#[test]
fn oracle_agrees_with_compute_and_respects_cap() {
    let dir = tempfile::tempdir().unwrap();
    let train = dir.path().join("train.csv");
    let test = dir.path().join("test.csv");
    assert_eq!(code(&stiknn(&["gen", "--kind", "random", "--n", "9", "--classes", "3", "--seed", "2", "--out", p(&train)])), 0);
    assert_eq!(code(&stiknn(&["gen", "--kind", "random", "--n", "3", "--classes", "3", "--seed", "3", "--out", p(&test)])), 0);
    let (fast, slow) = (dir.path().join("f.csv"), dir.path().join("s.csv"));
    let args = ["--train", p(&train), "--test", p(&test), "--k", "3"];
    assert_eq!(code(&stiknn(&[&["compute"][..], &args, &["--out", p(&fast)]].concat())), 0);
    assert_eq!(code(&stiknn(&[&["oracle"][..], &args, &["--out", p(&slow)]].concat())), 0);
    let (f, s) = (read_matrix_csv(&fast).unwrap(), read_matrix_csv(&slow).unwrap());
    for (a, b) in f.values().iter().zip(s.values()) {
        assert!((a - b).abs() <= 1e-12);
    }

    let capped = stiknn(&[&["oracle"][..], &args, &["--out", p(&slow), "--cap", "8"]].concat());
    assert_eq!(code(&capped), 2);
    let over_hard = stiknn(&[&["oracle"][..], &args, &["--out", p(&slow), "--cap", "23"]].concat());
    assert_eq!(code(&over_hard), 2);
}

#[test]
fn verify_passes_and_catches_faults() {
    let ok = stiknn(&["verify", "--n-max", "2", "--trials", "1"]);
    assert_eq!(code(&ok), 0, "{}", text(&ok));
    assert!(text(&ok).contains("PASS"));
    let bad = stiknn(&["verify", "--n-max", "3", "--trials", "1", "--inject-fault"]);
    assert_eq!(code(&bad), 1);
    assert!(text(&bad).contains("worst_case"));
}

#[test]
fn analysis_commands_run() {
    let dir = tempfile::tempdir().unwrap();
    let train = dir.path().join("train.csv");
    let test = dir.path().join("test.csv");
    let gen = stiknn(&["gen", "--kind", "circles", "--n", "40", "--seed", "9", "--flip", "0.1", "--split", "0.2", "--test-out", p(&test), "--out", p(&train)]);
    assert_eq!(code(&gen), 0);
    assert!(text(&gen).contains("flipped ="));
    let io = ["--train", p(&train), "--test", p(&test)];

    let sweep_csv = dir.path().join("corr.csv");
    let sweep = stiknn(&[&["ksweep"][..], &io, &["--k-min", "3", "--k-max", "6", "--out", p(&sweep_csv)]].concat());
    assert_eq!(code(&sweep), 0, "{}", text(&sweep));
    assert!(text(&sweep).contains("min_correlation"));
    assert_eq!(std::fs::read_to_string(&sweep_csv).unwrap().lines().count(), 5);

    let loo = stiknn(&[&["loo"][..], &io, &["--k", "3"]].concat());
    assert_eq!(code(&loo), 0);
    assert_eq!(String::from_utf8_lossy(&loo.stdout).lines().count(), 1 + 64);

    let scores = dir.path().join("scores.csv");
    let analyze = stiknn(&[&["analyze"][..], &io, &["--k", "3", "--top", "4", "--scores-out", p(&scores)]].concat());
    assert_eq!(code(&analyze), 0, "{}", text(&analyze));
    assert!(text(&analyze).contains("most suspicious"));
    assert_eq!(std::fs::read_to_string(&scores).unwrap().lines().count(), 1 + 64);
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bench.csv");
    let out = stiknn(&[
        "bench", "--ns", "20,40", "--ts", "5,10", "--t-fixed", "5", "--n-fixed", "20", "--reps", "1", "--out", p(&csv),
    ]);
    assert_eq!(code(&out), 0, "{}", text(&out));
    assert!(text(&out).contains("slope_n"));
    let body = std::fs::read_to_string(&csv).unwrap();
    assert!(body.starts_with("axis,n,t,seconds\n"));
    assert_eq!(body.lines().filter(|l| l.starts_with("n,") || l.starts_with("t,")).count(), 4);
}

#[test]
fn fetch_reads_a_warm_cache_offline() {
    let dir = tempfile::tempdir().unwrap();
    let cached = dir.path().join("openml").join("31337");
    std::fs::create_dir_all(&cached).unwrap();
    std::fs::write(cached.join("data.csv"), "x1,x2,label\n0,1,p\n2,3,q\n").unwrap();
    let copy = dir.path().join("copy.csv");
    let out = Command::new(env!("CARGO_BIN_EXE_stiknn"))
        .args(["fetch", "--id", "31337", "--out", p(&copy)])
        .env("STI_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", text(&out));
    assert!(text(&out).contains("2 points, 2 features, 2 classes"));
    assert_eq!(read_csv(&copy, Role::Train).unwrap().len(), 2);
}
