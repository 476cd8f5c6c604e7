use std::path::Path;
use std::process::{Command, Output};

use docbin_bench::{document, PageStyle};
use docbin_core::raster::{load_gray, save_binary, save_gray};
use docbin_core::BinaryImage;

fn docbin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_docbin")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn toy_dataset(dir: &Path, count: u64) {
    for i in 0..count {
        let (img, gt) = document(50 + i, 160, 120, PageStyle::default());
        save_gray(&img, dir.join(format!("page{i}.png"))).unwrap();
        save_binary(&gt, dir.join(format!("page{i}_GT.png"))).unwrap();
    }
}

#[test]
fn binarize_writes_bilevel_output() {
    let dir = tempfile::tempdir().unwrap();
    toy_dataset(dir.path(), 1);
    let input = dir.path().join("page0.png");
    for method in ["otsu", "tsmo", "niblack", "sauvola", "nick", "bernsen", "hybrid"] {
        let out = dir.path().join(format!("{method}.png"));
        let r = docbin(&["binarize", p(&input), "--method", method, "--out", p(&out)]);
        assert_eq!(code(&r), 0, "{method}: {}", String::from_utf8_lossy(&r.stderr));
        let img = load_gray(&out).unwrap();
        assert!(img.as_raw().iter().all(|&v| v == 0 || v == 255), "{method}");
    }
}

#[test]
fn binarize_trace() {
    let dir = tempfile::tempdir().unwrap();
    toy_dataset(dir.path(), 1);
    let out = dir.path().join("out.pgm");
    let r = docbin(&["binarize", p(&dir.path().join("page0.png")), "--method", "hybrid", "--out", p(&out), "--trace"]);
    assert_eq!(code(&r), 0);
    let trace: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("out.trace.json")).unwrap()).unwrap();
    assert!(trace["category"].is_string());
    assert!(trace["threshold"].is_u64());
}

#[test]
fn binarize_errors() {
    let dir = tempfile::tempdir().unwrap();
    toy_dataset(dir.path(), 1);
    let input = dir.path().join("page0.png");
    let out = dir.path().join("o.png");
    let r = docbin(&["binarize", p(&input), "--method", "magic", "--out", p(&out)]);
    assert_eq!(code(&r), 1);
    assert!(String::from_utf8_lossy(&r.stderr).contains("Usage"));
    let r = docbin(&["binarize", p(&dir.path().join("none.png")), "--out", p(&out)]);
    assert_eq!(code(&r), 2);
    let r = docbin(&["binarize", p(&input), "--out", p(&out), "--set", "nick.window=4"]);
    assert_eq!(code(&r), 1);
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"hybrid": {"unknown": 1}}"#).unwrap();
    let r = docbin(&["binarize", p(&input), "--out", p(&out), "--config", p(&cfg)]);
    assert_eq!(code(&r), 1);
    assert_eq!(code(&docbin(&["--help"])), 0);
}

#[test]
fn evaluate_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let gt = BinaryImage::from_fn(32, 32, |x, y| (8..24).contains(&x) && y % 6 < 2).unwrap();
    let gt_path = dir.path().join("gt.png");
    save_binary(&gt, &gt_path).unwrap();

    let r = docbin(&["evaluate", p(&gt_path), p(&gt_path)]);
    assert_eq!(code(&r), 0);
    let v: serde_json::Value = serde_json::from_slice(&r.stdout).unwrap();
    assert_eq!(v["fm"], 100.0);
    assert_eq!(v["drd"], 0.0);
    assert_eq!(v["psnr"], "INF");

    let inverted = BinaryImage::from_fn(32, 32, |x, y| !gt.is_fg(x, y)).unwrap();
    let inv_path = dir.path().join("inv.png");
    save_binary(&inverted, &inv_path).unwrap();
    let r = docbin(&["evaluate", p(&inv_path), p(&gt_path), "--format", "csv"]);
    assert_eq!(code(&r), 0);
    let csv = String::from_utf8(r.stdout).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[2], "0.0000");
    assert_eq!(row[5], "0.0000");

    // One interior flip: DRD = 1 / NUBN.
    let mut flipped = gt.clone();
    flipped.set(16, 3, true);
    let flip_path = dir.path().join("flip.png");
    save_binary(&flipped, &flip_path).unwrap();
    let r = docbin(&["evaluate", p(&flip_path), p(&gt_path)]);
    let v: serde_json::Value = serde_json::from_slice(&r.stdout).unwrap();
    let nubn = docbin_core::metrics::nubn(&gt) as f64;
    let expected = docbin_core::metrics::drd(&flipped, &gt).unwrap();
    assert_eq!(v["drd"].as_f64().unwrap(), expected);
    assert!(expected > 0.0 && expected <= 1.0 / nubn + 1e-12);

    let small = dir.path().join("small.png");
    save_binary(&BinaryImage::background(8, 8).unwrap(), &small).unwrap();
    assert_eq!(code(&docbin(&["evaluate", p(&small), p(&gt_path)])), 2);
}

#[test]
fn bench_two_methods() {
    let dir = tempfile::tempdir().unwrap();
    toy_dataset(dir.path(), 2);
    let report = dir.path().join("report.csv");
    let r = docbin(&["bench", p(dir.path()), "--methods", "otsu,niblack", "--report", p(&report)]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let csv = std::fs::read_to_string(&report).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "rank,score,method,fm,fmp,drd,psnr,seconds");
    assert_eq!(lines.len(), 3);
    let scores: Vec<usize> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(scores.iter().all(|s| (4..=8).contains(s)));
    assert_eq!(scores.iter().sum::<usize>(), 12);
    assert!(scores[0] <= scores[1]);
    let mut methods: Vec<&str> = lines[1..].iter().map(|l| l.split(',').nth(2).unwrap()).collect();
    methods.sort();
    assert_eq!(methods, vec!["niblack", "otsu"]);
    assert!(!csv.contains('\r'));
}

#[test]
fn bench_is_repeatable_and_json() {
    let dir = tempfile::tempdir().unwrap();
    toy_dataset(dir.path(), 3);
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_docbin"))
            .args(["bench", p(dir.path()), "--methods", "otsu,sauvola,hybrid", "--format", "json"])
            .env("BINARIZE_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(code(&out), 0);
        let mut v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        for row in v["methods"].as_array_mut().unwrap() {
            row.as_object_mut().unwrap().retain(|k, _| !k.contains("seconds"));
        }
        v.as_object_mut().unwrap().remove("timings");
        v
    };
    let a = run("1");
    assert_eq!(a, run("0"));
    assert_eq!(a["methods"].as_array().unwrap().len(), 3);
    assert_eq!(a["images"].as_array().unwrap().len(), 9);
}

#[test]
fn bench_failures() {
    let empty = tempfile::tempdir().unwrap();
    assert_eq!(code(&docbin(&["bench", p(empty.path())])), 2);

    let dir = tempfile::tempdir().unwrap();
    toy_dataset(dir.path(), 2);
    save_binary(&BinaryImage::background(10, 10).unwrap(), dir.path().join("page1_GT.png")).unwrap();
    let r = docbin(&["bench", p(dir.path()), "--methods", "otsu,nick"]);
    assert_eq!(code(&r), 4);
    let csv = String::from_utf8(r.stdout).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(String::from_utf8_lossy(&r.stderr).contains("page1"));
}

#[test]
fn sweep_rows() {
    let dir = tempfile::tempdir().unwrap();
    toy_dataset(dir.path(), 2);
    let r = docbin(&["sweep", p(dir.path()), "--param", "k_smear", "--values", "2,4,8,16"]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let csv = String::from_utf8(r.stdout).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "value,fm,seconds");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("2,"));

    let r = docbin(&["sweep", p(dir.path()), "--param", "no_such", "--values", "1"]);
    assert_eq!(code(&r), 1);
}
