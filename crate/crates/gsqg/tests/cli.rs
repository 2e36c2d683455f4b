use std::path::Path;
use std::process::Command;

fn gsqg() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gsqg"))
}

fn write_circle(path: &Path, r: f64, n: usize) {
    let nodes: Vec<[f64; 2]> = (0..n)
        .map(|j| {
            let t = std::f64::consts::TAU * j as f64 / n as f64;
            [r * t.cos(), r * t.sin()]
        })
        .collect();
    let v = serde_json::json!({ "nodes": nodes, "param_kind": "constant_speed", "closed": true });
    std::fs::write(path, v.to_string()).unwrap();
}

const CIRCLE: &str = r#"
alpha = 0.16666666666666666
epsilon = 0.1
N = 128
t_end = 0.3
output_every = 4

[[patches]]
kind = "circle"
strength = 1.0
params = { radius = 1.0 }
"#;

#[test]
fn hausdorff_of_concentric_circles() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    write_circle(&a, 1.0, 64);
    write_circle(&b, 2.0, 64);
    let out = gsqg().args(["distance", a.to_str().unwrap(), b.to_str().unwrap(), "--metric", "hausdorff"]).output().unwrap();
    assert!(out.status.success());
    let v: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    assert!((v - 1.0).abs() < 1e-12);
}

#[test]
fn bad_inputs_exit_64() {
    let out = gsqg().args(["distance", "/nonexistent/a.json", "/nonexistent/b.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(64));
    let out = gsqg().args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(64));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, format!("{CIRCLE}\nunknown_key = 1\n")).unwrap();
    let out = gsqg().args(["run", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn run_conserves_area_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("circle.toml");
    std::fs::write(&cfg, CIRCLE).unwrap();
    let mut csvs = Vec::new();
    for k in 0..2 {
        let out_dir = dir.path().join(format!("out{k}"));
        let st = gsqg().args(["run", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]).status().unwrap();
        assert_eq!(st.code(), Some(0));
        csvs.push(std::fs::read(out_dir.join("diagnostics.csv")).unwrap());
        let snap = std::fs::read(out_dir.join("snapshots/frame_00001_patch_0.json")).unwrap();
        if k == 1 {
            let first = std::fs::read(dir.path().join("out0/snapshots/frame_00001_patch_0.json")).unwrap();
            assert_eq!(first, snap);
        }
        assert!(out_dir.join("frames/frame_00000.svg").exists());
    }
    assert_eq!(csvs[0], csvs[1]);
    let text = String::from_utf8(csvs.remove(0)).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "area_0").unwrap();
    let areas: Vec<f64> = lines.map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect();
    assert!(areas.len() >= 3);
    for a in &areas {
        assert!((a - areas[0]).abs() <= 1e-3 * areas[0]);
    }
}

#[test]
fn check_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("report.json");
    let out = gsqg().args(["check", "--seed", "0", "--trials", "100", "--json", json.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let table = String::from_utf8(out.stdout).unwrap();
    assert_eq!(table.lines().filter(|l| l.contains(" PASS ")).count(), 11);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(v["checks"].as_array().unwrap().len(), 11);
}

#[test]
fn align_prints_json() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    write_circle(&a, 1.0, 64);
    write_circle(&b, 1.01, 64);
    let out = gsqg().args(["align", a.to_str().unwrap(), b.to_str().unwrap()]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["phi"].as_array().unwrap().len(), 64);
    assert!(v["residual"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn refine_epsilon_prints_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("circle.toml");
    std::fs::write(&cfg, CIRCLE.replace("t_end = 0.3", "t_end = 0.05")).unwrap();
    let out = gsqg().args(["refine-epsilon", cfg.to_str().unwrap()]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 3);
}
