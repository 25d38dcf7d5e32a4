use std::path::Path;
use std::process::{Command, Output};

use neurashed::experiments::fig2_three_class;
use neurashed::report::{read_csv, verify_manifest};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_neurashed")).args(args).output().unwrap()
}

fn bundle(dir: &Path) -> [String; 3] {
    fig2_three_class().write_dir(dir).unwrap();
    ["graph.json", "dataset.json", "config.json"].map(|f| dir.join(f).display().to_string())
}

#[test]
fn validate_prints_ok() {
    let tmp = tempfile::tempdir().unwrap();
    let [g, d, c] = bundle(tmp.path());
    let out = run(&["validate", "-g", &g]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "OK\n");
    let out = run(&["validate", "-g", &g, "-d", &d, "-c", &c]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(run(&["validate", "--scenario", "fig4-batch"]).status.code(), Some(0));
}

#[test]
fn level_skipping_edge_is_a_domain_error() {
    let tmp = tempfile::tempdir().unwrap();
    let [g, d, c] = bundle(tmp.path());
    let mut doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&g).unwrap()).unwrap();
    doc["edges"].as_array_mut().unwrap().push(serde_json::json!([0, 12]));
    let bad = tmp.path().join("bad.json");
    std::fs::write(&bad, doc.to_string()).unwrap();
    let out_dir = tmp.path().join("out");
    let out = run(&["train", "-g", bad.to_str().unwrap(), "-d", &d, "-c", &c, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("EdgeSkipsLevel"));
}

#[test]
fn usage_errors_exit_two() {
    let out = run(&["train", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["validate"]).status.code(), Some(2));
    assert_eq!(run(&["train", "--scenario", "fig2-three-class", "-g", "x.json", "--out", "o"]).status.code(), Some(2));
    assert_eq!(run(&["train", "--scenario", "fig2-three-class", "--batch-size", "zero", "--out", "o"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn unknown_scenario_is_a_domain_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&["train", "--scenario", "fig9", "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("UnknownScenario"));
}

#[test]
fn mi_writes_curve_plot_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("mi");
    let d = dir.to_str().unwrap();
    let out = run(&["mi", "--scenario", "fig3-bottleneck", "--seed", "7", "--iters", "200", "--mc-samples", "500", "--out", d]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["mi_curve.csv", "mi_curve.svg", "manifest.json"] {
        assert!(dir.join(f).exists(), "{f}");
    }
    let (header, rows) = read_csv(&dir.join("mi_curve.csv")).unwrap();
    assert_eq!(header, ["iteration", "level", "mi_input_bits", "mi_label_bits"]);
    assert_eq!(rows.len(), 2 * 5);
    assert!(verify_manifest(&dir).unwrap().is_empty());
    let svg = std::fs::read_to_string(dir.join("mi_curve.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 4);

    // refuses a non-empty directory unless forced
    assert_eq!(run(&["mi", "--scenario", "fig3-bottleneck", "--iters", "10", "--out", d]).status.code(), Some(1));
    assert_eq!(run(&["mi", "--scenario", "fig3-bottleneck", "--iters", "10", "--out", d, "--force"]).status.code(), Some(0));
}

#[test]
fn study_commands_write_their_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let cases: [(&[&str], &[&str]); 3] = [
        (&["train", "--scenario", "fig2-three-class", "--iters", "50"], &["snapshots.csv", "progress.csv", "progress.svg", "predictions.csv"]),
        (&["elasticity", "--scenario", "fig2-three-class"], &["elasticity.csv", "elasticity_medians.csv", "elasticity.svg"]),
        (&["compare-batch", "--scenario", "fig4-batch", "--seed", "1,2", "--batch-size", "1,full"], &["sparsity.csv", "sparsity_gap.csv", "sparsity.svg"]),
    ];
    for (i, (args, files)) in cases.iter().enumerate() {
        let dir = tmp.path().join(i.to_string());
        let mut full = args.to_vec();
        full.extend(["--out", dir.to_str().unwrap()]);
        let out = run(&full);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        for f in *files {
            assert!(dir.join(f).exists(), "{f}");
        }
        assert!(verify_manifest(&dir).unwrap().is_empty());
    }
    let (_, rows) = read_csv(&tmp.path().join("1/elasticity.csv")).unwrap();
    assert_eq!(rows.len(), 16);
    assert!(rows.iter().filter(|r| r[0] == r[1]).all(|r| r[2] == "1.0"));
    let (_, rows) = read_csv(&tmp.path().join("2/sparsity.csv")).unwrap();
    assert_eq!(rows.len(), 2 * 2 * 3);
    assert_eq!(
        run(&["compare-batch", "--scenario", "fig4-batch", "--batch-size", "1", "--out", tmp.path().join("x").to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn scenarios_lists_and_exports() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("b");
    let out = run(&["scenarios", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let listing = String::from_utf8_lossy(&out.stdout);
    assert_eq!(listing.lines().count(), 3);
    assert!(dir.join("fig4-batch/expectations.json").exists());
    let custom = format!("custom:{}", dir.join("fig2-three-class").display());
    assert_eq!(run(&["validate", "--scenario", &custom]).status.code(), Some(0));
}
