//! Command-line behavior: staging, audit output and exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_authornet"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn write(dir: &Path, rel: &str, content: &str) {
    let path = dir.join(rel);
    fs::create_dir_all(path.parent().unwrap()).unwrap();
    fs::write(path, content).unwrap();
}

/// Three areas, one per format family, grouped into two domains.
fn fixture_manifest(dir: &Path) {
    write(dir, "inputs/alpha.txt", "Alvarez, M.J.\nBrandt, K.L.\nChen, L.\n");
    write(
        dir,
        "inputs/beta.ris",
        "TY  - JOUR\nAU  - Alvarez, M.J.\nAU  - Dupont, J.\nER  - \nTY  - JOUR\nAU  - Egorov, V.\nER  - \n",
    );
    write(dir, "inputs/gamma.txt", "Fischer, R.\nGarcia, P.T.\n");
    write(dir, "inputs/faraway.txt", "Jensen, O.\nHoffman, S.\n");
    write(
        dir,
        "manifest.json",
        r#"{
            "seed": 11,
            "output_dir": "out",
            "areas": {
                "alpha": {"file": "inputs/alpha.txt", "format": "author-lines"},
                "beta": {"file": "inputs/beta.ris", "format": "ris"},
                "gamma": {"file": "inputs/gamma.txt", "format": "author-lines"},
                "faraway": {"file": "inputs/faraway.txt", "format": "author-lines"}
            },
            "domains": {"main": ["alpha", "beta", "gamma"], "other": ["faraway"]}
        }"#,
    );
}

#[test]
fn ingest_writes_one_sorted_list_per_area() {
    let dir = tempfile::tempdir().unwrap();
    fixture_manifest(dir.path());
    let out = run_in(dir.path(), &["--manifest", "manifest.json", "ingest"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("ingest alpha: records=3 raw_authors=3 unique=3 skipped=0"), "{stderr}");
    assert!(stderr.contains("ingest beta: records=2 raw_authors=3 unique=3 skipped=0"), "{stderr}");

    let alpha = fs::read_to_string(dir.path().join("out/lists/alpha.txt")).unwrap();
    assert_eq!(alpha, "alvarez, M. J.\nbrandt, K. L.\nchen, L.\n");
    assert!(dir.path().join("out/lists/beta.txt").exists());
    assert!(dir.path().join("out/lists/gamma.txt").exists());
}

#[test]
fn ingest_empty_input_warns_and_writes_empty_list() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "inputs/areas.txt", "");
    write(
        dir.path(),
        "manifest.json",
        r#"{"output_dir": "out",
            "areas": {"empty": {"file": "inputs/areas.txt", "format": "author-lines"}},
            "domains": {}}"#,
    );
    let out = run_in(dir.path(), &["--manifest", "manifest.json", "ingest"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning: empty author list"));
    assert_eq!(fs::read_to_string(dir.path().join("out/lists/empty.txt")).unwrap(), "");
}

#[test]
fn malformed_ris_exits_2_naming_the_file() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "inputs/bad.ris", "TY  - JOUR\nAU broken, line\nER  - \n");
    write(
        dir.path(),
        "manifest.json",
        r#"{"output_dir": "out",
            "areas": {"bad": {"file": "inputs/bad.ris", "format": "ris"}},
            "domains": {}}"#,
    );
    let out = run_in(dir.path(), &["--manifest", "manifest.json", "ingest"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("bad.ris"), "{stderr}");
    assert!(stderr.contains("line 2"), "{stderr}");
}

#[test]
fn usage_errors_exit_1() {
    let out = bin().arg("--definitely-not-a-flag").output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    let out = bin().args(["overlap", "--domain", "x"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1), "missing --manifest is a usage error");
}

#[test]
fn numerical_domain_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["simulate", "--n", "5", "--m", "5", "--p", "1.5"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn overlap_writes_ordered_pairs_csv() {
    let dir = tempfile::tempdir().unwrap();
    fixture_manifest(dir.path());
    assert!(run_in(dir.path(), &["--manifest", "manifest.json", "ingest"]).status.success());
    let out = run_in(dir.path(), &["--manifest", "manifest.json", "overlap", "--domain", "main"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let pairs = fs::read_to_string(dir.path().join("out/overlap/main.pairs.csv")).unwrap();
    let lines: Vec<&str> = pairs.trim_end().lines().collect();
    assert_eq!(lines.len(), 4, "{pairs}");
    assert_eq!(lines[0], "area_a,area_b,n,m,k,p_hat,undefined");
    // deterministic ordering by area name; alvarez is shared by alpha and beta
    assert!(lines[1].starts_with("alpha,beta,3,3,1,"), "{pairs}");
    assert!(lines[2].starts_with("alpha,gamma,"), "{pairs}");
    assert!(dir.path().join("out/overlap/main.matrix.csv").exists());
}

#[test]
fn stats_over_a_missing_stage_points_at_overlap() {
    let dir = tempfile::tempdir().unwrap();
    fixture_manifest(dir.path());
    assert!(run_in(dir.path(), &["--manifest", "manifest.json", "ingest"]).status.success());
    let out = run_in(
        dir.path(),
        &["--manifest", "manifest.json", "stats", "--domain", "main", "--noise", "nope.json"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("run `noise` first"));
}

#[test]
fn fixture_stats_need_no_manifest() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "fixture.json",
        r#"{"noise": {"median": 1.0e-6, "mean": 1.1e-6},
            "domains": [{"name": "one", "median": 3.0e-6, "mean": 4.0e-6}]}"#,
    );
    let out = run_in(dir.path(), &["stats", "--fixture", "fixture.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("out/stats/fixture.json")).unwrap()).unwrap();
    assert_eq!(report["domains"][0]["s_over_n"], serde_json::json!(3.0));
}

#[test]
fn simulate_single_reports_and_stages_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["--seed", "9", "simulate", "--n", "10", "--m", "20", "--p", "0.1", "--trials", "5000"],
    );
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["config"]["seed"], serde_json::json!(9));
    assert!(doc["result"]["mean_matches"].as_f64().unwrap() > 0.0);
    let staged: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("out/simulate/single.json")).unwrap()).unwrap();
    assert_eq!(doc, staged);
}

#[test]
fn network_stages_from_files_only() {
    let dir = tempfile::tempdir().unwrap();
    fixture_manifest(dir.path());
    for args in [
        vec!["--manifest", "manifest.json", "ingest"],
        vec!["--manifest", "manifest.json", "overlap", "--domain", "main"],
        vec!["--manifest", "manifest.json", "noise", "--domain-a", "main", "--domain-b", "other"],
    ] {
        let out = run_in(dir.path(), &args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    // inputs are no longer needed once the stages are on disk
    fs::remove_dir_all(dir.path().join("inputs")).unwrap();
    let out = run_in(
        dir.path(),
        &[
            "--manifest", "manifest.json",
            "network", "--domain", "main",
            "--noise", "noise/main__vs__other.json",
            "--format", "graphml",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let xml = fs::read_to_string(dir.path().join("out/network/main.graphml")).unwrap();
    assert!(xml.contains("<graphml"));
}
