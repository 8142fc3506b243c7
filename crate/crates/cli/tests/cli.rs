use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn tropicell(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tropicell"))
        .args(args)
        .arg("--quiet")
        .env("TROPICELL_CACHE", cache)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn betti_vector(v: &Value) -> Vec<(i64, u64)> {
    v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["degree"].as_i64().unwrap(), r["betti"].as_u64().unwrap()))
        .collect()
}

#[test]
fn enumerate_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = tropicell(dir.path(), &["enumerate", "-g", "1", "-n", "1", "--json"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["classes"], 1);
    assert_eq!(v["levels"][0]["alpha"], 1);
    assert_eq!(v["levels"][0]["beta"], 0);
}

#[test]
fn enumerate_empty_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let out = tropicell(dir.path(), &["enumerate", "-g", "0", "-n", "3"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("empty catalog"));
}

#[test]
fn enumerate_counts_match_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&tropicell(dir.path(), &["enumerate", "-g", "1", "-n", "4", "--json"]));
    let counts: Vec<u64> = v["levels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l["classes"].as_u64().unwrap())
        .collect();
    let oracle: Vec<u64> = tropicell::oracle::bottom_up_counts(1, 4)
        .into_iter()
        .map(|c| c as u64)
        .collect();
    assert_eq!(counts, oracle);
    assert_eq!(v["classes"].as_u64().unwrap(), oracle.iter().sum::<u64>());
}

#[test]
fn homology_examples() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&tropicell(dir.path(), &["homology", "-g", "1", "-n", "4", "--json"]));
    assert_eq!(betti_vector(&v), vec![(-1, 0), (0, 0), (1, 0), (2, 0), (3, 3)]);

    let v = json(&tropicell(
        dir.path(),
        &["homology", "-g", "1", "-n", "4", "--subcomplex", "rep", "--json"],
    ));
    assert!(betti_vector(&v).iter().all(|&(_, b)| b == 0));

    let v = json(&tropicell(dir.path(), &["homology", "-g", "0", "-n", "6", "--json"]));
    let nonzero: Vec<_> = betti_vector(&v).into_iter().filter(|&(_, b)| b > 0).collect();
    assert_eq!(nonzero, vec![(2, 24)]);
}

#[test]
fn empty_complex_is_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&tropicell(dir.path(), &["homology", "-g", "0", "-n", "3", "--json"]));
    assert_eq!(v["empty_complex"], true);
    assert_eq!(betti_vector(&v), vec![(-1, 1)]);
}

#[test]
fn character_examples() {
    let dir = tempfile::tempdir().unwrap();
    let out = tropicell(dir.path(), &["character", "-n", "3"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("EQUAL"));
    let v = json(&tropicell(dir.path(), &["character", "-n", "3", "--json"]));
    for row in ["homology", "dihedral"] {
        assert_eq!(v[row]["values"]["1+1+1"], 1);
        assert_eq!(v[row]["values"]["2+1"], -1);
        assert_eq!(v[row]["values"]["3"], 1);
    }
    let v = json(&tropicell(dir.path(), &["character", "-n", "4", "--json"]));
    assert_eq!(v["homology"]["values"]["1+1+1+1"], 3);
    assert_eq!(v["dihedral"]["values"]["1+1+1+1"], 3);
    let v = json(&tropicell(dir.path(), &["character", "-n", "5", "--json"]));
    assert_eq!(v["equal"], true);
    assert_eq!(v["homology"]["values"]["1+1+1+1+1"], 12);
}

#[test]
fn character_rejects_small_n() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(tropicell(dir.path(), &["character", "-n", "2"]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        tropicell(dir.path(), &["enumerate", "-g", "0", "-n", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(tropicell(dir.path(), &["enumerate", "-g", "x"]).status.code(), Some(2));
    assert_eq!(tropicell(dir.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(tropicell(dir.path(), &["homology"]).status.code(), Some(2));
}

#[test]
fn class_limit_exits_with_three_and_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let out = tropicell(dir.path(), &["enumerate", "-g", "1", "-n", "5", "--max-classes", "50"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("checkpoint"));
    assert!(dir.path().join("jgn-1-5.partial.ndjson").exists());
    let out = tropicell(dir.path(), &["enumerate", "-g", "1", "-n", "5", "--json"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["classes"], 27 + 171 + 470 + 610 + 297);
}

#[test]
fn output_is_deterministic_across_jobs_and_cache() {
    let dir = tempfile::tempdir().unwrap();
    let runs = [
        vec!["homology", "-g", "1", "-n", "5", "--json", "--jobs", "1"],
        vec!["homology", "-g", "1", "-n", "5", "--json", "--jobs", "4"],
        vec!["homology", "-g", "1", "-n", "5", "--json", "--no-cache"],
        vec!["homology", "-g", "1", "-n", "5", "--json"],
    ];
    let outputs: Vec<Vec<u8>> = runs.iter().map(|a| tropicell(dir.path(), a).stdout).collect();
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));

    let a = tropicell(
        dir.path(),
        &["export", "-g", "1", "-n", "4", "--format", "euler", "--jobs", "1"],
    )
    .stdout;
    let b = tropicell(
        dir.path(),
        &["export", "-g", "1", "-n", "4", "--format", "euler", "--jobs", "3"],
    )
    .stdout;
    assert_eq!(a, b);
}

#[test]
fn cache_dir_flag_overrides_environment() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let out = tropicell(
        env_dir.path(),
        &[
            "enumerate",
            "-g",
            "1",
            "-n",
            "3",
            "--cache-dir",
            flag_dir.path().to_str().unwrap(),
        ],
    );
    assert!(out.status.success());
    assert!(flag_dir.path().join("jgn-1-3.ndjson").exists());
    assert!(!env_dir.path().join("jgn-1-3.ndjson").exists());

    let no_cache = tempfile::tempdir().unwrap();
    tropicell(no_cache.path(), &["enumerate", "-g", "1", "-n", "3", "--no-cache"]);
    assert!(std::fs::read_dir(no_cache.path()).unwrap().next().is_none());
}

#[test]
fn exported_matrices_round_trip_through_rank() {
    let dir = tempfile::tempdir().unwrap();
    let matrices = dir.path().join("m");
    let out = tropicell(
        dir.path(),
        &[
            "export",
            "-g",
            "1",
            "-n",
            "4",
            "--format",
            "matrices",
            "-o",
            matrices.to_str().unwrap(),
        ],
    );
    assert!(out.status.success());
    let table = json(&tropicell(dir.path(), &["homology", "-g", "1", "-n", "4", "--json"]));
    for p in 0..4 {
        let file = matrices.join(format!("boundary_{p}.txt"));
        let text = std::fs::read_to_string(&file).unwrap();
        assert!(text.trim_end().ends_with("0 0 0"));
        let v = json(&tropicell(
            dir.path(),
            &["homology", "--rank-of", file.to_str().unwrap(), "--json"],
        ));
        let expected = &table["rows"].as_array().unwrap()[p + 1]["boundary_rank"];
        assert_eq!(&v["rank"], expected, "degree {p}");
    }
}

#[test]
fn exported_catalog_is_ndjson() {
    let dir = tempfile::tempdir().unwrap();
    let out = tropicell(dir.path(), &["export", "-g", "1", "-n", "3", "--format", "catalog"]);
    let text = stdout(&out);
    let mut lines = text.lines();
    let header: Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(header["classes"], 22);
    let records: Vec<Value> = lines.map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(records.len(), 22);
    assert!(records.iter().all(|r| r["graph"]["vertices"].is_array()));
}

#[test]
fn quick_verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = tropicell(dir.path(), &["verify", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    let criteria: std::collections::BTreeSet<u64> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["criterion"].as_u64().unwrap())
        .collect();
    assert_eq!(criteria.into_iter().collect::<Vec<_>>(), (1..=8).collect::<Vec<_>>());
}

#[test]
fn sign_flip_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let out = tropicell(dir.path(), &["verify", "--inject-sign-flip", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let check = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "boundary squares to zero")
        .unwrap();
    assert_eq!(check["passed"], false);
}
