use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cayley-spectra"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn generate(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.join(name);
    let mut full = vec!["generate"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["-o", path.to_str().unwrap()]);
    let out = run(&full);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn generate_interval_document() {
    let dir = TempDir::new().unwrap();
    let g = generate(dir.path(), "g.json", &["--family", "interval", "--n", "16", "--k", "4"]);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&g).unwrap()).unwrap();
    assert_eq!(doc["kind"], "cayley");
    assert_eq!(doc["format_version"], 1);
    assert_eq!(doc["connection_set"].as_array().unwrap().len(), 8);
    assert_eq!(doc["connection_set"][0], serde_json::json!([1]));
}

#[test]
fn generate_reports_summary_and_rejects_bad_parameters() {
    let out = run(&["generate", "--family", "interval", "--n", "16", "--k", "4"]);
    assert!(out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("order 16") && stderr.contains("degree 8"), "{stderr}");
    assert_eq!(run(&["generate", "--family", "interval", "--n", "8", "--k", "4"]).status.code(), Some(2));
    assert_eq!(run(&["generate", "--family", "cyclic-random", "--n", "8", "--p", "0.5"]).status.code(), Some(2));
    assert_eq!(run(&["generate", "--family", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["generate", "--family", "explicit", "--moduli", "5", "--elements", "1"]).status.code(), Some(2));
}

#[test]
fn eig_on_a_cycle_reports_the_failing_character() {
    let dir = TempDir::new().unwrap();
    let g = generate(dir.path(), "c8.json", &["--family", "cycle", "--n", "8"]);
    let r = stdout_json(&run(&["eig", p(&g), "--eps", "0.5"]));
    assert_eq!(r["holds"], false);
    assert_eq!(r["failing_character"], serde_json::json!([4]));
    assert!((r["failing_lambda"].as_f64().unwrap() + 2.0).abs() < 1e-9);
    assert_eq!(run(&["eig", p(&g), "--eps", "0.5", "--strict"]).status.code(), Some(1));
}

#[test]
fn exhaustive_disc_on_the_interval_graph() {
    let dir = TempDir::new().unwrap();
    let g = generate(dir.path(), "g.json", &["--family", "interval", "--n", "16", "--k", "4"]);
    let r = stdout_json(&run(&["disc", p(&g), "--delta", "0.2", "--mode", "exhaustive"]));
    assert_eq!(r["verdict"]["kind"], "violated");
    assert!(!r["verdict"]["sets"][0].as_array().unwrap().is_empty());
    assert_eq!(r["delta"], "1/5");
    let strict = run(&["disc", p(&g), "--delta", "0.2", "--strict"]);
    assert_eq!(strict.status.code(), Some(1));
    let complete = generate(dir.path(), "k9.json", &["--family", "complete", "--n", "9"]);
    let ok = run(&["disc", p(&complete), "--delta", "0.2", "--strict"]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn witness_round_trip_through_guided_disc() {
    let dir = TempDir::new().unwrap();
    let g = generate(dir.path(), "g.json", &["--family", "interval", "--n", "512", "--k", "32"]);
    let w = dir.path().join("w.json");
    let out = run(&["witness", p(&g), "--eps", "0.5", "--seed", "7", "--max-tries", "20", "-o", p(&w)]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&w).unwrap()).unwrap();
    assert_eq!(report["kind"], "witness");
    let set: Vec<String> = report["violator_set"].as_array().unwrap().iter().map(|v| v.to_string()).collect();
    assert_eq!(set.len() as u64, report["violator_size"].as_u64().unwrap());

    let back = stdout_json(&run(&["disc", p(&g), "--from-witness", p(&w)]));
    assert_eq!(back["verdict"]["kind"], "violated");
    let explicit = stdout_json(&run(&["disc", p(&g), "--guided", "--delta", "0.1", "--set", &set.join(",")]));
    assert_eq!(explicit["verdict"]["kind"], "violated");
    assert_eq!(explicit["verdict"]["edges"], report["violator_edges"]);
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let dir = TempDir::new().unwrap();
    let g = generate(dir.path(), "g.json", &["--family", "cyclic-random", "--n", "300", "--p", "0.1", "--seed", "4"]);
    let again =
        generate(dir.path(), "g2.json", &["--family", "cyclic-random", "--n", "300", "--p", "0.1", "--seed", "4"]);
    assert_eq!(std::fs::read(&g).unwrap(), std::fs::read(&again).unwrap());
    let commands: [&[&str]; 4] = [
        &["witness", p(&g), "--eps", "0.2", "--seed", "3", "--max-tries", "8"],
        &["disc", p(&g), "--delta", "0.2", "--mode", "sampled", "--samples", "300", "--seed", "9"],
        &["spectrum", p(&g), "--format", "csv"],
        &["walks", p(&g), "--length", "4", "--circuit-tol", "0.5"],
    ];
    for args in commands {
        let one = run(&[&["--threads", "1"], args].concat());
        let four = run(&[&["--threads", "4"], args].concat());
        let plain = run(args);
        assert_eq!(one.stdout, four.stdout, "{args:?}");
        assert_eq!(one.stdout, plain.stdout, "{args:?}");
        assert!(one.status.code() != Some(2), "{args:?}: {}", String::from_utf8_lossy(&one.stderr));
    }
}

#[test]
fn spectrum_csv_rows() {
    let dir = TempDir::new().unwrap();
    let g = generate(dir.path(), "g.json", &["--family", "explicit", "--moduli", "4,2", "--elements", "1,0;3,0;0,1"]);
    let out = run(&["spectrum", p(&g), "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,t,lambda"));
    assert!(lines.next().unwrap().starts_with("0,0:0,3.0"));
    assert_eq!(text.lines().count(), 9);
}

#[test]
fn generic_documents_are_restricted() {
    let dir = TempDir::new().unwrap();
    let h = generate(
        dir.path(),
        "h.json",
        &["--family", "gnp-clique", "--n", "60", "--p", "0.2", "--alpha", "0.5", "--seed", "3"],
    );
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&h).unwrap()).unwrap();
    assert_eq!(doc["kind"], "generic");
    assert_eq!(doc["n"], 66);

    let spectrum = stdout_json(&run(&["spectrum", p(&h)]));
    assert_eq!(spectrum["method"], "dense");
    assert!(stdout_json(&run(&["walks", p(&h), "--length", "4"]))["count_matrix"].as_u64().is_some());
    let sampled = run(&["disc", p(&h), "--delta", "0.2", "--mode", "sampled", "--samples", "50", "--seed", "1"]);
    assert!(sampled.status.success());

    for args in [
        vec!["eig", p(&h), "--eps", "0.5"],
        vec!["witness", p(&h), "--eps", "0.5", "--seed", "1"],
        vec!["audit", p(&h)],
        vec!["spectrum", p(&h), "--method", "character"],
        vec!["walks", p(&h), "--length", "4", "--method", "spectral"],
        vec!["disc", p(&h), "--delta", "0.2", "--mode", "exhaustive"],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let g = generate(dir.path(), "g.json", &["--family", "cycle", "--n", "10"]);
    for args in [
        vec!["disc", p(&g), "--delta", "0.2", "--mode", "sampled"],
        vec!["disc", p(&g), "--mode", "exhaustive"],
        vec!["disc", p(&g), "--delta", "1.5"],
        vec!["disc", p(&g), "--delta", "0.2", "--guided"],
        vec!["walks", p(&g), "--length", "3", "--circuit-tol", "0.5"],
        vec!["eig", p(&g), "--eps", "abc"],
        vec!["eig", "/does/not/exist.json", "--eps", "0.5"],
        vec!["eig", p(&g), "--eps", "0.5", "--format", "csv"],
        vec!["witness", p(&g), "--eps", "0.5"],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn walks_and_circuit() {
    let dir = TempDir::new().unwrap();
    let c4 = generate(dir.path(), "c4.json", &["--family", "cycle", "--n", "4"]);
    let r = stdout_json(&run(&["walks", p(&c4), "--length", "4"]));
    assert_eq!(r["count_matrix"], 32);
    let c8 = generate(dir.path(), "c8.json", &["--family", "cycle", "--n", "8"]);
    let r = stdout_json(&run(&["walks", p(&c8), "--length", "4", "--circuit-tol", "0.5"]));
    assert_eq!(r["holds"], false);
    assert_eq!(run(&["walks", p(&c8), "--length", "4", "--circuit-tol", "0.5", "--strict"]).status.code(), Some(1));
}

#[test]
fn audit_single_character_with_identity() {
    let dir = TempDir::new().unwrap();
    let g = generate(dir.path(), "g.json", &["--family", "interval", "--n", "64", "--k", "8"]);
    let r = stdout_json(&run(&["audit", p(&g), "--character", "1", "--identity", "0,4,8"]));
    assert_eq!(r["total_failures"], 0);
    assert_eq!(r["identity"]["holds"], true);
    assert_eq!(r["identity"]["lhs"], 640);
    assert_eq!(r["quotient_weights"]["m"], 64);
    let all = stdout_json(&run(&["audit", p(&g)]));
    assert_eq!(all["characters"].as_array().unwrap().len(), 63);
    assert_eq!(run(&["audit", p(&g), "--identity", "0,4,8"]).status.code(), Some(2));
}

#[test]
fn blowup_from_a_document() {
    let dir = TempDir::new().unwrap();
    let c4 = generate(dir.path(), "c4.json", &["--family", "cycle", "--n", "4"]);
    let b = generate(dir.path(), "b.json", &["--family", "blowup", "--from", p(&c4), "--k", "2"]);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&b).unwrap()).unwrap();
    assert_eq!(doc["moduli"], serde_json::json!([4, 2]));
    assert_eq!(doc["connection_set"].as_array().unwrap().len(), 4);
}
