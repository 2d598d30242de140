use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};

use stratlearn_cli::presets::ADVERSARY_ETAS;
use stratlearn_cli::{emit_csv, run_preset, PresetName, PresetOptions, HEADER};

fn stratlearn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stratlearn")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(HEADER));
    lines.map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn unknown_preset_lists_valid_names() {
    let dir = tempfile::tempdir().unwrap();
    let out = stratlearn(&["preset", "figure-9", "--out", dir.path().to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    for p in PresetName::ALL {
        assert!(err.contains(p.name()), "{err}");
    }
}

#[test]
fn solve_and_certify_pennies() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "pennies.csv", "1,-1\n-1,1\n");
    let out = stratlearn(&["solve", &m]);
    assert!(out.status.success());
    let ne: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((ne["f_star"][0].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!(ne["gap"].as_f64().unwrap() <= 1e-9);

    let out = stratlearn(&["certify", &m, "--eta", "0.1", "--alpha", "0"]);
    assert!(out.status.success());
    let rho: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    assert!((rho - 1.01f64.sqrt()).abs() < 1e-6);

    let bad = write(dir.path(), "bad.csv", "1,2\n3\n");
    assert!(!stratlearn(&["solve", &bad]).status.success());
}

#[test]
fn run_config_to_stdout_and_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"{"game": {"random": {"n": 4, "m": 3, "seed": 7}}, "horizon": 50,
        "agent": {"kind": "AFTRL", "eta": 0.1, "alpha": 2}, "adversary": {"nonoblivious_mwu": {"eta": 0.3}}}"#;
    let c = write(dir.path(), "c.json", config);
    let out = stratlearn(&["run", &c]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some(HEADER));
    // Five default metrics over 50 rounds.
    assert_eq!(text.lines().count(), 1 + 5 * 50);

    let target = dir.path().join("run.csv");
    let with_output = config.replacen('{', &format!("{{\"output\": {:?},", target.to_str().unwrap()), 1);
    let c2 = write(dir.path(), "c2.json", &with_output);
    assert!(stratlearn(&["run", &c2]).status.success());
    assert_eq!(std::fs::read_to_string(&target).unwrap(), text);
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(target.with_extension("json")).unwrap()).unwrap();
    assert_eq!(meta["scaling"]["scale"], 1.0);
}

#[test]
fn invalid_config_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(
        dir.path(),
        "c.json",
        r#"{"game": {"random": {"n": 4, "m": 3, "seed": 7}}, "horizon": 0,
            "agent": {"kind": "MWU", "eta": 0.1}, "adversary": {"self_play": {}}}"#,
    );
    let out = stratlearn(&["run", &c]);
    assert!(!out.status.success());
    assert!(String::from_utf8(out.stderr).unwrap().contains("horizon"));
}

#[test]
fn last_round_preset_single_seed() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = run_preset(PresetName::LastRound, dir.path(), &[3], &PresetOptions::default()).unwrap();
    assert!(manifest.failures.is_empty());
    assert_eq!(manifest.horizon, Some(100_000));
    let rows = rows(&dir.path().join("last_round.csv"));
    let last: BTreeSet<(String, String)> =
        rows.iter().filter(|r| r[0] == "100000").map(|r| (r[1].clone(), r[2].clone())).collect();
    assert_eq!(last.len(), 8);
    for learner in ["MWU", "OMWU", "AMWU", "OMWU1"] {
        for metric in ["exploitability", "kl_to_ne"] {
            assert!(last.contains(&(learner.to_string(), metric.to_string())));
        }
    }
}

#[test]
fn oblivious_preset_grid_cardinality() {
    let dir = tempfile::tempdir().unwrap();
    let seeds = [0, 1];
    let opts = PresetOptions { horizon: Some(20), stride: Some(10), parallelism: 2 };
    let manifest = run_preset(PresetName::ObliviousLoss, dir.path(), &seeds, &opts).unwrap();
    assert!(manifest.failures.is_empty());
    let rows = rows(&dir.path().join("oblivious_loss.csv"));
    let cells: BTreeSet<(String, String, String)> =
        rows.iter().map(|r| (r[1].clone(), r[4].clone(), r[5].clone())).collect();
    assert_eq!(cells.len(), ADVERSARY_ETAS.len() * 5 * seeds.len());
    // Rounds 1, 10 and 20 per series.
    assert_eq!(rows.len(), cells.len() * 3);
    let text = std::fs::read_to_string(dir.path().join("manifest.json")).unwrap();
    let m: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(m["grid"].as_array().unwrap().len(), 50);
    assert_eq!(m["library_version"], stratlearn::VERSION);
}

#[test]
fn preset_failures_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    // Every run rejects a one-round horizon.
    let out = stratlearn(&["preset", "last-round", "--out", dir.path().to_str().unwrap(), "--seeds", "0", "--horizon", "1"]);
    assert!(!out.status.success());
}

#[test]
fn preset_document_through_run() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("spec");
    let doc = format!(r#"{{"preset": "spectral-certificate", "seeds": [0, 1], "output": {:?}}}"#, out_dir.to_str().unwrap());
    let c = write(dir.path(), "p.json", &doc);
    let out = stratlearn(&["run", &c]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = rows(&out_dir.join("spectral_certificate.csv"));
    // Five learners, two seeds, seeded game plus pennies.
    assert_eq!(rows.len(), 5 * 2 * 2);
}

#[test]
fn unwritable_csv_path_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(emit_csv(&[], &dir.path().join("missing").join("x.csv")).is_err());
    let ok = dir.path().join("empty.csv");
    emit_csv(&[], &ok).unwrap();
    assert_eq!(std::fs::read_to_string(ok).unwrap(), format!("{HEADER}\n"));
}
