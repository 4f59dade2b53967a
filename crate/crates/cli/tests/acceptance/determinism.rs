//! Criterion 8: every CLI verb reproduces byte-identical output files when
//! run twice with the same seeds.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn antiplan(dir: &Path, args: &[&str]) {
    let out = Command::new(env!("CARGO_BIN_EXE_antiplan"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn antiplan");
    assert!(
        out.status.success(),
        "antiplan {:?} failed:\n{}{}",
        args,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

/// One full pass over every verb, writing all outputs under `dir`.
fn run_all_verbs(dir: &Path) {
    antiplan(
        dir,
        &[
            "gen", "--profile", "restaurant", "--seed", "3", "--grid", "16x10", "--containers",
            "5", "--objects", "4", "--max-tasks", "6", "--weight-ratio", "0.8", "--out-dir", ".",
        ],
    );
    let dist_json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("distribution.json")).unwrap()).unwrap();
    let label = dist_json["tasks"][0]["label"].as_str().expect("task label").to_string();

    let common = ["--world", "world.json", "--dist", "distribution.json"];
    let mut plan_args = vec!["plan"];
    plan_args.extend_from_slice(&common);
    plan_args.extend_from_slice(&[
        "--task", &label, "--mode", "anticipatory", "--estimator", "oracle", "--samples", "4",
        "--radius", "3", "--seed", "1", "--out", "terminal.json",
    ]);
    antiplan(dir, &plan_args);

    let mut prep_args = vec!["prepare"];
    prep_args.extend_from_slice(&common);
    prep_args.extend_from_slice(&[
        "--iterations", "30", "--decay", "0.95", "--seed", "2", "--chains", "2", "--out",
        "prepared.json",
    ]);
    antiplan(dir, &prep_args);

    let mut datagen_args = vec!["datagen"];
    datagen_args.extend_from_slice(&common);
    datagen_args.extend_from_slice(&["--states", "8", "--chain-max", "2", "--seed", "4", "--out", "data.json"]);
    antiplan(dir, &datagen_args);

    antiplan(
        dir,
        &[
            "train", "--dataset", "data.json", "--out", "params.json", "--loss-csv", "loss.csv",
            "--hidden", "8", "--layers", "2", "--epochs", "3", "--lr", "0.02", "--seed", "5",
        ],
    );
    antiplan(
        dir,
        &["eval-estimator", "--dataset", "data.json", "--params", "params.json", "--out", "eval.csv"],
    );

    let mut learned_args = vec!["plan"];
    learned_args.extend_from_slice(&common);
    learned_args.extend_from_slice(&[
        "--task", &label, "--mode", "anticipatory", "--estimator", "learned", "--params",
        "params.json", "--samples", "4", "--radius", "3", "--seed", "1", "--out", "terminal2.json",
    ]);
    antiplan(dir, &learned_args);

    antiplan(dir, &["bench", "init", "--out", "suite.json"]);
    // shrink the template so the run stays fast; identical in both passes
    let mut suite: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("suite.json")).unwrap()).unwrap();
    for (k, v) in [
        ("environments", serde_json::json!(2)),
        ("sequence_length", serde_json::json!(2)),
        ("grid", serde_json::json!([16, 10])),
        ("containers", serde_json::json!(5)),
        ("objects", serde_json::json!(4)),
        ("samples", serde_json::json!(2)),
        ("max_tasks", serde_json::json!(6)),
        ("anneal_iterations", serde_json::json!(10)),
    ] {
        suite[k] = v;
    }
    fs::write(dir.join("suite.json"), serde_json::to_string_pretty(&suite).unwrap()).unwrap();
    antiplan(dir, &["bench", "run", "--suite", "suite.json", "--out-dir", "bench"]);
    antiplan(dir, &["bench", "report", "--in", "bench", "--plot"]);

    let mut export_args = vec!["export"];
    export_args.extend_from_slice(&common);
    export_args.extend_from_slice(&["--task", &label, "--out-dir", "pddl"]);
    antiplan(dir, &export_args);
}

fn collect_files(root: &Path, dir: &Path, out: &mut Vec<PathBuf>) {
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            collect_files(root, &path, out);
        } else {
            out.push(path.strip_prefix(root).unwrap().to_path_buf());
        }
    }
}

#[test]
fn criterion_8_cli_determinism() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_all_verbs(a.path());
    run_all_verbs(b.path());

    let mut files = Vec::new();
    collect_files(a.path(), a.path(), &mut files);
    files.sort();
    assert!(!files.is_empty());
    let mut files_b = Vec::new();
    collect_files(b.path(), b.path(), &mut files_b);
    files_b.sort();
    assert_eq!(files, files_b, "the two passes produced different file sets");
    for rel in &files {
        let x = fs::read(a.path().join(rel)).unwrap();
        let y = fs::read(b.path().join(rel)).unwrap();
        assert_eq!(x, y, "output file {} differs between identical runs", rel.display());
    }
    println!(
        "[criterion 8] cli determinism: PASS ({} output files byte-identical across two runs)",
        files.len()
    );
}
