//! CLI acceptance: determinism across runs and worker counts against the
//! real binary (criterion 10), exit-code contract, and output formats.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_taumc"))
}

fn workspace_file(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("taumc-accept-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn decay_model() -> String {
    workspace_file("models/decay.model")
        .to_string_lossy()
        .into_owned()
}

fn dimer_model() -> String {
    workspace_file("models/dimerization.model")
        .to_string_lossy()
        .into_owned()
}

/// Criterion 10: identical model, flags and seed give byte-identical
/// output files, independently of the worker count.
#[test]
fn criterion_10_byte_identical_outputs() {
    let model = decay_model();
    let cases: Vec<(Vec<String>, &str)> = vec![
        (
            vec![
                "simulate".into(),
                "--model".into(),
                model.clone(),
                "--method".into(),
                "exact".into(),
                "--t-end".into(),
                "1".into(),
                "--paths".into(),
                "200".into(),
            ],
            "sim.csv",
        ),
        (
            vec![
                "simulate".into(),
                "--model".into(),
                model.clone(),
                "--method".into(),
                "tau".into(),
                "--h".into(),
                "0.05".into(),
                "--t-end".into(),
                "1".into(),
                "--paths".into(),
                "200".into(),
                "--record".into(),
                "0.25".into(),
            ],
            "tau.csv",
        ),
        (
            vec![
                "couple".into(),
                "--model".into(),
                dimer_model(),
                "--kind".into(),
                "tau-tau".into(),
                "--level".into(),
                "2".into(),
                "--pairs".into(),
                "100".into(),
                "--t-end".into(),
                "0.3".into(),
            ],
            "couple.csv",
        ),
        (
            vec![
                "mlmc".into(),
                "--model".into(),
                model.clone(),
                "--estimator".into(),
                "unbiased".into(),
                "--eps".into(),
                "0.01".into(),
                "--f".into(),
                "X[A]".into(),
                "--t-end".into(),
                "1".into(),
            ],
            "mlmc.json",
        ),
        (
            vec![
                "sweep".into(),
                "--model".into(),
                dimer_model(),
                "--kind".into(),
                "tau-tau".into(),
                "--N".into(),
                "1e3,1e4".into(),
                "--h".into(),
                "0.01,0.003".into(),
                "--pairs".into(),
                "150".into(),
                "--t-end".into(),
                "0.3".into(),
            ],
            "sweep.csv",
        ),
    ];

    for (args, name) in &cases {
        let mut outputs = Vec::new();
        for (tag, workers) in [("a", "1"), ("b", "3"), ("c", "1")] {
            let out_path = tmp(&format!("{tag}-{name}"));
            let mut full: Vec<String> = args.clone();
            full.push("--seed".into());
            full.push("42".into());
            full.push("--workers".into());
            full.push(workers.into());
            full.push("--out".into());
            full.push(out_path.to_string_lossy().into_owned());
            let argv: Vec<&str> = full.iter().map(|s| s.as_str()).collect();
            run_ok(&argv);
            outputs.push(std::fs::read(&out_path).unwrap());
        }
        assert_eq!(outputs[0], outputs[1], "{name}: workers 1 vs 3 differ");
        assert_eq!(outputs[0], outputs[2], "{name}: rerun differs");
        assert!(!outputs[0].is_empty());
    }
    println!("criterion 10: PASS — byte-identical outputs across reruns and worker counts");
}

#[test]
fn help_exits_zero_and_documents_subcommands() {
    let out = run_ok(&["--help"]);
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in [
        "simulate",
        "couple",
        "mlmc",
        "sweep",
        "fit",
        "meanfield",
        "complexity",
    ] {
        assert!(text.contains(sub), "help missing `{sub}`");
    }
    run_ok(&["mlmc", "--help"]);
}

#[test]
fn usage_errors_exit_one() {
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(1), "unknown subcommand");

    let out = bin().args(["simulate", "--bogus-flag"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1), "unknown flag");

    // tau without a stepsize is a usage error
    let out = bin()
        .args([
            "simulate",
            "--model",
            &decay_model(),
            "--method",
            "tau",
            "--t-end",
            "1",
            "--out",
            tmp("x.csv").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "tau without --h");
}

#[test]
fn runtime_errors_exit_two() {
    let out = bin()
        .args([
            "simulate",
            "--model",
            "/nonexistent/model",
            "--method",
            "exact",
            "--t-end",
            "1",
            "--out",
            tmp("y.csv").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "missing model file");

    // a parse diagnostic carries line and column
    let bad = tmp("bad.model");
    std::fs::write(&bad, "species A\nreaction A -> B @ 1\nscaling N = 10\n").unwrap();
    let out = bin()
        .args([
            "simulate",
            "--model",
            bad.to_str().unwrap(),
            "--method",
            "exact",
            "--t-end",
            "1",
            "--out",
            tmp("z.csv").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 2"), "diagnostic was: {stderr}");
}

#[test]
fn mlmc_json_has_spec_schema_and_provenance() {
    let out_path = tmp("schema.json");
    run_ok(&[
        "mlmc",
        "--model",
        &decay_model(),
        "--estimator",
        "biased",
        "--eps",
        "0.02",
        "--f",
        "X[A]",
        "--t-end",
        "1",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&out_path).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in [
        "provenance",
        "estimate",
        "variance",
        "eps",
        "kind",
        "levels",
        "total_cost",
    ] {
        assert!(json.get(key).is_some(), "missing key `{key}`");
    }
    assert_eq!(json["kind"], "biased");
    assert_eq!(json["provenance"]["seed"], 0);
    let levels = json["levels"].as_array().unwrap();
    assert!(!levels.is_empty());
    for level in levels {
        for key in ["id", "h", "n", "mean", "var", "cost"] {
            assert!(level.get(key).is_some(), "level missing `{key}`");
        }
    }
    // minified: no newlines or indentation
    assert!(!text.trim_end().contains('\n'));
}

#[test]
fn sweep_fit_round_trip_through_files() {
    let sweep_path = tmp("roundtrip-sweep.csv");
    run_ok(&[
        "sweep",
        "--model",
        &dimer_model(),
        "--kind",
        "tau-tau",
        "--N",
        "1e3,1e4",
        "--h",
        "0.01,0.003,0.001",
        "--pairs",
        "400",
        "--t-end",
        "0.3",
        "--seed",
        "7",
        "--out",
        sweep_path.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&sweep_path).unwrap();
    assert!(text.starts_with("# taumc"), "provenance header missing");
    assert!(text.lines().nth(1).unwrap().starts_with("N,h,kind,"));

    let fit_path = tmp("roundtrip-fit.json");
    run_ok(&[
        "fit",
        "--input",
        sweep_path.to_str().unwrap(),
        "--out",
        fit_path.to_str().unwrap(),
    ]);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&fit_path).unwrap()).unwrap();
    let a = json["a"].as_f64().unwrap();
    let b = json["b"].as_f64().unwrap();
    assert!(
        a < 0.0 && b > 0.0,
        "fit exponents implausible: a = {a}, b = {b}"
    );
}

#[test]
fn meanfield_and_complexity_write_plot_ready_csv() {
    let mf = tmp("mf.csv");
    run_ok(&[
        "meanfield",
        "--model",
        &dimer_model(),
        "--h",
        "0.003",
        "--t-end",
        "0.3",
        "--out",
        mf.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&mf).unwrap();
    assert!(text.starts_with('#'));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 102); // header + 101 rows

    let cx = tmp("cx.csv");
    run_ok(&[
        "complexity",
        "--model",
        &decay_model(),
        "--estimator",
        "biased",
        "--eps",
        "0.05,0.02,0.01",
        "--t-end",
        "1",
        "--out",
        cx.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&cx).unwrap();
    assert!(text.lines().any(|l| l.starts_with("eps,")));
}

#[test]
fn recorded_trajectories_share_grid_across_methods() {
    let out_exact = tmp("rec-exact.csv");
    run_ok(&[
        "simulate",
        "--model",
        &decay_model(),
        "--method",
        "exact",
        "--t-end",
        "1",
        "--paths",
        "2",
        "--record",
        "0.5",
        "--out",
        out_exact.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&out_exact).unwrap();
    let times: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("path"))
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    assert_eq!(times, vec!["0", "0.5", "1", "0", "0.5", "1"]);
}
