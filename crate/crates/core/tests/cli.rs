use std::path::PathBuf;

use learnact::harness::cli_with_output;
use learnact::network::Checkpoint;
use serde_json::Value;

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("learnact").chain(args.iter().copied());
    let code = cli_with_output(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn config(name: &str) -> String {
    configs().join(name).to_str().unwrap().to_string()
}

#[test]
fn paramcount_of_shipped_configs() {
    for (name, want) in [
        ("shubert_relu.json", "501"),
        ("shubert_lla.json", "509"),
        ("shubert_qla.json", "529"),
        ("etth1_qla.json", "30555"),
    ] {
        let (code, out, err) = run(&["paramcount", &config(name)]);
        assert_eq!(code, 0, "{name}: {err}");
        assert_eq!(out.trim(), want, "{name}");
    }
}

#[test]
fn global_config_flag_is_accepted() {
    let (code, out, _) = run(&["--config", &config("shubert_qla.json"), "paramcount"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "529");
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("gradcheck"));
}

#[test]
fn usage_and_config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"name": "x", "kind": "synthetic", "seed": 1, "bogus": 3}"#).unwrap();
    let no_seed = dir.path().join("no_seed.json");
    std::fs::write(&no_seed, r#"{"name": "x", "kind": "synthetic"}"#).unwrap();
    for args in [
        vec!["frobnicate"],
        vec!["run"],
        vec!["run", "/nonexistent/config.json"],
        vec!["run", bad.to_str().unwrap()],
        vec!["paramcount", no_seed.to_str().unwrap()],
    ] {
        let (code, _, err) = run(&args);
        assert_eq!(code, 1, "{args:?}");
        assert!(!err.is_empty(), "{args:?} printed nothing on stderr");
    }
}

#[test]
fn runtime_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("f.json");
    std::fs::write(
        &cfg,
        r#"{"name": "f", "kind": "forecast", "seed": 1, "library": ["relu", "sine"],
            "network": {"hidden": [4], "activation": {"qla": {}}},
            "forecast": {"csv": "/nonexistent/ETTh1.csv"}}"#,
    )
    .unwrap();
    let (code, _, err) = run(&["run", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn gradcheck_passes() {
    let (code, out, err) = run(&["gradcheck", "--settings", "3"]);
    assert_eq!(code, 0, "{out}{err}");
}

#[test]
fn run_small_config_then_export_surface() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let (code, out, err) = run(&[
        "run",
        &config("shubert_qla_small.json"),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("eval mse"));

    let report: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["parameter_count"], 529);
    assert_eq!(report["train_loss"].as_array().unwrap().len(), 100);
    assert!(report["eval"]["mse"].as_f64().unwrap().is_finite());
    assert!(report["config"]["synthetic"]["domain"].is_array());

    let surface = std::fs::read_to_string(out_dir.join("surface.csv")).unwrap();
    assert_eq!(surface.lines().next(), Some("x1,x2,f_true,f_pred"));
    assert_eq!(surface.lines().count(), 1 + 51 * 51);

    let ckpt_path = out_dir.join("checkpoint.json");
    let ckpt = Checkpoint::load(&ckpt_path).unwrap();
    assert_eq!(ckpt.seed, 13);

    let export_dir = dir.path().join("export");
    let (code, _, err) = run(&[
        "export-surface",
        ckpt_path.to_str().unwrap(),
        "shubert",
        "--grid",
        "51",
        "--out",
        export_dir.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let exported = std::fs::read_to_string(export_dir.join("surface.csv")).unwrap();
    assert_eq!(exported, surface);
}

#[test]
fn seed_override_changes_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.json");
    std::fs::write(
        &cfg,
        r#"{"name": "s", "kind": "synthetic", "seed": 1, "library": ["relu", "tanh"],
            "network": {"hidden": [5], "activation": {"lla": {}}},
            "optimizer": {"epochs": 2},
            "synthetic": {"function": "ackley", "train_points": 200, "eval_points": 50, "surface_grid": 0}}"#,
    )
    .unwrap();
    let mut mses = Vec::new();
    for seed in ["1", "2"] {
        let out = dir.path().join(seed);
        let (code, _, err) = run(&["--seed", seed, "run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(code, 0, "{err}");
        let report: Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
        assert_eq!(report["seed"].as_u64(), seed.parse().ok());
        mses.push(report["eval"]["mse"].as_f64().unwrap());
    }
    assert_ne!(mses[0], mses[1]);
}

#[test]
fn run_shipped_qla_config() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = run(&["run", &config("shubert_qla.json"), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["name"], "shubert_qla");
}
