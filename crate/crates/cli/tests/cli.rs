use pqc_cli::{run_experiment, Experiment, ExperimentConfig, InlineTarget, TargetSpec};
use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn pqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pqc"))
        .args(args)
        .env("PQC_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn parses_builtin_and_inline_targets() {
    let cfg =
        ExperimentConfig::from_json(r#"{"experiment":"bernstein","target":"abs_centered","d":1,"n":16}"#).unwrap();
    assert_eq!(cfg.experiment, Experiment::Bernstein);
    assert_eq!(cfg.target, Some(TargetSpec::Builtin("abs_centered".into())));
    cfg.validate().unwrap();

    let cfg = ExperimentConfig::from_json(r#"{"experiment":"qsp","target":{"coefficients":[0,0.5,0,0.25]}}"#).unwrap();
    assert_eq!(
        cfg.target,
        Some(TargetSpec::Inline(InlineTarget::Coefficients(vec![
            0.0, 0.5, 0.0, 0.25
        ])))
    );

    let cfg =
        ExperimentConfig::from_json(r#"{"experiment":"taylor","target":"halfsine","d":1,"K":4,"beta":2}"#).unwrap();
    assert_eq!(cfg.k, Some(4));
}

#[test]
fn rejects_inconsistent_configs() {
    // Unknown field.
    assert!(ExperimentConfig::from_json(r#"{"experiment":"qsp","target":"one","wat":1}"#).is_err());
    // Unknown experiment.
    assert!(ExperimentConfig::from_json(r#"{"experiment":"nope"}"#).is_err());
    // Parameter the experiment never reads.
    let cfg = ExperimentConfig::from_json(r#"{"experiment":"qsp","target":{"coefficients":[1]},"K":4}"#).unwrap();
    assert!(cfg.validate().unwrap_err().to_string().contains('k'));
    // Shots without a seed.
    let cfg =
        ExperimentConfig::from_json(r#"{"experiment":"bernstein","target":"abs_centered","d":1,"n":4,"shots":100}"#)
            .unwrap();
    assert!(cfg.validate().unwrap_err().to_string().contains("seed"));
    let cfg = ExperimentConfig::from_json(r#"{"experiment":"qsp","target":{"coefficients":[1]},"tol":2}"#).unwrap();
    assert!(cfg.validate().is_err());
}

#[test]
fn bernstein_example_passes_against_lipschitz_bound() {
    let cfg =
        ExperimentConfig::from_json(r#"{"experiment":"bernstein","d":1,"target":"abs_centered","n":16}"#).unwrap();
    let r = run_experiment(&cfg).unwrap();
    assert!(r.pass, "{r:?}");
    assert_eq!(r.bound_name, "thm2");
    assert!(r.sup_error <= r.bound + r.tol_agg);
    assert!(r.resources.width > 0 && r.resources.trainable_params > 0);
}

#[test]
fn taylor_example_meets_holder_bound() {
    let cfg =
        ExperimentConfig::from_json(r#"{"experiment":"taylor","d":1,"target":"halfsine","beta":2,"K":4}"#).unwrap();
    let r = run_experiment(&cfg).unwrap();
    assert!(r.sup_error <= 0.0625 + r.tol_agg, "sup {}", r.sup_error);
    assert!((r.bound - 0.0625).abs() < 1e-15);
    assert!(r.l2_error.is_some());
    assert!(r.pass, "{:?}", r.checks);
}

#[test]
fn qsp_constant_target_is_exact() {
    let cfg = ExperimentConfig::from_json(r#"{"experiment":"qsp","target":{"coefficients":[1]}}"#).unwrap();
    let r = run_experiment(&cfg).unwrap();
    assert!(r.pass);
    assert!(r.sup_error < 1e-12, "residual {}", r.sup_error);
}

#[test]
fn same_seed_gives_identical_report_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let body =
        r#"{"experiment":"bernstein","d":1,"target":"abs_centered","n":8,"shots":2000,"seed":11,"points_per_axis":11}"#;
    let cfg = write_config(dir.path(), "c.json", body);
    let a = pqc(&["report", "--config", &cfg]);
    let b = pqc(&["report", "--config", &cfg]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = pqc(&["report", "--config", &cfg, "--seed", "12"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn report_json_has_fixed_fields_and_is_written_to_output() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let out = pqc(&[
        "report",
        "--experiment",
        "poly",
        "--target",
        r#"{"polynomial":[{"coeff":0.5,"alpha":[2]}]}"#,
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v = stdout_json(&out);
    for key in [
        "sup_error",
        "l2_error",
        "bound",
        "bound_name",
        "tol_agg",
        "resources",
        "region",
        "seed",
        "pass",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    for key in ["width", "depth", "params", "gates"] {
        assert!(v["resources"].get(key).is_some(), "missing resources.{key}");
    }
    let file: Value = serde_json::from_str(&std::fs::read_to_string(out_path).unwrap()).unwrap();
    assert_eq!(file, v);
}

#[test]
fn exit_code_tracks_pass_flag() {
    let out = pqc(&[
        "report",
        "--experiment",
        "bernstein",
        "--target",
        "abs_centered",
        "--d",
        "1",
        "--n",
        "4",
        "--eps",
        "0.0001",
    ]);
    let v = stdout_json(&out);
    assert_eq!(
        v["pass"],
        Value::Bool(v["sup_error"].as_f64().unwrap() <= v["bound"].as_f64().unwrap() + v["tol_agg"].as_f64().unwrap())
    );
    assert_eq!(
        out.status.code(),
        Some(if v["pass"].as_bool().unwrap() { 0 } else { 1 })
    );
}

#[test]
fn invalid_config_exits_nonzero_with_error_object() {
    let out = pqc(&[
        "report",
        "--experiment",
        "qsp",
        "--target",
        r#"{"coefficients":[1]}"#,
        "--K",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let v = stdout_json(&out);
    assert_eq!(v["error"]["kind"], "config");
    assert!(v["error"]["message"].as_str().unwrap().contains("does not use"));

    let out = pqc(&[
        "report",
        "--experiment",
        "bernstein",
        "--target",
        "no_such_function",
        "--d",
        "1",
        "--n",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout_json(&out)["error"]["message"].is_string());

    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", "{ not json");
    let out = pqc(&["report", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["error"]["kind"], "config");
}

#[test]
fn synth_build_eval_and_compare_subcommands() {
    let out = pqc(&["synth", "--experiment", "qsp", "--target", r#"{"coefficients":[0,1]}"#]);
    assert!(out.status.success());
    assert!(stdout_json(&out).to_string().contains("angles"));

    let dir = tempfile::tempdir().unwrap();
    let circ = dir.path().join("circuit.txt");
    let out = pqc(&[
        "build",
        "--experiment",
        "trig",
        "--target",
        r#"{"trig":[{"re":0.45,"freq":[1]},{"re":0.45,"freq":[-1]}]}"#,
        "--emit-circuit",
        circ.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout_json(&out)["depth"].as_u64().unwrap() > 0);
    assert!(!std::fs::read_to_string(&circ).unwrap().is_empty());

    let out = pqc(&[
        "eval",
        "--experiment",
        "poly",
        "--target",
        r#"{"polynomial":[{"coeff":1,"alpha":[1,1]}]}"#,
        "--x",
        "0.5,0.4",
        "--x",
        "1,1",
    ]);
    assert!(out.status.success());
    let rows = stdout_json(&out);
    assert_eq!(rows.as_array().unwrap().len(), 2);
    let text = rows.to_string();
    assert!(text.contains("0.2"), "{text}");

    let out = pqc(&["compare-fnn", "--d", "20", "--s", "5"]);
    assert!(out.status.success());
    assert!(stdout_json(&out)["ln_param_ratio"].as_f64().unwrap() < 0.0);
}
