use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use perispec::fields::{make_decay_field, save_field, SpectralField};
use perispec::multipliers::{eigenvalues_exact, Material};
use perispec::solvers::{evolve_homogeneous, solve_equilibrium, OperatorSelector, SolutionDocument};
use perispec::studies::StudyTable;
use serde_json::{json, Value};

const MATERIAL: &str = r#"{"n":1,"delta":1.0,"beta":0.5,"mu":1.0,"lambda_star":1.0}"#;

fn material_json() -> Value {
    serde_json::from_str(MATERIAL).unwrap()
}

fn write_config(dir: &Path, name: &str, config: &Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(config).unwrap()).unwrap();
    path
}

fn perispec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_perispec")).args(args).output().unwrap()
}

fn run_config(dir: &Path, config: &Value) -> Output {
    let path = write_config(dir, "run.json", config);
    perispec(&[path.to_str().unwrap()])
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn eigenvalues_match_library() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(dir.path(), &json!({"command": "eigenvalues", "material": material_json(), "k": [3.0]}));
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let m = Material::new(1, 1.0, 0.5, 1.0, 1.0).unwrap();
    let e = eigenvalues_exact(&m, &[3.0]).unwrap();
    assert_eq!(v["lambda1"].as_f64().unwrap(), e.lambda1);
    assert_eq!(v["lambda2"].as_f64().unwrap(), e.lambda2);
}

#[test]
fn beta_at_upper_bound_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let material = json!({"n": 1, "delta": 1.0, "beta": 3.0, "mu": 1.0, "lambda_star": 1.0});
    let out = run_config(dir.path(), &json!({"command": "eigenvalues", "material": material, "k": [1.0]}));
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.starts_with("error[") && err.contains("beta < n+2"), "{err}");
    assert_eq!(err.trim_end().lines().count(), 1);
}

#[test]
fn misspelled_key_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(dir.path(), &json!({"command": "eigenvalues", "material": material_json(), "kk": [1.0]}));
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("kk"), "{}", stderr(&out));
}

#[test]
fn unreachable_precision_is_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(dir.path(), &json!({"command": "eigenvalues", "material": material_json(), "k": [1e9]}));
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn nonzero_mean_forcing_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut b = SpectralField::<f64>::zeros(1, 2, true);
    b.insert(vec![0], vec![perispec::Complex::new(1.0, 0.0)]).unwrap();
    let bpath = dir.path().join("b.json");
    save_field(&b, &bpath).unwrap();
    let config = json!({"command": "solve-equilibrium", "material": material_json(), "input": {"b": bpath}});
    let out = run_config(dir.path(), &config);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("nonzero_mean_forcing"), "{}", stderr(&out));
}

#[test]
fn sweep_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let config = json!({
        "command": "sweep",
        "material": material_json(),
        "K": 8,
        "s": 1.0,
        "seed": 4,
        "sweep": {"target": "equilibrium", "kind": "delta_to_zero"},
    });
    let first = run_config(dir.path(), &config);
    let second = run_config(dir.path(), &config);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    assert_eq!(first.stdout, second.stdout);
    let text = String::from_utf8(first.stdout).unwrap();
    assert!(text.starts_with("# study_kind: local_limit_sweep\n"));
    assert!(text.lines().any(|l| l == "delta,error,reference_norm,relative_error"));
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let config = json!({
        "command": "sweep",
        "material": material_json(),
        "K": 8,
        "s": 1.0,
        "sweep": {"target": "multiplier", "kind": "beta_to_np2"},
        "k": [5.0],
    });
    let path = write_config(dir.path(), "run.json", &config);
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_perispec"))
            .arg(&path)
            .env("PERISPEC_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    assert_eq!(one.status.code(), Some(0), "{}", stderr(&one));
    assert_eq!(one.stdout, run("4").stdout);
    assert_eq!(run("zero").status.code(), Some(2));
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = json!({"command": "solve-equilibrium", "material": material_json(), "K": 4, "s": 1.0, "seed": 1});
    let path = write_config(dir.path(), "run.json", &config);
    let p = path.to_str().unwrap();
    let a = perispec(&[p, "--seed", "2"]);
    let b = perispec(&[p]);
    assert_eq!(a.status.code(), Some(0));
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn equilibrium_solution_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let m = Material::new(1, 1.0, 0.5, 1.0, 1.0).unwrap();
    let b = make_decay_field(1, 8, 1.0, 5);
    let bpath = dir.path().join("b.json");
    save_field(&b, &bpath).unwrap();
    let out_path = dir.path().join("u.json");
    let config = json!({"command": "solve-equilibrium", "material": material_json(), "input": {"b": bpath}});
    let cfg = write_config(dir.path(), "run.json", &config);
    let out = perispec(&[cfg.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(out.stdout.is_empty());

    let doc: SolutionDocument = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(doc.problem, "equilibrium");
    assert_eq!(doc.operator, OperatorSelector::Peridynamic(m));
    let u: SpectralField<f64> = doc.field.into_field().unwrap();
    let expected = solve_equilibrium(&OperatorSelector::Peridynamic(m), &b).unwrap();
    assert_eq!(u.sub(&expected).unwrap().max_coefficient_norm(), 0.0);
}

#[test]
fn wave_solution_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let config = json!({
        "command": "solve-wave",
        "material": material_json(),
        "operator": "navier",
        "K": 6,
        "s1": 1.0,
        "s2": 0.5,
        "seed": 3,
        "t": 0.75,
    });
    let out = run_config(dir.path(), &config);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc: SolutionDocument = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc.t, Some(0.75));
    let op = OperatorSelector::Navier { n: 1, mu: 1.0, lambda_star: 1.0 };
    assert_eq!(doc.operator, op);
    let f = make_decay_field(1, 6, 1.0, 3);
    let g = make_decay_field(1, 6, 0.5, 4);
    let expected = evolve_homogeneous(&op, &f, &g, 0.75).unwrap();
    let u: SpectralField<f64> = doc.field.into_field().unwrap();
    assert_eq!(u.sub(&expected).unwrap().max_coefficient_norm(), 0.0);
}

#[test]
fn json_table_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let config = json!({
        "command": "asymptotics",
        "material": {"n": 2, "delta": 1.0, "beta": 1.0, "mu": 1.0, "lambda_star": 1.0},
        "radii": [10.0, 20.0, 40.0],
        "format": "json",
    });
    let out = run_config(dir.path(), &config);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let table = StudyTable::from_json(&text).unwrap();
    assert_eq!(table.parameter().values, vec![10.0, 20.0, 40.0]);
    assert_eq!(table.to_json(), text);
}

#[test]
fn temporal_check_csv() {
    let dir = tempfile::tempdir().unwrap();
    let config = json!({
        "command": "temporal-check",
        "material": material_json(),
        "problem": "homogeneous",
        "K": 8,
        "s1": 1.0,
        "t": 1.0,
    });
    let out = run_config(dir.path(), &config);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "h,residual");
    assert_eq!(rows.len(), 4);
}

#[test]
fn missing_config_file() {
    let out = perispec(&["/nonexistent/run.json"]);
    assert_eq!(out.status.code(), Some(2));
}
