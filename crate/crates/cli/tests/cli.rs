use std::fs;
use std::path::Path;
use std::process::{Command as Proc, Output};

use rbfw_cli::Command;

fn rbfw(dir: &Path, args: &[&str], config: Option<&str>) -> Output {
    let mut cmd = Proc::new(env!("CARGO_BIN_EXE_rbfw"));
    cmd.current_dir(dir).args(args);
    if let Some(text) = config {
        fs::write(dir.join("run.toml"), text).unwrap();
        cmd.args(["--config", "run.toml"]);
    }
    cmd.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn gauss_csv(path: &Path) {
    let mut s = String::from("r,value\n");
    for i in 0..=800 {
        let r = 0.01 * i as f64;
        s.push_str(&format!("{r},{}\n", (-0.5 * r * r).exp()));
    }
    fs::write(path, s).unwrap();
}

#[test]
fn b_forward_from_samples() {
    let dir = tempfile::tempdir().unwrap();
    gauss_csv(&dir.path().join("g.csv"));
    let o = rbfw(
        dir.path(),
        &["transform", "b-forward", "--out", "res"],
        Some("input = \"g.csv\"\nlambdas = [0.5, 1.0, 2.0]\n"),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("res/spectrum.csv")).unwrap();
    let row: Vec<f64> = text.lines().nth(2).unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(row[0], 1.0);
    assert!((row[1] - 0.60653).abs() < 1e-5, "{row:?}");
    assert!(text.starts_with("lambda,re,im\n"));
    assert!(dir.path().join("res/run.json").exists());
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "command = \"fit ridgelet\"\nsamples = 40\n";
    for out in ["a", "b"] {
        let o = rbfw(dir.path(), &["--out", out, "--seed", "9"], Some(cfg));
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["ridgelet.csv", "weights.csv", "loss_history.csv"] {
        let a = fs::read(dir.path().join("a").join(f)).unwrap();
        let b = fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f} differs between identical runs");
    }
}

#[test]
fn unknown_command_prints_usage() {
    let dir = tempfile::tempdir().unwrap();
    let o = rbfw(dir.path(), &["frobnicate", "now"], None);
    assert_ne!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn invalid_config_writes_error_record() {
    let dir = tempfile::tempdir().unwrap();
    let o = rbfw(dir.path(), &["fit", "ridgelet", "--out", "e"], Some("d = -1.0\n"));
    assert_eq!(code(&o), 2);
    let err: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("e/error.json")).unwrap()).unwrap();
    assert_eq!(err["operation"], "parse_config");
    assert!(err["message"].as_str().unwrap().contains("ConvDiffSpec"));
}

#[test]
fn module_errors_name_module_and_operation() {
    let dir = tempfile::tempdir().unwrap();
    let o = rbfw(dir.path(), &["transform", "calibrate", "--out", "e"], Some("transform = \"k\"\n"));
    assert_eq!(code(&o), 1);
    let err: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("e/error.json")).unwrap()).unwrap();
    assert_eq!(err["module"], "transforms");
    assert_eq!(err["operation"], "calibrate");
}

/// Acceptance criteria and the subcommand (plus config) that reproduces each.
/// The expected exit status is 0, or 3 where the library check itself fails.
const MANIFEST: &[(u32, &str, &str, i32)] = &[
    (1, "check orthogonality", "nu = 0.5\ncount = 10\nnodes = 512\n", 0),
    (2, "specfun eval", "fidelity = true\nnu = 0.5\nx = [0.1, 1.0, 20.0]\n", 0),
    (3, "dbt error", "function = \"parabola\"\nn = 2.0\nterms_list = [5, 10, 20, 50]\n", 0),
    (4, "check roundtrip", "n = 3.0\n", 0),
    (5, "transform calibrate", "n = 3.0\n", 0),
    (6, "check eigenrelation", "function = \"gauss_narrow\"\nlambdas = [0.5, 1.0, 2.0]\n", 0),
    (6, "check eigenrelation", "function = \"gauss_narrow\"\ntransform = \"k\"\n", 3),
    (7, "check roundtrip", "transform = \"k\"\n", 3),
    (8, "check pde-residual", "", 0),
    (9, "fit ridgelet", "v = [2.0, 0.0]\nd = 1.0\nk = 3.0\ninit_v = [2.0, 0.0]\ninit_d = 1.0\ninit_k = 3.0\nfit_params = false\n", 0),
    (10, "transform ts-forward", "lambdas = [0.5, 1.0]\n", 0),
    (11, "study convergence", "rbf = \"tps\"\n", 0),
    (12, "fit ridgelet", "v = [2.0, 0.0]\nd = 1.0\nk = 1.0\n", 0),
];

#[test]
fn every_criterion_is_reachable() {
    let covered: std::collections::BTreeSet<u32> = MANIFEST.iter().map(|m| m.0).collect();
    assert_eq!(covered, (1..=12).collect());
    let dir = tempfile::tempdir().unwrap();
    for (i, &(id, command, body, expect)) in MANIFEST.iter().enumerate() {
        let cmd = Command::parse_joined(command).unwrap_or_else(|| panic!("criterion {id}: {command} is not a subcommand"));
        assert!(Command::ALL.contains(&cmd));
        let out = format!("c{i}");
        let cfg = format!("command = \"{command}\"\nout = \"{out}\"\n{body}");
        let o = rbfw(dir.path(), &[], Some(&cfg));
        assert_eq!(
            code(&o),
            expect,
            "criterion {id} via `{command}`: {}{}",
            String::from_utf8_lossy(&o.stdout),
            String::from_utf8_lossy(&o.stderr)
        );
    }
    // Spot checks on the produced tables.
    let mu = fs::read_to_string(dir.path().join("c9/ridgelet.csv")).unwrap();
    let mu: f64 = mu.lines().find(|l| l.starts_with("mu,")).unwrap()[3..].parse().unwrap();
    assert!((mu - 2.0).abs() < 1e-15);
    let ts = fs::read_to_string(dir.path().join("c10/spectrum.csv")).unwrap();
    let re: f64 = ts.lines().nth(2).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((re - (-0.5f64).exp()).abs() < 1e-6);
}
