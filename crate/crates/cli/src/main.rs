use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{CommandFactory, Parser};
use serde_json::json;

use rbfw_cli::run::write_json;
use rbfw_cli::{dispatch, parse_config_with, Command, ConfigError, Overrides, RunError};

/// Orthonormal RBF wavelet transforms, checks and studies.
///
/// Commands: specfun eval|zeros, dbt analyze|synthesize|error,
/// transform b-forward|b-inverse|k-forward|k-inverse|ts-forward|ts-inverse|calibrate,
/// check orthogonality|eigenrelation|pde-residual|roundtrip, fit classic|ridgelet,
/// study convergence.
///
/// Exit status: 0 success, 1 run error, 2 usage or config error, 3 a check failed.
#[derive(Debug, Parser)]
#[command(name = "rbfw", version)]
struct Cli {
    /// Command group and action, e.g. `transform b-forward`. May instead be
    /// given as `command = "..."` in the config.
    #[arg(value_name = "GROUP ACTION", num_args = 0..=2)]
    command: Vec<String>,
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: current directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Tail tolerance of semi-infinite integrals.
    #[arg(long)]
    tol: Option<f64>,
    /// Quadrature node count.
    #[arg(long)]
    nodes: Option<usize>,
    /// Seed for random sample placement in fits.
    #[arg(long)]
    seed: Option<u64>,
}

fn fail(out: &Path, err: &RunError, code: u8) -> ExitCode {
    eprintln!("error: {err}");
    if std::fs::create_dir_all(out).is_ok() {
        if let Err(e) = write_json(out, "error.json", err) {
            eprintln!("error: {e}");
        }
    }
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));

    let command = match cli.command.as_slice() {
        [] => None,
        [g, a] => match Command::parse(g, a) {
            Some(c) => Some(c),
            None => {
                eprintln!("error: unknown command `{g} {a}`\n");
                eprintln!("{}", Cli::command().render_help());
                return ExitCode::from(2);
            }
        },
        [g] => {
            eprintln!("error: `{g}` needs an action\n");
            eprintln!("{}", Cli::command().render_help());
            return ExitCode::from(2);
        }
        _ => unreachable!("clap limits the positional count"),
    };

    let text = match &cli.config {
        Some(p) => match std::fs::read_to_string(p) {
            Ok(t) => t,
            Err(e) => {
                let err = RunError {
                    module: "cli".into(),
                    operation: "read_config".into(),
                    message: format!("cannot read {}: {e}", p.display()),
                };
                return fail(&out, &err, 2);
            }
        },
        None => String::new(),
    };
    let ov = Overrides {
        command,
        out: cli.out.clone(),
        tol: cli.tol,
        nodes: cli.nodes,
        seed: cli.seed,
    };
    let cfg = match parse_config_with(&text, &ov) {
        Ok(c) => c,
        Err(e) => {
            let err = RunError {
                module: "cli".into(),
                operation: "parse_config".into(),
                message: match &e {
                    ConfigError::Parse(m) => m.clone(),
                    ConfigError::Invalid(list) => list.join("; "),
                },
            };
            if command.is_none() && matches!(e, ConfigError::Invalid(_)) && cli.config.is_none() {
                eprintln!("{}", Cli::command().render_help());
            }
            return fail(&out, &err, 2);
        }
    };

    let started = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let clock = Instant::now();
    match dispatch(&cfg) {
        Ok(outcome) => {
            for line in &outcome.summary {
                println!("{line}");
            }
            let meta = json!({
                "command": cfg.command.to_string(),
                "version": env!("CARGO_PKG_VERSION"),
                "config": text,
                "overrides": {
                    "tol": cli.tol,
                    "nodes": cli.nodes,
                    "seed": cli.seed,
                },
                "outputs": outcome.files,
                "summary": outcome.summary,
                "checks_passed": outcome.checks_passed,
                "started_unix": started,
                "elapsed_seconds": clock.elapsed().as_secs_f64(),
            });
            if let Err(e) = write_json(&cfg.out, "run.json", &meta) {
                eprintln!("warning: {e}");
            }
            if outcome.checks_passed == Some(false) {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(err) => fail(&cfg.out, &err, 1),
    }
}
