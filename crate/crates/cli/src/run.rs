//! Command execution: one function per subcommand, all writing CSV tables
//! into the output directory.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use rbfw::checks::{self, CheckLine};
use rbfw::kernels::{convdiff_kernel, ClassicRbfSpec, ConvDiffKind, ConvDiffSpec, TimeSpaceDiffusionSpec};
use rbfw::rbffit::{convergence_study, evaluate_fit, fit, ridgelet_fit, RidgeletOptions};
use rbfw::series::{analyze_with_nodes, reconstruction_error, BesselSeries, ErrorNorm, RadialSamples};
use rbfw::specfun::{bessel_eval, jn_zeros, Order};
use rbfw::transforms::{
    b_forward_with, b_inverse_with, calibrate, default_k_lambda_grid, default_lambda_grid,
    eigen_check, k_forward_with, k_inverse_with, ts_forward, ts_inverse, InputDecay, Spectrum,
    TransformCalibration, TransformKind, TransformOptions,
};
use rbfw::Complex64;

use crate::config::{Command, RunConfig, TestFunction};
use crate::table::{read_table, write_table, Cell};

/// A failed run, as written to `error.json`.
#[derive(Debug, Clone, PartialEq, Serialize, thiserror::Error)]
#[error("{module}::{operation}: {message}")]
pub struct RunError {
    pub module: String,
    pub operation: String,
    pub message: String,
}

/// What a successful run produced.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunOutcome {
    /// Data files written, relative to the output directory.
    pub files: Vec<String>,
    /// Human-readable summary lines.
    pub summary: Vec<String>,
    /// For checks: whether every line passed.
    pub checks_passed: Option<bool>,
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    out: &'a Path,
    outcome: RunOutcome,
}

impl Ctx<'_> {
    fn err(&self, operation: &str, message: impl ToString) -> RunError {
        RunError {
            module: self.cfg.command.module().to_string(),
            operation: operation.to_string(),
            message: message.to_string(),
        }
    }

    fn write(&mut self, name: &str, header: &[&str], rows: &[Vec<Cell>]) -> Result<(), RunError> {
        write_table(&self.out.join(name), header, rows).map_err(|m| self.err("write", m))?;
        self.outcome.files.push(name.to_string());
        Ok(())
    }

    fn note(&mut self, line: impl Into<String>) {
        self.outcome.summary.push(line.into());
    }

    /// `report.csv` plus summary lines for a list of checks.
    fn report(&mut self, lines: &[CheckLine]) -> Result<(), RunError> {
        let rows: Vec<Vec<Cell>> = lines
            .iter()
            .map(|l| vec![l.name.clone().into(), l.value.into(), l.tolerance.into(), l.passed().into()])
            .collect();
        self.write("report.csv", &["check", "value", "tolerance", "pass"], &rows)?;
        for l in lines {
            let verdict = if l.passed() { "PASS" } else { "FAIL" };
            self.note(format!("{verdict} {}: {:.3e} (bound {:.1e})", l.name, l.value, l.tolerance));
        }
        self.outcome.checks_passed = Some(lines.iter().all(CheckLine::passed));
        Ok(())
    }

    fn opts(&self) -> TransformOptions {
        let decay = if self.cfg.input.is_none()
            && matches!(self.cfg.function, TestFunction::Gauss | TestFunction::GaussNarrow | TestFunction::Zero)
        {
            InputDecay::Gaussian
        } else {
            InputDecay::Algebraic
        };
        TransformOptions {
            tol: self.cfg.tol,
            decay,
            nodes_per_interval: self.cfg.nodes.unwrap_or(8),
        }
    }

    /// The radial input: samples from `input` (`r,value`, zero beyond the
    /// last radius) or the built-in function.
    fn radial(&self, op: &str) -> Result<Box<dyn Fn(f64) -> f64>, RunError> {
        match &self.cfg.input {
            None => {
                let f = self.cfg.function;
                Ok(Box::new(move |r| f.eval(r)))
            }
            Some(path) => {
                let t = read_table(path).map_err(|m| self.err(op, m))?;
                let r = t.column("r").map_err(|m| self.err(op, m))?;
                let v = t.column("value").map_err(|m| self.err(op, m))?;
                let last = r.last().copied().unwrap_or(0.0);
                let s = RadialSamples::new(r, v).map_err(|e| self.err(op, e))?;
                Ok(Box::new(move |x| if x <= last { s.interpolate(x) } else { 0.0 }))
            }
        }
    }

    fn spectrum_input(&self, kind: TransformKind, op: &str) -> Result<Spectrum, RunError> {
        let path = self.cfg.input.as_ref().ok_or_else(|| self.err(op, "no input spectrum"))?;
        let t = read_table(path).map_err(|m| self.err(op, m))?;
        let l = t.column("lambda").map_err(|m| self.err(op, m))?;
        let re = t.column("re").map_err(|m| self.err(op, m))?;
        let im = t.column("im").map_err(|m| self.err(op, m))?;
        let vals = re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        Spectrum::new(self.cfg.n, kind, l, vals).map_err(|e| self.err(op, e))
    }

    fn lambdas(&self, kind: TransformKind) -> Vec<f64> {
        self.cfg.lambdas.clone().unwrap_or_else(|| match kind {
            TransformKind::K => default_k_lambda_grid(),
            _ => default_lambda_grid(),
        })
    }

    fn write_spectrum(&mut self, s: &Spectrum) -> Result<(), RunError> {
        let rows: Vec<Vec<Cell>> = s
            .lambdas()
            .iter()
            .zip(s.values())
            .map(|(&l, v)| vec![l.into(), v.re.into(), v.im.into()])
            .collect();
        self.write("spectrum.csv", &["lambda", "re", "im"], &rows)?;
        self.note(format!("{} spectrum values", rows.len()));
        Ok(())
    }
}

/// Run the configured command, writing outputs into `cfg.out`.
pub fn dispatch(cfg: &RunConfig) -> Result<RunOutcome, RunError> {
    let out = cfg.out.clone();
    let mut ctx = Ctx {
        cfg,
        out: &out,
        outcome: RunOutcome::default(),
    };
    fs::create_dir_all(&out).map_err(|e| ctx.err("write", format!("cannot create {}: {e}", out.display())))?;
    use Command::*;
    match cfg.command {
        SpecfunEval => specfun_eval(&mut ctx)?,
        SpecfunZeros => specfun_zeros(&mut ctx)?,
        DbtAnalyze => dbt_analyze(&mut ctx)?,
        DbtSynthesize => dbt_synthesize(&mut ctx)?,
        DbtError => dbt_error(&mut ctx)?,
        TransformBForward | TransformKForward => transform_forward(&mut ctx)?,
        TransformBInverse => b_inverse(&mut ctx)?,
        TransformKInverse => k_inverse(&mut ctx)?,
        TransformTsForward => ts_fwd(&mut ctx)?,
        TransformTsInverse => ts_inv(&mut ctx)?,
        TransformCalibrate => transform_calibrate(&mut ctx)?,
        CheckOrthogonality => check_orthogonality(&mut ctx)?,
        CheckEigenrelation => check_eigenrelation(&mut ctx)?,
        CheckPdeResidual => check_pde(&mut ctx)?,
        CheckRoundtrip => check_roundtrip(&mut ctx)?,
        FitClassic => fit_classic(&mut ctx)?,
        FitRidgelet => fit_ridgelet(&mut ctx)?,
        StudyConvergence => study_convergence(&mut ctx)?,
    }
    Ok(ctx.outcome)
}

fn specfun_eval(ctx: &mut Ctx) -> Result<(), RunError> {
    let cfg = ctx.cfg;
    let order = Order::new(cfg.nu).map_err(|e| ctx.err("bessel_eval", e))?;
    let rows = cfg
        .x
        .iter()
        .map(|&x| {
            bessel_eval(cfg.bessel, order, x)
                .map(|v| vec![x.into(), v.into()])
                .map_err(|e| ctx.err("bessel_eval", e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    ctx.write("specfun_eval.csv", &["x", "value"], &rows)?;
    if cfg.fidelity {
        let rep = checks::specfun_fidelity(200, 20).map_err(|e| ctx.err("specfun_fidelity", e))?;
        let tol = cfg.threshold;
        let mut lines = vec![
            CheckLine::new("J_1/2 closed form relative error", rep.j_half_error, tol.unwrap_or(1e-12)),
            CheckLine::new("K_1/2 closed form relative error", rep.k_half_error, tol.unwrap_or(1e-12)),
            CheckLine::new("recurrence residual", rep.recurrence_error, tol.unwrap_or(1e-9)),
            CheckLine::new("Wronskian residual", rep.wronskian_error, tol.unwrap_or(1e-9)),
        ];
        for z in &rep.zeros {
            lines.push(CheckLine::new(format!("|J_{}| at its zeros", z.nu), z.max_residual, tol.unwrap_or(1e-12)));
            // Interlacing is a yes/no check: 0 when it holds.
            lines.push(CheckLine::new(
                format!("J_{} / J_{} interlacing violations", z.nu, z.nu + 1.0),
                if z.interlaced { 0.0 } else { 1.0 },
                0.5,
            ));
        }
        ctx.report(&lines)?;
    }
    Ok(())
}

fn specfun_zeros(ctx: &mut Ctx) -> Result<(), RunError> {
    let cfg = ctx.cfg;
    let zeros = Order::new(cfg.nu)
        .and_then(|o| jn_zeros(o, cfg.count))
        .map_err(|e| ctx.err("jn_zeros", e))?;
    let rows: Vec<Vec<Cell>> = zeros.iter().enumerate().map(|(i, &z)| vec![(i + 1).into(), z.into()]).collect();
    ctx.write("zeros.csv", &["index", "zero"], &rows)
}

fn analyze_cfg(ctx: &Ctx, terms: usize) -> Result<BesselSeries, RunError> {
    let cfg = ctx.cfg;
    let f = ctx.radial("analyze")?;
    analyze_with_nodes(f, cfg.n, cfg.radius, terms, cfg.mode, cfg.nodes).map_err(|e| ctx.err("analyze", e))
}

fn dbt_analyze(ctx: &mut Ctx) -> Result<(), RunError> {
    let s = analyze_cfg(ctx, ctx.cfg.terms)?;
    let mut rows = vec![vec![0usize.into(), 0.0.into(), s.alpha0().into()]];
    for (j, (&z, &c)) in s.zeros().iter().zip(&s.coeffs()[0]).enumerate() {
        rows.push(vec![(j + 1).into(), z.into(), c.into()]);
    }
    ctx.write("coefficients.csv", &["j", "zero", "coefficient"], &rows)?;
    if let Some(c) = s.condition_estimate() {
        ctx.note(format!("condition estimate {c:.3e}"));
    }
    Ok(())
}

fn dbt_synthesize(ctx: &mut Ctx) -> Result<(), RunError> {
    let cfg = ctx.cfg;
    let path = cfg.input.as_ref().ok_or_else(|| ctx.err("synthesize", "no input coefficients"))?;
    let t = read_table(path).map_err(|m| ctx.err("synthesize", m))?;
    let j = t.column("j").map_err(|m| ctx.err("synthesize", m))?;
    let c = t.column("coefficient").map_err(|m| ctx.err("synthesize", m))?;
    let mut alpha0 = 0.0;
    let mut coeffs = Vec::new();
    for (&jj, &cc) in j.iter().zip(&c) {
        if jj == 0.0 {
            alpha0 = cc;
        } else {
            coeffs.push(cc);
        }
    }
    let s = BesselSeries::new(cfg.n, cfg.radius, vec![vec![0.0]], alpha0, vec![coeffs], cfg.mode)
        .map_err(|e| ctx.err("synthesize", e))?;
    let rows = cfg
        .radii
        .iter()
        .map(|&r| s.synthesize_radius(r).map(|v| vec![r.into(), v.into()]).map_err(|e| ctx.err("synthesize", e)))
        .collect::<Result<Vec<_>, _>>()?;
    ctx.write("synthesis.csv", &["r", "value"], &rows)
}

fn dbt_error(ctx: &mut Ctx) -> Result<(), RunError> {
    let f = ctx.radial("reconstruction_error")?;
    let mut rows = Vec::new();
    for &terms in &ctx.cfg.terms_list {
        let s = analyze_cfg(ctx, terms)?;
        let linf = reconstruction_error(&s, &f, ErrorNorm::LinfInner).map_err(|e| ctx.err("reconstruction_error", e))?;
        let l2 = reconstruction_error(&s, &f, ErrorNorm::L2Weighted).map_err(|e| ctx.err("reconstruction_error", e))?;
        rows.push(vec![terms.into(), linf.into(), l2.into()]);
    }
    ctx.write("dbt_error.csv", &["terms", "linf", "l2"], &rows)
}

fn transform_forward(ctx: &mut Ctx) -> Result<(), RunError> {
    let cfg = ctx.cfg;
    let f = ctx.radial("forward")?;
    let opts = ctx.opts();
    let s = if cfg.command == Command::TransformKForward {
        k_forward_with(f, cfg.n, &ctx.lambdas(TransformKind::K), &opts).map_err(|e| ctx.err("k_forward", e))?
    } else {
        b_forward_with(f, cfg.n, &ctx.lambdas(TransformKind::B), &opts).map_err(|e| ctx.err("b_forward", e))?
    };
    ctx.write_spectrum(&s)
}

fn b_inverse(ctx: &mut Ctx) -> Result<(), RunError> {
    let cfg = ctx.cfg;
    let spec = ctx.spectrum_input(TransformKind::B, "b_inverse")?;
    let cal = calibrate(cfg.n, TransformKind::B).map_err(|e| ctx.err("calibrate", e))?;
    let rec = b_inverse_with(&spec, &cal, &cfg.radii, &ctx.opts()).map_err(|e| ctx.err("b_inverse", e))?;
    let rows: Vec<Vec<Cell>> = rec.radii().iter().zip(rec.values()).map(|(&r, &v)| vec![r.into(), v.into()]).collect();
    ctx.write("samples.csv", &["r", "value"], &rows)
}

fn k_inverse(ctx: &mut Ctx) -> Result<(), RunError> {
    let cfg = ctx.cfg;
    let spec = ctx.spectrum_input(TransformKind::K, "k_inverse")?;
    // The K constants do not pass verification; the derived ones are used
    // and flagged.
    let cal = TransformCalibration::derived(cfg.n, TransformKind::K).map_err(|e| ctx.err("k_inverse", e))?;
    let rec = k_inverse_with(&spec, &cal, &cfg.radii, &ctx.opts()).map_err(|e| ctx.err("k_inverse", e))?;
    let rows: Vec<Vec<Cell>> = rec
        .radii()
        .iter()
        .zip(rec.values())
        .map(|(&r, v)| vec![r.into(), v.re.into(), v.im.into()])
        .collect();
    ctx.write("samples.csv", &["r", "re", "im"], &rows)?;
    ctx.note(format!(
        "unverified constants m = {}, C_g = {}; max imaginary part {:.3e}",
        cal.m(),
        cal.c(),
        rec.max_abs_imag()
    ));
    Ok(())
}

fn ts_fwd(ctx: &mut Ctx) -> Result<(), RunError> {
    let cfg = ctx.cfg;
    let ts = TimeSpaceDiffusionSpec::new(cfg.n, cfg.lambda, cfg.a).map_err(|e| ctx.err("ts_forward", e))?;
    let f = ctx.radial("ts_forward")?;
    // Separable input exp(-t) f(r).
    let s = ts_forward(|r, t| (-t).exp() * f(r), &ts, &ctx.lambdas(TransformKind::TsDiffusion), &ctx.opts())
        .map_err(|e| ctx.err("ts_forward", e))?;
    ctx.write_spectrum(&s)
}

fn ts_inv(ctx: &mut Ctx) -> Result<(), RunError> {
    let cfg = ctx.cfg;
    let ts = TimeSpaceDiffusionSpec::new(cfg.n, cfg.lambda, cfg.a).map_err(|e| ctx.err("ts_inverse", e))?;
    let spec = ctx.spectrum_input(TransformKind::TsDiffusion, "ts_inverse")?;
    let cal = calibrate(cfg.n, TransformKind::B).map_err(|e| ctx.err("calibrate", e))?;
    let st = ts_inverse(&spec, &ts, &cal, &cfg.radii, &cfg.times, &ctx.opts()).map_err(|e| ctx.err("ts_inverse", e))?;
    let mut rows = Vec::new();
    for (&t, row) in st.times.iter().zip(&st.values) {
        for (&r, &v) in st.radii.iter().zip(row) {
            rows.push(vec![t.into(), r.into(), v.into()]);
        }
    }
    ctx.write("spacetime.csv", &["t", "r", "value"], &rows)
}

fn kind_name(k: TransformKind) -> &'static str {
    match k {
        TransformKind::B => "b",
        TransformKind::K => "k",
        TransformKind::TsDiffusion => "ts",
    }
}

fn transform_calibrate(ctx: &mut Ctx) -> Result<(), RunError> {
    let cfg = ctx.cfg;
    let cal = calibrate(cfg.n, cfg.transform).map_err(|e| ctx.err("calibrate", e))?;
    let rows = vec![vec![
        cfg.n.into(),
        kind_name(cfg.transform).into(),
        cal.m().into(),
        cal.c().into(),
        cal.discrepancy().unwrap_or(f64::NAN).into(),
    ]];
    ctx.write("calibration.csv", &["n", "kind", "m", "c", "discrepancy"], &rows)
}

fn check_orthogonality(ctx: &mut Ctx) -> Result<(), RunError> {
    let cfg = ctx.cfg;
    let rep = checks::orthogonality(cfg.nu, cfg.count, cfg.nodes.unwrap_or(512)).map_err(|e| ctx.err("orthogonality", e))?;
    let mut rows = Vec::new();
    for (i, row) in rep.gram.iter().enumerate() {
        for (j, &g) in row.iter().enumerate() {
            rows.push(vec![(i + 1).into(), (j + 1).into(), g.into()]);
        }
    }
    ctx.write("orthogonality.csv", &["i", "j", "value"], &rows)?;
    let tol = cfg.threshold.unwrap_or(1e-10);
    ctx.report(&[
        CheckLine::new("max off-diagonal", rep.max_off_diagonal, tol),
        CheckLine::new("max diagonal relative error", rep.max_diagonal_error, tol),
    ])
}

fn check_eigenrelation(ctx: &mut Ctx) -> Result<(), RunError> {
    let cfg = ctx.cfg;
    let func = cfg.function;
    let n = cfg.n;
    if ctx.cfg.input.is_some() || func.laplacian(n, 0.0).is_none() {
        return Err(ctx.err("eigen_check", "needs a built-in function with a known Laplacian"));
    }
    let lambdas = cfg.lambdas.clone().unwrap_or_else(|| vec![0.5, 1.0, 2.0]);
    let kind = cfg.transform;
    let rep = eigen_check(
        |r| func.eval(r),
        |r| func.laplacian(n, r).unwrap_or(f64::NAN),
        n,
        &lambdas,
        kind,
        &ctx.opts(),
    )
    .map_err(|e| ctx.err("eigen_check", e))?;
    let rows: Vec<Vec<Cell>> = rep
        .lambdas
        .iter()
        .zip(&rep.residuals)
        .zip(&rep.ratios)
        .map(|((&l, &res), z)| vec![l.into(), res.into(), z.re.into(), z.im.into()])
        .collect();
    ctx.write("eigenrelation.csv", &["lambda", "residual", "ratio_re", "ratio_im"], &rows)?;
    ctx.note(format!("measured sign {:.6}", rep.measured_sign()));
    let tol = cfg.threshold.unwrap_or(if kind == TransformKind::K { 1e-4 } else { 1e-6 });
    ctx.report(&[CheckLine::new(format!("{} eigenrelation residual", kind_name(kind)), rep.max_residual(), tol)])
}

fn check_pde(ctx: &mut Ctx) -> Result<(), RunError> {
    let lines = checks::pde_residuals(ctx.cfg.h, ctx.cfg.threshold.unwrap_or(1e-5)).map_err(|e| ctx.err("pde_residuals", e))?;
    ctx.report(&lines)
}

fn check_roundtrip(ctx: &mut Ctx) -> Result<(), RunError> {
    let cfg = ctx.cfg;
    let f = ctx.radial("roundtrip")?;
    let opts = ctx.opts();
    let (err, imag) = match cfg.transform {
        TransformKind::K => {
            let cal = TransformCalibration::derived(cfg.n, TransformKind::K).map_err(|e| ctx.err("k_inverse", e))?;
            let spec = k_forward_with(&f, cfg.n, &ctx.lambdas(TransformKind::K), &opts).map_err(|e| ctx.err("k_forward", e))?;
            let radii: Vec<f64> = cfg.radii.iter().copied().filter(|&r| r > 0.0).collect();
            let rec = k_inverse_with(&spec, &cal, &radii, &opts).map_err(|e| ctx.err("k_inverse", e))?;
            let err = radii.iter().zip(rec.values()).map(|(&r, v)| (v.re - f(r)).abs()).fold(0.0, f64::max);
            (err, Some(rec.max_abs_imag()))
        }
        _ => {
            let cal = calibrate(cfg.n, TransformKind::B).map_err(|e| ctx.err("calibrate", e))?;
            let spec = b_forward_with(&f, cfg.n, &ctx.lambdas(TransformKind::B), &opts).map_err(|e| ctx.err("b_forward", e))?;
            let rec = b_inverse_with(&spec, &cal, &cfg.radii, &opts).map_err(|e| ctx.err("b_inverse", e))?;
            let err = rec.radii().iter().zip(rec.values()).map(|(&r, &v)| (v - f(r)).abs()).fold(0.0, f64::max);
            (err, None)
        }
    };
    let tol = cfg.threshold.unwrap_or(if cfg.transform == TransformKind::K { 1e-4 } else { 1e-5 });
    let mut lines = vec![CheckLine::new(format!("{} round-trip error", kind_name(cfg.transform)), err, tol)];
    if let Some(im) = imag {
        lines.push(CheckLine::new("k max imaginary residue", im, tol));
    }
    ctx.report(&lines)
}

/// `(points, values)` from `input` (last column is the value) or the
/// built-in function on `count` equispaced points of the domain.
fn point_samples(ctx: &Ctx, op: &str) -> Result<Vec<(Vec<f64>, f64)>, RunError> {
    let cfg = ctx.cfg;
    match &cfg.input {
        Some(path) => {
            let t = read_table(path).map_err(|m| ctx.err(op, m))?;
            if t.header.len() < 2 {
                return Err(ctx.err(op, "sample table needs coordinate columns and a value column"));
            }
            Ok(t.rows
                .iter()
                .map(|r| (r[..r.len() - 1].to_vec(), r[r.len() - 1]))
                .collect())
        }
        None => {
            let (a, b) = cfg.domain;
            let m = cfg.count.max(2);
            Ok((0..m)
                .map(|i| {
                    let x = a + (b - a) * i as f64 / (m - 1) as f64;
                    (vec![x], cfg.function.eval(x))
                })
                .collect())
        }
    }
}

fn fit_classic(ctx: &mut Ctx) -> Result<(), RunError> {
    let cfg = ctx.cfg;
    let samples = point_samples(ctx, "fit")?;
    let centers = cfg.centers.clone().unwrap_or_else(|| samples.iter().map(|(p, _)| p.clone()).collect());
    let specs = cfg
        .scales
        .iter()
        .map(|&c| ClassicRbfSpec::new(cfg.rbf, c))
        .collect::<rbfw::Result<Vec<_>>>()
        .map_err(|e| ctx.err("fit", e))?;
    let f = fit(&specs, &centers, &samples, cfg.with_poly).map_err(|e| ctx.err("fit", e))?;
    let mut rows = Vec::new();
    let k = centers.len();
    for (i, &b) in f.coeffs().iter().enumerate() {
        rows.push(vec!["rbf".into(), specs[i / k].c().into(), (i % k).into(), b.into()]);
    }
    for (i, &a) in f.poly_coeffs().iter().enumerate() {
        rows.push(vec!["poly".into(), Cell::Text(String::new()), i.into(), a.into()]);
    }
    ctx.write("fit_coefficients.csv", &["term", "scale", "index", "coefficient"], &rows)?;
    let eval: Vec<Vec<Cell>> = samples
        .iter()
        .map(|(p, v)| {
            let mut row: Vec<Cell> = p.iter().map(|&x| x.into()).collect();
            row.push((*v).into());
            row.push(evaluate_fit(&f, p).into());
            row
        })
        .collect();
    let dim = samples.first().map_or(1, |(p, _)| p.len());
    let mut header: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
    header.push("value".into());
    header.push("fit".into());
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    ctx.write("fit_values.csv", &header, &eval)?;
    ctx.note(format!(
        "residual norm {:.3e}, condition estimate {:.3e}",
        f.residual_norm(),
        f.condition_estimate()
    ));
    Ok(())
}

fn fit_ridgelet(ctx: &mut Ctx) -> Result<(), RunError> {
    let cfg = ctx.cfg;
    let dim = cfg.v.len();
    let centers = cfg.centers.clone().unwrap_or_else(|| {
        [[-0.5, 0.0], [0.4, 0.3], [0.0, -0.6]]
            .iter()
            .map(|c| (0..dim).map(|i| c.get(i).copied().unwrap_or(0.0)).collect())
            .collect()
    });
    let samples = if cfg.input.is_some() {
        point_samples(ctx, "ridgelet_fit")?
    } else {
        // Synthetic data from the true (D, v, k) at seeded random points.
        let truth = ConvDiffSpec::new(dim as f64, cfg.v.clone(), cfg.d, cfg.k).map_err(|e| ctx.err("ridgelet_fit", e))?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let (a, b) = cfg.domain;
        (0..cfg.samples)
            .map(|_| {
                let p: Vec<f64> = (0..dim).map(|_| rng.random_range(a..b)).collect();
                let u = centers
                    .iter()
                    .zip(cfg.weights.iter().cycle())
                    .map(|(c, w)| convdiff_kernel(&truth, &p, c, ConvDiffKind::General).map(|z| w * z.re))
                    .sum::<rbfw::Result<f64>>()?;
                Ok((p, u))
            })
            .collect::<rbfw::Result<Vec<_>>>()
            .map_err(|e| ctx.err("ridgelet_fit", e))?
    };
    let init = ConvDiffSpec::new(dim as f64, cfg.init_v.clone(), cfg.init_d, cfg.init_k).map_err(|e| ctx.err("ridgelet_fit", e))?;
    let r = ridgelet_fit(&samples, &centers, &init, cfg.fit_params, &RidgeletOptions::default())
        .map_err(|e| ctx.err("ridgelet_fit", e))?;
    let mut rows: Vec<Vec<Cell>> = vec![vec!["d".into(), r.d.into()]];
    for (i, &vi) in r.v.iter().enumerate() {
        rows.push(vec![format!("v{}", i + 1).into(), vi.into()]);
    }
    rows.push(vec!["k".into(), r.k.into()]);
    rows.push(vec!["mu".into(), r.mu().into()]);
    rows.push(vec!["loss".into(), r.loss.into()]);
    rows.push(vec!["iterations".into(), r.iterations.into()]);
    rows.push(vec!["converged".into(), r.converged.into()]);
    ctx.write("ridgelet.csv", &["parameter", "value"], &rows)?;
    let w: Vec<Vec<Cell>> = r.weights.iter().enumerate().map(|(i, &x)| vec![i.into(), x.into()]).collect();
    ctx.write("weights.csv", &["center", "weight"], &w)?;
    let h: Vec<Vec<Cell>> = r.loss_history.iter().enumerate().map(|(i, &x)| vec![i.into(), x.into()]).collect();
    ctx.write("loss_history.csv", &["iteration", "loss"], &h)?;
    ctx.note(format!("mu {:.6}, loss {:.3e}, converged {}", r.mu(), r.loss, r.converged));
    Ok(())
}

fn study_convergence(ctx: &mut Ctx) -> Result<(), RunError> {
    let cfg = ctx.cfg;
    let func = cfg.function;
    let (c0, p) = (cfg.scales[0], cfg.scale_power);
    let rows = convergence_study(|x| func.eval(x), cfg.rbf, |n| c0 * (n as f64).powf(p), &cfg.n_list, cfg.domain, cfg.with_poly)
        .map_err(|e| ctx.err("convergence_study", e))?;
    let opt = |v: Option<f64>| v.map_or(Cell::Text(String::new()), Cell::Real);
    let table: Vec<Vec<Cell>> = rows
        .iter()
        .map(|r| {
            vec![
                r.centers.into(),
                r.scale.into(),
                opt(r.linf_error),
                opt(r.condition),
                r.failure.clone().unwrap_or_default().into(),
            ]
        })
        .collect();
    ctx.write("convergence.csv", &["n", "scale", "linf_error", "condition", "failure"], &table)
}

/// Write `value` as pretty JSON to `dir/name`.
pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, String> {
    let path = dir.join(name);
    let text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    fs::write(&path, text + "\n").map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    Ok(path)
}
