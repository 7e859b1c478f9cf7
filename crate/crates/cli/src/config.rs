//! Run configuration: a TOML document naming a command and its parameters.
//!
//! Every key is optional; defaults are filled in and the result is validated
//! against the preconditions of the target operation. All validation errors
//! are reported together.

use std::fmt;
use std::path::PathBuf;

use serde::Deserialize;

use rbfw::kernels::{ClassicRbfKind, ClassicRbfSpec, ConvDiffSpec, HelmholtzKernelSpec, TimeSpaceDiffusionSpec};
use rbfw::series::SeriesMode;
use rbfw::specfun::{BesselKind, Order};
use rbfw::transforms::TransformKind;

/// Every `group action` pair the tool understands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Command {
    SpecfunEval,
    SpecfunZeros,
    DbtAnalyze,
    DbtSynthesize,
    DbtError,
    TransformBForward,
    TransformBInverse,
    TransformKForward,
    TransformKInverse,
    TransformTsForward,
    TransformTsInverse,
    TransformCalibrate,
    CheckOrthogonality,
    CheckEigenrelation,
    CheckPdeResidual,
    CheckRoundtrip,
    FitClassic,
    FitRidgelet,
    StudyConvergence,
}

impl Command {
    pub const ALL: [Command; 19] = [
        Command::SpecfunEval,
        Command::SpecfunZeros,
        Command::DbtAnalyze,
        Command::DbtSynthesize,
        Command::DbtError,
        Command::TransformBForward,
        Command::TransformBInverse,
        Command::TransformKForward,
        Command::TransformKInverse,
        Command::TransformTsForward,
        Command::TransformTsInverse,
        Command::TransformCalibrate,
        Command::CheckOrthogonality,
        Command::CheckEigenrelation,
        Command::CheckPdeResidual,
        Command::CheckRoundtrip,
        Command::FitClassic,
        Command::FitRidgelet,
        Command::StudyConvergence,
    ];

    /// `(group, action)` as typed on the command line.
    pub fn words(self) -> (&'static str, &'static str) {
        use Command::*;
        match self {
            SpecfunEval => ("specfun", "eval"),
            SpecfunZeros => ("specfun", "zeros"),
            DbtAnalyze => ("dbt", "analyze"),
            DbtSynthesize => ("dbt", "synthesize"),
            DbtError => ("dbt", "error"),
            TransformBForward => ("transform", "b-forward"),
            TransformBInverse => ("transform", "b-inverse"),
            TransformKForward => ("transform", "k-forward"),
            TransformKInverse => ("transform", "k-inverse"),
            TransformTsForward => ("transform", "ts-forward"),
            TransformTsInverse => ("transform", "ts-inverse"),
            TransformCalibrate => ("transform", "calibrate"),
            CheckOrthogonality => ("check", "orthogonality"),
            CheckEigenrelation => ("check", "eigenrelation"),
            CheckPdeResidual => ("check", "pde-residual"),
            CheckRoundtrip => ("check", "roundtrip"),
            FitClassic => ("fit", "classic"),
            FitRidgelet => ("fit", "ridgelet"),
            StudyConvergence => ("study", "convergence"),
        }
    }

    pub fn parse(group: &str, action: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.words() == (group, action))
    }

    /// Parse `"group action"`.
    pub fn parse_joined(s: &str) -> Option<Command> {
        let mut it = s.split_whitespace();
        let (g, a) = (it.next()?, it.next()?);
        if it.next().is_some() {
            return None;
        }
        Command::parse(g, a)
    }

    /// Library module that implements the command.
    pub fn module(self) -> &'static str {
        match self.words().0 {
            "specfun" => "specfun",
            "dbt" => "series",
            "transform" => "transforms",
            "check" => "checks",
            _ => "rbffit",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (g, a) = self.words();
        write!(f, "{g} {a}")
    }
}

/// Built-in radial test functions (and their radial Laplacians in dimension `n`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFunction {
    /// `exp(-r^2/2)`
    Gauss,
    /// `exp(-r^2)`
    GaussNarrow,
    /// `1 - r^2`
    Parabola,
    /// `(1 + r^2)^-2`
    Rational,
    /// `sin(pi x)`
    SinPi,
    Zero,
}

impl TestFunction {
    pub fn eval(self, r: f64) -> f64 {
        match self {
            TestFunction::Gauss => (-0.5 * r * r).exp(),
            TestFunction::GaussNarrow => (-r * r).exp(),
            TestFunction::Parabola => 1.0 - r * r,
            TestFunction::Rational => (1.0 + r * r).powi(-2),
            TestFunction::SinPi => (std::f64::consts::PI * r).sin(),
            TestFunction::Zero => 0.0,
        }
    }

    /// `f'' + (n-1)/r f'`, where available.
    pub fn laplacian(self, n: f64, r: f64) -> Option<f64> {
        let s = 1.0 + r * r;
        Some(match self {
            TestFunction::Gauss => (r * r - n) * self.eval(r),
            TestFunction::GaussNarrow => (4.0 * r * r - 2.0 * n) * self.eval(r),
            TestFunction::Parabola => -2.0 * n,
            TestFunction::Rational => -4.0 * n * s.powi(-3) + 24.0 * r * r * s.powi(-4),
            TestFunction::Zero => 0.0,
            TestFunction::SinPi => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RbfName {
    Mq,
    Gaussian,
    Tps,
}

impl From<RbfName> for ClassicRbfKind {
    fn from(r: RbfName) -> Self {
        match r {
            RbfName::Mq => ClassicRbfKind::Multiquadric,
            RbfName::Gaussian => ClassicRbfKind::Gaussian,
            RbfName::Tps => ClassicRbfKind::PreWaveletTps,
        }
    }
}

/// The document as written; every key optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    command: Option<String>,
    input: Option<PathBuf>,
    out: Option<PathBuf>,
    tol: Option<f64>,
    nodes: Option<usize>,
    seed: Option<u64>,
    threshold: Option<f64>,

    n: Option<f64>,
    nu: Option<f64>,
    bessel: Option<String>,
    x: Option<Vec<f64>>,
    count: Option<usize>,
    fidelity: Option<bool>,

    function: Option<TestFunction>,
    radius: Option<f64>,
    terms: Option<usize>,
    terms_list: Option<Vec<usize>>,
    mode: Option<String>,

    transform: Option<String>,
    lambda: Option<f64>,
    lambdas: Option<Vec<f64>>,
    radii: Option<Vec<f64>>,
    times: Option<Vec<f64>>,
    a: Option<f64>,
    h: Option<f64>,

    d: Option<f64>,
    v: Option<Vec<f64>>,
    k: Option<f64>,
    init_d: Option<f64>,
    init_v: Option<Vec<f64>>,
    init_k: Option<f64>,
    fit_params: Option<bool>,
    weights: Option<Vec<f64>>,
    samples: Option<usize>,
    centers: Option<Vec<Vec<f64>>>,

    rbf: Option<RbfName>,
    scales: Option<Vec<f64>>,
    with_poly: Option<bool>,
    n_list: Option<Vec<usize>>,
    domain: Option<[f64; 2]>,
    scale_power: Option<f64>,
}

/// A validated run configuration with defaults filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub input: Option<PathBuf>,
    pub out: PathBuf,
    /// Tail tolerance of the semi-infinite integrals.
    pub tol: f64,
    /// Quadrature nodes (meaning depends on the command).
    pub nodes: Option<usize>,
    pub seed: u64,
    /// Pass/fail bound of a check; `None` uses the built-in bound.
    pub threshold: Option<f64>,

    pub n: f64,
    pub nu: f64,
    pub bessel: BesselKind,
    pub x: Vec<f64>,
    pub count: usize,
    /// `specfun eval`: also run the closed-form/recurrence/zero checks.
    pub fidelity: bool,

    pub function: TestFunction,
    pub radius: f64,
    pub terms: usize,
    pub terms_list: Vec<usize>,
    pub mode: SeriesMode,

    pub transform: TransformKind,
    pub lambda: f64,
    pub lambdas: Option<Vec<f64>>,
    pub radii: Vec<f64>,
    pub times: Vec<f64>,
    pub a: f64,
    pub h: f64,

    pub d: f64,
    pub v: Vec<f64>,
    pub k: f64,
    pub init_d: f64,
    pub init_v: Vec<f64>,
    pub init_k: f64,
    pub fit_params: bool,
    pub weights: Vec<f64>,
    pub samples: usize,
    pub centers: Option<Vec<Vec<f64>>>,

    pub rbf: ClassicRbfKind,
    pub scales: Vec<f64>,
    pub with_poly: bool,
    pub n_list: Vec<usize>,
    pub domain: (f64, f64),
    pub scale_power: f64,
}

/// Why a configuration was rejected.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    /// Malformed document; the message carries line and column.
    #[error("config parse error: {0}")]
    Parse(String),
    /// Every failed check, in document order.
    #[error("invalid config:\n  - {}", .0.join("\n  - "))]
    Invalid(Vec<String>),
}

/// Command-line overrides applied on top of the document.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub command: Option<Command>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
    pub nodes: Option<usize>,
    pub seed: Option<u64>,
}

/// Parse and validate a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_with(text, &Overrides::default())
}

pub fn parse_config_with(text: &str, ov: &Overrides) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    let mut errs = Vec::new();

    let command = match (ov.command, &raw.command) {
        (Some(c), _) => Some(c),
        (None, Some(s)) => {
            let c = Command::parse_joined(s);
            if c.is_none() {
                errs.push(format!("unknown command {s:?}"));
            }
            c
        }
        (None, None) => {
            errs.push("no command given (set `command` or pass it on the command line)".into());
            None
        }
    };

    let bessel = match raw.bessel.as_deref().unwrap_or("j") {
        "j" => BesselKind::J,
        "y" => BesselKind::Y,
        "i" => BesselKind::I,
        "k" => BesselKind::K,
        other => {
            errs.push(format!("bessel must be one of j, y, i, k; got {other:?}"));
            BesselKind::J
        }
    };
    let mode = match raw.mode.as_deref().unwrap_or("orthogonal") {
        "orthogonal" => SeriesMode::Orthogonal,
        "paper" | "paper_faithful" => SeriesMode::PaperFaithful,
        "least_squares" => SeriesMode::LeastSquares,
        other => {
            errs.push(format!("mode must be orthogonal, paper_faithful or least_squares; got {other:?}"));
            SeriesMode::Orthogonal
        }
    };
    let transform = match raw.transform.as_deref().unwrap_or("b") {
        "b" => TransformKind::B,
        "k" => TransformKind::K,
        "ts" => TransformKind::TsDiffusion,
        other => {
            errs.push(format!("transform must be b, k or ts; got {other:?}"));
            TransformKind::B
        }
    };

    let d = raw.d.unwrap_or(1.0);
    let v = raw.v.clone().unwrap_or_else(|| vec![1.0, 0.0]);
    let k = raw.k.unwrap_or(1.0);
    let default_radii = if transform == TransformKind::K {
        (1..=30).map(|i| 0.1 * i as f64).collect()
    } else {
        (0..=30).map(|i| 0.1 * i as f64).collect()
    };

    let cfg = RunConfig {
        command: command.unwrap_or(Command::SpecfunEval),
        input: raw.input.clone(),
        out: ov.out.clone().or(raw.out.clone()).unwrap_or_else(|| PathBuf::from(".")),
        tol: ov.tol.or(raw.tol).unwrap_or(1e-11),
        nodes: ov.nodes.or(raw.nodes),
        seed: ov.seed.or(raw.seed).unwrap_or(0),
        threshold: raw.threshold,
        n: raw.n.unwrap_or(2.0),
        nu: raw.nu.unwrap_or(0.0),
        bessel,
        x: raw.x.clone().unwrap_or_else(|| vec![1.0]),
        count: raw.count.unwrap_or(10),
        fidelity: raw.fidelity.unwrap_or(false),
        function: raw.function.unwrap_or(TestFunction::Gauss),
        radius: raw.radius.unwrap_or(1.0),
        terms: raw.terms.unwrap_or(20),
        terms_list: raw.terms_list.clone().unwrap_or_else(|| vec![5, 10, 20, 50]),
        mode,
        transform,
        lambda: raw.lambda.unwrap_or(1.0),
        lambdas: raw.lambdas.clone(),
        radii: raw.radii.clone().unwrap_or(default_radii),
        times: raw.times.clone().unwrap_or_else(|| vec![1.0]),
        a: raw.a.unwrap_or(1.0),
        h: raw.h.unwrap_or(1e-3),
        init_d: raw.init_d.unwrap_or(1.1 * d),
        init_v: raw.init_v.clone().unwrap_or_else(|| v.iter().map(|c| 0.9 * c).collect()),
        init_k: raw.init_k.unwrap_or(1.1 * k),
        d,
        v,
        k,
        fit_params: raw.fit_params.unwrap_or(true),
        weights: raw.weights.clone().unwrap_or_else(|| vec![1.0, -0.6, 0.8]),
        samples: raw.samples.unwrap_or(80),
        centers: raw.centers.clone(),
        rbf: raw.rbf.unwrap_or(RbfName::Mq).into(),
        scales: raw.scales.clone().unwrap_or_else(|| vec![0.5]),
        with_poly: raw.with_poly.unwrap_or(false),
        n_list: raw.n_list.clone().unwrap_or_else(|| vec![8, 16, 32]),
        domain: raw.domain.map_or((-1.0, 1.0), |[a, b]| (a, b)),
        scale_power: raw.scale_power.unwrap_or(0.0),
    };
    if command.is_some() {
        validate(&cfg, &raw, &mut errs);
    }
    if errs.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError::Invalid(errs))
    }
}

fn validate(cfg: &RunConfig, raw: &RawConfig, errs: &mut Vec<String>) {
    use Command::*;
    let mut push = |r: rbfw::Result<()>| {
        if let Err(e) = r {
            errs.push(e.to_string());
        }
    };
    let cmd = cfg.command;
    if !(cfg.tol > 0.0 && cfg.tol.is_finite()) {
        push(Err(rbfw::Error::InvalidParameter(format!("tol must be > 0, got {}", cfg.tol))));
    }
    if let Some(t) = cfg.threshold {
        if !(t > 0.0) {
            push(Err(rbfw::Error::InvalidParameter(format!("threshold must be > 0, got {t}"))));
        }
    }
    if cfg.nodes == Some(0) {
        push(Err(rbfw::Error::InvalidParameter("nodes must be >= 1".into())));
    }

    let uses_n = !matches!(
        cmd,
        SpecfunEval | SpecfunZeros | CheckOrthogonality | CheckPdeResidual | FitClassic | StudyConvergence
    );
    if uses_n {
        push(Order::from_dimension(cfg.n).map(|_| ()));
    }
    match cmd {
        SpecfunEval | SpecfunZeros | CheckOrthogonality => {
            push(Order::new(cfg.nu).map(|_| ()));
        }
        _ => {}
    }
    if matches!(cmd, SpecfunZeros | CheckOrthogonality) && cfg.count == 0 {
        push(Err(rbfw::Error::InvalidParameter("count must be >= 1".into())));
    }
    if matches!(cmd, DbtAnalyze | DbtSynthesize | DbtError) {
        if !(cfg.radius > 0.0 && cfg.radius.is_finite()) {
            push(Err(rbfw::Error::InvalidParameter(format!("radius must be > 0, got {}", cfg.radius))));
        }
        if cfg.terms == 0 || cfg.terms_list.contains(&0) {
            push(Err(rbfw::Error::InvalidParameter("term counts must be >= 1".into())));
        }
    }
    if matches!(cmd, DbtSynthesize | TransformBInverse | TransformKInverse | TransformTsInverse)
        && cfg.input.is_none()
    {
        push(Err(rbfw::Error::InvalidParameter(format!("{cmd} needs an `input` file"))));
    }
    if matches!(cmd, TransformTsForward | TransformTsInverse) {
        push(TimeSpaceDiffusionSpec::new(cfg.n, cfg.lambda, cfg.a).map(|_| ()));
    }
    if matches!(cmd, TransformBForward | TransformKForward | CheckEigenrelation | CheckRoundtrip) {
        push(HelmholtzKernelSpec::new(cfg.n, cfg.lambda, None).map(|_| ()));
    }
    if let Some(ls) = &cfg.lambdas {
        if ls.is_empty() || ls.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            push(Err(rbfw::Error::InvalidParameter("lambdas must be finite and >= 0".into())));
        }
    }
    if cfg.radii.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        push(Err(rbfw::Error::InvalidParameter("radii must be finite and >= 0".into())));
    }
    if cmd == FitRidgelet {
        push(ConvDiffSpec::new(2.0, cfg.v.clone(), cfg.d, cfg.k).map(|_| ()));
        push(ConvDiffSpec::new(2.0, cfg.init_v.clone(), cfg.init_d, cfg.init_k).map(|_| ()));
        if cfg.init_v.len() != cfg.v.len() {
            push(Err(rbfw::Error::InvalidParameter("init_v and v must have the same length".into())));
        }
    } else if raw.d.is_some() || raw.k.is_some() || raw.v.is_some() {
        // Convection-diffusion parameters given to another command are still
        // checked, so typos do not pass silently.
        push(ConvDiffSpec::new(2.0, cfg.v.clone(), cfg.d, cfg.k).map(|_| ()));
    }
    if matches!(cmd, FitClassic | StudyConvergence) {
        for &c in &cfg.scales {
            push(ClassicRbfSpec::new(cfg.rbf, c).map(|_| ()));
        }
        if cfg.scales.is_empty() {
            push(Err(rbfw::Error::InvalidParameter("scales must not be empty".into())));
        }
        let (a, b) = cfg.domain;
        if !(a < b) {
            push(Err(rbfw::Error::InvalidInterval { a, b }));
        }
    }
    if cmd == StudyConvergence && (cfg.n_list.windows(2).any(|w| w[0] >= w[1]) || cfg.n_list.first().is_some_and(|&n| n < 2)) {
        push(Err(rbfw::Error::InvalidParameter("n_list must be >= 2 and strictly increasing".into())));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_specfun_config() {
        let cfg = parse_config("command = \"specfun eval\"").unwrap();
        assert_eq!(cfg.command, Command::SpecfunEval);
        assert_eq!(cfg.x, vec![1.0]);
        assert_eq!(cfg.bessel, BesselKind::J);
        assert_eq!(cfg.tol, 1e-11);
    }

    #[test]
    fn negative_diffusivity_names_invariant() {
        let err = parse_config("command = \"fit ridgelet\"\nd = -1.0").unwrap_err();
        assert!(err.to_string().contains("ConvDiffSpec"), "{err}");
    }

    #[test]
    fn fractal_dimension_accepted() {
        let cfg = parse_config("command = \"transform ts-forward\"\nn = 2.5\nlambda = 1.0").unwrap();
        assert_eq!(cfg.n, 2.5);
    }

    #[test]
    fn errors_are_aggregated() {
        let err = parse_config("command = \"fit ridgelet\"\nd = -1.0\ntol = -1.0\nn = 0.5").unwrap_err();
        let ConfigError::Invalid(list) = err else { panic!("expected validation errors") };
        assert!(list.len() >= 3, "{list:?}");
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse_config("command = \"specfun eval\"\nn = = 2").unwrap_err();
        assert!(matches!(err, ConfigError::Parse(ref m) if m.contains("line 2")), "{err}");
        assert!(parse_config("bogus_key = 1\ncommand = \"specfun eval\"").is_err());
    }

    #[test]
    fn command_words_roundtrip() {
        for c in Command::ALL {
            let (g, a) = c.words();
            assert_eq!(Command::parse(g, a), Some(c));
            assert_eq!(Command::parse_joined(&c.to_string()), Some(c));
        }
        assert_eq!(Command::parse("dbt", "nope"), None);
    }
}
