//! Python bindings (`import pyrbfw`).
//!
//! Radial inputs are Python callables `f(r) -> float`; an exception raised
//! inside the callable aborts the computation and is re-raised.

use std::cell::RefCell;

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use rbfw::kernels::{self, ClassicRbfKind, ClassicRbfSpec, ConvDiffSpec, HelmholtzKernelSpec};
use rbfw::rbffit;
use rbfw::series::{self, ErrorNorm, SeriesMode};
use rbfw::specfun::{self, Order};
use rbfw::transforms::{self, TransformKind, TransformOptions};
use rbfw::Complex64;

create_exception!(pyrbfw, RbfwError, PyException, "Error raised by the rbfw library.");

fn to_py(e: rbfw::Error) -> PyErr {
    RbfwError::new_err(e.to_string())
}

/// Run `body` with a Rust closure wrapping the Python callable `f`. The
/// first Python exception wins over whatever error the library reports.
fn with_callable<T>(
    f: &Bound<'_, PyAny>,
    body: impl FnOnce(&dyn Fn(f64) -> f64) -> rbfw::Result<T>,
) -> PyResult<T> {
    let failure: RefCell<Option<PyErr>> = RefCell::new(None);
    let g = |r: f64| -> f64 {
        if failure.borrow().is_some() {
            return f64::NAN;
        }
        match f.call1((r,)).and_then(|v| v.extract::<f64>()) {
            Ok(v) => v,
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                f64::NAN
            }
        }
    };
    let out = body(&g);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    out.map_err(to_py)
}

fn mode_from(name: &str) -> PyResult<SeriesMode> {
    match name {
        "orthogonal" => Ok(SeriesMode::Orthogonal),
        "paper_faithful" => Ok(SeriesMode::PaperFaithful),
        "least_squares" => Ok(SeriesMode::LeastSquares),
        _ => Err(RbfwError::new_err(format!("unknown mode {name:?}"))),
    }
}

fn kind_from(name: &str) -> PyResult<TransformKind> {
    match name {
        "b" => Ok(TransformKind::B),
        "k" => Ok(TransformKind::K),
        "ts" => Ok(TransformKind::TsDiffusion),
        _ => Err(RbfwError::new_err(format!("unknown transform kind {name:?}"))),
    }
}

fn rbf_from(name: &str) -> PyResult<ClassicRbfKind> {
    match name {
        "mq" => Ok(ClassicRbfKind::Multiquadric),
        "gaussian" => Ok(ClassicRbfKind::Gaussian),
        "tps" => Ok(ClassicRbfKind::PreWaveletTps),
        _ => Err(RbfwError::new_err(format!("unknown RBF kind {name:?}"))),
    }
}

#[pyfunction]
fn bessel_j(nu: f64, x: f64) -> PyResult<f64> {
    specfun::bessel_j(nu, x).map_err(to_py)
}

#[pyfunction]
fn bessel_y(nu: f64, x: f64) -> PyResult<f64> {
    specfun::bessel_y(nu, x).map_err(to_py)
}

#[pyfunction]
fn bessel_i(nu: f64, x: f64) -> PyResult<f64> {
    specfun::bessel_i(nu, x).map_err(to_py)
}

#[pyfunction]
fn bessel_k(nu: f64, x: f64) -> PyResult<f64> {
    specfun::bessel_k(nu, x).map_err(to_py)
}

/// First `count` positive zeros of `J_nu`.
#[pyfunction]
fn jn_zeros(nu: f64, count: usize) -> PyResult<Vec<f64>> {
    Order::new(nu).and_then(|o| specfun::jn_zeros(o, count)).map_err(to_py)
}

/// Helmholtz kernel `phi_n(lambda r)`, optionally with zero-scaled argument `lambda/R`.
#[pyfunction]
#[pyo3(signature = (n, lam, r, radius=None))]
fn helmholtz_kernel(n: f64, lam: f64, r: f64, radius: Option<f64>) -> PyResult<f64> {
    HelmholtzKernelSpec::new(n, lam, radius)
        .and_then(|s| kernels::helmholtz_kernel(&s, r))
        .map_err(to_py)
}

/// `sqrt((|v|/2D)^2 + k/D)`.
#[pyfunction]
fn convdiff_mu(v: Vec<f64>, d: f64, k: f64) -> PyResult<f64> {
    let n = v.len() as f64;
    ConvDiffSpec::new(n.max(1.0), v, d, k).map(|s| s.mu()).map_err(to_py)
}

#[pyfunction]
fn classic_rbf(kind: &str, c: f64, r: f64) -> PyResult<f64> {
    let spec = ClassicRbfSpec::new(rbf_from(kind)?, c).map_err(to_py)?;
    Ok(kernels::classic_rbf(&spec, r))
}

/// A discrete Bessel series on a ball.
#[pyclass(name = "BesselSeries", frozen)]
struct PyBesselSeries {
    inner: series::BesselSeries,
}

#[pymethods]
impl PyBesselSeries {
    #[getter]
    fn n(&self) -> f64 {
        self.inner.n()
    }

    #[getter]
    fn radius(&self) -> f64 {
        self.inner.radius()
    }

    #[getter]
    fn zeros(&self) -> Vec<f64> {
        self.inner.zeros().to_vec()
    }

    #[getter]
    fn alpha0(&self) -> f64 {
        self.inner.alpha0()
    }

    /// Coefficients of the (first) centre.
    #[getter]
    fn coeffs(&self) -> Vec<f64> {
        self.inner.coeffs()[0].clone()
    }

    /// Value at distance `r` from the centre.
    fn __call__(&self, r: f64) -> PyResult<f64> {
        self.inner.synthesize_radius(r).map_err(to_py)
    }

    /// `(linf on [0, 0.9 R], weighted L2)` distance to `f`.
    fn error(&self, f: &Bound<'_, PyAny>) -> PyResult<(f64, f64)> {
        with_callable(f, |g| {
            Ok((
                series::reconstruction_error(&self.inner, g, ErrorNorm::LinfInner)?,
                series::reconstruction_error(&self.inner, g, ErrorNorm::L2Weighted)?,
            ))
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "BesselSeries(n={}, radius={}, terms={})",
            self.inner.n(),
            self.inner.radius(),
            self.inner.terms()
        )
    }
}

/// Expand `f` on `[0, radius]` in `terms` Bessel functions.
#[pyfunction]
#[pyo3(signature = (f, n, radius, terms, mode="orthogonal"))]
fn analyze(f: &Bound<'_, PyAny>, n: f64, radius: f64, terms: usize, mode: &str) -> PyResult<PyBesselSeries> {
    let mode = mode_from(mode)?;
    with_callable(f, |g| series::analyze(g, n, radius, terms, mode)).map(|inner| PyBesselSeries { inner })
}

/// Sampled spectrum of a B-, K- or time-space transform.
#[pyclass(name = "Spectrum", frozen)]
struct PySpectrum {
    inner: transforms::Spectrum,
}

#[pymethods]
impl PySpectrum {
    #[getter]
    fn n(&self) -> f64 {
        self.inner.n()
    }

    #[getter]
    fn lambdas(&self) -> Vec<f64> {
        self.inner.lambdas().to_vec()
    }

    #[getter]
    fn values(&self) -> Vec<Complex64> {
        self.inner.values().to_vec()
    }

    /// Interpolated value at `lam` (zero outside the sampled range).
    fn __call__(&self, lam: f64) -> Complex64 {
        self.inner.value_at(lam)
    }

    fn __len__(&self) -> usize {
        self.inner.lambdas().len()
    }
}

/// Verified inverse-transform constants.
#[pyclass(name = "Calibration", frozen)]
struct PyCalibration {
    inner: transforms::TransformCalibration,
}

#[pymethods]
impl PyCalibration {
    #[getter]
    fn m(&self) -> f64 {
        self.inner.m()
    }

    #[getter]
    fn c(&self) -> f64 {
        self.inner.c()
    }

    #[getter]
    fn discrepancy(&self) -> Option<f64> {
        self.inner.discrepancy()
    }

    fn __repr__(&self) -> String {
        format!("Calibration(n={}, m={}, c={})", self.inner.n(), self.inner.m(), self.inner.c())
    }
}

#[pyfunction]
#[pyo3(signature = (n, kind="b"))]
fn calibrate(n: f64, kind: &str) -> PyResult<PyCalibration> {
    transforms::calibrate(n, kind_from(kind)?)
        .map(|inner| PyCalibration { inner })
        .map_err(to_py)
}

/// B-transform of `f` on `lambdas` (default grid when omitted).
#[pyfunction]
#[pyo3(signature = (f, n, lambdas=None))]
fn b_forward(f: &Bound<'_, PyAny>, n: f64, lambdas: Option<Vec<f64>>) -> PyResult<PySpectrum> {
    let grid = lambdas.unwrap_or_else(transforms::default_lambda_grid);
    with_callable(f, |g| transforms::b_forward(g, n, &grid)).map(|inner| PySpectrum { inner })
}

#[pyfunction]
fn b_inverse(spectrum: &PySpectrum, calibration: &PyCalibration, radii: Vec<f64>) -> PyResult<Vec<f64>> {
    transforms::b_inverse(&spectrum.inner, &calibration.inner, &radii)
        .map(|s| s.values().to_vec())
        .map_err(to_py)
}

/// K-transform of `f` on `lambdas` (default positive grid when omitted).
#[pyfunction]
#[pyo3(signature = (f, n, lambdas=None))]
fn k_forward(f: &Bound<'_, PyAny>, n: f64, lambdas: Option<Vec<f64>>) -> PyResult<PySpectrum> {
    let grid = lambdas.unwrap_or_else(transforms::default_k_lambda_grid);
    with_callable(f, |g| transforms::k_forward(g, n, &grid)).map(|inner| PySpectrum { inner })
}

/// Inverse K-transform with the derived (unverified) constants; complex result.
#[pyfunction]
fn k_inverse(spectrum: &PySpectrum, radii: Vec<f64>) -> PyResult<Vec<Complex64>> {
    let cal = transforms::TransformCalibration::derived(spectrum.inner.n(), TransformKind::K).map_err(to_py)?;
    transforms::k_inverse_with(&spectrum.inner, &cal, &radii, &TransformOptions::default())
        .map(|s| s.values().to_vec())
        .map_err(to_py)
}

/// Residuals `|T[lap f] + l^2 T[f]|` at `lambdas`.
#[pyfunction]
#[pyo3(signature = (f, lap_f, n, lambdas, kind="b"))]
fn eigen_check(
    f: &Bound<'_, PyAny>,
    lap_f: &Bound<'_, PyAny>,
    n: f64,
    lambdas: Vec<f64>,
    kind: &str,
) -> PyResult<Vec<f64>> {
    let kind = kind_from(kind)?;
    with_callable(f, |g| {
        with_callable(lap_f, |h| transforms::eigen_check(g, h, n, &lambdas, kind, &TransformOptions::default()))
            .map_err(|e| rbfw::Error::InvalidParameter(e.to_string()))
    })
    .map(|r| r.residuals)
}

/// A classic RBF fit.
#[pyclass(name = "FitResult", frozen)]
struct PyFitResult {
    inner: rbffit::FitResult,
}

#[pymethods]
impl PyFitResult {
    #[getter]
    fn coeffs(&self) -> Vec<f64> {
        self.inner.coeffs().to_vec()
    }

    #[getter]
    fn poly_coeffs(&self) -> Vec<f64> {
        self.inner.poly_coeffs().to_vec()
    }

    #[getter]
    fn residual_norm(&self) -> f64 {
        self.inner.residual_norm()
    }

    #[getter]
    fn condition_estimate(&self) -> f64 {
        self.inner.condition_estimate()
    }

    fn __call__(&self, x: Vec<f64>) -> f64 {
        rbffit::evaluate_fit(&self.inner, &x)
    }
}

/// Fit `values` at `points` with one kernel per scale about `centers`.
#[pyfunction]
#[pyo3(signature = (kind, scales, centers, points, values, with_poly=false))]
fn fit(
    kind: &str,
    scales: Vec<f64>,
    centers: Vec<Vec<f64>>,
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
    with_poly: bool,
) -> PyResult<PyFitResult> {
    let kind = rbf_from(kind)?;
    let specs = scales
        .iter()
        .map(|&c| ClassicRbfSpec::new(kind, c))
        .collect::<rbfw::Result<Vec<_>>>()
        .map_err(to_py)?;
    if points.len() != values.len() {
        return Err(RbfwError::new_err("points and values differ in length"));
    }
    let samples: Vec<(Vec<f64>, f64)> = points.into_iter().zip(values).collect();
    rbffit::fit(&specs, &centers, &samples, with_poly)
        .map(|inner| PyFitResult { inner })
        .map_err(to_py)
}

/// Recover `(D, v, k)` and weights from samples of a convection-diffusion field.
/// Returns a dict with `d`, `v`, `k`, `mu`, `weights`, `loss`, `converged`.
#[pyfunction]
#[pyo3(signature = (points, values, centers, d, v, k, fit_params=true))]
#[allow(clippy::too_many_arguments)]
fn ridgelet_fit<'py>(
    py: Python<'py>,
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
    centers: Vec<Vec<f64>>,
    d: f64,
    v: Vec<f64>,
    k: f64,
    fit_params: bool,
) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
    let init = ConvDiffSpec::new(v.len() as f64, v, d, k).map_err(to_py)?;
    if points.len() != values.len() {
        return Err(RbfwError::new_err("points and values differ in length"));
    }
    let samples: Vec<(Vec<f64>, f64)> = points.into_iter().zip(values).collect();
    let r = py
        .detach(|| rbffit::ridgelet_fit(&samples, &centers, &init, fit_params, &rbffit::RidgeletOptions::default()))
        .map_err(to_py)?;
    let out = pyo3::types::PyDict::new(py);
    out.set_item("d", r.d)?;
    out.set_item("v", r.v.clone())?;
    out.set_item("k", r.k)?;
    out.set_item("mu", r.mu())?;
    out.set_item("weights", r.weights.clone())?;
    out.set_item("loss", r.loss)?;
    out.set_item("converged", r.converged)?;
    Ok(out)
}

#[pymodule]
pub fn pyrbfw(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("RbfwError", m.py().get_type::<RbfwError>())?;
    m.add_class::<PyBesselSeries>()?;
    m.add_class::<PySpectrum>()?;
    m.add_class::<PyCalibration>()?;
    m.add_class::<PyFitResult>()?;
    m.add_function(wrap_pyfunction!(bessel_j, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_y, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_i, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_k, m)?)?;
    m.add_function(wrap_pyfunction!(jn_zeros, m)?)?;
    m.add_function(wrap_pyfunction!(helmholtz_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(convdiff_mu, m)?)?;
    m.add_function(wrap_pyfunction!(classic_rbf, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(calibrate, m)?)?;
    m.add_function(wrap_pyfunction!(b_forward, m)?)?;
    m.add_function(wrap_pyfunction!(b_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(k_forward, m)?)?;
    m.add_function(wrap_pyfunction!(k_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(eigen_check, m)?)?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    m.add_function(wrap_pyfunction!(ridgelet_fit, m)?)?;
    Ok(())
}
