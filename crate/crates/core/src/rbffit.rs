//! Classic RBF fitting (MQ, Gaussian, pre-wavelet TPS) with an optional
//! linear polynomial, convergence studies, and convection-diffusion parameter
//! recognition.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernels::{
    classic_rbf, convdiff_kernel, distance, ClassicRbfKind, ClassicRbfSpec, ConvDiffKind,
    ConvDiffSpec,
};
use crate::linalg;

/// A fitted expansion `a0 + sum_l a_l x_l + sum_j sum_k b_jk phi_j(|x - x_k|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    kernels: Vec<ClassicRbfSpec>,
    centers: Vec<Vec<f64>>,
    coeffs: Vec<f64>,
    poly_coeffs: Vec<f64>,
    residual_norm: f64,
    condition_estimate: f64,
}

impl FitResult {
    /// One spec per scale `c_j`.
    pub fn kernels(&self) -> &[ClassicRbfSpec] {
        &self.kernels
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    /// `b_jk` stored scale-major: index `j * centers + k`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `[a0, a_1, ..., a_d]`, or empty without the polynomial block.
    pub fn poly_coeffs(&self) -> &[f64] {
        &self.poly_coeffs
    }

    /// Euclidean norm of the residual at the sample points.
    pub fn residual_norm(&self) -> f64 {
        self.residual_norm
    }

    /// 2-norm condition number of the solved system.
    pub fn condition_estimate(&self) -> f64 {
        self.condition_estimate
    }
}

/// Evaluate a fit at `x`.
pub fn evaluate_fit(fit: &FitResult, x: &[f64]) -> f64 {
    let mut sum = 0.0;
    if let Some((a0, lin)) = fit.poly_coeffs.split_first() {
        sum += a0 + lin.iter().zip(x).map(|(a, xi)| a * xi).sum::<f64>();
    }
    let k = fit.centers.len();
    for (j, spec) in fit.kernels.iter().enumerate() {
        for (c, b) in fit.centers.iter().zip(&fit.coeffs[j * k..(j + 1) * k]) {
            sum += b * classic_rbf(spec, distance(x, c));
        }
    }
    sum
}

/// Ridge weight (relative to the mean squared singular value) used when the
/// system is rectangular.
const LSQ_RIDGE: f64 = 1e-12;

/// Fit sampled data.
///
/// With `S` samples, `U` kernel unknowns (scales x centres) and `P = d + 1`
/// polynomial unknowns:
/// - `S == U` with the polynomial: interpolation with the side conditions
///   `P^T b = 0` (square saddle-point system, LU);
/// - `S` equals the total unknown count: square LU solve;
/// - `S` larger: ridge-regularised least squares (SVD).
pub fn fit(
    kernel_specs: &[ClassicRbfSpec],
    centers: &[Vec<f64>],
    samples: &[(Vec<f64>, f64)],
    with_poly: bool,
) -> Result<FitResult> {
    if kernel_specs.is_empty() || centers.is_empty() {
        return Err(Error::InvalidParameter("need at least one scale and one centre".into()));
    }
    let dim = centers[0].len();
    if dim == 0
        || centers.iter().any(|c| c.len() != dim)
        || samples.iter().any(|(p, _)| p.len() != dim)
    {
        return Err(Error::InvalidParameter(
            "centres and sample points must share one non-zero dimension".into(),
        ));
    }
    if samples.iter().any(|(_, v)| !v.is_finite()) {
        return Err(Error::InvalidParameter("sample values must be finite".into()));
    }
    let kc = kernel_specs.len() * centers.len();
    let pc = if with_poly { dim + 1 } else { 0 };
    let s = samples.len();

    let row = |p: &[f64]| -> Vec<f64> {
        let mut r = Vec::with_capacity(kc + pc);
        for spec in kernel_specs {
            for c in centers {
                r.push(classic_rbf(spec, distance(p, c)));
            }
        }
        if with_poly {
            r.push(1.0);
            r.extend_from_slice(p);
        }
        r
    };

    let (sol, cond) = if with_poly && s == kc {
        // [A P; P^T 0] [b; a] = [y; 0]
        let n = kc + pc;
        let mut m = DMatrix::zeros(n, n);
        let mut rhs = DVector::zeros(n);
        for (i, (p, v)) in samples.iter().enumerate() {
            for (j, e) in row(p).into_iter().enumerate() {
                m[(i, j)] = e;
                if j >= kc {
                    m[(j, i)] = e;
                }
            }
            rhs[i] = *v;
        }
        linalg::solve_square(&m, &rhs)?
    } else if s < kc + pc {
        return Err(Error::InsufficientSamples {
            samples: s,
            unknowns: kc + pc,
        });
    } else {
        let a = DMatrix::from_fn(s, kc + pc, |i, j| row(&samples[i].0)[j]);
        let b = DVector::from_iterator(s, samples.iter().map(|(_, v)| *v));
        if s == kc + pc {
            linalg::solve_square(&a, &b)?
        } else {
            let (x, cond) = linalg::ridge_lstsq(&a, &b, LSQ_RIDGE)?;
            if !(cond < linalg::MAX_CONDITION) {
                return Err(Error::IllConditioned { condition: cond });
            }
            (x, cond)
        }
    };

    let mut result = FitResult {
        kernels: kernel_specs.to_vec(),
        centers: centers.to_vec(),
        coeffs: sol.iter().take(kc).cloned().collect(),
        poly_coeffs: sol.iter().skip(kc).take(pc).cloned().collect(),
        residual_norm: 0.0,
        condition_estimate: cond,
    };
    result.residual_norm = samples
        .iter()
        .map(|(p, v)| (evaluate_fit(&result, p) - v).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(result)
}

/// One row of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub centers: usize,
    pub scale: f64,
    /// Max error on a grid ten times denser than the centres.
    pub linf_error: Option<f64>,
    pub condition: Option<f64>,
    /// Solver failure for this row, if any.
    pub failure: Option<String>,
}

/// Interpolate `target` on `N` equispaced centres of `[a, b]` for each `N`,
/// with scale `c = scale_rule(N)`, and measure the max error on `10 N`
/// equispaced points. Solver failures are recorded in the row.
pub fn convergence_study<T, S>(
    target: T,
    kind: ClassicRbfKind,
    scale_rule: S,
    n_list: &[usize],
    domain: (f64, f64),
    with_poly: bool,
) -> Result<Vec<StudyRow>>
where
    T: Fn(f64) -> f64,
    S: Fn(usize) -> f64,
{
    let (a, b) = domain;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidInterval { a, b });
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) || n_list.first().is_some_and(|&n| n < 2) {
        return Err(Error::InvalidParameter(
            "centre counts must be >= 2 and strictly increasing".into(),
        ));
    }
    let grid = |count: usize| -> Vec<f64> {
        (0..count)
            .map(|i| a + (b - a) * i as f64 / (count - 1) as f64)
            .collect()
    };
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let c = scale_rule(n);
        let mut row = StudyRow {
            centers: n,
            scale: c,
            linf_error: None,
            condition: None,
            failure: None,
        };
        let outcome = ClassicRbfSpec::new(kind, c).and_then(|spec| {
            let xs = grid(n);
            let centers: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
            let samples: Vec<(Vec<f64>, f64)> = xs.iter().map(|&x| (vec![x], target(x))).collect();
            let f = fit(&[spec], &centers, &samples, with_poly)?;
            let err = grid(10 * n)
                .iter()
                .map(|&x| (evaluate_fit(&f, &[x]) - target(x)).abs())
                .fold(0.0, f64::max);
            Ok((err, f.condition_estimate()))
        });
        match outcome {
            Ok((err, cond)) => {
                row.linf_error = Some(err);
                row.condition = Some(cond);
            }
            Err(e) => {
                if let Error::IllConditioned { condition } = e {
                    row.condition = Some(condition);
                }
                row.failure = Some(e.to_string());
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Result of a convection-diffusion kernel fit.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeletFit {
    pub weights: Vec<f64>,
    pub d: f64,
    pub v: Vec<f64>,
    pub k: f64,
    /// Sum of squared residuals.
    pub loss: f64,
    /// Loss after each accepted iteration, starting with the initial one.
    pub loss_history: Vec<f64>,
    pub iterations: usize,
    /// False when the iteration budget ran out before the stopping test.
    pub converged: bool,
}

impl RidgeletFit {
    /// `sqrt((|v|/2D)^2 + k/D)` for the fitted parameters.
    pub fn mu(&self) -> f64 {
        let speed = self.v.iter().map(|c| c * c).sum::<f64>().sqrt();
        ((speed / (2.0 * self.d)).powi(2) + self.k / self.d).sqrt()
    }
}

/// Iteration controls for [`ridgelet_fit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RidgeletOptions {
    pub max_iterations: usize,
    /// Stop when the relative loss change falls below this.
    pub rel_tol: f64,
    /// Forward-difference step relative to `max(|theta_i|, 1)`.
    pub fd_step: f64,
}

impl Default for RidgeletOptions {
    fn default() -> Self {
        RidgeletOptions {
            max_iterations: 100,
            rel_tol: 1e-10,
            fd_step: 1e-6,
        }
    }
}

const MIN_DIFFUSIVITY: f64 = 1e-8;

/// Fit `u(x) = sum_k w_k u_general(x; centre_k)` to samples.
///
/// With `fit_params` false only the weights are solved for. Otherwise the
/// weights are eliminated by a linear solve at every parameter value
/// (variable projection) and Gauss-Newton steps are taken on `(D, v, k)`
/// with forward-difference Jacobians and step halving, so the loss never
/// increases. Only `v/2D` and `k/D` (hence `mu`) are identifiable: scaling
/// all of `(D, v, k)` together leaves the model unchanged, so steps are
/// projected orthogonal to that direction and the overall scale stays near
/// the initial guess.
pub fn ridgelet_fit(
    samples: &[(Vec<f64>, f64)],
    centers: &[Vec<f64>],
    init: &ConvDiffSpec,
    fit_params: bool,
    opts: &RidgeletOptions,
) -> Result<RidgeletFit> {
    let dim = init.velocity().len();
    if centers.is_empty() {
        return Err(Error::InvalidParameter("at least one centre is required".into()));
    }
    if centers.iter().any(|c| c.len() != dim) || samples.iter().any(|(p, _)| p.len() != dim) {
        return Err(Error::InvalidParameter(format!(
            "centres and sample points must have the velocity dimension {dim}"
        )));
    }
    if samples.len() < centers.len() {
        return Err(Error::InsufficientSamples {
            samples: samples.len(),
            unknowns: centers.len(),
        });
    }
    let n = init.n();
    let y = DVector::from_iterator(samples.len(), samples.iter().map(|(_, v)| *v));

    let to_theta = |s: &ConvDiffSpec| -> Vec<f64> {
        let mut t = vec![s.diffusivity()];
        t.extend_from_slice(s.velocity());
        t.push(s.reaction());
        t
    };
    let spec_of = |t: &[f64]| -> Result<ConvDiffSpec> {
        ConvDiffSpec::new(n, t[1..=dim].to_vec(), t[0], t[dim + 1])
    };
    let project = |t: &mut [f64]| {
        t[0] = t[0].max(MIN_DIFFUSIVITY);
        t[dim + 1] = t[dim + 1].max(0.0);
    };
    // Weights and residual vector at a parameter value.
    let solve = |t: &[f64]| -> Result<(DVector<f64>, DVector<f64>)> {
        let spec = spec_of(t)?;
        let mut a = DMatrix::zeros(samples.len(), centers.len());
        for (i, (p, _)) in samples.iter().enumerate() {
            for (k, c) in centers.iter().enumerate() {
                a[(i, k)] = convdiff_kernel(&spec, p, c, ConvDiffKind::General)?.re;
            }
        }
        let (w, _) = linalg::ridge_lstsq(&a, &y, LSQ_RIDGE)?;
        let r = &a * &w - &y;
        Ok((w, r))
    };

    let mut theta = to_theta(init);
    let (mut weights, mut resid) = solve(&theta)?;
    let mut loss = resid.norm_squared();
    let mut history = vec![loss];
    let mut iterations = 0;
    let mut converged = !fit_params || loss == 0.0;

    while !converged && iterations < opts.max_iterations {
        iterations += 1;
        // Forward-difference Jacobian of the projected residual.
        let p = theta.len();
        let mut jac = DMatrix::zeros(resid.len(), p);
        for i in 0..p {
            let h = opts.fd_step * theta[i].abs().max(1.0);
            let mut t = theta.clone();
            t[i] += h;
            if i == 0 && t[0] < MIN_DIFFUSIVITY {
                t[0] = MIN_DIFFUSIVITY;
            }
            let (_, r) = solve(&t)?;
            jac.set_column(i, &((r - &resid) / h));
        }
        let svd = jac.svd(true, true);
        let smax = svd.singular_values.max();
        let mut step = svd
            .solve(&(-&resid), 1e-10 * smax)
            .map_err(|_| Error::NoConvergence { op: "ridgelet_fit" })?;
        // Scaling (D, v, k) by a common factor leaves the model unchanged;
        // drop the step component along that direction.
        let dir = DVector::from_column_slice(&theta);
        step -= &dir * (step.dot(&dir) / dir.norm_squared());

        let mut accepted = None;
        let mut scale = 1.0;
        for _ in 0..40 {
            let mut t: Vec<f64> = theta.iter().zip(step.iter()).map(|(a, d)| a + scale * d).collect();
            project(&mut t);
            if let Ok((w, r)) = solve(&t) {
                let l = r.norm_squared();
                if l.is_finite() && l <= loss {
                    accepted = Some((t, w, r, l));
                    break;
                }
            }
            scale *= 0.5;
        }
        let Some((t, w, r, l)) = accepted else {
            // No descent along the Gauss-Newton direction: stationary.
            converged = true;
            break;
        };
        let change = (loss - l) / loss.max(f64::MIN_POSITIVE);
        theta = t;
        weights = w;
        resid = r;
        loss = l;
        history.push(loss);
        if change < opts.rel_tol || loss == 0.0 {
            converged = true;
        }
    }

    Ok(RidgeletFit {
        weights: weights.iter().cloned().collect(),
        d: theta[0],
        v: theta[1..=dim].to_vec(),
        k: theta[dim + 1],
        loss,
        loss_history: history,
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn line(n: usize) -> Vec<Vec<f64>> {
        (0..n).map(|i| vec![-1.0 + 2.0 * i as f64 / (n - 1) as f64]).collect()
    }

    fn mq(c: f64) -> ClassicRbfSpec {
        ClassicRbfSpec::new(ClassicRbfKind::Multiquadric, c).unwrap()
    }

    #[test]
    fn recovers_known_coefficients() {
        let centers = line(10);
        let truth: Vec<f64> = (0..10).map(|i| ((i * 7) % 5) as f64 - 2.0).collect();
        let known = FitResult {
            kernels: vec![mq(1.0)],
            centers: centers.clone(),
            coeffs: truth.clone(),
            poly_coeffs: vec![],
            residual_norm: 0.0,
            condition_estimate: 1.0,
        };
        let samples: Vec<_> = centers.iter().map(|c| (c.clone(), evaluate_fit(&known, c))).collect();
        let f = fit(&[mq(1.0)], &centers, &samples, false).unwrap();
        for (a, b) in f.coeffs().iter().zip(&truth) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-8);
        }
        assert!(f.residual_norm() < 1e-8);
    }

    #[test]
    fn zero_data_zero_fit() {
        let centers = line(6);
        let samples: Vec<_> = centers.iter().map(|c| (c.clone(), 0.0)).collect();
        let f = fit(&[mq(0.5)], &centers, &samples, true).unwrap();
        assert!(f.coeffs().iter().chain(f.poly_coeffs()).all(|&c| c == 0.0));
        assert_eq!(evaluate_fit(&f, &[0.3]), 0.0);
    }

    #[test]
    fn one_by_one_system() {
        let spec = mq(2.0);
        let c = vec![vec![0.5]];
        let x = vec![1.5];
        let s = vec![(x.clone(), classic_rbf(&spec, 1.0))];
        let f = fit(&[spec], &c, &s, false).unwrap();
        assert_abs_diff_eq!(f.coeffs()[0], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn interpolation_with_polynomial_reproduces_samples() {
        let centers = line(20);
        let samples: Vec<_> = centers.iter().map(|c| (c.clone(), (PI * c[0]).sin())).collect();
        let f = fit(&[mq(0.5)], &centers, &samples, true).unwrap();
        assert!(f.condition_estimate() < 1e12);
        for (p, v) in &samples {
            assert_abs_diff_eq!(evaluate_fit(&f, p), v, epsilon = 1e-8);
        }
        let g = fit(&[mq(0.5)], &centers, &samples, false).unwrap();
        assert_abs_diff_eq!(evaluate_fit(&g, &[0.25]), (0.25 * PI).sin(), epsilon = 1e-3);
    }

    #[test]
    fn polynomial_block_never_hurts_least_squares() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let centers: Vec<Vec<f64>> = (0..6).map(|i| vec![-1.0 + 0.4 * i as f64, 0.1 * i as f64]).collect();
        let specs = [mq(0.8), mq(1.6)];
        for _ in 0..5 {
            let coef: [f64; 4] = [rng.random(), rng.random(), rng.random(), rng.random()];
            let samples: Vec<_> = (0..60)
                .map(|_| {
                    let p = vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
                    let v = coef[0] * (coef[1] * p[0]).exp() + coef[2] * p[1] * p[1] - coef[3];
                    (p, v)
                })
                .collect();
            let plain = fit(&specs, &centers, &samples, false).unwrap();
            let poly = fit(&specs, &centers, &samples, true).unwrap();
            assert!(poly.residual_norm() <= plain.residual_norm() * (1.0 + 1e-9) + 1e-12);
        }
    }

    #[test]
    fn rejects_underdetermined_and_singular() {
        let centers = line(5);
        let samples: Vec<_> = centers.iter().take(3).map(|c| (c.clone(), 1.0)).collect();
        assert!(matches!(
            fit(&[mq(1.0)], &centers, &samples, false),
            Err(Error::InsufficientSamples { .. })
        ));
        // Duplicate centres make the square system singular.
        let dup = vec![vec![0.0], vec![0.0]];
        let s = vec![(vec![0.0], 1.0), (vec![0.5], 2.0)];
        assert!(matches!(fit(&[mq(1.0)], &dup, &s, false), Err(Error::IllConditioned { .. })));
    }

    #[test]
    fn convergence_study_trends() {
        let target = |x: f64| (PI * x).sin();
        for kind in [ClassicRbfKind::Multiquadric, ClassicRbfKind::PreWaveletTps] {
            let rows = convergence_study(target, kind, |_| 0.5, &[8, 16, 32], (-1.0, 1.0), false).unwrap();
            let errs: Vec<f64> = rows.iter().map(|r| r.linf_error.unwrap()).collect();
            assert!(errs.windows(2).all(|w| w[1] < w[0]), "{kind:?}: {errs:?}");
        }
        let rows = convergence_study(|_| 0.0, ClassicRbfKind::Gaussian, |_| 0.5, &[8, 16], (-1.0, 1.0), false).unwrap();
        assert!(rows.iter().all(|r| r.linf_error.unwrap() < 1e-12));
    }

    type RidgeData = (Vec<(Vec<f64>, f64)>, Vec<Vec<f64>>, Vec<f64>);

    fn ridge_data(d: f64, v: Vec<f64>, k: f64) -> RidgeData {
        let spec = ConvDiffSpec::new(2.0, v, d, k).unwrap();
        let centers = vec![vec![-0.5, 0.0], vec![0.4, 0.3], vec![0.0, -0.6]];
        let w = vec![1.0, -0.6, 0.8];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let samples = (0..80)
            .map(|_| {
                let p = vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
                let u: f64 = centers
                    .iter()
                    .zip(&w)
                    .map(|(c, wk)| wk * convdiff_kernel(&spec, &p, c, ConvDiffKind::General).unwrap().re)
                    .sum();
                (p, u)
            })
            .collect();
        (samples, centers, w)
    }

    #[test]
    fn ridgelet_linear_weights() {
        let (samples, centers, w) = ridge_data(1.0, vec![2.0, 0.0], 1.0);
        let init = ConvDiffSpec::new(2.0, vec![2.0, 0.0], 1.0, 1.0).unwrap();
        let f = ridgelet_fit(&samples, &centers, &init, false, &Default::default()).unwrap();
        for (a, b) in f.weights.iter().zip(&w) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-6);
        }
        assert_eq!((f.d, f.k, f.v.clone()), (1.0, 1.0, vec![2.0, 0.0]));
    }

    #[test]
    fn ridgelet_zero_data() {
        let (samples, centers, _) = ridge_data(1.0, vec![2.0, 0.0], 1.0);
        let zero: Vec<_> = samples.into_iter().map(|(p, _)| (p, 0.0)).collect();
        let init = ConvDiffSpec::new(2.0, vec![1.8, 0.1], 1.1, 0.9).unwrap();
        let f = ridgelet_fit(&zero, &centers, &init, true, &Default::default()).unwrap();
        assert!(f.weights.iter().all(|&w| w == 0.0));
        assert_eq!(f.loss, 0.0);
        assert_eq!((f.d, f.k, f.v.clone()), (1.1, 0.9, vec![1.8, 0.1]));
    }

    #[test]
    fn ridgelet_recovers_mu() {
        for &k in &[1.0, 3.0] {
            let (samples, centers, _) = ridge_data(1.0, vec![2.0, 0.0], k);
            let init = ConvDiffSpec::new(2.0, vec![1.8, 0.0], 1.1, 1.1 * k).unwrap();
            let f = ridgelet_fit(&samples, &centers, &init, true, &Default::default()).unwrap();
            let mu_true = (1.0 + k).sqrt();
            assert!((f.mu() - mu_true).abs() < 0.05 * mu_true, "k={k}: mu={} {:?}", f.mu(), f);
            assert!(f.loss_history.windows(2).all(|w| w[1] <= w[0]));
        }
    }
}
