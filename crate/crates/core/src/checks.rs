//! Verification harnesses for the operator identities behind the library:
//! Bessel orthogonality, special-function fidelity, PDE residuals of the
//! kernels and transform round trips.
//!
//! Every harness returns plain numbers; the callers (tests, CLI) own the
//! tolerances. [`CheckLine`] bundles a measured value with a tolerance for
//! reporting.

use std::f64::consts::PI;

use crate::error::Result;
use crate::kernels::{
    convdiff_kernel, helmholtz_kernel, timespace_diffusion_kernel, ConvDiffKind, ConvDiffSpec,
    HelmholtzKernelSpec, TimeSpaceDiffusionSpec, TimeSpaceWaveSpec,
};
use crate::quadrature::QuadratureRule;
use crate::specfun::{bessel_i, bessel_j, bessel_jy, bessel_k, jn_zeros, Order};
use crate::transforms::{
    b_forward_with, b_inverse_with, calibrate, default_lambda_grid, TransformKind,
    TransformOptions,
};

/// A measured quantity and the bound it must stay below.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
}

impl CheckLine {
    pub fn new(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        CheckLine {
            name: name.into(),
            value,
            tolerance,
        }
    }

    /// NaN never passes.
    pub fn passed(&self) -> bool {
        self.value < self.tolerance
    }
}

/// Gram matrix of `z J_nu(l_i z) J_nu(l_j z)` on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalityReport {
    pub nu: f64,
    pub zeros: Vec<f64>,
    pub gram: Vec<Vec<f64>>,
    /// Largest `|G_ij|`, `i != j`.
    pub max_off_diagonal: f64,
    /// Largest relative error of `G_ii` against `J_{nu+1}(l_i)^2 / 2`.
    pub max_diagonal_error: f64,
}

/// Orthogonality of `J_nu(l_j z)` over the first `terms` zeros, integrated
/// with a `nodes`-point Gauss-Legendre rule.
pub fn orthogonality(nu: f64, terms: usize, nodes: usize) -> Result<OrthogonalityReport> {
    let order = Order::new(nu)?;
    let zeros = jn_zeros(order, terms)?;
    let rule = QuadratureRule::gauss_legendre(nodes, 0.0, 1.0)?;
    // Basis values at the nodes, once.
    let table = zeros
        .iter()
        .map(|&l| {
            rule.nodes()
                .iter()
                .map(|&z| bessel_j(nu, l * z))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut gram = vec![vec![0.0; terms]; terms];
    let (mut off, mut diag) = (0.0_f64, 0.0_f64);
    for i in 0..terms {
        for j in 0..=i {
            let g: f64 = rule
                .nodes()
                .iter()
                .zip(rule.weights())
                .enumerate()
                .map(|(q, (&z, &w))| w * z * table[i][q] * table[j][q])
                .sum();
            gram[i][j] = g;
            gram[j][i] = g;
            if i == j {
                let exact = 0.5 * bessel_j(nu + 1.0, zeros[i])?.powi(2);
                diag = diag.max(((g - exact) / exact).abs());
            } else {
                off = off.max(g.abs());
            }
        }
    }
    Ok(OrthogonalityReport {
        nu,
        zeros,
        gram,
        max_off_diagonal: off,
        max_diagonal_error: diag,
    })
}

/// Zero-finding summary for one order.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroReport {
    pub nu: f64,
    pub zeros: Vec<f64>,
    /// Largest `|J_nu(l_j)|`.
    pub max_residual: f64,
    /// `j_{nu,k} < j_{nu+1,k} < j_{nu,k+1}` for every k.
    pub interlaced: bool,
}

/// Special-function fidelity summary.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecfunReport {
    /// Relative error of `J_{1/2}` against `sqrt(2/pi x) sin x`.
    pub j_half_error: f64,
    /// Relative error of `K_{1/2}` against `sqrt(pi/2x) e^{-x}`.
    pub k_half_error: f64,
    /// Scaled residual of the three-term recurrences for J, Y and I.
    pub recurrence_error: f64,
    /// Relative error of `J_{nu+1} Y_nu - J_nu Y_{nu+1} = 2/(pi x)`.
    pub wronskian_error: f64,
    pub zeros: Vec<ZeroReport>,
}

impl SpecfunReport {
    pub fn max_zero_residual(&self) -> f64 {
        self.zeros.iter().map(|z| z.max_residual).fold(0.0, f64::max)
    }

    pub fn all_interlaced(&self) -> bool {
        self.zeros.iter().all(|z| z.interlaced)
    }
}

/// `count` equispaced points on `[a, b]`, ends included.
fn grid(a: f64, b: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| a + (b - a) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Closed forms, recurrences, Wronskian and zeros on `points` equispaced
/// arguments of `[0.1, 20]`, with `zero_count` zeros of `J_0`, `J_1`, `J_{1/2}`.
pub fn specfun_fidelity(points: usize, zero_count: usize) -> Result<SpecfunReport> {
    let xs = grid(0.1, 20.0, points.max(2));
    let mut j_half = 0.0_f64;
    let mut k_half = 0.0_f64;
    for &x in &xs {
        let j = (2.0 / (PI * x)).sqrt() * x.sin();
        let k = (PI / (2.0 * x)).sqrt() * (-x).exp();
        j_half = j_half.max(((bessel_j(0.5, x)? - j) / j).abs());
        k_half = k_half.max(((bessel_k(0.5, x)? - k) / k).abs());
    }

    let mut recurrence = 0.0_f64;
    let mut wronskian = 0.0_f64;
    for &nu in &[0.5, 1.0, 1.3, 2.5, 4.0] {
        for &x in &xs {
            let c = 2.0 * nu / x;
            let (jm, ym) = bessel_jy(Order::new(nu - 1.0)?, x)?;
            let (j0, y0) = bessel_jy(Order::new(nu)?, x)?;
            let (jp, yp) = bessel_jy(Order::new(nu + 1.0)?, x)?;
            let (im, i0, ip) = (bessel_i(nu - 1.0, x)?, bessel_i(nu, x)?, bessel_i(nu + 1.0, x)?);
            for (sum, scale) in [
                (jm + jp - c * j0, jm.abs().max(jp.abs()).max((c * j0).abs())),
                (ym + yp - c * y0, ym.abs().max(yp.abs()).max((c * y0).abs())),
                (im - ip - c * i0, im.abs().max(ip.abs()).max((c * i0).abs())),
            ] {
                recurrence = recurrence.max(sum.abs() / scale);
            }
            let w = 2.0 / (PI * x);
            wronskian = wronskian.max(((jp * y0 - j0 * yp - w) / w).abs());
        }
    }

    let mut zeros = Vec::new();
    for &nu in &[0.0, 1.0, 0.5] {
        let z = jn_zeros(Order::new(nu)?, zero_count)?;
        let next = jn_zeros(Order::new(nu + 1.0)?, zero_count)?;
        let max_residual = z
            .iter()
            .map(|&l| bessel_j(nu, l).map(f64::abs))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let interlaced = (0..zero_count).all(|k| {
            z[k] < next[k] && (k + 1 == zero_count || next[k] < z[k + 1])
        });
        zeros.push(ZeroReport {
            nu,
            zeros: z,
            max_residual,
            interlaced,
        });
    }

    Ok(SpecfunReport {
        j_half_error: j_half,
        k_half_error: k_half,
        recurrence_error: recurrence,
        wronskian_error: wronskian,
        zeros,
    })
}

/// Radial Laplacian `f'' + (n-1)/r f'` by central differences.
fn radial_laplacian<F: Fn(f64) -> Result<f64>>(f: F, n: f64, r: f64, h: f64) -> Result<f64> {
    let (fm, f0, fp) = (f(r - h)?, f(r)?, f(r + h)?);
    Ok((fp - 2.0 * f0 + fm) / (h * h) + (n - 1.0) / r * (fp - fm) / (2.0 * h))
}

/// `|lap phi + l^2 phi|` for the Helmholtz kernel at `r > h`.
pub fn helmholtz_residual(spec: &HelmholtzKernelSpec, r: f64, h: f64) -> Result<f64> {
    let l2 = spec.effective_scale().powi(2);
    let lap = radial_laplacian(|s| helmholtz_kernel(spec, s), spec.n(), r, h)?;
    Ok((lap + l2 * helmholtz_kernel(spec, r)?).abs())
}

/// `|D lap u + v . grad u - k u|` by second-order central differences in the
/// Cartesian coordinates of `x` (real part of the kernel).
pub fn convdiff_residual(
    spec: &ConvDiffSpec,
    x: &[f64],
    center: &[f64],
    which: ConvDiffKind,
    h: f64,
) -> Result<f64> {
    let u = |p: &[f64]| convdiff_kernel(spec, p, center, which).map(|z| z.re);
    let u0 = u(x)?;
    let mut lap = 0.0;
    let mut adv = 0.0;
    let mut p = x.to_vec();
    for (i, &vi) in spec.velocity().iter().enumerate() {
        p[i] = x[i] + h;
        let up = u(&p)?;
        p[i] = x[i] - h;
        let um = u(&p)?;
        p[i] = x[i];
        lap += (up - 2.0 * u0 + um) / (h * h);
        adv += vi * (up - um) / (2.0 * h);
    }
    Ok((spec.diffusivity() * lap + adv - spec.reaction() * u0).abs())
}

/// `|d_t phi - a^2 lap phi|` for the time-space diffusion kernel at
/// `r > h`, `dt > h`.
pub fn heat_residual(spec: &TimeSpaceDiffusionSpec, r: f64, dt: f64, h: f64) -> Result<f64> {
    let phi = |s: f64, t: f64| timespace_diffusion_kernel(spec, s, t);
    let dphi = (phi(r, dt + h)? - phi(r, dt - h)?) / (2.0 * h);
    let lap = radial_laplacian(|s| phi(s, dt), spec.n(), r, h)?;
    Ok((dphi - spec.a().powi(2) * lap).abs())
}

/// `(|T'' + (c l)^2 T|, |lap phi_sp + l^2 phi_sp|)` for the wave kernel factors.
pub fn wave_factor_residuals(spec: &TimeSpaceWaveSpec, r: f64, dt: f64, h: f64) -> Result<(f64, f64)> {
    let t = |s: f64| spec.temporal_factor(s);
    let w2 = (spec.c() * spec.lambda()).powi(2);
    let tpp = (t(dt + h) - 2.0 * t(dt) + t(dt - h)) / (h * h);
    let temporal = (tpp + w2 * t(dt)).abs();
    let lap = radial_laplacian(|s| spec.spatial_factor(s), spec.n(), r, h)?;
    let spatial = (lap + spec.lambda().powi(2) * spec.spatial_factor(r)?).abs();
    Ok((temporal, spatial))
}

/// Off-centre points used by [`pde_residuals`].
pub const PDE_POINTS: [[f64; 2]; 5] = [[0.8, 0.3], [-0.5, 0.4], [0.2, -0.9], [1.2, 0.7], [-0.3, -0.2]];

/// The standard set of kernel PDE checks: convection-diffusion (general and
/// fundamental) at [`PDE_POINTS`] for `n = 2, v = (1, 0), D = 1, k = 1`,
/// the heat equation for the time-space diffusion kernel and the two wave
/// factor identities, all with step `h` and bound `tol`.
pub fn pde_residuals(h: f64, tol: f64) -> Result<Vec<CheckLine>> {
    let spec = ConvDiffSpec::new(2.0, vec![1.0, 0.0], 1.0, 1.0)?;
    let origin = [0.0, 0.0];
    let mut general = 0.0_f64;
    let mut fundamental = 0.0_f64;
    for p in &PDE_POINTS {
        general = general.max(convdiff_residual(&spec, p, &origin, ConvDiffKind::General, h)?);
        fundamental = fundamental.max(convdiff_residual(&spec, p, &origin, ConvDiffKind::Fundamental, h)?);
    }
    let heat_spec = TimeSpaceDiffusionSpec::new(2.0, 1.0, 1.0)?;
    let mut heat = 0.0_f64;
    for &(r, dt) in &[(0.6, 0.5), (1.5, 0.2), (0.3, 1.0)] {
        heat = heat.max(heat_residual(&heat_spec, r, dt, h)?);
    }
    let wave = TimeSpaceWaveSpec::new(2.0, 1.5, 2.0, 1.0, 0.5)?;
    let (mut temporal, mut spatial) = (0.0_f64, 0.0_f64);
    for &(r, dt) in &[(0.6, 0.5), (1.5, 0.9), (0.3, 2.0)] {
        let (a, b) = wave_factor_residuals(&wave, r, dt, h)?;
        temporal = temporal.max(a);
        spatial = spatial.max(b);
    }
    Ok(vec![
        CheckLine::new("convdiff general", general, tol),
        CheckLine::new("convdiff fundamental", fundamental, tol),
        CheckLine::new("heat equation", heat, tol),
        CheckLine::new("wave temporal factor", temporal, tol),
        CheckLine::new("wave spatial factor", spatial, tol),
    ])
}

/// Max error of `b_inverse(b_forward(f))` on `radii`, using the default
/// grid and the calibrated constants for `n`.
pub fn b_roundtrip<F: Fn(f64) -> f64>(
    f: F,
    n: f64,
    radii: &[f64],
    opts: &TransformOptions,
) -> Result<f64> {
    let cal = calibrate(n, TransformKind::B)?;
    let spec = b_forward_with(&f, n, &default_lambda_grid(), opts)?;
    let rec = b_inverse_with(&spec, &cal, radii, opts)?;
    Ok(rec
        .radii()
        .iter()
        .zip(rec.values())
        .map(|(&r, &v)| (v - f(r)).abs())
        .fold(0.0, f64::max))
}
