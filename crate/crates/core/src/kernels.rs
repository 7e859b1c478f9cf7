//! Closed-form kernel families.
//!
//! All radial kernels take the dimension `n` as a real number `>= 1`; the
//! Bessel order is `n/2 - 1`. For `n >= 2` (and fractional `1 < n < 2`) the
//! Helmholtz kernel is `(l/2 pi r)^nu J_nu(l r)`, evaluated through
//! `J_nu(x)/(x/2)^nu` so that the origin is not special; `n = 1` uses
//! `sin(l r) / (2 l)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::specfun::{
    bessel_i_scaled, bessel_ik, bessel_j_scaled, bessel_k_neg_imag, ComplexValue, Order,
};

/// Euclidean distance between two points of equal dimension.
pub fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

fn check_dimension(n: f64) -> Result<Order> {
    Order::from_dimension(n)
}

/// Non-singular Helmholtz kernel parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelmholtzKernelSpec {
    n: f64,
    lambda: f64,
    radius: Option<f64>,
    order: Order,
}

impl HelmholtzKernelSpec {
    /// `lambda = 0` selects the constant kernel. `radius`, when set, scales
    /// the argument to `lambda r / R`.
    pub fn new(n: f64, lambda: f64, radius: Option<f64>) -> Result<Self> {
        let order = check_dimension(n)?;
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "wavenumber must be finite and >= 0, got {lambda}"
            )));
        }
        if let Some(r) = radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "radius must be positive, got {r}"
                )));
            }
        }
        Ok(HelmholtzKernelSpec {
            n,
            lambda,
            radius,
            order,
        })
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn radius(&self) -> Option<f64> {
        self.radius
    }

    pub fn order(&self) -> Order {
        self.order
    }

    /// The wavenumber actually multiplying `r`: `lambda / R` or `lambda`.
    pub fn effective_scale(&self) -> f64 {
        match self.radius {
            Some(r) => self.lambda / r,
            None => self.lambda,
        }
    }
}

/// Helmholtz kernel value at distance `r >= 0`.
///
/// The prefactor uses the same effective scale as the Bessel argument, so the
/// kernel is a function of `lambda r / R` alone (up to the scale power).
pub fn helmholtz_kernel(spec: &HelmholtzKernelSpec, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(domain("helmholtz_kernel", format!("r must be >= 0, got {r}")));
    }
    if spec.lambda == 0.0 {
        return Ok(1.0);
    }
    let scale = spec.effective_scale();
    if spec.n == 1.0 {
        return Ok((scale * r).sin() / (2.0 * scale));
    }
    helmholtz_radial(spec.order, scale, r)
}

// (l / 2 pi r)^nu J_nu(l r) = (l^2 / 4 pi)^nu * J_nu(x) / (x/2)^nu,  x = l r
pub(crate) fn helmholtz_radial(order: Order, scale: f64, r: f64) -> Result<f64> {
    let nu = order.value();
    let pref = (scale * scale / (4.0 * PI)).powf(nu);
    Ok(pref * bessel_j_scaled(order, scale * r)?)
}

/// Bi-orthogonal (Hankel/K) wavelet `g_n(lambda r)` at `r > 0`:
/// `(1/2 pi) (-i l / 2 pi r)^nu K_nu(-i l r)`.
///
/// `K_nu(-i x)` is evaluated as `(i pi/2) e^{i nu pi/2} H1_nu(x)`.
pub fn dual_kernel_g(spec: &HelmholtzKernelSpec, r: f64) -> Result<ComplexValue> {
    if !(r > 0.0) {
        return Err(domain("dual_kernel_g", format!("singular at r = {r}; need r > 0")));
    }
    if spec.n < 2.0 {
        return Err(domain("dual_kernel_g", format!("requires n >= 2, got {}", spec.n)));
    }
    if spec.lambda <= 0.0 {
        return Err(domain("dual_kernel_g", "requires lambda > 0"));
    }
    let l = spec.effective_scale();
    let nu = spec.order.value();
    // (-i)^nu on the principal branch
    let pref = Complex64::from_polar((l / (2.0 * PI * r)).powf(nu), -0.5 * PI * nu);
    let k = bessel_k_neg_imag(spec.order, l * r)?;
    Ok(pref * k / (2.0 * PI))
}

/// The dual basis: complex conjugate of [`dual_kernel_g`].
pub fn dual_kernel_g_conj(spec: &HelmholtzKernelSpec, r: f64) -> Result<ComplexValue> {
    Ok(dual_kernel_g(spec, r)?.conj())
}

/// Convection-diffusion-reaction parameters for `D lap u + v . grad u - k u = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvDiffSpec {
    n: f64,
    v: Vec<f64>,
    d: f64,
    k: f64,
    order: Order,
}

impl ConvDiffSpec {
    pub fn new(n: f64, v: Vec<f64>, d: f64, k: f64) -> Result<Self> {
        let order = check_dimension(n)?;
        let mut problems = Vec::new();
        if !(d > 0.0 && d.is_finite()) {
            problems.push(format!("diffusivity D must be > 0, got {d}"));
        }
        if !(k >= 0.0 && k.is_finite()) {
            problems.push(format!("reaction coefficient k must be >= 0, got {k}"));
        }
        if v.is_empty() || v.iter().any(|c| !c.is_finite()) {
            problems.push("velocity must be a non-empty vector of finite values".to_string());
        }
        if !problems.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "ConvDiffSpec: {}",
                problems.join("; ")
            )));
        }
        Ok(ConvDiffSpec { n, v, d, k, order })
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn velocity(&self) -> &[f64] {
        &self.v
    }

    pub fn diffusivity(&self) -> f64 {
        self.d
    }

    pub fn reaction(&self) -> f64 {
        self.k
    }

    pub fn speed(&self) -> f64 {
        self.v.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// `mu = sqrt((|v| / 2D)^2 + k / D)`, recomputed on every call.
    pub fn mu(&self) -> f64 {
        let a = self.speed() / (2.0 * self.d);
        (a * a + self.k / self.d).sqrt()
    }
}

/// The derived radial wavenumber of a convection-diffusion spec.
pub fn convdiff_mu(spec: &ConvDiffSpec) -> f64 {
    spec.mu()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvDiffKind {
    /// Non-singular solution with `I_nu`.
    General,
    /// Fundamental solution with `K_nu`.
    Fundamental,
    /// Bi-orthogonal wavelet with `N_nu = I_nu + i K_nu`.
    Dual,
}

/// Convection-diffusion kernel at point `x` for a source at `center`.
///
/// The exponential factor is the directional `exp(-v . (x - center) / 2D)`.
/// `General` and `Fundamental` return a value with zero imaginary part.
pub fn convdiff_kernel(
    spec: &ConvDiffSpec,
    x: &[f64],
    center: &[f64],
    which: ConvDiffKind,
) -> Result<ComplexValue> {
    if x.len() != spec.v.len() || center.len() != spec.v.len() {
        return Err(Error::InvalidParameter(format!(
            "point dimensions ({}, {}) must match the velocity dimension {}",
            x.len(),
            center.len(),
            spec.v.len()
        )));
    }
    let diff: Vec<f64> = x.iter().zip(center).map(|(a, b)| a - b).collect();
    let r = diff.iter().map(|c| c * c).sum::<f64>().sqrt();
    let dot: f64 = spec.v.iter().zip(&diff).map(|(a, b)| a * b).sum();
    let expo = (-dot / (2.0 * spec.d)).exp();
    let mu = spec.mu();
    let nu = spec.order.value();
    let lead = expo / (2.0 * PI);

    let general = || -> Result<f64> {
        // (mu / 2 pi r)^nu I_nu(mu r) = (mu^2 / 4 pi)^nu I_nu(x)/(x/2)^nu
        let pref = (mu * mu / (4.0 * PI)).powf(nu);
        let v = lead * pref * bessel_i_scaled(spec.order, mu * r)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(domain("convdiff_kernel", "general kernel is singular for mu = 0 and n < 2"))
        }
    };
    let fundamental = || -> Result<f64> {
        if !(r > 0.0) {
            return Err(domain("convdiff_kernel", "fundamental solution is singular at the center"));
        }
        if !(mu > 0.0) {
            return Err(domain("convdiff_kernel", "fundamental solution requires mu > 0"));
        }
        let (_, k) = bessel_ik(spec.order, mu * r)?;
        Ok(lead * (mu / (2.0 * PI * r)).powf(nu) * k)
    };

    Ok(match which {
        ConvDiffKind::General => Complex64::new(general()?, 0.0),
        ConvDiffKind::Fundamental => Complex64::new(fundamental()?, 0.0),
        ConvDiffKind::Dual => Complex64::new(general()?, fundamental()?),
    })
}

/// Time-space diffusion kernel parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSpaceDiffusionSpec {
    n: f64,
    lambda: f64,
    a: f64,
    order: Order,
}

impl TimeSpaceDiffusionSpec {
    pub fn new(n: f64, lambda: f64, a: f64) -> Result<Self> {
        let order = check_dimension(n)?;
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "TimeSpaceDiffusionSpec: lambda must be > 0, got {lambda}"
            )));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "TimeSpaceDiffusionSpec: diffusion coefficient a must be > 0, got {a}"
            )));
        }
        Ok(TimeSpaceDiffusionSpec { n, lambda, a, order })
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn order(&self) -> Order {
        self.order
    }

    fn spatial(&self) -> HelmholtzKernelSpec {
        HelmholtzKernelSpec {
            n: self.n,
            lambda: self.lambda,
            radius: None,
            order: self.order,
        }
    }
}

/// `H(dt) exp(-a^2 l^2 dt) phi_n(l r)`, with `H(0) = 1`.
pub fn timespace_diffusion_kernel(spec: &TimeSpaceDiffusionSpec, r: f64, dt: f64) -> Result<f64> {
    if dt < 0.0 {
        return Ok(0.0);
    }
    let decay = (-(spec.a * spec.lambda).powi(2) * dt).exp();
    Ok(decay * helmholtz_kernel(&spec.spatial(), r)?)
}

/// Time-space wave kernel parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSpaceWaveSpec {
    n: f64,
    lambda: f64,
    c: f64,
    alpha: f64,
    beta: f64,
    order: Order,
}

impl TimeSpaceWaveSpec {
    pub fn new(n: f64, lambda: f64, c: f64, alpha: f64, beta: f64) -> Result<Self> {
        let order = check_dimension(n)?;
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "TimeSpaceWaveSpec: lambda must be > 0, got {lambda}"
            )));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "TimeSpaceWaveSpec: wave speed c must be > 0, got {c}"
            )));
        }
        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidParameter(
                "TimeSpaceWaveSpec: alpha and beta must be finite".into(),
            ));
        }
        Ok(TimeSpaceWaveSpec {
            n,
            lambda,
            c,
            alpha,
            beta,
            order,
        })
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `alpha cos(c l dt) + (beta / c l) sin(c l dt)`, without the Heaviside factors.
    pub fn temporal_factor(&self, dt: f64) -> f64 {
        let w = self.c * self.lambda;
        self.alpha * (w * dt).cos() + self.beta / w * (w * dt).sin()
    }

    /// `phi_n(l r)`, the spatial Helmholtz factor.
    pub fn spatial_factor(&self, r: f64) -> Result<f64> {
        helmholtz_kernel(
            &HelmholtzKernelSpec {
                n: self.n,
                lambda: self.lambda,
                radius: None,
                order: self.order,
            },
            r,
        )
    }
}

/// Wave kernel `T(dt) phi_n(l r) H(dt) H(c l dt - r)` with `H(0) = 1`.
///
/// The causality argument `c l dt - r` is used for every dimension.
pub fn timespace_wave_kernel(spec: &TimeSpaceWaveSpec, r: f64, dt: f64) -> Result<f64> {
    if dt < 0.0 || spec.c * spec.lambda * dt - r < 0.0 {
        return Ok(0.0);
    }
    Ok(spec.temporal_factor(dt) * spec.spatial_factor(r)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassicRbfKind {
    /// `sqrt(r^2 + c^2)`
    Multiquadric,
    /// `exp(-r^2 / c^2)`
    Gaussian,
    /// `(r^2 + c^2) ln sqrt(r^2 + c^2)`
    PreWaveletTps,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicRbfSpec {
    kind: ClassicRbfKind,
    c: f64,
}

impl ClassicRbfSpec {
    pub fn new(kind: ClassicRbfKind, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "ClassicRbfSpec: scale c must be > 0, got {c}"
            )));
        }
        Ok(ClassicRbfSpec { kind, c })
    }

    pub fn kind(&self) -> ClassicRbfKind {
        self.kind
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

pub fn classic_rbf(spec: &ClassicRbfSpec, r: f64) -> f64 {
    let c2 = spec.c * spec.c;
    match spec.kind {
        ClassicRbfKind::Multiquadric => (r * r + c2).sqrt(),
        ClassicRbfKind::Gaussian => (-r * r / c2).exp(),
        ClassicRbfKind::PreWaveletTps => {
            let s = r * r + c2;
            0.5 * s * s.ln()
        }
    }
}
