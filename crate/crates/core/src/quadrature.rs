//! Gauss-Legendre rules and truncated semi-infinite integration.
//!
//! Every integral in the crate goes through here, with fixed node counts, so
//! results are reproducible bit-for-bit.

use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that can be integrated: real or complex.
pub trait Integrand:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(&self) -> f64;
    fn is_finite_value(&self) -> bool;
    /// Wynn epsilon extrapolation of a sequence of partial sums.
    fn extrapolate(seq: &[Self]) -> Self;
}

impl Integrand for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
    fn extrapolate(seq: &[Self]) -> Self {
        wynn_epsilon(seq)
    }
}

impl Integrand for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn extrapolate(seq: &[Self]) -> Self {
        let re: Vec<f64> = seq.iter().map(|z| z.re).collect();
        let im: Vec<f64> = seq.iter().map(|z| z.im).collect();
        Complex64::new(wynn_epsilon(&re), wynn_epsilon(&im))
    }
}

/// A quadrature rule on a finite interval.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    a: f64,
    b: f64,
}

impl QuadratureRule {
    /// `count`-point Gauss-Legendre rule on `[a, b]`, exact for polynomials of
    /// degree `2 count - 1`.
    pub fn gauss_legendre(count: usize, a: f64, b: f64) -> Result<Self> {
        check_interval(a, b)?;
        if count == 0 {
            return Err(Error::InvalidParameter("node count must be >= 1".into()));
        }
        let (x, w) = legendre_nodes(count);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        Ok(QuadratureRule {
            nodes: x.iter().map(|t| mid + half * t).collect(),
            weights: w.iter().map(|v| half * v).collect(),
            a,
            b,
        })
    }

    /// Composite rule: `panels` equal panels of `per_panel`-point Gauss-Legendre.
    pub fn composite(panels: usize, per_panel: usize, a: f64, b: f64) -> Result<Self> {
        check_interval(a, b)?;
        if panels == 0 || per_panel == 0 {
            return Err(Error::InvalidParameter(
                "panel and node counts must be >= 1".into(),
            ));
        }
        let (x, w) = legendre_nodes(per_panel);
        let width = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * per_panel);
        let mut weights = Vec::with_capacity(panels * per_panel);
        for p in 0..panels {
            let lo = a + p as f64 * width;
            let hi = if p + 1 == panels { b } else { lo + width };
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (t, v) in x.iter().zip(&w) {
                nodes.push(mid + half * t);
                weights.push(half * v);
            }
        }
        Ok(QuadratureRule {
            nodes,
            weights,
            a,
            b,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sum w_i f(x_i)`; a non-finite value is reported with its node.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        self.try_integrate(|x| Ok(f(x)))
    }

    /// As [`integrate`](Self::integrate) for fallible (and possibly complex) integrands.
    pub fn try_integrate<T, F>(&self, f: F) -> Result<T>
    where
        T: Integrand,
        F: Fn(f64) -> Result<T>,
    {
        let mut acc = T::default();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let v = f(x)?;
            if !v.is_finite_value() {
                return Err(Error::NonFiniteIntegrand {
                    x,
                    value: v.magnitude(),
                });
            }
            acc = acc + v * w;
        }
        Ok(acc)
    }
}

/// Build a Gauss-Legendre rule (free-function form).
pub fn make_gauss_legendre(count: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    QuadratureRule::gauss_legendre(count, a, b)
}

/// Apply a rule to a real integrand.
pub fn integrate<F: Fn(f64) -> f64>(rule: &QuadratureRule, f: F) -> Result<f64> {
    rule.integrate(f)
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if a.is_finite() && b.is_finite() && a < b {
        Ok(())
    } else {
        Err(Error::InvalidInterval { a, b })
    }
}

/// Nodes and weights on [-1, 1], ascending.
fn legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let k = i as f64 + 1.0;
        let nf = n as f64;
        let theta = std::f64::consts::PI * (k - 0.25) / (nf + 0.5);
        let mut z = (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf)) * theta.cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_p(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 * z.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_p(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

// P_n(z) and P_n'(z) by the three-term recurrence.
fn legendre_p(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

const PANEL_NODES: usize = 24;

fn unit_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| {
        let (x, w) = legendre_nodes(PANEL_NODES);
        (
            x.iter().map(|t| 0.5 * (t + 1.0)).collect(),
            w.iter().map(|v| 0.5 * v).collect(),
        )
    })
}

/// Integrate over one panel with the fixed panel rule; also returns
/// `max |f|` over the nodes.
fn panel<T, F>(f: &F, lo: f64, hi: f64) -> Result<(T, f64)>
where
    T: Integrand,
    F: Fn(f64) -> Result<T>,
{
    let (x, w) = unit_rule();
    let width = hi - lo;
    let mut acc = T::default();
    let mut peak: f64 = 0.0;
    for (t, v) in x.iter().zip(w) {
        let r = lo + width * t;
        let val = f(r)?;
        if !val.is_finite_value() {
            return Err(Error::NonFiniteIntegrand {
                x: r,
                value: val.magnitude(),
            });
        }
        peak = peak.max(val.magnitude());
        acc = acc + val * (width * v);
    }
    Ok((acc, peak))
}

/// Panel `[0, width]` split dyadically towards the origin, so integrable
/// endpoint singularities (`r ln r`, fractional powers) are resolved.
fn graded_first_panel<T, F>(f: &F, width: f64) -> Result<(T, f64)>
where
    T: Integrand,
    F: Fn(f64) -> Result<T>,
{
    const LEVELS: i32 = 16;
    let mut acc = T::default();
    let mut peak: f64 = 0.0;
    let mut lo = 0.0;
    for k in (0..=LEVELS).rev() {
        let hi = width * 2f64.powi(-k);
        let (v, p) = panel(f, lo, hi)?;
        acc = acc + v;
        peak = peak.max(p);
        lo = hi;
    }
    Ok((acc, peak))
}

/// Decay class of a semi-infinite integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayHint {
    /// Envelope like `exp(-c r^2)`.
    Gaussian,
    /// Envelope like `exp(-c r)`.
    Exponential,
    /// A Bessel-type oscillation of the given angular frequency on top of an
    /// envelope that may decay only algebraically. Panels follow the zero
    /// spacing `pi / frequency` and partial sums are Wynn-accelerated.
    /// A frequency of zero selects geometrically growing panels.
    OscillatoryBessel { frequency: f64 },
}

const PANEL_BUDGET: usize = 20_000;
const QUIET_PANELS: usize = 3;

/// Integrate `f` over `(0, inf)` by summing Gauss-Legendre panels until the
/// estimated tail is below `tol`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(f: F, hint: DecayHint, tol: f64) -> Result<f64> {
    try_integrate_semi_infinite(|r| Ok(f(r)), hint, tol)
}

/// Fallible / complex form of [`integrate_semi_infinite`].
pub fn try_integrate_semi_infinite<T, F>(f: F, hint: DecayHint, tol: f64) -> Result<T>
where
    T: Integrand,
    F: Fn(f64) -> Result<T>,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be > 0, got {tol}")));
    }
    match hint {
        DecayHint::Gaussian => decaying_panels(&f, 0.5, tol),
        DecayHint::Exponential => decaying_panels(&f, 1.0, tol),
        DecayHint::OscillatoryBessel { frequency } => {
            if !(frequency >= 0.0 && frequency.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "oscillation frequency must be finite and >= 0, got {frequency}"
                )));
            }
            oscillatory_panels(&f, frequency, tol)
        }
    }
}

fn decaying_panels<T, F>(f: &F, width: f64, tol: f64) -> Result<T>
where
    T: Integrand,
    F: Fn(f64) -> Result<T>,
{
    let (mut total, _) = graded_first_panel(f, width)?;
    let mut quiet = 0;
    for p in 1..PANEL_BUDGET {
        let lo = p as f64 * width;
        let (v, peak) = panel(f, lo, lo + width)?;
        total = total + v;
        // Tail bound from the envelope, immune to oscillatory cancellation.
        if peak * width < 1e-3 * tol {
            quiet += 1;
            if quiet >= QUIET_PANELS {
                return Ok(total);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::Divergence {
        panels: PANEL_BUDGET,
    })
}

fn oscillatory_panels<T, F>(f: &F, frequency: f64, tol: f64) -> Result<T>
where
    T: Integrand,
    F: Fn(f64) -> Result<T>,
{
    let half_period = if frequency > 0.0 {
        std::f64::consts::PI / frequency
    } else {
        f64::INFINITY
    };
    let first = half_period.min(1.0);
    let (mut total, _) = graded_first_panel(f, first)?;
    let mut lo = first;
    let mut quiet = 0;
    let mut partial: Vec<T> = Vec::new();
    let mut last_estimate: Option<T> = None;
    let mut stable = 0;
    for _ in 0..PANEL_BUDGET {
        // Widths grow geometrically until they reach the half period.
        let width = lo.max(1.0).min(half_period);
        let (v, peak) = panel(f, lo, lo + width)?;
        total = total + v;
        lo += width;
        if peak * width < 1e-3 * tol {
            quiet += 1;
            if quiet >= QUIET_PANELS {
                return Ok(total);
            }
        } else {
            quiet = 0;
        }
        if width == half_period {
            partial.push(total);
            if partial.len() > 40 {
                partial.remove(0);
            }
            if partial.len() >= 8 {
                let est = T::extrapolate(&partial);
                if let Some(prev) = last_estimate {
                    if (est - prev).magnitude() < tol {
                        stable += 1;
                        if stable >= 2 {
                            return Ok(est);
                        }
                    } else {
                        stable = 0;
                    }
                }
                last_estimate = Some(est);
            }
        }
    }
    Err(Error::Divergence {
        panels: PANEL_BUDGET,
    })
}

/// Wynn's epsilon algorithm; returns the highest-order even-column estimate.
fn wynn_epsilon(s: &[f64]) -> f64 {
    let n = s.len();
    if n < 3 {
        return *s.last().unwrap_or(&0.0);
    }
    let mut prev = vec![0.0; n + 1];
    let mut cur = s.to_vec();
    let mut best = s[n - 1];
    for k in 1..n {
        let m = cur.len() - 1;
        let mut next = Vec::with_capacity(m);
        for j in 0..m {
            let d = cur[j + 1] - cur[j];
            if d == 0.0 || !d.is_finite() {
                return if k % 2 == 1 { cur[j + 1] } else { best };
            }
            next.push(prev[j + 1] + 1.0 / d);
        }
        prev = cur;
        cur = next;
        if k % 2 == 0 {
            if let Some(&v) = cur.last() {
                if v.is_finite() {
                    best = v;
                }
            }
        }
        if cur.len() < 2 {
            break;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{bessel_j, jn_zeros, Order};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn two_point_rule_integrates_square_exactly() {
        let rule = make_gauss_legendre(2, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(integrate(&rule, |x| x * x).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn weights_sum_and_node_order() {
        for &n in &[1, 2, 7, 64, 512, 2048] {
            let rule = make_gauss_legendre(n, 0.0, 1.0).unwrap();
            let s: f64 = rule.weights().iter().sum();
            assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
            assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
            assert!(rule.nodes().iter().all(|&x| x > 0.0 && x < 1.0));
            assert!(rule.weights().iter().all(|&w| w > 0.0));
        }
        let rule = make_gauss_legendre(16, 0.0, 1.0).unwrap();
        assert_eq!(integrate(&rule, |_| 1.0).unwrap(), rule.weights().iter().sum::<f64>());
    }

    #[test]
    fn sine_on_zero_pi() {
        let rule = make_gauss_legendre(16, 0.0, PI).unwrap();
        assert_abs_diff_eq!(integrate(&rule, f64::sin).unwrap(), 2.0, epsilon = 1e-10);
    }

    #[test]
    fn invalid_interval_and_count() {
        assert!(matches!(
            make_gauss_legendre(4, 1.0, 1.0),
            Err(Error::InvalidInterval { .. })
        ));
        assert!(make_gauss_legendre(0, 0.0, 1.0).is_err());
    }

    #[test]
    fn non_finite_integrand_names_node() {
        let rule = make_gauss_legendre(3, -1.0, 1.0).unwrap();
        match integrate(&rule, |x| if x == 0.0 { f64::NAN } else { 1.0 }) {
            Err(Error::NonFiniteIntegrand { x, .. }) => assert_eq!(x, 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bessel_orthogonality_with_64_nodes() {
        let z = jn_zeros(Order::new(0.0).unwrap(), 2).unwrap();
        let rule = make_gauss_legendre(64, 0.0, 1.0).unwrap();
        let off = integrate(&rule, |x| {
            x * bessel_j(0.0, z[0] * x).unwrap() * bessel_j(0.0, z[1] * x).unwrap()
        })
        .unwrap();
        assert!(off.abs() < 1e-12, "{off}");
        let diag = integrate(&rule, |x| x * bessel_j(0.0, z[0] * x).unwrap().powi(2)).unwrap();
        let expected = 0.5 * bessel_j(1.0, z[0]).unwrap().powi(2);
        assert_abs_diff_eq!(diag, expected, epsilon = 1e-14);
        assert_abs_diff_eq!(diag, 0.134_757, epsilon = 1e-6);
    }

    #[test]
    fn first_series_coefficient_of_paraboloid() {
        // Coefficient of 1 - r^2 on J_0(l_1 r), n = 2, R = 1; checked against a 2048-node oracle.
        let l1 = jn_zeros(Order::new(0.0).unwrap(), 1).unwrap()[0];
        let norm = 0.5 * bessel_j(1.0, l1).unwrap().powi(2);
        let g = |r: f64| r * (1.0 - r * r) * bessel_j(0.0, l1 * r).unwrap() / norm;
        let coarse = integrate(&make_gauss_legendre(32, 0.0, 1.0).unwrap(), g).unwrap();
        let oracle = integrate(&make_gauss_legendre(2048, 0.0, 1.0).unwrap(), g).unwrap();
        assert_abs_diff_eq!(coarse, oracle, epsilon = 1e-13);
        let closed = 8.0 / (l1.powi(3) * bessel_j(1.0, l1).unwrap());
        assert_abs_diff_eq!(oracle, closed, epsilon = 1e-13);
    }

    #[test]
    fn semi_infinite_gaussian_hankel_pair() {
        let v = integrate_semi_infinite(
            |r| r * (-0.5 * r * r).exp() * bessel_j(0.0, r).unwrap(),
            DecayHint::Gaussian,
            1e-12,
        )
        .unwrap();
        assert_abs_diff_eq!(v, (-0.5f64).exp(), epsilon = 1e-8);
        // brute-force dense quadrature to 20
        let dense = make_gauss_legendre(2000, 0.0, 20.0).unwrap();
        let oracle = integrate(&dense, |r| {
            r * (-0.5 * r * r).exp() * bessel_j(0.0, r).unwrap()
        })
        .unwrap();
        assert_abs_diff_eq!(v, oracle, epsilon = 1e-12);
    }

    #[test]
    fn semi_infinite_exponential_and_gaussian_moment() {
        let v = integrate_semi_infinite(|r| (-r).exp(), DecayHint::Exponential, 1e-12).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
        let v = integrate_semi_infinite(|r| r * (-0.5 * r * r).exp(), DecayHint::Gaussian, 1e-12)
            .unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn semi_infinite_algebraic_with_oscillation() {
        // int_0^inf sin(w r) / (1 + r^2) ... use the Hankel pair
        // int_0^inf r J_0(l r) / (1 + r^2)^2 dr = (l/2) K_1(l).
        let l = 1.5;
        let v = integrate_semi_infinite(
            |r| r * bessel_j(0.0, l * r).unwrap() / (1.0 + r * r).powi(2),
            DecayHint::OscillatoryBessel { frequency: l },
            1e-11,
        )
        .unwrap();
        let exact = 0.5 * l * crate::specfun::bessel_k(1.0, l).unwrap();
        assert_abs_diff_eq!(v, exact, epsilon = 1e-9);
        // zero frequency: plain algebraic tail, int r/(1+r^2)^2 = 1/2
        let v = integrate_semi_infinite(
            |r| r / (1.0 + r * r).powi(2),
            DecayHint::OscillatoryBessel { frequency: 0.0 },
            1e-11,
        )
        .unwrap();
        assert_abs_diff_eq!(v, 0.5, epsilon = 1e-9);
    }

    #[test]
    fn divergent_integral_reports_divergence() {
        let r = integrate_semi_infinite(|r| 1.0 / (1.0 + r), DecayHint::Exponential, 1e-10);
        assert!(matches!(r, Err(Error::Divergence { .. })));
    }

    #[test]
    fn refinement_consistency() {
        let f = |x: f64| (3.0 * x).cos() * (-x).exp();
        let a = integrate(&make_gauss_legendre(12, 0.0, 2.0).unwrap(), f).unwrap();
        let b = integrate(&make_gauss_legendre(24, 0.0, 2.0).unwrap(), f).unwrap();
        assert!((a - b).abs() < 10.0 * 1e-12);
    }

    proptest! {
        #[test]
        fn exact_for_polynomials(count in 1usize..20, coeffs in prop::collection::vec(-1.0f64..1.0, 40)) {
            let degree = 2 * count - 1;
            let c = &coeffs[..=degree.min(39)];
            let rule = make_gauss_legendre(count, 0.0, 1.0).unwrap();
            let got = integrate(&rule, |x| c.iter().rev().fold(0.0, |acc, k| acc * x + k)).unwrap();
            let exact: f64 = c.iter().enumerate().map(|(k, a)| a / (k as f64 + 1.0)).sum();
            prop_assert!((got - exact).abs() < 1e-12, "{} vs {}", got, exact);
        }
    }
}
