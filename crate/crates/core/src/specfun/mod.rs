//! Bessel functions J, Y, I, K of real order, Hankel functions and zeros of J.
//!
//! Evaluation uses Temme's series below `x = 2` and Steed/Temme continued
//! fractions above it (see [`bessel`]). Orders are restricted to
//! [`Order::MIN`]..=[`Order::MAX`], which covers `nu = n/2 - 1` for every real
//! dimension `1 <= n <= 122`.

mod bessel;
pub mod gamma;
mod zeros;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};

pub use gamma::{gamma, ln_gamma};
pub use zeros::jn_zeros;

/// Complex value returned by the Hankel-function family.
pub type ComplexValue = Complex64;

/// A validated Bessel order in `[-0.5, 60]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Order(f64);

impl Order {
    pub const MIN: f64 = -0.5;
    pub const MAX: f64 = 60.0;

    pub fn new(nu: f64) -> Result<Self> {
        if nu.is_finite() && (Self::MIN..=Self::MAX).contains(&nu) {
            Ok(Order(nu))
        } else {
            Err(Error::OrderOutOfRange(nu))
        }
    }

    /// Order `n/2 - 1` attached to dimension `n`.
    pub fn from_dimension(n: f64) -> Result<Self> {
        if !(n.is_finite() && n >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "dimension n = {n} must be a real number >= 1"
            )));
        }
        Self::new(0.5 * n - 1.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Order {
    type Error = Error;
    fn try_from(nu: f64) -> Result<Self> {
        Order::new(nu)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselKind {
    J,
    Y,
    I,
    K,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HankelKind {
    H1,
    H2,
}

/// Evaluate J, Y, I or K of the given order at `x`.
///
/// `x = 0` is accepted for J and I; Y and K require `x > 0`.
pub fn bessel_eval(kind: BesselKind, order: Order, x: f64) -> Result<f64> {
    let nu = order.value();
    if x.is_nan() {
        return Err(domain("bessel_eval", "argument is NaN"));
    }
    match kind {
        BesselKind::J | BesselKind::I if x == 0.0 => value_at_zero(nu),
        _ if x < 0.0 || (x == 0.0 && matches!(kind, BesselKind::Y | BesselKind::K)) => Err(
            domain("bessel_eval", format!("{kind:?} requires x > 0, got {x}")),
        ),
        BesselKind::J | BesselKind::Y => {
            let (j, y) = bessel::jy_any(nu, x)?;
            finite(if kind == BesselKind::J { j } else { y }, nu, x)
        }
        BesselKind::I | BesselKind::K => {
            let (i, k) = bessel::ik_any(nu, x)?;
            finite(if kind == BesselKind::I { i } else { k }, nu, x)
        }
    }
}

fn value_at_zero(nu: f64) -> Result<f64> {
    if nu == 0.0 {
        Ok(1.0)
    } else if nu > 0.0 {
        Ok(0.0)
    } else {
        Err(domain(
            "bessel_eval",
            format!("order {nu} < 0 is singular at x = 0"),
        ))
    }
}

fn finite(v: f64, nu: f64, x: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow {
            op: "bessel_eval",
            nu,
            x,
        })
    }
}

/// Shorthand for `bessel_eval(J, ...)` on an unvalidated order.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    bessel_eval(BesselKind::J, Order::new(nu)?, x)
}

pub fn bessel_y(nu: f64, x: f64) -> Result<f64> {
    bessel_eval(BesselKind::Y, Order::new(nu)?, x)
}

pub fn bessel_i(nu: f64, x: f64) -> Result<f64> {
    bessel_eval(BesselKind::I, Order::new(nu)?, x)
}

pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    bessel_eval(BesselKind::K, Order::new(nu)?, x)
}

/// J_nu and Y_nu together (one evaluation).
pub fn bessel_jy(order: Order, x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) {
        return Err(domain("bessel_jy", format!("x must be > 0, got {x}")));
    }
    let nu = order.value();
    let (j, y) = bessel::jy_any(nu, x)?;
    Ok((finite(j, nu, x)?, finite(y, nu, x)?))
}

/// I_nu and K_nu together (one evaluation).
pub fn bessel_ik(order: Order, x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) {
        return Err(domain("bessel_ik", format!("x must be > 0, got {x}")));
    }
    let nu = order.value();
    let (i, k) = bessel::ik_any(nu, x)?;
    Ok((finite(i, nu, x)?, finite(k, nu, x)?))
}

/// Hankel functions `H1 = J + iY`, `H2 = J - iY`.
pub fn hankel_eval(kind: HankelKind, order: Order, x: f64) -> Result<ComplexValue> {
    if !(x > 0.0) {
        return Err(domain("hankel_eval", format!("x must be > 0, got {x}")));
    }
    let (j, y) = bessel_jy(order, x)?;
    Ok(match kind {
        HankelKind::H1 => Complex64::new(j, y),
        HankelKind::H2 => Complex64::new(j, -y),
    })
}

/// `K_nu(-i x)` for real `x > 0`, through the Hankel function of the first
/// kind: `K_nu(-ix) = (i pi / 2) e^{i nu pi / 2} H1_nu(x)`.
///
/// The phase factor is 1 at `nu = 0`.
pub fn bessel_k_neg_imag(order: Order, x: f64) -> Result<ComplexValue> {
    let h1 = hankel_eval(HankelKind::H1, order, x)?;
    let phase = Complex64::from_polar(1.0, 0.5 * PI * order.value());
    Ok(Complex64::new(0.0, 0.5 * PI) * phase * h1)
}

/// Derivative of J_nu via `J'_nu = (nu/x) J_nu - J_{nu+1}`.
pub fn bessel_j_prime(order: Order, x: f64) -> Result<f64> {
    let nu = order.value();
    let j = bessel_eval(BesselKind::J, order, x)?;
    let j1 = bessel::jy_any(nu + 1.0, x)?.0;
    Ok(nu / x * j - j1)
}

/// `J_nu(x) / (x/2)^nu`, regular at `x = 0` where it equals `1/Gamma(nu+1)`.
pub fn bessel_j_scaled(order: Order, x: f64) -> Result<f64> {
    scaled(order, x, -1.0)
}

/// `I_nu(x) / (x/2)^nu`, regular at `x = 0` where it equals `1/Gamma(nu+1)`.
pub fn bessel_i_scaled(order: Order, x: f64) -> Result<f64> {
    scaled(order, x, 1.0)
}

fn scaled(order: Order, x: f64, sign: f64) -> Result<f64> {
    let nu = order.value();
    let x = x.abs();
    if x < 1.0 {
        // sum_k (sign x^2/4)^k / (k! Gamma(nu+k+1))
        let q = sign * 0.25 * x * x;
        let mut term = 1.0 / gamma(nu + 1.0);
        let mut sum = term;
        for k in 1..60 {
            let kf = k as f64;
            term *= q / (kf * (nu + kf));
            sum += term;
            if term.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        Ok(sum)
    } else {
        let v = if sign < 0.0 {
            bessel::jy_any(nu, x)?.0
        } else {
            bessel::ik_any(nu, x)?.0
        };
        finite(v / (0.5 * x).powf(nu), nu, x)
    }
}

/// J_nu for any real order (no range check). Used by recurrence checks that
/// step outside the public order range.
pub fn bessel_j_unchecked(nu: f64, x: f64) -> Result<f64> {
    if x == 0.0 {
        return value_at_zero(nu);
    }
    if !(x > 0.0) {
        return Err(domain("bessel_j_unchecked", format!("x must be >= 0, got {x}")));
    }
    Ok(bessel::jy_any(nu, x)?.0)
}

/// Y_nu for any real order (no range check).
pub fn bessel_y_unchecked(nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain("bessel_y_unchecked", format!("x must be > 0, got {x}")));
    }
    Ok(bessel::jy_any(nu, x)?.1)
}

/// I_nu for any real order (no range check).
pub fn bessel_i_unchecked(nu: f64, x: f64) -> Result<f64> {
    if x == 0.0 {
        return value_at_zero(nu);
    }
    if !(x > 0.0) {
        return Err(domain("bessel_i_unchecked", format!("x must be >= 0, got {x}")));
    }
    Ok(bessel::ik_any(nu, x)?.0)
}

/// K_nu for any real order (no range check).
pub fn bessel_k_unchecked(nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain("bessel_k_unchecked", format!("x must be > 0, got {x}")));
    }
    Ok(bessel::ik_any(nu, x)?.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ord(nu: f64) -> Order {
        Order::new(nu).unwrap()
    }

    #[test]
    fn values_at_origin() {
        assert_eq!(bessel_eval(BesselKind::J, ord(0.0), 0.0).unwrap(), 1.0);
        assert_eq!(bessel_eval(BesselKind::I, ord(0.0), 0.0).unwrap(), 1.0);
        assert_eq!(bessel_eval(BesselKind::J, ord(2.5), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn half_order_examples() {
        let v = bessel_eval(BesselKind::J, ord(0.5), PI / 2.0).unwrap();
        assert_relative_eq!(v, 2.0 / PI, max_relative = 1e-14);
        let v = bessel_eval(BesselKind::K, ord(0.5), 1.0).unwrap();
        assert_relative_eq!(v, (PI / 2.0).sqrt() * (-1.0f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(v, 0.461_068_504, max_relative = 1e-9);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            bessel_eval(BesselKind::Y, ord(0.0), 0.0),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            bessel_eval(BesselKind::K, ord(1.0), -1.0),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(Order::new(61.0), Err(Error::OrderOutOfRange(_))));
        assert!(matches!(Order::new(-0.6), Err(Error::OrderOutOfRange(_))));
        assert!(hankel_eval(HankelKind::H1, ord(0.0), 0.0).is_err());
    }

    #[test]
    fn hankel_definitions() {
        let h1 = hankel_eval(HankelKind::H1, ord(0.0), 1.0).unwrap();
        assert_eq!(h1.re, bessel_eval(BesselKind::J, ord(0.0), 1.0).unwrap());
        let a = hankel_eval(HankelKind::H1, ord(0.0), 2.5).unwrap();
        let b = hankel_eval(HankelKind::H2, ord(0.0), 2.5).unwrap();
        assert_eq!(b, a.conj());
    }

    // Independent oracle: K_0(z) = -(ln(z/2) + gamma) I_0(z) + sum (z^2/4)^k/(k!)^2 H_k,
    // evaluated directly at z = -i with the principal logarithm.
    fn k0_series(z: Complex64) -> Complex64 {
        let euler = 0.577_215_664_901_532_9;
        let q = z * z / 4.0;
        let mut term = Complex64::new(1.0, 0.0);
        let mut i0 = term;
        let mut tail = Complex64::new(0.0, 0.0);
        let mut harmonic = 0.0;
        for k in 1..60 {
            let kf = k as f64;
            term = term * q / (kf * kf);
            harmonic += 1.0 / kf;
            i0 += term;
            tail += term * harmonic;
        }
        -((z / 2.0).ln() + euler) * i0 + tail
    }

    #[test]
    fn hankel_matches_k_on_negative_imaginary_ray() {
        let z = Complex64::new(0.0, -1.0);
        let oracle = Complex64::new(0.0, -2.0 / PI) * k0_series(z);
        let h1 = hankel_eval(HankelKind::H1, ord(0.0), 1.0).unwrap();
        assert!((oracle - h1).norm() < 1e-13, "{oracle} vs {h1}");
        let k = bessel_k_neg_imag(ord(0.0), 1.0).unwrap();
        assert!((k - k0_series(z)).norm() < 1e-13);
    }

    #[test]
    fn k_neg_imag_half_order_closed_form() {
        // K_{1/2}(z) = sqrt(pi/(2z)) e^{-z}, principal branch.
        let x = 0.8;
        let z = Complex64::new(0.0, -x);
        let exact = (Complex64::new(PI / 2.0, 0.0) / z).sqrt() * (-z).exp();
        let got = bessel_k_neg_imag(ord(0.5), x).unwrap();
        assert!((exact - got).norm() < 1e-13, "{exact} vs {got}");
    }

    #[test]
    fn scaled_forms_agree_across_crossover() {
        for &nu in &[-0.5, -0.25, 0.0, 0.5, 1.0, 2.5, 30.0] {
            let o = ord(nu);
            for &x in &[0.5, 0.999, 1.0, 1.5] {
                let j = bessel_j_unchecked(nu, x).unwrap() / (0.5 * x).powf(nu);
                let i = bessel_i_unchecked(nu, x).unwrap() / (0.5 * x).powf(nu);
                assert_relative_eq!(bessel_j_scaled(o, x).unwrap(), j, max_relative = 1e-13);
                assert_relative_eq!(bessel_i_scaled(o, x).unwrap(), i, max_relative = 1e-13);
            }
            assert_relative_eq!(
                bessel_j_scaled(o, 0.0).unwrap(),
                1.0 / gamma(nu + 1.0),
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn derivative_by_recurrence() {
        // J0' = -J1
        let x = 3.7;
        let d = bessel_j_prime(ord(0.0), x).unwrap();
        assert_relative_eq!(d, -bessel_j(1.0, x).unwrap(), max_relative = 1e-14);
    }
}
