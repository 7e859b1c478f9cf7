//! Real-order Bessel functions of real positive argument.
//!
//! Both routines follow Temme's method: the order is split as `nu = mu + l`
//! with |mu| <= 1/2. For `x < 2` the functions of order `mu` come from Temme's
//! power series; for `x >= 2` they come from Steed's continued fractions
//! (CF2 for J/Y, Temme's CF2 for K). A first continued fraction (CF1)
//! supplies the logarithmic derivative at order `nu`, and recurrences connect
//! `mu` and `nu`.

use std::f64::consts::PI;

use super::gamma::{gamma, ln_gamma, temme_gammas};
use crate::error::{Error, Result};

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const MAXIT: usize = 200_000;
const SERIES_CROSSOVER: f64 = 2.0;
// Downward recurrences are rescaled whenever a magnitude exceeds this.
const BIG: f64 = 1e250;

/// J, Y and their derivatives for nu >= 0, x > 0.
#[allow(dead_code)] // derivatives come for free from the recurrences
#[derive(Debug, Clone, Copy)]
pub(crate) struct Jy {
    pub j: f64,
    pub y: f64,
    pub jp: f64,
    pub yp: f64,
}

/// I, K and their derivatives for nu >= 0, x > 0.
#[allow(dead_code)]
#[derive(Debug, Clone, Copy)]
pub(crate) struct Ik {
    pub i: f64,
    pub k: f64,
    pub ip: f64,
    pub kp: f64,
}

pub(crate) fn jy(nu: f64, x: f64) -> Result<Jy> {
    debug_assert!(nu >= 0.0 && x > 0.0);
    let nl = if x < SERIES_CROSSOVER {
        (nu + 0.5) as usize
    } else {
        (nu - x + 1.5).max(0.0) as usize
    };
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    // CF1: J'_nu / J_nu
    let mut isign = 1.0;
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    let mut converged = false;
    for _ in 0..MAXIT {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { op: "bessel_jy/cf1" });
    }

    let mut rjl = isign * 1e-30;
    let mut rjpl = h * rjl;
    let mut rjl1 = rjl;
    let mut rjp1 = rjpl;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
        if rjl.abs() > BIG {
            rjl /= BIG;
            rjpl /= BIG;
            rjl1 /= BIG;
            rjp1 /= BIG;
        }
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    let (rjmu, mut rymu, mut ry1);
    if x < SERIES_CROSSOVER {
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = xmu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = 2.0 / PI * fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let e = e.exp();
        let mut p = e / (gampl * PI);
        let mut q = 1.0 / (e * PI * gammi);
        let pimu2 = 0.5 * pimu;
        let fact3 = if pimu2.abs() < EPS { 1.0 } else { pimu2.sin() / pimu2 };
        let r = PI * pimu2 * fact3 * fact3;
        let mut c = 1.0;
        let d = -x2 * x2;
        let mut sum = ff + r * q;
        let mut sum1 = p;
        let mut converged = false;
        for i in 1..MAXIT {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - xmu2);
            c *= d / fi;
            p /= fi - xmu;
            q /= fi + xmu;
            let del = c * (ff + r * q);
            sum += del;
            let del1 = c * p - fi * del;
            sum1 += del1;
            if del.abs() < (1.0 + sum.abs()) * EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence { op: "bessel_jy/series" });
        }
        rymu = -sum;
        ry1 = -sum1 * xi2;
        let rymup = xmu * xi * rymu - ry1;
        rjmu = w / (rymup - f * rymu);
    } else {
        // CF2: p + iq = (J' + iY') / (J + iY) at order mu
        let mut a = 0.25 - xmu2;
        let mut p = -0.5 * xi;
        let mut q = 1.0;
        let br = 2.0 * x;
        let mut bi = 2.0;
        let mut fact = a * xi / (p * p + q * q);
        let mut cr = br + q * fact;
        let mut ci = bi + p * fact;
        let mut den = br * br + bi * bi;
        let mut dr = br / den;
        let mut di = -bi / den;
        let mut dlr = cr * dr - ci * di;
        let mut dli = cr * di + ci * dr;
        let mut temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        let mut converged = false;
        for i in 2..MAXIT {
            a += 2.0 * (i as f64 - 1.0);
            bi += 2.0;
            dr = a * dr + br;
            di = a * di + bi;
            if dr.abs() + di.abs() < FPMIN {
                dr = FPMIN;
            }
            fact = a / (cr * cr + ci * ci);
            cr = br + cr * fact;
            ci = bi - ci * fact;
            if cr.abs() + ci.abs() < FPMIN {
                cr = FPMIN;
            }
            den = dr * dr + di * di;
            dr /= den;
            di /= -den;
            dlr = cr * dr - ci * di;
            dli = cr * di + ci * dr;
            temp = p * dlr - q * dli;
            q = p * dli + q * dlr;
            p = temp;
            if (dlr - 1.0).abs() + dli.abs() < EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence { op: "bessel_jy/cf2" });
        }
        let gam = (p - f) / q;
        let mut rj = (w / ((p - f) * gam + q)).sqrt();
        if rjl < 0.0 {
            rj = -rj;
        }
        rjmu = rj;
        rymu = rjmu * gam;
        let rymup = rymu * (p + q / gam);
        ry1 = xmu * xi * rymu - rymup;
    }

    let fact = rjmu / rjl;
    let j = rjl1 * fact;
    let jp = rjp1 * fact;
    for i in 1..=nl {
        let rytemp = (xmu + i as f64) * xi2 * ry1 - rymu;
        rymu = ry1;
        ry1 = rytemp;
    }
    let y = rymu;
    let yp = nu * xi * rymu - ry1;
    Ok(Jy { j, y, jp, yp })
}

pub(crate) fn ik(nu: f64, x: f64) -> Result<Ik> {
    debug_assert!(nu >= 0.0 && x > 0.0);
    let nl = (nu + 0.5) as usize;
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;

    // CF1: I'_nu / I_nu
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    let mut converged = false;
    for _ in 0..MAXIT {
        b += xi2;
        d = 1.0 / (b + d);
        c = b + 1.0 / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { op: "bessel_ik/cf1" });
    }

    let mut ril = 1e-30;
    let mut ripl = h * ril;
    let mut ril1 = ril;
    let mut rip1 = ripl;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let ritemp = fact * ril + ripl;
        fact -= xi;
        ripl = fact * ritemp + ril;
        ril = ritemp;
        if ril.abs() > BIG {
            ril /= BIG;
            ripl /= BIG;
            ril1 /= BIG;
            rip1 /= BIG;
        }
    }
    let f = ripl / ril;

    let (mut rkmu, mut rk1);
    if x < SERIES_CROSSOVER {
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = xmu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let e = e.exp();
        let mut p = 0.5 * e / gampl;
        let mut q = 0.5 / (e * gammi);
        let mut c = 1.0;
        let d = x2 * x2;
        let mut sum1 = p;
        let mut converged = false;
        for i in 1..MAXIT {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - xmu2);
            c *= d / fi;
            p /= fi - xmu;
            q /= fi + xmu;
            let del = c * ff;
            sum += del;
            let del1 = c * (p - fi * ff);
            sum1 += del1;
            if del.abs() < sum.abs() * EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence { op: "bessel_ik/series" });
        }
        rkmu = sum;
        rk1 = sum1 * xi2;
    } else {
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut delh = d;
        let mut h = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - xmu2;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        let mut converged = false;
        for i in 2..MAXIT {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh *= b * d - 1.0;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence { op: "bessel_ik/cf2" });
        }
        h *= a1;
        rkmu = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
        rk1 = rkmu * (xmu + x + 0.5 - h) * xi;
    }

    let rkmup = xmu * xi * rkmu - rk1;
    let (i, ip) = if x < SERIES_CROSSOVER {
        // The Wronskian normalisation cancels badly for small x; the
        // all-positive power series does not.
        let i = i_series(nu, x);
        (i, i * (rip1 / ril1))
    } else {
        let rimu = xi / (f * rkmu - rkmup);
        (rimu * ril1 / ril, rimu * rip1 / ril)
    };
    for l in 1..=nl {
        let rktemp = (xmu + l as f64) * xi2 * rk1 + rkmu;
        rkmu = rk1;
        rk1 = rktemp;
    }
    let k = rkmu;
    let kp = nu * xi * rkmu - rk1;
    Ok(Ik { i, k, ip, kp })
}

// I_nu(x) = sum_k (x/2)^(2k+nu) / (k! Gamma(nu+k+1)), nu >= 0.
fn i_series(nu: f64, x: f64) -> f64 {
    let half = 0.5 * x;
    let lead = if nu + 1.0 < 170.0 {
        half.powf(nu) / gamma(nu + 1.0)
    } else {
        (nu * half.ln() - ln_gamma(nu + 1.0)).exp()
    };
    let q = half * half;
    let mut term = lead;
    let mut sum = lead;
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * (nu + kf));
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    sum
}

/// J_nu(x) and Y_nu(x) for any real nu and x > 0, using reflection for nu < 0.
pub(crate) fn jy_any(nu: f64, x: f64) -> Result<(f64, f64)> {
    if nu >= 0.0 {
        let r = jy(nu, x)?;
        return Ok((r.j, r.y));
    }
    let mu = -nu;
    let r = jy(mu, x)?;
    let (s, c) = reflection_sin_cos(mu);
    Ok((c * r.j - s * r.y, s * r.j + c * r.y))
}

/// I_nu(x) and K_nu(x) for any real nu and x > 0, using reflection for nu < 0.
pub(crate) fn ik_any(nu: f64, x: f64) -> Result<(f64, f64)> {
    if nu >= 0.0 {
        let r = ik(nu, x)?;
        return Ok((r.i, r.k));
    }
    let mu = -nu;
    let r = ik(mu, x)?;
    let (s, _) = reflection_sin_cos(mu);
    Ok((r.i + 2.0 / PI * s * r.k, r.k))
}

// sin(mu pi), cos(mu pi) with exact zeros at integer and half-integer orders.
fn reflection_sin_cos(mu: f64) -> (f64, f64) {
    let twice = 2.0 * mu;
    if twice == twice.round() {
        match (twice as i64).rem_euclid(4) {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        }
    } else {
        ((PI * mu).sin(), (PI * mu).cos())
    }
}
