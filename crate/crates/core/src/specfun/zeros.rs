use super::{bessel, Order};
use crate::error::{Error, Result};

// Consecutive zeros of J_nu are more than pi/2 apart for nu >= -1/2, so a
// scan with this step cannot step over a pair of sign changes.
const SCAN_STEP: f64 = 0.25;

/// First `count` positive zeros of `J_nu`, ascending.
///
/// Zeros are bracketed by a sign-change scan and refined by bisection to
/// adjacent floating-point numbers.
pub fn jn_zeros(order: Order, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::InvalidParameter("zero count must be >= 1".into()));
    }
    let nu = order.value();
    let j = |x: f64| bessel::jy_any(nu, x).map(|v| v.0);

    // j_{nu,1} > nu for nu >= 0; for nu < 0 J_nu is positive near the origin.
    let mut lo = nu.max(1e-3);
    let mut f_lo = j(lo)?;
    let mut zeros = Vec::with_capacity(count);
    while zeros.len() < count {
        let hi = lo + SCAN_STEP;
        let f_hi = j(hi)?;
        if f_hi == 0.0 {
            zeros.push(hi);
            lo = hi + 1e-9;
            f_lo = j(lo)?;
            continue;
        }
        if f_lo.signum() != f_hi.signum() {
            zeros.push(bisect(&j, lo, hi, f_lo)?);
        }
        lo = hi;
        f_lo = f_hi;
    }
    Ok(zeros)
}

fn bisect(j: &impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, mut fa: f64) -> Result<f64> {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = j(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    let fb = j(b)?;
    Ok(if fa.abs() <= fb.abs() { a } else { b })
}
