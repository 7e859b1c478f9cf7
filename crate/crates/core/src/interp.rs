//! Local cubic interpolation on sampled data.

use crate::quadrature::Integrand;

/// Four-point Lagrange interpolation using the stencil around `t` (fewer
/// points when the data are short). Outside `[x_0, x_last]` the end stencil
/// extrapolates; callers decide what happens beyond the data.
pub(crate) fn cubic<T: Integrand>(x: &[f64], y: &[T], t: f64) -> T {
    let n = x.len();
    if n == 0 {
        return T::default();
    }
    if n == 1 {
        return y[0];
    }
    let width = n.min(4);
    // Interval index i with x[i] <= t < x[i+1], clamped.
    let i = x.partition_point(|&v| v <= t).saturating_sub(1).min(n - 2);
    let start = i.saturating_sub((width - 1) / 2).min(n - width);
    let xs = &x[start..start + width];
    let mut acc = T::default();
    for (a, &xa) in xs.iter().enumerate() {
        let mut w = 1.0;
        for (b, &xb) in xs.iter().enumerate() {
            if a != b {
                w *= (t - xb) / (xa - xb);
            }
        }
        acc = acc + y[start + a] * w;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn reproduces_cubics() {
        let x: Vec<f64> = (0..9).map(|i| 0.3 * i as f64 + 0.01 * (i * i) as f64).collect();
        let p = |t: f64| 1.0 - 2.0 * t + 0.5 * t * t - 0.25 * t * t * t;
        let y: Vec<f64> = x.iter().map(|&t| p(t)).collect();
        for k in 0..50 {
            let t = -0.2 + 0.06 * k as f64;
            assert_abs_diff_eq!(cubic(&x, &y, t), p(t), epsilon = 1e-12);
        }
    }

    #[test]
    fn short_data() {
        assert_eq!(cubic::<f64>(&[], &[], 1.0), 0.0);
        assert_eq!(cubic(&[1.0], &[3.0], 7.0), 3.0);
        assert_abs_diff_eq!(cubic(&[0.0, 1.0], &[0.0, 2.0], 0.25), 0.5, epsilon = 1e-15);
    }
}
