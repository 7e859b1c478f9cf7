//! Orthonormal radial-basis-function wavelet series and transforms.
//!
//! The crate is organised bottom-up:
//!
//! - [`specfun`]: Bessel J/Y/I/K of real order, Hankel functions, zeros of J.
//! - [`quadrature`]: Gauss-Legendre rules and truncated semi-infinite integration.
//! - [`kernels`]: Helmholtz, dual (Hankel/K), convection-diffusion, time-space and
//!   classic RBF kernels.
//! - [`series`]: the discrete Bessel transform (Fourier-Bessel series on a ball).
//! - [`transforms`]: continuous B- and K-transforms, their calibration, the
//!   Laplacian eigenrelations and the time-space diffusion transform.
//! - [`rbffit`]: MQ / Gaussian / pre-wavelet TPS fitting, convergence studies and
//!   convection-diffusion parameter recognition.
//! - [`checks`]: verification harnesses for the operator identities above.
//!
//! Dimensions `n` are real numbers `>= 1`; the Bessel order is `n/2 - 1`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod error;
mod interp;
pub mod kernels;
mod linalg;
pub mod quadrature;
pub mod rbffit;
pub mod series;
pub mod specfun;
pub mod transforms;

pub use error::{Error, Result};
pub use num_complex::Complex64;
