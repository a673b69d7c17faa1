//! Shared numerical kernels: adaptive quadrature, the tridiagonal pencil
//! eigensolver and log-log slope fitting.

pub mod eigen;
pub mod fit;
pub mod quad;

pub use eigen::{rayleigh_quotient, smallest_eigenpair, EigenError};
pub use fit::{fit_log_slope, FitError, SlopeFit};
pub use quad::{integrate, integrate_to_infinity, QuadError, QuadratureResult, TailBound};

use crate::real::Real;

/// Single fixed 15-point panel for short cells of cumulative grids, where
/// adaptivity is unnecessary and its bookkeeping would dominate. Returns NaN
/// if the integrand produced a non-finite sample.
pub(crate) fn panel_value<R: Real>(f: &impl Fn(R) -> R, a: R, b: R) -> R {
    if b <= a {
        return R::zero();
    }
    match quad::gk15(f, a, b) {
        Ok((v, _, _)) => v,
        Err(_) => R::nan(),
    }
}
