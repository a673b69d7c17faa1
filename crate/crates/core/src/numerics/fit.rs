//! Least-squares slope estimation in log-log coordinates, used for all the
//! asymptotic-exponent diagnostics.

use serde::Serialize;
use thiserror::Error;

use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit<R> {
    pub slope: R,
    pub intercept: R,
    pub residual_rms: R,
    pub points_used: usize,
}

#[derive(Debug, Error)]
pub enum FitError {
    #[error("slope fit needs at least 4 points, got {points}")]
    InsufficientData { points: usize },
    #[error("slope fit requires strictly positive data at index {index}")]
    NonPositive { index: usize },
}

/// Ordinary least squares of `log ys` against `log xs`.
pub fn fit_log_slope<R: Real>(xs: &[R], ys: &[R]) -> Result<SlopeFit<R>, FitError> {
    if xs.len() < 4 || xs.len() != ys.len() {
        return Err(FitError::InsufficientData {
            points: xs.len().min(ys.len()),
        });
    }
    for (i, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        if !(x > R::zero()) || !(y > R::zero()) {
            return Err(FitError::NonPositive { index: i });
        }
    }
    let lx: Vec<R> = xs.iter().map(|&x| x.ln()).collect();
    let ly: Vec<R> = ys.iter().map(|&y| y.ln()).collect();
    let n = R::of_usize(lx.len());
    let mx = lx.iter().copied().sum::<R>() / n;
    let my = ly.iter().copied().sum::<R>() / n;
    let mut sxx = R::zero();
    let mut sxy = R::zero();
    for i in 0..lx.len() {
        let dx = lx[i] - mx;
        sxx += dx * dx;
        sxy += dx * (ly[i] - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss = R::zero();
    for i in 0..lx.len() {
        let r = ly[i] - (intercept + slope * lx[i]);
        ss += r * r;
    }
    let residual_rms = (ss / n).sqrt();
    Ok(SlopeFit {
        slope,
        intercept,
        residual_rms,
        points_used: lx.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_square_law() {
        let xs: Vec<f64> = (1..=20).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let fit = fit_log_slope(&xs, &ys).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!(fit.residual_rms < 1e-12);
        assert_eq!(fit.points_used, 20);
    }

    #[test]
    fn inverse_law_with_prefactor() {
        let xs: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 5.0 / x).collect();
        let fit = fit_log_slope(&xs, &ys).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-12);
        assert!((fit.intercept - 5.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn perturbed_power_law() {
        // Oracle computed independently below with a plain two-pass OLS on
        // the same data; the module must agree and land near 1.5.
        let xs: Vec<f64> = (10..=100).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| x.powf(1.5) * (1.0 + 0.01 * x.sin()))
            .collect();

        let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
        let n = lx.len() as f64;
        let mx: f64 = lx.iter().sum::<f64>() / n;
        let my: f64 = ly.iter().sum::<f64>() / n;
        let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
        let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
        let oracle = sxy / sxx;

        let fit = fit_log_slope(&xs, &ys).unwrap();
        assert!((fit.slope - oracle).abs() < 1e-12);
        assert!((fit.slope - 1.5).abs() < 0.02);
    }

    #[test]
    fn too_few_points() {
        let err = fit_log_slope(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap_err();
        matches!(err, FitError::InsufficientData { points: 3 })
            .then_some(())
            .expect("wrong error");
    }
}
