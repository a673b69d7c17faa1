//! Radial Green's function profiles.
//!
//! The minimal Green's function with pole `p` of a non-parabolic model
//! manifold is
//!
//! ```text
//!   G(r) = (1/ω) ∫_r^∞ φ(t)^{1-n} dt,       ω = area of the unit (n-1)-sphere,
//! ```
//!
//! normalized so that `-ΔG = δ_p` exactly and the level-set flux is 1. The
//! Dirichlet variant integrates only up to its boundary radius. Evaluation
//! goes through the shifted kernel `∫_r exp(-(n-1)(logφ(t) - logφ(r))) dt`,
//! which stays well scaled even when `φ^{1-n}` underflows.
//!
//! On parabolic finite-volume manifolds the mean-zero Green's function
//! solves the flux equation `ω φ^{n-1} Ḡ' = -(1 - Vol(B_r)/V)` and is shifted
//! to zero mean; it is materialized on a cumulative grid (log-spaced near the
//! pole) with exact one-cell quadrature completions for off-node evaluation.

use std::sync::Arc;

use thiserror::Error;

use crate::geometry::{GeometryError, ModelManifold, Parabolicity, VolumeClass};
use crate::numerics::{integrate, integrate_to_infinity, QuadError, TailBound};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GreenKind<R> {
    Minimal,
    Dirichlet { radius: R },
    Parabolic,
}

#[derive(Debug, Error)]
pub enum GreenError<R: Real> {
    #[error("manifold is not non-parabolic; use the parabolic mean-zero Green's function")]
    NotNonParabolic,
    #[error("parabolic Green's function needs a parabolic finite-volume manifold")]
    InvalidConstruction,
    #[error("radius {r} outside (0, {hi}]")]
    Domain { r: R, hi: R },
    #[error("level {level} cannot be bracketed within the truncation radius")]
    Inversion { level: R },
    #[error("flux of the centered source does not vanish: {flux}")]
    ZeroAverageViolation { flux: R },
    #[error("integral diverges on the truncated domain (growth exponent {exponent})")]
    Divergent { exponent: R },
    #[error(transparent)]
    Geometry(#[from] GeometryError<R>),
    #[error("quadrature failure: {0}")]
    Quadrature(String),
}

impl<R: Real> From<QuadError<R>> for GreenError<R> {
    fn from(e: QuadError<R>) -> Self {
        GreenError::Quadrature(e.to_string())
    }
}

/// Backward cumulative data for the parabolic profile.
#[derive(Debug)]
pub(crate) struct ParabolicData<R> {
    pub grid: Vec<R>,
    /// ω ∫_{grid[i]}^{r_max} φ^{n-1}, backward so it stays relatively
    /// accurate where it is small.
    pub tail_volume: Vec<R>,
    /// Raw profile anchored at raw(r_max) = 0, before the mean shift.
    pub raw: Vec<R>,
    pub total_volume: R,
    pub mean_shift: R,
}

#[derive(Debug, Clone)]
pub struct GreenProfile<R> {
    manifold: ModelManifold<R>,
    kind: GreenKind<R>,
    tol: R,
    parabolic: Option<Arc<ParabolicData<R>>>,
}

/// 15-point Gauss-Kronrod value of a smooth integrand on one short cell; the
/// cumulative grids are dense enough that this is exact to round-off.
fn cell_quad<R: Real>(f: &impl Fn(R) -> R, a: R, b: R) -> R {
    crate::numerics::panel_value(f, a, b)
}

impl<R: Real> GreenProfile<R> {
    /// Minimal positive Green's function. Requires a non-parabolic manifold.
    pub fn minimal(m: &ModelManifold<R>) -> Result<Self, GreenError<R>> {
        let class = m.classify()?;
        if class.parabolicity != Parabolicity::NonParabolic {
            return Err(GreenError::NotNonParabolic);
        }
        Ok(GreenProfile {
            manifold: m.clone(),
            kind: GreenKind::Minimal,
            tol: m.params().quad_tol,
            parabolic: None,
        })
    }

    /// Green's function of the ball `B_R` with zero Dirichlet boundary data.
    pub fn dirichlet(m: &ModelManifold<R>, radius: R) -> Result<Self, GreenError<R>> {
        if !(radius > R::zero() && radius <= m.r_max()) {
            return Err(GreenError::Domain {
                r: radius,
                hi: m.r_max(),
            });
        }
        Ok(GreenProfile {
            manifold: m.clone(),
            kind: GreenKind::Dirichlet { radius },
            tol: m.params().quad_tol,
            parabolic: None,
        })
    }

    /// Mean-zero Green's function `-ΔḠ = δ_p - 1/V` on a parabolic manifold
    /// of finite volume.
    pub fn parabolic(m: &ModelManifold<R>) -> Result<Self, GreenError<R>> {
        let class = m.classify()?;
        if class.parabolicity != Parabolicity::Parabolic
            || class.volume != VolumeClass::FiniteVolume
        {
            return Err(GreenError::InvalidConstruction);
        }
        let data = build_parabolic(m)?;
        Ok(GreenProfile {
            manifold: m.clone(),
            kind: GreenKind::Parabolic,
            tol: m.params().quad_tol,
            parabolic: Some(Arc::new(data)),
        })
    }

    pub fn kind(&self) -> GreenKind<R> {
        self.kind
    }

    pub fn manifold(&self) -> &ModelManifold<R> {
        &self.manifold
    }

    /// Total volume (parabolic kind only).
    pub fn total_volume(&self) -> Option<R> {
        self.parabolic.as_ref().map(|d| d.total_volume)
    }

    fn kernel(&self, anchor: R) -> impl Fn(R) -> R + '_ {
        let nm1 = R::of_usize(self.manifold.dim() - 1);
        let lref = self.manifold.warping().log_phi(anchor);
        move |t: R| (-nm1 * (self.manifold.warping().log_phi(t) - lref)).exp()
    }

    /// `I(r) = ∫_r^{upper} exp(-(n-1)(logφ(t) - logφ(r))) dt`, the weighted
    /// Green value `ω G(r) φ^{n-1}(r)`. Bounded and well scaled for every
    /// family, which is why all integral operations route through it.
    pub fn weighted(&self, r: R) -> Result<R, GreenError<R>> {
        self.weighted_with_tol(r, self.tol)
    }

    /// Soft upper cut for the kernel integral from `r`: for families with a
    /// positive log-slope floor the kernel lives in a boundary layer of
    /// width `1/((n-1) floor)`, so integration stops 50 layers out (where
    /// the certified leftover is ~e^{-50}) instead of spanning an interval
    /// so wide that the first quadrature panel would sample only zeros.
    fn kernel_cut(&self, r: R) -> Option<(R, R)> {
        let dim = self.manifold.dim();
        let w = self.manifold.warping();
        let floor = w.log_slope_floor(r.max(R::one()))?;
        if !(floor > R::zero()) {
            return None;
        }
        let layer = (R::of_usize(dim - 1) * floor).recip();
        let cut = r.max(R::one()) + layer * R::of(50.0);
        let leftover = w.kernel_tail(dim, r, cut)?;
        Some((cut, leftover))
    }

    fn weighted_with_tol(&self, r: R, tol: R) -> Result<R, GreenError<R>> {
        self.check_radius(r)?;
        let kernel = self.kernel(r);
        match self.kind {
            GreenKind::Dirichlet { radius } => {
                if r >= radius {
                    return Ok(R::zero());
                }
                match self.kernel_cut(r) {
                    Some((cut, _)) if cut < radius => {
                        // Leftover on [cut, radius] is below the layer bound.
                        Ok(integrate(&kernel, r, cut, tol)?.value)
                    }
                    _ => Ok(integrate(&kernel, r, radius, tol)?.value),
                }
            }
            GreenKind::Minimal => {
                if let Some((cut, _leftover)) = self.kernel_cut(r) {
                    return Ok(integrate(&kernel, r, cut, tol)?.value);
                }
                let dim = self.manifold.dim();
                let w = self.manifold.warping();
                if w.kernel_tail(dim, r, r.max(R::one()) + R::one()).is_some() {
                    let tail = TailBound::new(r.max(R::one()) + R::one(), |t: R| {
                        w.kernel_tail(dim, r, t)
                            .expect("envelope availability probed")
                    });
                    Ok(integrate_to_infinity(&kernel, r, &tail, tol)?.value)
                } else {
                    // No tail control (custom family): truncate at r_max.
                    Ok(integrate(&kernel, r, self.manifold.r_max(), tol)?.value)
                }
            }
            GreenKind::Parabolic => {
                let nm1 = R::of_usize(self.manifold.dim() - 1);
                let phi_pow = (nm1 * self.manifold.warping().log_phi(r)).exp();
                Ok(self.eval(r)? * self.manifold.sphere_area() * phi_pow)
            }
        }
    }

    /// G(r) (signed for the parabolic kind).
    pub fn eval(&self, r: R) -> Result<R, GreenError<R>> {
        self.eval_with_tol(r, self.tol)
    }

    /// Evaluation with a 100x tighter quadrature tolerance, for consumers
    /// that difference the profile numerically.
    pub(crate) fn eval_tight(&self, r: R) -> Result<R, GreenError<R>> {
        self.eval_with_tol(r, self.tol * R::of(1e-2))
    }

    fn eval_with_tol(&self, r: R, tol: R) -> Result<R, GreenError<R>> {
        self.check_radius(r)?;
        match self.kind {
            GreenKind::Minimal | GreenKind::Dirichlet { .. } => {
                let nm1 = R::of_usize(self.manifold.dim() - 1);
                let scale = (-nm1 * self.manifold.warping().log_phi(r)).exp();
                Ok(self.weighted_with_tol(r, tol)? * scale / self.manifold.sphere_area())
            }
            GreenKind::Parabolic => {
                let data = self.parabolic.as_ref().expect("parabolic data");
                Ok(self.parabolic_raw(data, r) - data.mean_shift)
            }
        }
    }

    /// dG/dr from the defining flux law (exact, no differencing).
    pub fn deriv(&self, r: R) -> Result<R, GreenError<R>> {
        self.check_radius(r)?;
        let nm1 = R::of_usize(self.manifold.dim() - 1);
        let phi_pow_inv = (-nm1 * self.manifold.warping().log_phi(r)).exp();
        match self.kind {
            GreenKind::Minimal => Ok(-phi_pow_inv / self.manifold.sphere_area()),
            GreenKind::Dirichlet { radius } => {
                if r >= radius {
                    Ok(R::zero())
                } else {
                    Ok(-phi_pow_inv / self.manifold.sphere_area())
                }
            }
            GreenKind::Parabolic => {
                let data = self.parabolic.as_ref().expect("parabolic data");
                let tv = self.tail_volume(data, r);
                Ok(-(tv / data.total_volume) * phi_pow_inv / self.manifold.sphere_area())
            }
        }
    }

    fn check_radius(&self, r: R) -> Result<(), GreenError<R>> {
        let lo = match self.kind {
            GreenKind::Parabolic => {
                self.parabolic.as_ref().expect("parabolic data").grid[0] * R::of(0.999)
            }
            _ => R::zero(),
        };
        if r >= lo.max(R::zero()) && r > R::zero() && r <= self.manifold.r_max() {
            Ok(())
        } else {
            Err(GreenError::Domain {
                r,
                hi: self.manifold.r_max(),
            })
        }
    }

    /// ω ∫_r^{r_max} φ^{n-1}, from the backward cumulative grid plus a
    /// one-cell completion.
    pub(crate) fn tail_volume(&self, data: &ParabolicData<R>, r: R) -> R {
        let m = &self.manifold;
        let nm1 = R::of_usize(m.dim() - 1);
        let weight = move |t: R| (nm1 * m.warping().log_phi(t)).exp() * m.sphere_area();
        if r <= data.grid[0] {
            // Below the grid the missing mass is the full head volume.
            let head = cell_quad(&weight, r.max(R::zero()), data.grid[0]);
            return data.tail_volume[0] + head;
        }
        let i = lookup(&data.grid, r);
        data.tail_volume[i + 1] + cell_quad(&weight, r, data.grid[i + 1])
    }

    fn parabolic_raw(&self, data: &ParabolicData<R>, r: R) -> R {
        let m = &self.manifold;
        let nm1 = R::of_usize(m.dim() - 1);
        let omega = m.sphere_area();
        let v = data.total_volume;
        let neg_slope = move |t: R| {
            let tv = self.tail_volume(data, t);
            let phi_pow_inv = (-nm1 * m.warping().log_phi(t)).exp();
            (tv / v) * phi_pow_inv / omega
        };
        if r >= *data.grid.last().expect("nonempty grid") {
            return R::zero();
        }
        let i = lookup(&data.grid, r.max(data.grid[0]));
        data.raw[i + 1] + cell_quad(&neg_slope, r, data.grid[i + 1])
    }

    /// Sample the profile on `count` radii, geometrically spaced between
    /// `r_lo` and `r_hi`.
    pub fn samples(&self, r_lo: R, r_hi: R, count: usize) -> Result<Vec<(R, R)>, GreenError<R>> {
        let mut out = Vec::with_capacity(count);
        let ratio = (r_hi / r_lo).ln() / R::of_usize(count - 1);
        for i in 0..count {
            let r = r_lo * (ratio * R::of_usize(i)).exp();
            out.push((r, self.eval(r)?));
        }
        Ok(out)
    }
}

fn lookup<R: Real>(grid: &[R], r: R) -> usize {
    let mut lo = 0usize;
    let mut hi = grid.len() - 1;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if grid[mid] <= r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Cumulative grid for the parabolic profile: log-spaced from 1e-5 to 1,
/// then uniform up to r_max.
fn parabolic_grid<R: Real>(r_max: R) -> Vec<R> {
    let mut grid = Vec::new();
    let r_min = R::of(1e-5);
    let log_cells = 640usize;
    let ratio = (R::one() / r_min).ln() / R::of_usize(log_cells);
    for i in 0..=log_cells {
        grid.push(r_min * (ratio * R::of_usize(i)).exp());
    }
    let h = R::of(0.02);
    let lin_cells = ((r_max - R::one()) / h).to64().ceil() as usize;
    for i in 1..=lin_cells {
        let r = R::one() + (r_max - R::one()) * R::of_usize(i) / R::of_usize(lin_cells);
        grid.push(r);
    }
    grid
}

fn build_parabolic<R: Real>(m: &ModelManifold<R>) -> Result<ParabolicData<R>, GreenError<R>> {
    let grid = parabolic_grid(m.r_max());
    let n = grid.len();
    let nm1 = R::of_usize(m.dim() - 1);
    let omega = m.sphere_area();
    let weight = |t: R| (nm1 * m.warping().log_phi(t)).exp() * omega;

    // Backward tail volume.
    let mut tail_volume = vec![R::zero(); n];
    for i in (0..n - 1).rev() {
        tail_volume[i] = tail_volume[i + 1] + cell_quad(&weight, grid[i], grid[i + 1]);
    }
    let head = cell_quad(&weight, R::zero(), grid[0]);
    let total_volume = tail_volume[0] + head;

    // Backward raw profile: raw(r_max) = 0, raw' = -(tail/V) φ^{1-n} / ω.
    let tv_at = |t: R| -> R {
        let i = lookup(&grid, t);
        tail_volume[i + 1] + cell_quad(&weight, t, grid[i + 1])
    };
    let neg_slope = |t: R| {
        let phi_pow_inv = (-nm1 * m.warping().log_phi(t)).exp();
        (tv_at(t) / total_volume) * phi_pow_inv / omega
    };
    let mut raw = vec![R::zero(); n];
    for i in (0..n - 1).rev() {
        raw[i] = raw[i + 1] + cell_quad(&neg_slope, grid[i], grid[i + 1]);
    }

    // Mean shift via integration by parts:
    //   ∫ raw dV = -∫ raw'(r) Vol(B_r) dr = ∫ (tail/V) φ^{1-n}/ω (V - tail) dr,
    // which only involves the tail-volume table.
    let mean_integrand = |t: R| {
        let tv = tv_at(t);
        let phi_pow_inv = (-nm1 * m.warping().log_phi(t)).exp();
        (tv / total_volume) * phi_pow_inv / omega * (total_volume - tv)
    };
    let mut mean_integral = R::zero();
    for i in 0..n - 1 {
        mean_integral += cell_quad(&mean_integrand, grid[i], grid[i + 1]);
    }
    // Head contribution on [0, r_min]: integrand ~ Vol(B_t) φ^{1-n}/ω ~ t/n,
    // a negligible O(r_min²) mass, bounded here rather than integrated.
    let mean_shift = mean_integral / total_volume;

    if !mean_shift.is_finite() || !total_volume.is_finite() {
        return Err(GreenError::Quadrature(
            "parabolic construction produced non-finite data".into(),
        ));
    }
    Ok(ParabolicData {
        grid,
        tail_volume,
        raw,
        total_volume,
        mean_shift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::WarpingProfile;

    fn euclid3(r_max: f64) -> ModelManifold<f64> {
        ModelManifold::with_defaults(3, WarpingProfile::euclidean(r_max).unwrap()).unwrap()
    }

    fn sinh3(r_max: f64) -> ModelManifold<f64> {
        ModelManifold::with_defaults(3, WarpingProfile::hyperbolic(r_max).unwrap()).unwrap()
    }

    fn cusp3(r_max: f64) -> ModelManifold<f64> {
        ModelManifold::with_defaults(3, WarpingProfile::exp_decay_cusp(r_max).unwrap()).unwrap()
    }

    #[test]
    fn euclid_minimal_closed_form() {
        let g = GreenProfile::minimal(&euclid3(100.0)).unwrap();
        for r in [0.5f64, 1.0, 2.0] {
            let exact = 1.0 / (4.0 * std::f64::consts::PI * r);
            let got = g.eval(r).unwrap();
            assert!(
                (got - exact).abs() / exact < 1e-8,
                "r = {r}: {got} vs {exact}"
            );
        }
    }

    #[test]
    fn sinh_minimal_closed_form() {
        let g = GreenProfile::minimal(&sinh3(60.0)).unwrap();
        for r in [0.3f64, 1.0, 2.0, 5.0] {
            let exact = (1.0 / r.tanh() - 1.0) / (4.0 * std::f64::consts::PI);
            let got = g.eval(r).unwrap();
            assert!(
                (got - exact).abs() / exact < 1e-8,
                "r = {r}: {got} vs {exact}"
            );
        }
    }

    #[test]
    fn power_exp_decay_rate() {
        // G(r) r^{γ/2} exp((n-1) r^{1+γ/2}) approaches a positive constant.
        let m =
            ModelManifold::with_defaults(3, WarpingProfile::power_exp(2.0, 30.0).unwrap()).unwrap();
        let g = GreenProfile::minimal(&m).unwrap();
        let mut vals = Vec::new();
        for r in [4.0f64, 5.0, 6.0, 7.0, 8.0] {
            let scaled = g.weighted(r).unwrap() * r; // = ω G φ² · r^{γ/2}
            vals.push(scaled);
        }
        let last = vals[vals.len() - 1];
        for v in &vals {
            assert!(*v > 0.0);
        }
        assert!((vals[3] - last).abs() / last < 0.02, "{vals:?}");
    }

    #[test]
    fn minimal_requires_non_parabolic() {
        let m2 = ModelManifold::with_defaults(2, WarpingProfile::euclidean(80.0).unwrap()).unwrap();
        assert!(matches!(
            GreenProfile::minimal(&m2),
            Err(GreenError::NotNonParabolic)
        ));
    }

    #[test]
    fn dirichlet_closed_form_and_monotonicity() {
        let m = euclid3(50.0);
        let g2 = GreenProfile::dirichlet(&m, 2.0).unwrap();
        let exact = (1.0 - 0.5) / (4.0 * std::f64::consts::PI);
        assert!((g2.eval(1.0).unwrap() - exact).abs() / exact < 1e-9);

        let g4 = GreenProfile::dirichlet(&m, 4.0).unwrap();
        let gm = GreenProfile::minimal(&m).unwrap();
        for r in [0.5f64, 1.0, 1.9, 3.0] {
            let a = g2.eval(r).unwrap();
            let b = g4.eval(r).unwrap();
            let c = gm.eval(r).unwrap();
            assert!(a <= b + 1e-15 && b <= c + 1e-15, "exhaustion order at {r}");
        }
        assert_eq!(g2.eval(3.0).unwrap(), 0.0);
    }

    #[test]
    fn parabolic_profile_properties() {
        let m = cusp3(42.0);
        let g = GreenProfile::parabolic(&m).unwrap();
        let v = g.total_volume().unwrap();
        assert!((v - std::f64::consts::PI).abs() < 1e-6, "V = {v}");

        // Unit flux at small radii: -ω φ² Ḡ' = tail/V -> 1.
        for r in [1e-4f64, 1e-3, 1e-2] {
            let flux =
                -g.deriv(r).unwrap() * m.sphere_area() * (2.0 * m.warping().log_phi(r)).exp();
            assert!((flux - 1.0).abs() < 1e-3, "flux {flux} at {r}");
        }

        // Zero mean, by independent adaptive quadrature of the shifted
        // profile against the volume element.
        let omega = m.sphere_area();
        let mean = integrate(
            |t: f64| g.eval(t).unwrap() * (2.0 * m.warping().log_phi(t)).exp() * omega,
            1e-5,
            42.0,
            1e-9,
        )
        .unwrap();
        assert!(mean.value.abs() < 1e-8, "mean {}", mean.value);

        // Sign change: positive near the pole, negative far out.
        assert!(g.eval(0.01).unwrap() > 0.0);
        assert!(g.eval(30.0).unwrap() < 0.0);
    }

    #[test]
    fn parabolic_rejects_wrong_class() {
        assert!(matches!(
            GreenProfile::parabolic(&euclid3(50.0)),
            Err(GreenError::InvalidConstruction)
        ));
    }
}
