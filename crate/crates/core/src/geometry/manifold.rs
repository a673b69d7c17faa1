//! Model manifolds `dr² + φ(r)² dθ²` and the radial geometric quantities:
//! Ricci curvature, Laplacian of the distance function, shell curvature
//! suprema K(R) and θ(R), ball volumes and the parabolicity / volume-growth
//! classification.

use serde::Serialize;
use thiserror::Error;

use crate::numerics::{integrate, QuadError};
use crate::real::Real;

use super::profile::{ProfileError, WarpingProfile};

#[derive(Debug, Error)]
pub enum GeometryError<R: Real> {
    #[error("radius {r} outside the admissible range ({lo}, {hi}]")]
    Domain { r: R, lo: R, hi: R },
    #[error("dimension must be >= 2, got {dim}")]
    BadDimension { dim: usize },
    #[error("base radius must satisfy 0 < eps0 < 1, got {eps0}")]
    BadBaseRadius { eps0: R },
    #[error("phi' must stay positive on (0, 4 eps0]; fails near r = {r}")]
    NotExpandingNearPole { r: R },
    #[error("classification inconclusive within the truncation budget: {integral}")]
    Inconclusive { integral: &'static str },
    #[error(transparent)]
    Profile(#[from] ProfileError<R>),
    #[error("quadrature failure: {0}")]
    Quadrature(String),
}

impl<R: Real> From<QuadError<R>> for GeometryError<R> {
    fn from(e: QuadError<R>) -> Self {
        GeometryError::Quadrature(e.to_string())
    }
}

/// Numerical knobs shared by all operations on a manifold. Everything is
/// deterministic; the defaults are what the test suites pin.
#[derive(Debug, Clone)]
pub struct NumericsParams<R> {
    /// Absolute quadrature tolerance for well-scaled integrands.
    pub quad_tol: R,
    /// Interior nodes for one Sturm-Liouville solve.
    pub lambda_nodes: usize,
    /// Initial grid size for shell suprema.
    pub curvature_grid_init: usize,
    /// Hard cap on the refinement grid.
    pub curvature_grid_cap: usize,
    /// Exterior truncation ladder lengths.
    pub exterior_ladder: [f64; 4],
    /// Cap on (n-1) * (log-weight span) across one eigensolve interval.
    pub log_weight_span_cap: R,
    /// Radius ladder for the essential-spectrum estimate.
    pub ess_ladder: Vec<f64>,
}

impl<R: Real> Default for NumericsParams<R> {
    fn default() -> Self {
        NumericsParams {
            quad_tol: R::of(1e-10),
            lambda_nodes: 1000,
            curvature_grid_init: 256,
            curvature_grid_cap: 1 << 18,
            exterior_ladder: [5.0, 10.0, 20.0, 40.0],
            log_weight_span_cap: R::of(120.0),
            ess_ladder: vec![1.0, 2.0, 4.0, 8.0, 16.0],
        }
    }
}

/// Shell curvature data at radius R: suprema of φ''/φ and φ'/φ over the
/// shell `[eps0, R]`, the combined scale `K = max(1, K_tilde, K_hat)` and
/// `θ(R) = R sqrt(K(R))`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CurvatureScale<R> {
    pub radius: R,
    pub k_tilde: R,
    pub k_hat: R,
    pub k: R,
    pub theta: R,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parabolicity {
    NonParabolic,
    Parabolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VolumeClass {
    FiniteVolume,
    InfiniteVolume,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub parabolicity: Parabolicity,
    pub volume: VolumeClass,
}

/// Rotationally symmetric manifold of dimension `n ≥ 2` with warping φ.
#[derive(Debug, Clone)]
pub struct ModelManifold<R> {
    dim: usize,
    warping: WarpingProfile<R>,
    epsilon0: R,
    sphere_area: R,
    params: NumericsParams<R>,
}

/// Surface area of the unit (n-1)-sphere: 2 π^{n/2} / Γ(n/2), evaluated by
/// the half-integer Γ recursion.
pub fn unit_sphere_area(dim: usize) -> f64 {
    let half_n = dim as f64 / 2.0;
    let mut gamma = if dim.is_multiple_of(2) {
        1.0
    } else {
        std::f64::consts::PI.sqrt()
    };
    let mut z = if dim.is_multiple_of(2) { 1.0 } else { 0.5 };
    while z + 0.5 < half_n {
        gamma *= z;
        z += 1.0;
    }
    2.0 * std::f64::consts::PI.powf(half_n) / gamma
}

impl<R: Real> ModelManifold<R> {
    pub fn new(
        dim: usize,
        warping: WarpingProfile<R>,
        epsilon0: R,
        params: NumericsParams<R>,
    ) -> Result<Self, GeometryError<R>> {
        if dim < 2 {
            return Err(GeometryError::BadDimension { dim });
        }
        if !(epsilon0 > R::zero() && epsilon0 < R::one()) {
            return Err(GeometryError::BadBaseRadius { eps0: epsilon0 });
        }
        // Δr >= 0 near the pole requires φ' > 0 on (0, 4 eps0].
        let top = (R::of(4.0) * epsilon0).min(warping.r_max());
        let n_check = 512;
        for i in 1..=n_check {
            let r = top * R::of_usize(i) / R::of_usize(n_check);
            if !(warping.dphi(r) > R::zero()) {
                return Err(GeometryError::NotExpandingNearPole { r });
            }
        }
        let sphere_area = R::of(unit_sphere_area(dim));
        Ok(ModelManifold {
            dim,
            warping,
            epsilon0,
            sphere_area,
            params,
        })
    }

    pub fn with_defaults(dim: usize, warping: WarpingProfile<R>) -> Result<Self, GeometryError<R>> {
        Self::new(dim, warping, R::of(0.1), NumericsParams::default())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn warping(&self) -> &WarpingProfile<R> {
        &self.warping
    }

    pub fn epsilon0(&self) -> R {
        self.epsilon0
    }

    pub fn sphere_area(&self) -> R {
        self.sphere_area
    }

    pub fn r_max(&self) -> R {
        self.warping.r_max()
    }

    pub fn params(&self) -> &NumericsParams<R> {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut NumericsParams<R> {
        &mut self.params
    }

    fn check_radius(&self, r: R) -> Result<(), GeometryError<R>> {
        if r > R::zero() && r <= self.r_max() {
            Ok(())
        } else {
            Err(GeometryError::Domain {
                r,
                lo: R::zero(),
                hi: self.r_max(),
            })
        }
    }

    /// Radial Ricci curvature `Ric(∇r, ∇r) = -(n-1) φ''/φ`.
    pub fn ricci_radial(&self, r: R) -> Result<R, GeometryError<R>> {
        self.check_radius(r)?;
        Ok(-R::of_usize(self.dim - 1) * self.warping.ratio_d2(r))
    }

    /// Laplacian of the distance function, `Δr = (n-1) φ'/φ` (the mean
    /// curvature of the geodesic sphere of radius r).
    pub fn mean_curvature(&self, r: R) -> Result<R, GeometryError<R>> {
        self.check_radius(r)?;
        Ok(R::of_usize(self.dim - 1) * self.warping.ratio_d1(r))
    }

    /// Shell suprema of φ''/φ and φ'/φ over `[eps0, R]`, refined until both
    /// stabilize to 1e-6 relative.
    pub fn curvature_scale(&self, radius: R) -> Result<CurvatureScale<R>, GeometryError<R>> {
        if !(radius > self.epsilon0) || radius > self.r_max() {
            return Err(GeometryError::Domain {
                r: radius,
                lo: self.epsilon0,
                hi: self.r_max(),
            });
        }
        // The shell supremum is split at 1.5: warping splices concentrate
        // their features (e.g. the quintic-blend curvature peak) below that
        // radius, so the inner window starts densely sampled while the outer
        // window holds only the smooth family tail. Each window refines by
        // doubling with a parabolic polish of interior maxima, so a narrow
        // peak cannot slip between two consecutive grids.
        let d2 = |r: R| self.warping.ratio_d2(r);
        let d1 = |r: R| self.warping.ratio_d1(r);
        let split = R::of(1.5).min(radius);
        let inner_init = 4096usize;
        let outer_init = self
            .params
            .curvature_grid_init
            .max(((radius - split).to64() * 16.0) as usize)
            .min(1 << 14);
        let mut k_tilde = sup_refined(
            self.epsilon0,
            split,
            inner_init,
            self.params.curvature_grid_cap,
            &d2,
        );
        let mut k_hat = sup_refined(
            self.epsilon0,
            split,
            inner_init,
            self.params.curvature_grid_cap,
            &d1,
        );
        if radius > split {
            k_tilde = k_tilde.max(sup_refined(
                split,
                radius,
                outer_init,
                self.params.curvature_grid_cap,
                &d2,
            ));
            k_hat = k_hat.max(sup_refined(
                split,
                radius,
                outer_init,
                self.params.curvature_grid_cap,
                &d1,
            ));
        }
        let k = R::one().max(k_tilde).max(k_hat);
        Ok(CurvatureScale {
            radius,
            k_tilde,
            k_hat,
            k,
            theta: radius * k.sqrt(),
        })
    }

    /// θ(R) = R √K(R).
    pub fn theta(&self, radius: R) -> Result<R, GeometryError<R>> {
        Ok(self.curvature_scale(radius)?.theta)
    }

    /// Volume of the geodesic ball of radius R.
    pub fn volume_ball(&self, radius: R) -> Result<R, GeometryError<R>> {
        self.check_radius(radius)?;
        let nm1 = self.dim - 1;
        let w = &self.warping;
        let integrand = |t: R| ((R::of_usize(nm1)) * w.log_phi(t)).exp();
        // log_phi -> -inf at t = 0 makes the weight vanish there; the
        // quadrature never samples the endpoint itself. Tolerance scales
        // with a coarse magnitude probe so exponentially large volumes work.
        let mut probe = R::zero();
        for i in 1..=8 {
            probe = probe.max(integrand(radius * R::of_usize(i) / R::of(8.0)));
        }
        let tol = self.params.quad_tol * (probe * radius).max(R::one());
        let result = integrate(integrand, R::zero(), radius, tol)?;
        Ok(self.sphere_area * result.value)
    }

    /// Weighted volume element at radius r: `ω_{n-1} φ(r)^{n-1}`.
    pub fn area_radius(&self, r: R) -> R {
        self.sphere_area * (R::of_usize(self.dim - 1) * self.warping.log_phi(r)).exp()
    }

    /// Parabolic / non-parabolic and finite / infinite volume classification
    /// via dyadic-window growth tests of `∫ φ^{1-n}` and `∫ φ^{n-1}`.
    pub fn classify(&self) -> Result<Classification, GeometryError<R>> {
        let nm1 = R::of_usize(self.dim - 1);
        let green_kernel = |t: R| (-nm1 * self.warping.log_phi(t)).exp();
        let volume_kernel = |t: R| (nm1 * self.warping.log_phi(t)).exp();
        let log_green = |t: R| -nm1 * self.warping.log_phi(t);
        let log_volume = |t: R| nm1 * self.warping.log_phi(t);

        let parabolicity = match self.window_growth(&green_kernel, &log_green)? {
            WindowVerdict::Convergent => Parabolicity::NonParabolic,
            WindowVerdict::Divergent => Parabolicity::Parabolic,
            WindowVerdict::Inconclusive => {
                return Err(GeometryError::Inconclusive {
                    integral: "integral of phi^(1-n)",
                })
            }
        };
        let volume = match self.window_growth(&volume_kernel, &log_volume)? {
            WindowVerdict::Convergent => VolumeClass::FiniteVolume,
            WindowVerdict::Divergent => VolumeClass::InfiniteVolume,
            WindowVerdict::Inconclusive => {
                return Err(GeometryError::Inconclusive {
                    integral: "integral of phi^(n-1)",
                })
            }
        };
        Ok(Classification {
            parabolicity,
            volume,
        })
    }

    fn window_growth(
        &self,
        kernel: &impl Fn(R) -> R,
        log_kernel: &impl Fn(R) -> R,
    ) -> Result<WindowVerdict, GeometryError<R>> {
        let overflow_guard = R::of(690.0);
        let mut increments: Vec<R> = Vec::new();
        let mut t = R::one();
        while t * R::of(2.0) <= self.r_max() {
            let hi = t * R::of(2.0);
            // A window whose integrand exceeds the f64 range certifies
            // divergence for these monotone-in-log kernels.
            let probe = log_kernel(hi).max(log_kernel((t + hi) * R::of(0.5)));
            if probe > overflow_guard {
                return Ok(WindowVerdict::Divergent);
            }
            let rough = kernel(t).max(kernel(hi)) * (hi - t);
            let tol = (rough * R::of(1e-9)).max(R::min_positive_value() * R::of(1e10));
            let window = integrate(kernel, t, hi, tol)?;
            increments.push(window.value);
            t = hi;
        }
        if increments.len() < 3 {
            return Ok(WindowVerdict::Inconclusive);
        }
        let mut ratios: Vec<R> = Vec::new();
        for k in 1..increments.len() {
            if increments[k - 1] == R::zero() {
                // Underflowed increments after a decreasing run: converged.
                return Ok(WindowVerdict::Convergent);
            }
            ratios.push(increments[k] / increments[k - 1]);
        }
        let last = *ratios.last().expect("nonempty");
        let growing = ratios.windows(2).any(|w| w[1] > w[0] * R::of(1.05)) && last > R::of(0.5);
        if last >= R::of(0.975) || (growing && last > R::one()) {
            return Ok(WindowVerdict::Divergent);
        }
        if last <= R::of(0.9) {
            return Ok(WindowVerdict::Convergent);
        }
        Ok(WindowVerdict::Inconclusive)
    }
}

enum WindowVerdict {
    Convergent,
    Divergent,
    Inconclusive,
}

/// Supremum of `f` over `[lo, hi]` by grid doubling with parabolic polishing
/// of interior maxima, stabilized to 1e-6 relative.
fn sup_refined<R: Real>(lo: R, hi: R, init: usize, cap: usize, f: &impl Fn(R) -> R) -> R {
    let grid_sup = |n: usize| -> R {
        let at = |i: usize| lo + (hi - lo) * R::of_usize(i) / R::of_usize(n);
        let mut best = R::neg_infinity();
        let mut best_i = 0usize;
        for i in 0..=n {
            let v = f(at(i));
            if v > best {
                best = v;
                best_i = i;
            }
        }
        if best_i > 0 && best_i < n {
            let (xm, x0, xp) = (at(best_i - 1), at(best_i), at(best_i + 1));
            let (fm, f0, fp) = (f(xm), best, f(xp));
            let denom = fm - R::of(2.0) * f0 + fp;
            if denom < R::zero() {
                let h = (xp - xm) * R::of(0.5);
                let shift = (fm - fp) * h / (R::of(2.0) * denom);
                let v = x0 - shift;
                if v > xm && v < xp {
                    best = best.max(f(v));
                }
            }
        }
        best
    };
    let mut n = init.max(64);
    let mut sup = grid_sup(n);
    while n < cap {
        n *= 2;
        let next = grid_sup(n);
        let stable = (next - sup).abs() <= R::of(1e-6) * next.abs().max(R::one());
        sup = next;
        if stable {
            break;
        }
    }
    sup
}
