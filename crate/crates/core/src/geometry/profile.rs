//! Warping functions for model manifolds.
//!
//! A profile is a member of the class `φ(0) = 0, φ'(0) = 1, φ > 0 on (0, ∞)`
//! together with its first two derivatives. All geometric quantities derive
//! from it. Four families are provided:
//!
//! * `Euclidean`    — φ(r) = r
//! * `SpaceForm`    — φ(r) = sinh(κr)/κ with κ = √(-k), constant curvature k < 0
//! * `PowerExp`     — φ(r) = r on [0, ½], a C² quintic blend on [½, 1],
//!   then exp(B·r^{1+γ/2}) exactly for r ≥ 1
//! * `Custom`       — sampled triples (φ, φ', φ'') with Hermite interpolation
//!
//! Exponentially growing profiles overflow `phi` at large radii, so every
//! consumer that can reach such radii works through `log_phi` and the ratio
//! accessors `ratio_d1 = φ'/φ`, `ratio_d2 = φ''/φ`, which stay finite.

use std::sync::Arc;

use thiserror::Error;

use crate::real::Real;

#[derive(Debug, Error)]
pub enum ProfileError<R: Real> {
    #[error("warping profile must satisfy phi(0) = 0 and phi'(0) = 1")]
    BadOrigin,
    #[error("warping profile not strictly positive at r = {r}")]
    NotPositive { r: R },
    #[error("splice discontinuity at r = {r}: relative jump {jump}")]
    SpliceJump { r: R, jump: R },
    #[error("space form curvature must be negative, got {k}")]
    BadCurvature { k: R },
    #[error("power-exp exponent gamma must be >= 0, got {gamma}")]
    BadGamma { gamma: R },
    #[error("custom profile needs >= 4 strictly increasing samples starting at 0")]
    BadSamples,
    #[error("truncation radius must be positive and finite")]
    BadTruncation,
}

/// Quintic Hermite polynomial on `[a, b]` matching value, first and second
/// derivative at both endpoints. Stored as monomial coefficients in the
/// normalized coordinate `t = (r - a) / (b - a)`.
#[derive(Debug, Clone, Copy)]
pub struct QuinticBlend<R> {
    a: R,
    width: R,
    coeff: [R; 6],
}

impl<R: Real> QuinticBlend<R> {
    /// Endpoint data are (value, d/dr, d²/dr²) at `a` and at `b`.
    pub fn new(a: R, b: R, left: (R, R, R), right: (R, R, R)) -> Self {
        let w = b - a;
        let (v0, d0r, s0r) = left;
        let (v1, d1r, s1r) = right;
        // Chain rule into t-coordinates.
        let d0 = d0r * w;
        let d1 = d1r * w;
        let s0 = s0r * w * w;
        let s1 = s1r * w * w;
        let half = R::of(0.5);
        let c3 = R::of(10.0) * (v1 - v0) - R::of(6.0) * d0 - R::of(4.0) * d1
            + (s1 - R::of(3.0) * s0) * half;
        let c4 = R::of(15.0) * (v0 - v1)
            + R::of(8.0) * d0
            + R::of(7.0) * d1
            + (R::of(3.0) * s0 - R::of(2.0) * s1) * half;
        let c5 = R::of(6.0) * (v1 - v0) - R::of(3.0) * (d0 + d1) + (s1 - s0) * half;
        QuinticBlend {
            a,
            width: w,
            coeff: [v0, d0, s0 * half, c3, c4, c5],
        }
    }

    fn t(&self, r: R) -> R {
        (r - self.a) / self.width
    }

    pub fn value(&self, r: R) -> R {
        let t = self.t(r);
        let c = &self.coeff;
        ((((c[5] * t + c[4]) * t + c[3]) * t + c[2]) * t + c[1]) * t + c[0]
    }

    pub fn deriv(&self, r: R) -> R {
        let t = self.t(r);
        let c = &self.coeff;
        let dt = (((c[5] * R::of(5.0) * t + c[4] * R::of(4.0)) * t + c[3] * R::of(3.0)) * t
            + c[2] * R::of(2.0))
            * t
            + c[1];
        dt / self.width
    }

    pub fn second_deriv(&self, r: R) -> R {
        let t = self.t(r);
        let c = &self.coeff;
        let dtt = ((c[5] * R::of(20.0) * t + c[4] * R::of(12.0)) * t + c[3] * R::of(6.0)) * t
            + c[2] * R::of(2.0);
        dtt / (self.width * self.width)
    }
}

/// Sampled custom profile: strictly increasing radii with (φ, φ', φ'') at
/// each node, interpolated by per-cell quintic Hermite polynomials that
/// match all three at both cell ends. The interpolant is globally C² and
/// its own derivatives serve as φ' and φ'', so no numerical differentiation
/// happens anywhere and the triple stays exactly self-consistent.
#[derive(Debug)]
pub struct CustomSamples<R> {
    pub rs: Vec<R>,
    pub phi: Vec<R>,
    pub dphi: Vec<R>,
    pub d2phi: Vec<R>,
}

#[derive(Debug)]
pub struct CustomInterp<R> {
    rs: Vec<R>,
    cells: Vec<QuinticBlend<R>>,
}

impl<R: Real> CustomInterp<R> {
    fn new(s: &CustomSamples<R>) -> Self {
        let n = s.rs.len();
        let mut cells = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            cells.push(QuinticBlend::new(
                s.rs[i],
                s.rs[i + 1],
                (s.phi[i], s.dphi[i], s.d2phi[i]),
                (s.phi[i + 1], s.dphi[i + 1], s.d2phi[i + 1]),
            ));
        }
        CustomInterp {
            rs: s.rs.clone(),
            cells,
        }
    }

    fn segment(&self, r: R) -> usize {
        let n = self.rs.len();
        let mut lo = 0usize;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.rs[mid] <= r {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    fn value(&self, r: R) -> R {
        self.cells[self.segment(r)].value(r)
    }

    fn deriv(&self, r: R) -> R {
        self.cells[self.segment(r)].deriv(r)
    }

    fn second(&self, r: R) -> R {
        self.cells[self.segment(r)].second_deriv(r)
    }
}

#[derive(Debug, Clone)]
pub enum ProfileFamily<R> {
    Euclidean,
    SpaceForm {
        /// Sectional curvature k < 0.
        curvature: R,
    },
    PowerExp {
        gamma: R,
        growth: R,
        blend: QuinticBlend<R>,
    },
    Custom(Arc<CustomInterp<R>>),
}

/// A warping function together with its truncation radius.
#[derive(Debug, Clone)]
pub struct WarpingProfile<R> {
    family: ProfileFamily<R>,
    r_max: R,
}

impl<R: Real> WarpingProfile<R> {
    pub fn euclidean(r_max: R) -> Result<Self, ProfileError<R>> {
        Self::build(ProfileFamily::Euclidean, r_max)
    }

    pub fn space_form(curvature: R, r_max: R) -> Result<Self, ProfileError<R>> {
        if !(curvature < R::zero()) {
            return Err(ProfileError::BadCurvature { k: curvature });
        }
        Self::build(ProfileFamily::SpaceForm { curvature }, r_max)
    }

    /// Hyperbolic space warping sinh(r) (curvature -1).
    pub fn hyperbolic(r_max: R) -> Result<Self, ProfileError<R>> {
        Self::space_form(-R::one(), r_max)
    }

    pub fn power_exp(gamma: R, r_max: R) -> Result<Self, ProfileError<R>> {
        Self::power_exp_with_growth(gamma, R::one(), r_max)
    }

    pub fn power_exp_with_growth(gamma: R, growth: R, r_max: R) -> Result<Self, ProfileError<R>> {
        if !(gamma >= R::zero()) {
            return Err(ProfileError::BadGamma { gamma });
        }
        let m = R::one() + gamma * R::of(0.5);
        let b = growth;
        let e_b = b.exp();
        let right_val = e_b;
        let right_d1 = b * m * e_b;
        let right_d2 = (b * m * (m - R::one()) + b * b * m * m) * e_b;
        let blend = QuinticBlend::new(
            R::of(0.5),
            R::one(),
            (R::of(0.5), R::one(), R::zero()),
            (right_val, right_d1, right_d2),
        );
        Self::build(
            ProfileFamily::PowerExp {
                gamma,
                growth,
                blend,
            },
            r_max,
        )
    }

    pub fn custom(samples: CustomSamples<R>, r_max: R) -> Result<Self, ProfileError<R>> {
        let n = samples.rs.len();
        if n < 4
            || samples.phi.len() != n
            || samples.dphi.len() != n
            || samples.d2phi.len() != n
            || samples.rs[0] != R::zero()
        {
            return Err(ProfileError::BadSamples);
        }
        for i in 1..n {
            if !(samples.rs[i] > samples.rs[i - 1]) {
                return Err(ProfileError::BadSamples);
            }
        }
        if samples.rs[n - 1] < r_max {
            return Err(ProfileError::BadSamples);
        }
        let interp = CustomInterp::new(&samples);
        Self::build(ProfileFamily::Custom(Arc::new(interp)), r_max)
    }

    /// Sample a smooth triple (φ, φ', φ'') on a uniform grid into a custom
    /// profile. The grid is dense enough that cubic Hermite interpolation
    /// error stays near machine precision for smooth inputs.
    pub fn custom_from_fns(
        phi: impl Fn(R) -> R,
        dphi: impl Fn(R) -> R,
        d2phi: impl Fn(R) -> R,
        r_max: R,
        points: usize,
    ) -> Result<Self, ProfileError<R>> {
        let n = points.max(4);
        let h = r_max / R::of_usize(n - 1);
        let mut rs = Vec::with_capacity(n);
        let mut p = Vec::with_capacity(n);
        let mut dp = Vec::with_capacity(n);
        let mut d2p = Vec::with_capacity(n);
        for i in 0..n {
            let r = if i + 1 == n {
                r_max
            } else {
                h * R::of_usize(i)
            };
            rs.push(r);
            p.push(phi(r));
            dp.push(dphi(r));
            d2p.push(d2phi(r));
        }
        Self::custom(
            CustomSamples {
                rs,
                phi: p,
                dphi: dp,
                d2phi: d2p,
            },
            r_max,
        )
    }

    /// The finite-volume cusp φ(r) = r e^{-r}, realized as a sampled custom
    /// profile (it is already in the admissible class: φ(0)=0, φ'(0)=1).
    pub fn exp_decay_cusp(r_max: R) -> Result<Self, ProfileError<R>> {
        let per_unit = 400usize;
        let points = (r_max.to64().ceil() as usize) * per_unit + 1;
        Self::custom_from_fns(
            |r: R| r * (-r).exp(),
            |r: R| (R::one() - r) * (-r).exp(),
            |r: R| (r - R::of(2.0)) * (-r).exp(),
            r_max,
            points,
        )
    }

    fn build(family: ProfileFamily<R>, r_max: R) -> Result<Self, ProfileError<R>> {
        if !(r_max > R::zero()) || !r_max.is_finite() {
            return Err(ProfileError::BadTruncation);
        }
        let profile = WarpingProfile { family, r_max };
        profile.validate()?;
        Ok(profile)
    }

    pub fn r_max(&self) -> R {
        self.r_max
    }

    pub fn family(&self) -> &ProfileFamily<R> {
        &self.family
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            ProfileFamily::Euclidean => "euclidean",
            ProfileFamily::SpaceForm { .. } => "space_form",
            ProfileFamily::PowerExp { .. } => "power_exp",
            ProfileFamily::Custom(_) => "custom",
        }
    }

    pub fn phi(&self, r: R) -> R {
        match &self.family {
            ProfileFamily::Euclidean => r,
            ProfileFamily::SpaceForm { curvature } => {
                let kappa = (-*curvature).sqrt();
                (kappa * r).sinh() / kappa
            }
            ProfileFamily::PowerExp {
                gamma,
                growth,
                blend,
            } => {
                if r <= R::of(0.5) {
                    r
                } else if r < R::one() {
                    blend.value(r)
                } else {
                    let m = R::one() + *gamma * R::of(0.5);
                    (*growth * r.powf(m)).exp()
                }
            }
            ProfileFamily::Custom(s) => {
                if r <= R::zero() {
                    R::zero()
                } else {
                    s.value(r)
                }
            }
        }
    }

    pub fn dphi(&self, r: R) -> R {
        match &self.family {
            ProfileFamily::Euclidean => R::one(),
            ProfileFamily::SpaceForm { curvature } => ((-*curvature).sqrt() * r).cosh(),
            ProfileFamily::PowerExp {
                gamma,
                growth,
                blend,
            } => {
                if r <= R::of(0.5) {
                    R::one()
                } else if r < R::one() {
                    blend.deriv(r)
                } else {
                    self.ratio_d1(r) * (*growth * r.powf(R::one() + *gamma * R::of(0.5))).exp()
                }
            }
            ProfileFamily::Custom(s) => s.deriv(r),
        }
    }

    pub fn d2phi(&self, r: R) -> R {
        match &self.family {
            ProfileFamily::Euclidean => R::zero(),
            ProfileFamily::SpaceForm { curvature } => {
                let kappa = (-*curvature).sqrt();
                kappa * (kappa * r).sinh()
            }
            ProfileFamily::PowerExp {
                gamma,
                growth,
                blend,
            } => {
                if r <= R::of(0.5) {
                    R::zero()
                } else if r < R::one() {
                    blend.second_deriv(r)
                } else {
                    self.ratio_d2(r) * (*growth * r.powf(R::one() + *gamma * R::of(0.5))).exp()
                }
            }
            ProfileFamily::Custom(s) => s.second(r),
        }
    }

    /// log φ(r), stable where φ itself would overflow.
    pub fn log_phi(&self, r: R) -> R {
        match &self.family {
            ProfileFamily::Euclidean => r.ln(),
            ProfileFamily::SpaceForm { curvature } => {
                let kappa = (-*curvature).sqrt();
                let x = kappa * r;
                // ln(sinh x / κ) = x + ln(1 - e^{-2x}) - ln(2κ)
                x + (-(-R::of(2.0) * x).exp()).ln_1p() - (R::of(2.0) * kappa).ln()
            }
            ProfileFamily::PowerExp { gamma, growth, .. } => {
                if r >= R::one() {
                    *growth * r.powf(R::one() + *gamma * R::of(0.5))
                } else {
                    self.phi(r).ln()
                }
            }
            ProfileFamily::Custom(_) => self.phi(r).ln(),
        }
    }

    /// φ'(r) / φ(r), stable at all radii.
    pub fn ratio_d1(&self, r: R) -> R {
        match &self.family {
            ProfileFamily::Euclidean => r.recip(),
            ProfileFamily::SpaceForm { curvature } => {
                let kappa = (-*curvature).sqrt();
                kappa / (kappa * r).tanh()
            }
            ProfileFamily::PowerExp {
                gamma,
                growth,
                blend,
            } => {
                if r <= R::of(0.5) {
                    r.recip()
                } else if r < R::one() {
                    blend.deriv(r) / blend.value(r)
                } else {
                    let m = R::one() + *gamma * R::of(0.5);
                    *growth * m * r.powf(m - R::one())
                }
            }
            ProfileFamily::Custom(s) => s.deriv(r) / s.value(r),
        }
    }

    /// φ''(r) / φ(r), stable at all radii.
    pub fn ratio_d2(&self, r: R) -> R {
        match &self.family {
            ProfileFamily::Euclidean => R::zero(),
            ProfileFamily::SpaceForm { curvature } => -*curvature,
            ProfileFamily::PowerExp {
                gamma,
                growth,
                blend,
            } => {
                if r <= R::of(0.5) {
                    R::zero()
                } else if r < R::one() {
                    blend.second_deriv(r) / blend.value(r)
                } else {
                    let m = R::one() + *gamma * R::of(0.5);
                    let s = *growth * m * r.powf(m - R::one());
                    *growth * m * (m - R::one()) * r.powf(m - R::of(2.0)) + s * s
                }
            }
            ProfileFamily::Custom(s) => s.second(r) / s.value(r),
        }
    }

    /// Certified lower bound on φ'/φ over `[t, ∞)` for `t ≥ 1`, when the
    /// family admits one. `None` for custom profiles (no tail knowledge)
    /// and for `t < 1`.
    pub fn log_slope_floor(&self, t: R) -> Option<R> {
        if t < R::one() {
            return None;
        }
        match &self.family {
            ProfileFamily::Euclidean => Some(R::zero()),
            ProfileFamily::SpaceForm { curvature } => Some((-*curvature).sqrt()),
            ProfileFamily::PowerExp { gamma, growth, .. } => {
                // φ'/φ = Bm r^{m-1} is non-decreasing beyond 1 (m >= 1).
                let m = R::one() + *gamma * R::of(0.5);
                Some(*growth * m * t.powf(m - R::one()))
            }
            ProfileFamily::Custom(_) => None,
        }
    }

    /// Certified bound on `∫_t^∞ exp(-(n-1) (logφ(s) - logφ(r_ref))) ds`,
    /// valid for `t ≥ max(r_ref, 1)`. `None` when the family has no usable
    /// tail control (custom profiles, or Euclidean in dimension 2).
    pub fn kernel_tail(&self, dim: usize, r_ref: R, t: R) -> Option<R> {
        let nm1 = R::of_usize(dim - 1);
        match &self.family {
            ProfileFamily::Euclidean => {
                if dim < 3 {
                    return None;
                }
                // ∫_t^∞ (r_ref/s)^{n-1} ds = r_ref^{n-1} t^{2-n} / (n-2)
                let nm2 = R::of_usize(dim - 2);
                Some((nm1 * (r_ref.ln() - t.ln())).exp() * t / nm2)
            }
            ProfileFamily::SpaceForm { .. } | ProfileFamily::PowerExp { .. } => {
                let floor = self.log_slope_floor(t)?;
                if !(floor > R::zero()) {
                    return None;
                }
                let g = (-nm1 * (self.log_phi(t) - self.log_phi(r_ref))).exp();
                Some(g / (nm1 * floor))
            }
            ProfileFamily::Custom(_) => None,
        }
    }

    fn validate(&self) -> Result<(), ProfileError<R>> {
        // Origin conditions (with slack for sampled profiles).
        let h = R::of(1e-6).max(R::epsilon().sqrt());
        let near0 = self.phi(h);
        if (near0 / h - R::one()).abs() > R::of(1e-3) {
            return Err(ProfileError::BadOrigin);
        }
        // Positivity on a validation grid over (0, r_max]. Use log_phi for
        // families that overflow phi.
        let n = 2048usize;
        for i in 1..=n {
            let r = self.r_max * R::of_usize(i) / R::of_usize(n);
            let lp = self.log_phi(r);
            if lp.is_nan() {
                return Err(ProfileError::NotPositive { r });
            }
        }
        // Splice continuity for the power-exp family.
        if let ProfileFamily::PowerExp { .. } = self.family {
            for joint in [R::of(0.5), R::one()] {
                let eps = R::of(1e-9);
                let below = joint - eps;
                let above = joint + eps;
                for (f, df_scale) in [
                    (&(|r: R| self.phi(r)) as &dyn Fn(R) -> R, R::one()),
                    (&(|r: R| self.dphi(r)) as &dyn Fn(R) -> R, R::one()),
                    (&(|r: R| self.d2phi(r)) as &dyn Fn(R) -> R, R::of(100.0)),
                ] {
                    let (lo, hi) = (f(below), f(above));
                    let scale = lo.abs().max(hi.abs()).max(R::one());
                    // Values eps apart can legitimately differ by eps * |f'|;
                    // allow a generous multiple, still catching real jumps.
                    if ((hi - lo) / scale).abs() > R::of(1e-6) * df_scale {
                        return Err(ProfileError::SpliceJump {
                            r: joint,
                            jump: (hi - lo) / scale,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_basics() {
        let p = WarpingProfile::<f64>::euclidean(10.0).unwrap();
        assert_eq!(p.phi(2.0), 2.0);
        assert_eq!(p.dphi(2.0), 1.0);
        assert_eq!(p.d2phi(2.0), 0.0);
        assert!((p.log_phi(3.0) - 3.0f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn hyperbolic_matches_sinh() {
        let p = WarpingProfile::<f64>::hyperbolic(30.0).unwrap();
        for r in [0.3, 1.0, 2.5, 10.0] {
            assert!((p.phi(r) - r.sinh()).abs() / r.sinh() < 1e-14);
            assert!((p.dphi(r) - r.cosh()).abs() / r.cosh() < 1e-14);
            assert!((p.ratio_d2(r) - 1.0).abs() < 1e-14);
            assert!((p.ratio_d1(r) - 1.0 / r.tanh()).abs() < 1e-13);
            assert!((p.log_phi(r) - r.sinh().ln()).abs() < 1e-12);
        }
        // Stable log for radii where sinh overflows.
        let lp = p.log_phi(30.0);
        assert!((lp - (30.0 - 2.0f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn space_form_scaling() {
        let k = -4.0f64;
        let p = WarpingProfile::space_form(k, 10.0).unwrap();
        let kappa = 2.0f64;
        for r in [0.2, 1.0, 3.0] {
            let expect = (kappa * r).sinh() / kappa;
            assert!((p.phi(r) - expect).abs() / expect < 1e-14);
            assert!((p.ratio_d2(r) - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn power_exp_exact_beyond_one() {
        let p = WarpingProfile::<f64>::power_exp(2.0, 20.0).unwrap();
        for r in [1.0f64, 1.5, 2.0, 3.0] {
            let expect = (r * r).exp();
            assert!((p.phi(r) - expect).abs() / expect < 1e-14);
            // φ''/φ = 4r² + 2 for γ = 2 (symbolic differentiation of e^{r²}).
            assert!((p.ratio_d2(r) - (4.0 * r * r + 2.0)).abs() / (4.0 * r * r + 2.0) < 1e-13);
            assert!((p.ratio_d1(r) - 2.0 * r).abs() < 1e-12);
        }
        assert_eq!(p.phi(0.25), 0.25);
        // log_phi stays finite where phi overflows.
        assert!((p.log_phi(100.0) - 10_000.0).abs() < 1e-9);
        assert!(!p.phi(100.0).is_finite());
    }

    #[test]
    fn power_exp_splice_is_c2() {
        for gamma in [0.0f64, 2.0, 3.0, 6.0] {
            let p = WarpingProfile::power_exp(gamma, 5.0).unwrap();
            for joint in [0.5f64, 1.0] {
                // One-sided limits agree by construction; a |delta| = 1e-9
                // probe only picks up the continuous third-derivative slope.
                let eps = 1e-9;
                for f in [
                    &(|r: f64| p.phi(r)) as &dyn Fn(f64) -> f64,
                    &(|r: f64| p.dphi(r)),
                    &(|r: f64| p.d2phi(r)),
                ] {
                    let (lo, hi) = (f(joint - eps), f(joint + eps));
                    let scale = lo.abs().max(hi.abs()).max(1.0);
                    assert!(
                        ((hi - lo) / scale).abs() < 1e-5,
                        "jump at {joint} for gamma {gamma}: {lo} vs {hi}"
                    );
                }
            }
        }
    }

    #[test]
    fn cusp_profile_interpolates_accurately() {
        let p = WarpingProfile::<f64>::exp_decay_cusp(40.0).unwrap();
        for r in [0.05f64, 0.5, 1.0, 2.7, 10.0, 25.0] {
            let exact = r * (-r).exp();
            assert!(
                (p.phi(r) - exact).abs() <= 1e-11 * exact.max(1e-12),
                "r = {r}"
            );
            let exact_d = (1.0 - r) * (-r).exp();
            assert!((p.dphi(r) - exact_d).abs() < 1e-10);
        }
    }

    #[test]
    fn kernel_tail_bounds_euclidean() {
        // ∫_t^∞ (r/s)² ds = r²/t for n = 3.
        let p = WarpingProfile::<f64>::euclidean(100.0).unwrap();
        let bound = p.kernel_tail(3, 2.0, 8.0).unwrap();
        assert!((bound - 4.0 / 8.0).abs() < 1e-12);
        assert!(p.kernel_tail(2, 2.0, 8.0).is_none());
    }

    #[test]
    fn kernel_tail_dominates_true_tail_hyperbolic() {
        let p = WarpingProfile::<f64>::hyperbolic(60.0).unwrap();
        // True tail: ∫_t^∞ (sinh r / sinh s)² ds = sinh²r (coth t - 1).
        let r = 1.0f64;
        for t in [2.0f64, 4.0, 8.0] {
            let truth = r.sinh().powi(2) * (1.0 / t.tanh() - 1.0);
            let bound = p.kernel_tail(3, r, t).unwrap();
            assert!(bound >= truth, "bound {bound} below truth {truth}");
            assert!(bound <= truth * 3.0, "bound too loose: {bound} vs {truth}");
        }
    }
}
