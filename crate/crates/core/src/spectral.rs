//! Bottom of the spectrum of -Δ on radial domains.
//!
//! On a rotationally symmetric domain the infimum of the Rayleigh quotient is
//! attained among radial functions (angular gradients only add energy), so
//! everything reduces to the weighted 1-D problem
//!
//! ```text
//!   λ₁ = inf  ∫ (v')² φ^{n-1} dr / ∫ v² φ^{n-1} dr
//! ```
//!
//! discretized by second-order finite differences with the weight lumped at
//! the nodes. Exterior domains are truncated at an increasing ladder of outer
//! radii with Dirichlet conditions and the limit is Richardson-extrapolated
//! in the inverse square of the truncation length. Weights are rescaled by
//! their value at a reference radius, and the ladder lengths are capped so
//! the log-weight span across one solve stays representable; entries of the
//! reduced pencil then only involve neighbour ratios.

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{GeometryError, ModelManifold};
use crate::numerics::{integrate, smallest_eigenpair, EigenError, QuadError};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialDomain<R> {
    /// Complement of the ball of the given radius.
    Exterior { radius: R },
    /// Annulus between two radii.
    Annulus { inner: R, outer: R },
    /// The whole manifold.
    Whole,
}

impl<R: Real> RadialDomain<R> {
    pub fn exterior(radius: R) -> Self {
        RadialDomain::Exterior { radius }
    }

    pub fn annulus(inner: R, outer: R) -> Self {
        RadialDomain::Annulus { inner, outer }
    }
}

/// Two-sided estimate of the bottom of the spectrum on a radial domain.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpectralEstimate<R> {
    /// Discrete estimate (extrapolated truncation limit for unbounded
    /// domains).
    pub value: R,
    /// Certified Barta lower bound (0 when unavailable).
    pub barta_lower: R,
    /// Rayleigh quotient of the piecewise-linear discrete eigenvector: a
    /// variational upper bound for the truncated domain.
    pub rayleigh_upper: R,
    pub outer_radius_used: R,
    pub converged: bool,
}

#[derive(Debug, Error)]
pub enum SpectralError<R: Real> {
    #[error("domain radii invalid: inner {inner}, outer {outer} (r_max {r_max})")]
    BadDomain { inner: R, outer: R, r_max: R },
    #[error("exterior ladder not monotone at R = {radius}: {previous} -> {current}")]
    NonMonotoneLadder { radius: R, previous: R, current: R },
    #[error(transparent)]
    Geometry(#[from] GeometryError<R>),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error("quadrature failure: {0}")]
    Quadrature(String),
}

impl<R: Real> From<QuadError<R>> for SpectralError<R> {
    fn from(e: QuadError<R>) -> Self {
        SpectralError::Quadrature(e.to_string())
    }
}

enum InnerCondition {
    Dirichlet,
    NeumannPole,
}

struct IntervalSolve<R> {
    lambda: R,
    rayleigh: R,
}

/// One Dirichlet (or pole-Neumann) solve on `(lo, hi)` with `nodes` interior
/// nodes.
fn solve_interval<R: Real>(
    m: &ModelManifold<R>,
    lo: R,
    hi: R,
    inner: InnerCondition,
    nodes: usize,
) -> Result<IntervalSolve<R>, SpectralError<R>> {
    let nm1 = R::of_usize(m.dim() - 1);
    let lref = m.warping().log_phi((lo + hi) * R::of(0.5));
    let w = |r: R| {
        if r <= R::zero() {
            R::zero()
        } else {
            (nm1 * (m.warping().log_phi(r) - lref)).exp()
        }
    };

    let n = nodes.max(32);
    let (offset, h) = match inner {
        // Interior nodes lo + (i+1) h, Dirichlet rows at both ends.
        InnerCondition::Dirichlet => (R::one(), (hi - lo) / R::of_usize(n + 1)),
        // Staggered nodes lo + (i+1/2) h; the flux through the pole face
        // vanishes with the weight, which is the free (Neumann) condition.
        InnerCondition::NeumannPole => (R::of(0.5), (hi - lo) / R::of_usize(n)),
    };
    let node = |i: usize| lo + (R::of_usize(i) + offset) * h;

    let mut diag = Vec::with_capacity(n);
    let mut offd = Vec::with_capacity(n - 1);
    let mut mass = Vec::with_capacity(n);
    let h2 = h * h;
    for i in 0..n {
        let r = node(i);
        let wl = w(r - h * R::of(0.5));
        let wr = w(r + h * R::of(0.5));
        let close_right = match inner {
            // Dirichlet at hi: the face beyond the last node still carries
            // its weight (the boundary value is pinned to zero).
            _ if i + 1 < n => wr,
            InnerCondition::Dirichlet => wr,
            InnerCondition::NeumannPole => wr,
        };
        diag.push((wl + close_right) / h2);
        if i + 1 < n {
            offd.push(-wr / h2);
        }
        mass.push(w(r));
    }
    let (lambda, v) = smallest_eigenpair(&diag, &offd, &mass)?;

    // True Rayleigh quotient of the piecewise-linear interpolant (zero at
    // Dirichlet ends), with per-cell 2-point Gauss quadrature of the weight.
    let gauss = R::of(0.577_350_269_189_625_8);
    let mut num = R::zero();
    let mut den = R::zero();
    let cells = n + 1;
    for c in 0..cells {
        let (ra, va) = if c == 0 {
            match inner {
                InnerCondition::Dirichlet => (lo, R::zero()),
                InnerCondition::NeumannPole => (lo, v[0]),
            }
        } else {
            (node(c - 1), v[c - 1])
        };
        let (rb, vb) = if c == n {
            (hi, R::zero())
        } else {
            (node(c), v[c])
        };
        if rb <= ra {
            continue;
        }
        let hc = rb - ra;
        let slope = (vb - va) / hc;
        let mid = (ra + rb) * R::of(0.5);
        let half = hc * R::of(0.5);
        for s in [-gauss, gauss] {
            let r = mid + half * s;
            let weight = w(r) * half;
            let val = va + slope * (r - ra);
            num += weight * slope * slope;
            den += weight * val * val;
        }
    }
    let rayleigh = num / den;
    Ok(IntervalSolve { lambda, rayleigh })
}

/// Largest ladder length at `base` keeping the log-weight span representable.
fn cap_length<R: Real>(m: &ModelManifold<R>, base: R, want: R) -> R {
    let cap = m.params().log_weight_span_cap;
    let nm1 = R::of_usize(m.dim() - 1);
    let span = |len: R| -> R {
        let mut lo = R::infinity();
        let mut hi = R::neg_infinity();
        for i in 0..=8 {
            let r = base + len * R::of_usize(i) / R::of(8.0);
            let v = nm1 * m.warping().log_phi(r.max(base + len * R::of(1e-6)));
            lo = lo.min(v);
            hi = hi.max(v);
        }
        hi - lo
    };
    let mut len = want;
    let min_len = want * R::of(1e-4);
    while span(len) > cap && len > min_len {
        len *= R::of(0.5);
    }
    len
}

/// Bottom of the spectrum of the domain.
pub fn lambda1<R: Real>(
    m: &ModelManifold<R>,
    domain: &RadialDomain<R>,
) -> Result<SpectralEstimate<R>, SpectralError<R>> {
    let nodes = m.params().lambda_nodes;
    let barta = barta_lower_bound(m, domain)?;
    match *domain {
        RadialDomain::Annulus { inner, outer } => {
            if !(inner > R::zero() && inner < outer && outer <= m.r_max()) {
                return Err(SpectralError::BadDomain {
                    inner,
                    outer,
                    r_max: m.r_max(),
                });
            }
            let coarse = solve_interval(m, inner, outer, InnerCondition::Dirichlet, nodes)?;
            let fine = solve_interval(m, inner, outer, InnerCondition::Dirichlet, nodes * 2)?;
            let rel = (fine.lambda - coarse.lambda).abs() / fine.lambda.abs().max(R::of(1e-30));
            Ok(SpectralEstimate {
                value: fine.lambda,
                barta_lower: barta,
                rayleigh_upper: fine.rayleigh,
                outer_radius_used: outer,
                converged: rel < R::of(1e-3),
            })
        }
        RadialDomain::Exterior { radius } => {
            if !(radius > R::zero() && radius < m.r_max()) {
                return Err(SpectralError::BadDomain {
                    inner: radius,
                    outer: m.r_max(),
                    r_max: m.r_max(),
                });
            }
            ladder_solve(m, radius, InnerCondition::Dirichlet, nodes, barta)
        }
        RadialDomain::Whole => {
            ladder_solve(m, R::zero(), InnerCondition::NeumannPole, nodes, barta)
        }
    }
}

fn ladder_solve<R: Real>(
    m: &ModelManifold<R>,
    base: R,
    inner: InnerCondition,
    nodes: usize,
    barta: R,
) -> Result<SpectralEstimate<R>, SpectralError<R>> {
    let avail = m.r_max() - base;
    let mut lengths: Vec<R> = Vec::new();
    for &l in &m.params().exterior_ladder {
        let want = R::of(l).min(avail);
        let capped = cap_length(m, base, want);
        if lengths
            .iter()
            .all(|&x: &R| (x - capped).abs() > capped * R::of(1e-9))
        {
            lengths.push(capped);
        }
    }
    lengths.sort_by(|a, b| a.partial_cmp(b).expect("finite lengths"));
    if lengths.len() == 1 {
        let l = lengths[0];
        lengths = vec![l * R::of(0.5), l];
    }

    let mut solves: Vec<(R, IntervalSolve<R>)> = Vec::new();
    for &len in &lengths {
        let s = solve_interval(
            m,
            base,
            base + len,
            match inner {
                InnerCondition::Dirichlet => InnerCondition::Dirichlet,
                InnerCondition::NeumannPole => InnerCondition::NeumannPole,
            },
            nodes,
        )?;
        solves.push((len, s));
    }

    let (l_last, last) = (solves[solves.len() - 1].0, &solves[solves.len() - 1].1);
    let (l_prev, prev) = (solves[solves.len() - 2].0, &solves[solves.len() - 2].1);

    let converged =
        (last.lambda - prev.lambda).abs() <= R::of(1e-4) * last.lambda.abs().max(R::of(1e-12));

    // Model λ(L) = λ_inf + c / L²; truncation values decrease to the limit.
    let mut value = if prev.lambda > last.lambda {
        let (l1, l2) = (l_prev, l_last);
        (last.lambda * l2 * l2 - prev.lambda * l1 * l1) / (l2 * l2 - l1 * l1)
    } else {
        last.lambda
    };
    value = value.max(barta).max(R::zero()).min(last.lambda);

    Ok(SpectralEstimate {
        value,
        barta_lower: barta,
        rayleigh_upper: last.rayleigh,
        outer_radius_used: base + l_last,
        converged,
    })
}

/// Barta-type certified lower bound: with `a = inf_D Δr > 0`, the positive
/// test function `exp(-a r / 2)` gives `-Δv / v = (a/2) Δr - a²/4 ≥ a²/4`,
/// hence `λ₁(D) ≥ a²/4`. Returns 0 when `a` is not certifiably positive:
/// non-positive mean curvature somewhere, or an unbounded domain whose mean
/// curvature is still decaying at the truncation radius.
pub fn barta_lower_bound<R: Real>(
    m: &ModelManifold<R>,
    domain: &RadialDomain<R>,
) -> Result<R, SpectralError<R>> {
    let (lo, hi, unbounded) = match *domain {
        RadialDomain::Exterior { radius } => {
            if !(radius > R::zero() && radius < m.r_max()) {
                return Err(SpectralError::BadDomain {
                    inner: radius,
                    outer: m.r_max(),
                    r_max: m.r_max(),
                });
            }
            (radius, m.r_max(), true)
        }
        RadialDomain::Annulus { inner, outer } => {
            if !(inner > R::zero() && inner < outer && outer <= m.r_max()) {
                return Err(SpectralError::BadDomain {
                    inner,
                    outer,
                    r_max: m.r_max(),
                });
            }
            (inner, outer, false)
        }
        RadialDomain::Whole => (m.r_max() * R::of(1e-6), m.r_max(), true),
    };
    let n = 4096usize;
    let mut inf = R::infinity();
    let mut argmin = lo;
    for i in 0..=n {
        let r = lo + (hi - lo) * R::of_usize(i) / R::of_usize(n);
        let v = R::of_usize(m.dim() - 1) * m.warping().ratio_d1(r);
        if v < inf {
            inf = v;
            argmin = r;
        }
    }
    if !(inf > R::zero()) {
        return Ok(R::zero());
    }
    if unbounded && argmin > hi - (hi - lo) * R::of(0.05) {
        // Infimum sits at the truncation edge. If the mean curvature is
        // still decaying substantially across the outer half of the domain
        // the true infimum over the unbounded domain is not witnessed, so no
        // positive bound is certified.
        let mid = (lo + hi) * R::of(0.5);
        let m_mid = R::of_usize(m.dim() - 1) * m.warping().ratio_d1(mid);
        if inf < R::of(0.9) * m_mid {
            return Ok(R::zero());
        }
    }
    Ok(inf * inf * R::of(0.25))
}

/// Essential-spectrum estimate together with the exterior-radius ladder it
/// was extrapolated from.
#[derive(Debug, Clone, Serialize)]
pub struct EssSpectrum<R> {
    pub estimate: SpectralEstimate<R>,
    /// (exterior radius, lambda1 estimate) pairs, in increasing radius.
    pub ladder: Vec<(R, R)>,
}

/// Bottom of the essential spectrum: extrapolated supremum of exterior
/// eigenvalues over an increasing radius ladder.
pub fn lambda1_ess<R: Real>(m: &ModelManifold<R>) -> Result<SpectralEstimate<R>, SpectralError<R>> {
    Ok(lambda1_ess_with_ladder(m)?.estimate)
}

/// [`lambda1_ess`] with the ladder recorded.
pub fn lambda1_ess_with_ladder<R: Real>(
    m: &ModelManifold<R>,
) -> Result<EssSpectrum<R>, SpectralError<R>> {
    let mut radii: Vec<R> = m
        .params()
        .ess_ladder
        .iter()
        .map(|&r| R::of(r))
        .filter(|&r| r > R::zero() && r < m.r_max() - R::one())
        .collect();
    radii.sort_by(|a, b| a.partial_cmp(b).expect("finite radii"));
    radii.dedup_by(|a, b| (*a - *b).abs() < R::of(1e-12));
    assert!(
        radii.len() >= 2,
        "essential-spectrum ladder needs at least two radii"
    );

    let mut estimates: Vec<(R, SpectralEstimate<R>)> = Vec::new();
    for &r in &radii {
        let est = lambda1(m, &RadialDomain::exterior(r))?;
        if let Some((_, prevest)) = estimates.last() {
            let tol = R::of(1e-3) * prevest.value.abs().max(R::of(0.01));
            if est.value < prevest.value - tol {
                return Err(SpectralError::NonMonotoneLadder {
                    radius: r,
                    previous: prevest.value,
                    current: est.value,
                });
            }
        }
        estimates.push((r, est));
    }

    let (r_last, last) = estimates[estimates.len() - 1];
    let (r_prev, prev) = estimates[estimates.len() - 2];
    let delta = last.value - prev.value;
    let increments_shrinking = estimates.len() < 3 || {
        let (_, before) = estimates[estimates.len() - 3];
        (prev.value - before.value) * R::of(0.75) >= delta
    };

    // Model λ(R) = λ_ess - c / R when the ladder increments shrink;
    // otherwise (growing exterior eigenvalues, e.g. super-exponential
    // volume growth) report the last value.
    let value = if delta > R::zero() && increments_shrinking {
        let c = delta * r_prev * r_last / (r_last - r_prev);
        (last.value + c / r_last).max(R::zero())
    } else {
        last.value.max(R::zero())
    };

    let converged = delta.abs() <= R::of(1e-3) * last.value.abs().max(R::of(1e-9));
    Ok(EssSpectrum {
        estimate: SpectralEstimate {
            value,
            barta_lower: last.barta_lower,
            rayleigh_upper: last.rayleigh_upper,
            outer_radius_used: last.outer_radius_used,
            converged,
        },
        ladder: estimates.iter().map(|(r, e)| (*r, e.value)).collect(),
    })
}

/// λ₁ of the 1-D Dirichlet problem on an interval with the manifold weight,
/// by direct quadrature of the weight against a reference grid. Used by the
/// verification suites as an independent cross-check of [`lambda1`].
pub fn interval_dirichlet_oracle<R: Real>(
    m: &ModelManifold<R>,
    lo: R,
    hi: R,
    nodes: usize,
) -> Result<R, SpectralError<R>> {
    let nm1 = R::of_usize(m.dim() - 1);
    let lref = m.warping().log_phi((lo + hi) * R::of(0.5));
    let n = nodes.max(32);
    let h = (hi - lo) / R::of_usize(n + 1);
    let w = |r: R| (nm1 * (m.warping().log_phi(r) - lref)).exp();
    let mut diag = Vec::with_capacity(n);
    let mut offd = Vec::with_capacity(n - 1);
    let mut mass = Vec::with_capacity(n);
    for i in 0..n {
        let r = lo + (R::of_usize(i) + R::one()) * h;
        // Face weights from exact cell averages instead of midpoint values.
        let cell = |a: R, b: R| -> Result<R, SpectralError<R>> {
            Ok(integrate(w, a, b, R::of(1e-12) * (b - a).max(R::one()))?.value / (b - a))
        };
        let wl = cell(r - h, r)?;
        let wr = cell(r, r + h)?;
        diag.push((wl + wr) / (h * h));
        if i + 1 < n {
            offd.push(-wr / (h * h));
        }
        mass.push(w(r));
    }
    let (lambda, _) = smallest_eigenpair(&diag, &offd, &mass)?;
    Ok(lambda)
}
