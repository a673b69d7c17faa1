//! Computational toolkit for the Poisson equation on rotationally symmetric
//! (model) manifolds: warped-product geometry, bottom-of-spectrum estimates,
//! radial Green's functions, series convergence criteria and a suite of
//! packaged numerical experiments, all behind a deterministic CLI.
//!
//! The numerical core is generic over the scalar type through [`real::Real`]
//! (`f32` or `f64`); the type aliases below pin the `f64` instantiations
//! used by the CLI and the experiment suites.

// `!(x > y)` deliberately fails positivity checks on NaN inputs, and the
// Gauss-Kronrod tables keep their full reference precision.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]

pub mod cli;
pub mod config;
pub mod criterion;
pub mod geometry;
pub mod green;
pub mod numerics;
pub mod real;
pub mod spectral;
pub mod verify;

pub use real::Real;

/// `f64` instantiations of the main domain types.
pub type Quadrature64 = numerics::QuadratureResult<f64>;
pub type SlopeFit64 = numerics::SlopeFit<f64>;
pub type Profile64 = geometry::WarpingProfile<f64>;
pub type Manifold64 = geometry::ModelManifold<f64>;
pub type SpectralEstimate64 = spectral::SpectralEstimate<f64>;
pub type Green64 = green::GreenProfile<f64>;
pub type RadialSolution64 = green::RadialSolution<f64>;
pub type Envelope64 = criterion::DecayEnvelope<f64>;

/// `f32` instantiations, for consumers trading accuracy for footprint.
pub type Profile32 = geometry::WarpingProfile<f32>;
pub type Manifold32 = geometry::ModelManifold<f32>;
/// CLI entry point for the `warped-poisson` binary.
pub fn run_cli() -> i32 {
    cli::run(std::env::args_os())
}
