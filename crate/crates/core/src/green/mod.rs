//! Radial Green's functions and Poisson solvers.

pub mod ops;
pub mod poisson;
pub mod profile;

pub use ops::{GradientRatioProfile, LevelSetAnnulus, TailIntegral};
pub use poisson::{
    classify_potential, solve_poisson, solve_poisson_finite_volume, unit_bump, PoissonSolve,
    PotentialClass, PotentialProbe, RadialSolution,
};
pub use profile::{GreenError, GreenKind, GreenProfile};
