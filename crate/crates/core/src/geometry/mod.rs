//! Warped-product geometry: warping profiles and model manifolds.

pub mod manifold;
pub mod profile;

pub use manifold::{
    unit_sphere_area, Classification, CurvatureScale, GeometryError, ModelManifold, NumericsParams,
    Parabolicity, VolumeClass,
};
pub use profile::{
    CustomInterp, CustomSamples, ProfileError, ProfileFamily, QuinticBlend, WarpingProfile,
};
