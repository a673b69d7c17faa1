//! Manifold and run configuration: a JSON document with a strict schema
//! (unknown keys are rejected) that fully determines every computation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{GeometryError, ModelManifold, NumericsParams, ProfileError, WarpingProfile};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("config io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid profile: {0}")]
    Profile(String),
    #[error("invalid manifold: {0}")]
    Manifold(String),
    #[error("custom profile file {path}: {message}")]
    CustomSamples { path: String, message: String },
}

impl From<ProfileError<f64>> for ConfigError {
    fn from(e: ProfileError<f64>) -> Self {
        ConfigError::Profile(e.to_string())
    }
}

impl From<GeometryError<f64>> for ConfigError {
    fn from(e: GeometryError<f64>) -> Self {
        ConfigError::Manifold(e.to_string())
    }
}

/// Warping family selector.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum FamilyConfig {
    Euclidean,
    SpaceForm {
        curvature: f64,
    },
    PowerExp {
        gamma: f64,
        #[serde(default = "default_growth")]
        growth: f64,
    },
    /// CSV file with header `r,phi,dphi,d2phi`.
    Custom {
        path: String,
    },
    /// Built-in finite-volume cusp φ(r) = r e^{-r}.
    ExpDecayCusp,
}

fn default_growth() -> f64 {
    1.0
}

fn default_eps0() -> f64 {
    0.1
}

fn default_r_max() -> f64 {
    60.0
}

fn default_quad_tol() -> f64 {
    1e-10
}

fn default_lambda_nodes() -> usize {
    1000
}

fn default_curvature_grid() -> usize {
    256
}

/// Full manifold description.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ManifoldConfig {
    pub dimension: usize,
    pub family: FamilyConfig,
    #[serde(default = "default_eps0")]
    pub epsilon0: f64,
    #[serde(default = "default_r_max")]
    pub r_max: f64,
    #[serde(default = "default_quad_tol")]
    pub quad_tol: f64,
    #[serde(default = "default_lambda_nodes")]
    pub lambda_nodes: usize,
    #[serde(default = "default_curvature_grid")]
    pub curvature_grid: usize,
}

impl Default for ManifoldConfig {
    fn default() -> Self {
        ManifoldConfig {
            dimension: 3,
            family: FamilyConfig::Euclidean,
            epsilon0: default_eps0(),
            r_max: default_r_max(),
            quad_tol: default_quad_tol(),
            lambda_nodes: default_lambda_nodes(),
            curvature_grid: default_curvature_grid(),
        }
    }
}

impl ManifoldConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_file(path: &str) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn build(&self) -> Result<ModelManifold<f64>, ConfigError> {
        let warping = match &self.family {
            FamilyConfig::Euclidean => WarpingProfile::euclidean(self.r_max)?,
            FamilyConfig::SpaceForm { curvature } => {
                WarpingProfile::space_form(*curvature, self.r_max)?
            }
            FamilyConfig::PowerExp { gamma, growth } => {
                WarpingProfile::power_exp_with_growth(*gamma, *growth, self.r_max)?
            }
            FamilyConfig::ExpDecayCusp => WarpingProfile::exp_decay_cusp(self.r_max)?,
            FamilyConfig::Custom { path } => load_custom_profile(path, self.r_max)?,
        };
        let params = NumericsParams {
            quad_tol: self.quad_tol,
            lambda_nodes: self.lambda_nodes,
            curvature_grid_init: self.curvature_grid,
            ..NumericsParams::default()
        };
        Ok(ModelManifold::new(
            self.dimension,
            warping,
            self.epsilon0,
            params,
        )?)
    }
}

fn load_custom_profile(path: &str, r_max: f64) -> Result<WarpingProfile<f64>, ConfigError> {
    let text = std::fs::read_to_string(path)?;
    let mut rs = Vec::new();
    let mut phi = Vec::new();
    let mut dphi = Vec::new();
    let mut d2phi = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if i == 0 && line.starts_with('r') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 4 {
            return Err(ConfigError::CustomSamples {
                path: path.into(),
                message: format!("line {}: expected 4 columns r,phi,dphi,d2phi", i + 1),
            });
        }
        let parse = |s: &str| -> Result<f64, ConfigError> {
            s.parse().map_err(|_| ConfigError::CustomSamples {
                path: path.into(),
                message: format!("line {}: bad number '{s}'", i + 1),
            })
        };
        rs.push(parse(cols[0])?);
        phi.push(parse(cols[1])?);
        dphi.push(parse(cols[2])?);
        d2phi.push(parse(cols[3])?);
    }
    Ok(WarpingProfile::custom(
        crate::geometry::CustomSamples {
            rs,
            phi,
            dphi,
            d2phi,
        },
        r_max,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_builds() {
        let cfg = ManifoldConfig::from_json(
            r#"{"dimension": 3, "family": {"space_form": {"curvature": -1.0}}, "r_max": 30.0}"#,
        )
        .unwrap();
        let m = cfg.build().unwrap();
        assert_eq!(m.dim(), 3);
        assert_eq!(m.r_max(), 30.0);
        assert!((m.warping().phi(1.0) - 1.0f64.sinh()).abs() < 1e-12);
    }

    #[test]
    fn rejects_unknown_keys() {
        let err = ManifoldConfig::from_json(
            r#"{"dimension": 3, "family": "euclidean", "tolerance_env": 1.0}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("tolerance_env"), "{err}");
    }

    #[test]
    fn power_exp_defaults() {
        let cfg = ManifoldConfig::from_json(
            r#"{"dimension": 3, "family": {"power_exp": {"gamma": 2.0}}, "r_max": 25.0}"#,
        )
        .unwrap();
        let m = cfg.build().unwrap();
        assert!((m.warping().phi(2.0) - 4.0f64.exp()).abs() / 4.0f64.exp() < 1e-12);
    }

    #[test]
    fn custom_profile_from_csv() {
        let dir = std::env::temp_dir().join("wp_cfg_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cusp.csv");
        let mut text = String::from("r,phi,dphi,d2phi\n");
        let n = 4000;
        for i in 0..=n {
            let r = 8.0 * i as f64 / n as f64;
            text.push_str(&format!(
                "{},{},{},{}\n",
                r,
                r * (-r).exp(),
                (1.0 - r) * (-r).exp(),
                (r - 2.0) * (-r).exp()
            ));
        }
        std::fs::write(&path, text).unwrap();
        let cfg = ManifoldConfig::from_json(&format!(
            r#"{{"dimension": 3, "family": {{"custom": {{"path": "{}"}}}}, "r_max": 8.0}}"#,
            path.display()
        ))
        .unwrap();
        let m = cfg.build().unwrap();
        let expect = 2.0f64 * (-2.0f64).exp();
        assert!((m.warping().phi(2.0) - expect).abs() < 1e-9);
    }
}
