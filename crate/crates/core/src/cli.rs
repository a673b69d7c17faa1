//! Command-line front end: config ingestion, dispatch to the library
//! modules, and deterministic JSON/CSV report emission.
//!
//! Exit codes: 0 success, 1 precondition/usage error, 2 numerical-budget
//! error, 3 verification-suite failure.

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::ManifoldConfig;
use crate::criterion::{self, CriterionError, DecayEnvelope, LambdaMode, VerdictConfig};
use crate::geometry::{ModelManifold, Parabolicity, VolumeClass};
use crate::green::{
    solve_poisson, solve_poisson_finite_volume, GreenError, GreenProfile, PoissonSolve,
};
use crate::spectral::{lambda1, lambda1_ess_with_ladder, RadialDomain, SpectralError};
use crate::verify;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "warped-poisson",
    version,
    about = "Green's functions, spectral bounds and Poisson solvers on rotationally symmetric manifolds",
    long_about = None
)]
pub struct Cli {
    /// Manifold configuration file (JSON; see README for the schema).
    /// Defaults to Euclidean 3-space with r_max = 60.
    #[arg(long, global = true)]
    pub config: Option<String>,

    /// Write the full JSON report to this path.
    #[arg(long, global = true)]
    pub json: Option<String>,

    /// Write plot-ready CSV ('.' decimals, comma delimiter, header row).
    #[arg(long, global = true)]
    pub csv: Option<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Geometry summary: classification, curvature scale, ball volumes.
    Manifold {
        /// Action to perform (only `info`).
        action: String,
    },
    /// Bottom of the spectrum of a radial domain.
    Spectrum {
        /// Exterior domain M \ B_R (radius in geodesic units).
        #[arg(long)]
        exterior: Option<f64>,
        /// Essential spectrum estimate (increasing exterior ladder).
        #[arg(long)]
        ess: bool,
        /// Annulus domain "r1,r2".
        #[arg(long)]
        annulus: Option<String>,
    },
    /// Radial Green's function profile.
    Green {
        /// Kind: minimal | dirichlet | parabolic.
        #[arg(long, default_value = "minimal")]
        kind: String,
        /// Ball radius for the dirichlet kind.
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Solve -Δu = f for a radial source.
    Poisson {
        /// Source: "power:A" for (1+r)^-A, "expdecay:C" for e^{-Cr},
        /// or "file:PATH" for a CSV of (r, value) samples.
        #[arg(long)]
        source: String,
    },
    /// Series convergence criterion.
    Criterion {
        /// Envelope: "power:E" for (1+r)^E or "constant:C".
        #[arg(long)]
        zeta: String,
        /// Largest index of the computed terms.
        #[arg(long, default_value_t = 40)]
        jmax: usize,
        /// Spectral mode: numerical | barta.
        #[arg(long, default_value = "numerical")]
        mode: String,
    },
    /// Run verification suites.
    Verify {
        /// Suite: sharpness | tail_asymptotic | donnelly | levelset_bound |
        /// exponential_lower | all.
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Empirical existence threshold in the source decay exponent.
    Sharpness {
        #[arg(long)]
        gamma: f64,
        #[arg(long, allow_negative_numbers = true)]
        alpha_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        alpha_max: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
    },
}

#[derive(Debug)]
pub struct AppError {
    pub code: i32,
    pub message: String,
}

impl AppError {
    fn precondition(message: impl Into<String>) -> Self {
        AppError {
            code: 1,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

fn code_for_text(text: &str) -> i32 {
    if text.contains("budget") || text.contains("Budget") || text.contains("inconclusive") {
        2
    } else {
        1
    }
}

impl From<SpectralError<f64>> for AppError {
    fn from(e: SpectralError<f64>) -> Self {
        let text = e.to_string();
        AppError {
            code: code_for_text(&text),
            message: text,
        }
    }
}

impl From<GreenError<f64>> for AppError {
    fn from(e: GreenError<f64>) -> Self {
        let text = e.to_string();
        AppError {
            code: code_for_text(&text),
            message: text,
        }
    }
}

impl From<CriterionError<f64>> for AppError {
    fn from(e: CriterionError<f64>) -> Self {
        let text = e.to_string();
        let code = match e {
            CriterionError::Budget { .. } => 2,
            _ => code_for_text(&text),
        };
        AppError {
            code,
            message: text,
        }
    }
}

impl From<crate::config::ConfigError> for AppError {
    fn from(e: crate::config::ConfigError) -> Self {
        AppError::precondition(e.to_string())
    }
}

impl From<crate::geometry::GeometryError<f64>> for AppError {
    fn from(e: crate::geometry::GeometryError<f64>) -> Self {
        let text = e.to_string();
        AppError {
            code: code_for_text(&text),
            message: text,
        }
    }
}

struct Outputs {
    json_path: Option<String>,
    csv_path: Option<String>,
}

impl Outputs {
    fn write_json(&self, command: &str, report: Value) -> Result<(), AppError> {
        if let Some(path) = &self.json_path {
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "tool_version": env!("CARGO_PKG_VERSION"),
                "command": command,
                "report": report,
            });
            let text = serde_json::to_string_pretty(&doc)
                .map_err(|e| AppError::precondition(e.to_string()))?;
            std::fs::write(path, text + "\n")
                .map_err(|e| AppError::precondition(format!("cannot write {path}: {e}")))?;
        }
        Ok(())
    }

    fn write_csv(&self, header: &str, rows: &[Vec<String>]) -> Result<(), AppError> {
        if let Some(path) = &self.csv_path {
            let mut text = String::from(header);
            text.push('\n');
            for row in rows {
                text.push_str(&row.join(","));
                text.push('\n');
            }
            std::fs::write(path, text)
                .map_err(|e| AppError::precondition(format!("cannot write {path}: {e}")))?;
        }
        Ok(())
    }

    fn reject_csv(&self, command: &str) -> Result<(), AppError> {
        if self.csv_path.is_some() {
            return Err(AppError::precondition(format!(
                "command '{command}' produces no CSV output"
            )));
        }
        Ok(())
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable report")
}

fn parse_source(spec: &str) -> Result<Box<dyn Fn(f64) -> f64>, AppError> {
    let (kind, arg) = spec
        .split_once(':')
        .ok_or_else(|| AppError::precondition("source must be power:A, expdecay:C or file:PATH"))?;
    match kind {
        "power" => {
            let a: f64 = arg
                .parse()
                .map_err(|_| AppError::precondition(format!("bad power exponent '{arg}'")))?;
            Ok(Box::new(move |r: f64| (1.0 + r).powf(-a)))
        }
        "expdecay" => {
            let c: f64 = arg
                .parse()
                .map_err(|_| AppError::precondition(format!("bad decay rate '{arg}'")))?;
            if c <= 0.0 {
                return Err(AppError::precondition("expdecay rate must be positive"));
            }
            Ok(Box::new(move |r: f64| (-c * r).exp()))
        }
        "file" => {
            let text = std::fs::read_to_string(arg)
                .map_err(|e| AppError::precondition(format!("cannot read {arg}: {e}")))?;
            let mut pts: Vec<(f64, f64)> = Vec::new();
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || (i == 0 && line.starts_with('r')) {
                    continue;
                }
                let (a, b) = line.split_once(',').ok_or_else(|| {
                    AppError::precondition(format!("{arg} line {}: expected r,value", i + 1))
                })?;
                let parse = |s: &str| {
                    s.trim().parse::<f64>().map_err(|_| {
                        AppError::precondition(format!("{arg} line {}: bad number", i + 1))
                    })
                };
                pts.push((parse(a)?, parse(b)?));
            }
            if pts.len() < 2 {
                return Err(AppError::precondition(
                    "source file needs at least 2 samples",
                ));
            }
            pts.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite radii"));
            Ok(Box::new(move |r: f64| {
                if r <= pts[0].0 {
                    return pts[0].1;
                }
                if r >= pts[pts.len() - 1].0 {
                    return pts[pts.len() - 1].1;
                }
                let idx = pts.partition_point(|p| p.0 <= r) - 1;
                let (r0, v0) = pts[idx];
                let (r1, v1) = pts[idx + 1];
                v0 + (v1 - v0) * (r - r0) / (r1 - r0)
            }))
        }
        other => Err(AppError::precondition(format!(
            "unknown source kind '{other}'"
        ))),
    }
}

fn parse_zeta(spec: &str) -> Result<DecayEnvelope<f64>, AppError> {
    let (kind, arg) = spec
        .split_once(':')
        .ok_or_else(|| AppError::precondition("zeta must be power:E or constant:C"))?;
    let value: f64 = arg
        .parse()
        .map_err(|_| AppError::precondition(format!("bad zeta parameter '{arg}'")))?;
    match kind {
        "power" => Ok(DecayEnvelope::power(value)),
        "constant" => Ok(DecayEnvelope::Constant { value }),
        other => Err(AppError::precondition(format!(
            "unknown zeta kind '{other}'"
        ))),
    }
}

fn load_manifold(
    config: &Option<String>,
) -> Result<(ManifoldConfig, ModelManifold<f64>), AppError> {
    let cfg = match config {
        Some(path) => ManifoldConfig::from_file(path)?,
        None => ManifoldConfig::default(),
    };
    let m = cfg.build()?;
    Ok((cfg, m))
}

fn fmt(v: f64) -> String {
    format!("{v}")
}

/// Entry point used by the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version with its own success exit.
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, AppError> {
    let out = Outputs {
        json_path: cli.json.clone(),
        csv_path: cli.csv.clone(),
    };
    match cli.command {
        Command::Manifold { action } => {
            if action != "info" {
                return Err(AppError::precondition(format!(
                    "unknown manifold action '{action}' (expected 'info')"
                )));
            }
            out.reject_csv("manifold")?;
            let (cfg, m) = load_manifold(&cli.config)?;
            let class = m.classify()?;
            let probe_radius = (m.r_max() * 0.25).min(10.0).max(m.epsilon0() * 2.0);
            let cs = m.curvature_scale(probe_radius.max(1.0))?;
            let vol = m.volume_ball(probe_radius)?;
            let parabolic = matches!(class.parabolicity, Parabolicity::Parabolic);
            let finite_vol = matches!(class.volume, VolumeClass::FiniteVolume);
            println!(
                "manifold: {} (n={}), eps0={}, r_max={}",
                m.warping().family_name(),
                m.dim(),
                m.epsilon0(),
                m.r_max()
            );
            println!(
                "classification: {}, {}",
                if parabolic {
                    "parabolic"
                } else {
                    "non_parabolic"
                },
                if finite_vol {
                    "finite_volume"
                } else {
                    "infinite_volume"
                }
            );
            println!("K({probe_radius}) = {}, theta = {}", cs.k, cs.theta);
            println!("vol(B_{probe_radius}) = {vol}");
            out.write_json(
                "manifold info",
                json!({
                    "config": to_value(&cfg),
                    "classification": to_value(&class),
                    "curvature_scale": to_value(&cs),
                    "volume_probe": {"radius": probe_radius, "volume": vol},
                }),
            )?;
            Ok(0)
        }
        Command::Spectrum {
            exterior,
            ess,
            annulus,
        } => {
            out.reject_csv("spectrum")?;
            let (_, m) = load_manifold(&cli.config)?;
            let mut ladder_json = None;
            let (label, est) = if ess {
                let full = lambda1_ess_with_ladder(&m)?;
                ladder_json = Some(to_value(&full.ladder));
                ("essential".to_string(), full.estimate)
            } else if let Some(radius) = exterior {
                (
                    format!("exterior({radius})"),
                    lambda1(&m, &RadialDomain::exterior(radius))?,
                )
            } else if let Some(spec) = annulus {
                let (a, b) = spec
                    .split_once(',')
                    .ok_or_else(|| AppError::precondition("annulus must be 'r1,r2'"))?;
                let r1: f64 = a
                    .trim()
                    .parse()
                    .map_err(|_| AppError::precondition("bad annulus radius"))?;
                let r2: f64 = b
                    .trim()
                    .parse()
                    .map_err(|_| AppError::precondition("bad annulus radius"))?;
                (
                    format!("annulus({r1},{r2})"),
                    lambda1(&m, &RadialDomain::annulus(r1, r2))?,
                )
            } else {
                return Err(AppError::precondition(
                    "spectrum needs --exterior R, --annulus r1,r2 or --ess",
                ));
            };
            println!(
                "lambda1[{label}] = {} (barta >= {}, rayleigh <= {}, converged: {})",
                est.value, est.barta_lower, est.rayleigh_upper, est.converged
            );
            let mut doc = json!({"domain": label, "estimate": to_value(&est)});
            if let Some(ladder) = ladder_json {
                doc["ladder"] = ladder;
            }
            out.write_json("spectrum", doc)?;
            Ok(0)
        }
        Command::Green { kind, radius } => {
            let (_, m) = load_manifold(&cli.config)?;
            let green = match kind.as_str() {
                "minimal" => GreenProfile::minimal(&m)?,
                "parabolic" => GreenProfile::parabolic(&m)?,
                "dirichlet" => {
                    let r = radius
                        .ok_or_else(|| AppError::precondition("dirichlet kind needs --radius"))?;
                    GreenProfile::dirichlet(&m, r)?
                }
                other => {
                    return Err(AppError::precondition(format!(
                        "unknown green kind '{other}' (minimal|dirichlet|parabolic)"
                    )))
                }
            };
            let r_hi = match kind.as_str() {
                "dirichlet" => radius.expect("radius checked") * 0.999,
                _ => m.r_max() * 0.9,
            };
            let samples = green.samples(m.epsilon0() * 0.1, r_hi, 200)?;
            println!(
                "green kind={kind}: {} samples on [{}, {}]",
                samples.len(),
                samples[0].0,
                r_hi
            );
            println!("G({}) = {}", samples[0].0, samples[0].1);
            let rows: Vec<Vec<String>> = samples
                .iter()
                .map(|(r, v)| vec![fmt(*r), fmt(*v)])
                .collect();
            out.write_csv("r,value", &rows)?;
            out.write_json(
                "green",
                json!({
                    "kind": kind,
                    "samples": samples.iter().map(|(r, v)| json!([r, v])).collect::<Vec<_>>(),
                }),
            )?;
            Ok(0)
        }
        Command::Poisson { source } => {
            let (_, m) = load_manifold(&cli.config)?;
            let f = parse_source(&source)?;
            let class = m.classify()?;
            let solve = match (class.parabolicity, class.volume) {
                (Parabolicity::NonParabolic, _) => solve_poisson(&m, &*f)?,
                (Parabolicity::Parabolic, VolumeClass::FiniteVolume) => {
                    PoissonSolve::Finite(solve_poisson_finite_volume(&m, &*f)?)
                }
                (Parabolicity::Parabolic, VolumeClass::InfiniteVolume) => {
                    return Err(AppError::precondition(
                        "parabolic infinite-volume manifolds are outside both solver routes",
                    ))
                }
            };
            match &solve {
                PoissonSolve::Finite(sol) => {
                    println!("u(p) = {:.6}", sol.value_at_pole);
                    println!(
                        "residual rms = {} (window [{}, {}])",
                        sol.residual_rms, sol.residual_window.0, sol.residual_window.1
                    );
                    let rows: Vec<Vec<String>> = sol
                        .samples
                        .iter()
                        .map(|(r, v)| vec![fmt(*r), fmt(*v)])
                        .collect();
                    out.write_csv("r,value", &rows)?;
                    out.write_json(
                        "poisson",
                        json!({"outcome": "finite", "solution": to_value(sol)}),
                    )?;
                    Ok(0)
                }
                PoissonSolve::NonIntegrable(probe) => {
                    println!(
                        "potential diverges: growth exponent {:?}",
                        probe.growth_exponent
                    );
                    let rows: Vec<Vec<String>> = probe
                        .partials
                        .iter()
                        .map(|(t, p)| vec![fmt(*t), fmt(*p)])
                        .collect();
                    out.write_csv("truncation,partial_integral", &rows)?;
                    out.write_json(
                        "poisson",
                        json!({"outcome": "divergent", "probe": to_value(probe)}),
                    )?;
                    Ok(0)
                }
            }
        }
        Command::Criterion { zeta, jmax, mode } => {
            let (_, m) = load_manifold(&cli.config)?;
            let envelope = parse_zeta(&zeta)?;
            let mode = match mode.as_str() {
                "numerical" => LambdaMode::Numerical,
                "barta" => LambdaMode::BartaCertified,
                other => {
                    return Err(AppError::precondition(format!(
                        "unknown mode '{other}' (numerical|barta)"
                    )))
                }
            };
            let mut report = criterion::series_terms(&m, &envelope, 2, jmax, mode)?;
            criterion::decide(&mut report, &VerdictConfig::default());
            println!(
                "verdict: {:?} (fitted exponent {:.4}, {} terms)",
                report.verdict.expect("decided"),
                report.fit.slope,
                report.terms.len()
            );
            let rows: Vec<Vec<String>> = report
                .terms
                .iter()
                .map(|t| {
                    vec![
                        t.j.to_string(),
                        fmt(t.theta_j),
                        fmt(t.theta_j1),
                        fmt(t.lambda),
                        fmt(t.zeta),
                        fmt(t.b),
                        fmt(t.partial_sum),
                    ]
                })
                .collect();
            out.write_csv("j,theta_j,theta_j1,lambda,zeta,b,partial_sum", &rows)?;
            out.write_json("criterion", to_value(&report))?;
            Ok(0)
        }
        Command::Verify { suite } => {
            out.reject_csv("verify")?;
            let report = verify::run_suite(&suite)?;
            for check in &report.suite {
                println!(
                    "[{}] {}",
                    if check.pass { "PASS" } else { "FAIL" },
                    check.name
                );
            }
            println!("suite: {}", if report.all_pass { "PASS" } else { "FAIL" });
            out.write_json("verify", to_value(&report))?;
            Ok(if report.all_pass { 0 } else { 3 })
        }
        Command::Sharpness {
            gamma,
            alpha_min,
            alpha_max,
            step,
        } => {
            let report = verify::sharpness_sweep(gamma, 3, alpha_min, alpha_max, step)?;
            println!(
                "detected threshold {:.4} (theory {:.4}), monotone: {}, pass: {}",
                report.detected_threshold,
                report.theoretical_threshold,
                report.monotone,
                report.pass
            );
            let rows: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|r| {
                    vec![
                        fmt(r.alpha),
                        format!("{:?}", r.class),
                        r.growth_exponent.map(fmt).unwrap_or_default(),
                    ]
                })
                .collect();
            out.write_csv("alpha,class,growth_exponent", &rows)?;
            out.write_json("sharpness", to_value(&report))?;
            Ok(if report.pass { 0 } else { 3 })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn source_parsers() {
        let f = parse_source("power:2").unwrap();
        assert!((f(1.0) - 0.25).abs() < 1e-15);
        let g = parse_source("expdecay:1").unwrap();
        assert!((g(1.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert!(parse_source("nope").is_err());
        assert!(parse_source("expdecay:-1").is_err());
    }

    #[test]
    fn zeta_parsers() {
        let z = parse_zeta("power:1.5").unwrap();
        assert!((z.eval(1.0) - 2f64.powf(1.5)).abs() < 1e-12);
        let c = parse_zeta("constant:3").unwrap();
        assert_eq!(c.eval(9.0), 3.0);
    }
}
