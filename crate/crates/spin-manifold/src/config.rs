//! Run configuration: a flat JSON object whose fields command-line flags override.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spin_manifold_core::analytic::FieldConfig;
use spin_manifold_core::spin_ops::Direction;
use spin_manifold_core::SpinSystem;

use crate::error::{CliError, Result};

pub const DEFAULT_SAMPLES: usize = 181;

/// Figure recipes shipped with the binary.
pub const PRESETS: [(&str, &str); 7] = [
    ("fig1", include_str!("../presets/fig1.json")),
    ("fig2", include_str!("../presets/fig2.json")),
    ("fig3", include_str!("../presets/fig3.json")),
    ("fig5a", include_str!("../presets/fig5a.json")),
    ("fig5b", include_str!("../presets/fig5b.json")),
    ("fig6", include_str!("../presets/fig6.json")),
    ("methane", include_str!("../presets/methane.json")),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Every field is optional so that a file, a preset and flags can be layered.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: Option<usize>,
    pub two_s: Option<u32>,
    pub j: Option<f64>,
    pub gamma: Option<f64>,
    /// Several `[N, 2s]` curves in one sweep.
    pub systems: Option<Vec<(usize, u32)>>,
    pub h_over_j: Option<f64>,
    /// Several field strengths in one sweep.
    pub h_over_j_values: Option<Vec<f64>>,
    pub theta_prime: Option<f64>,
    pub phi_prime: Option<f64>,
    /// Exact `h/J` as `"p/q"`.
    pub ratio: Option<String>,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub theta_min: Option<f64>,
    pub theta_max: Option<f64>,
    pub samples: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

macro_rules! overlay_fields {
    ($base:expr, $top:expr, $($field:ident),*) => {
        $(if $top.$field.is_some() {
            $base.$field = $top.$field.clone();
        })*
    };
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ReadConfig {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn preset(name: &str) -> Result<Self> {
        PRESETS
            .iter()
            .find(|(key, _)| *key == name)
            .ok_or_else(|| CliError::UnknownPreset(name.to_string()))
            .and_then(|(_, text)| Self::from_json(text))
    }

    /// Fields set in `top` replace those in `self`.
    pub fn overlay(mut self, top: &RunConfig) -> Self {
        overlay_fields!(
            self, top, n, two_s, j, gamma, systems, h_over_j, h_over_j_values, theta_prime, phi_prime, ratio,
            theta, phi, theta_min, theta_max, samples, out, format
        );
        self
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let j = self.j.unwrap_or(1.0);
        let gamma = self.gamma.unwrap_or(1.0);
        let system = |n: usize, two_s: u32| -> Result<SpinSystem> { Ok(SpinSystem::new(n, two_s, j)?.with_gamma(gamma)?) };

        let theta_prime = self.theta_prime.unwrap_or(0.0);
        let phi_prime = self.phi_prime.unwrap_or(0.0);
        let direction = Direction::new(theta_prime, phi_prime)?;
        let rational = self.ratio.as_deref().map(parse_ratio).transpose()?;
        let single_field = match (self.h_over_j, rational) {
            (None, None) => None,
            (Some(r), None) => Some(FieldConfig::new(r, direction)?),
            (None, Some((p, q))) => Some(FieldConfig::rational(p, q, direction)?),
            (Some(r), Some((p, q))) => Some(FieldConfig::new(r, direction)?.with_rational(p, q)?),
        };

        let curves = match (&self.systems, &self.h_over_j_values) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "`systems` and `h_over_j_values` cannot be combined".to_string(),
                ))
            }
            (Some(list), None) => {
                if list.is_empty() {
                    return Err(CliError::Config("`systems` is empty".to_string()));
                }
                list.iter()
                    .map(|&(n, two_s)| {
                        Ok(Curve {
                            sys: system(n, two_s)?,
                            field: single_field,
                            label: CurveLabel::System { n, two_s },
                        })
                    })
                    .collect::<Result<Vec<_>>>()?
            }
            (None, Some(values)) => {
                if values.is_empty() {
                    return Err(CliError::Config("`h_over_j_values` is empty".to_string()));
                }
                if single_field.is_some() {
                    return Err(CliError::Config(
                        "`h_over_j_values` cannot be combined with `h_over_j` or `ratio`".to_string(),
                    ));
                }
                let sys = system(self.n.unwrap_or(2), self.two_s.unwrap_or(1))?;
                values
                    .iter()
                    .map(|&r| {
                        Ok(Curve {
                            sys,
                            field: Some(FieldConfig::new(r, direction)?),
                            label: CurveLabel::Field { h_over_j: r },
                        })
                    })
                    .collect::<Result<Vec<_>>>()?
            }
            (None, None) => vec![Curve {
                sys: system(self.n.unwrap_or(2), self.two_s.unwrap_or(1))?,
                field: single_field,
                label: CurveLabel::Single,
            }],
        };

        let samples = self.samples.unwrap_or(DEFAULT_SAMPLES);
        if samples < 2 {
            return Err(CliError::Config("sweeps need at least 2 samples".to_string()));
        }
        let theta_min = self.theta_min.unwrap_or(0.0);
        let theta_max = self.theta_max.unwrap_or(PI);
        if !(0.0..=PI).contains(&theta_min) || !(0.0..=PI).contains(&theta_max) || theta_min >= theta_max {
            return Err(CliError::Config(format!(
                "theta range [{theta_min}, {theta_max}] must be increasing within [0, pi]"
            )));
        }
        let theta = self.theta.unwrap_or(PI / 4.0);
        if !(0.0..=PI).contains(&theta) {
            return Err(CliError::Config(format!("theta {theta} outside [0, pi]")));
        }
        let phi = self.phi.unwrap_or(0.0);
        if !phi.is_finite() {
            return Err(CliError::Config("phi must be finite".to_string()));
        }

        Ok(Resolved {
            curves,
            direction,
            theta_range: (theta_min, theta_max),
            samples,
            theta,
            phi,
            out: self.out.clone(),
            format: self.format.unwrap_or_default(),
        })
    }
}

/// `"p/q"` with `q > 0`.
pub fn parse_ratio(text: &str) -> Result<(i64, u64)> {
    let bad = || CliError::Config(format!("ratio `{text}` is not of the form P/Q"));
    let (p, q) = text.split_once('/').ok_or_else(bad)?;
    let p: i64 = p.trim().parse().map_err(|_| bad())?;
    let q: u64 = q.trim().parse().map_err(|_| bad())?;
    if q == 0 {
        return Err(bad());
    }
    Ok((p, q))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveLabel {
    Single,
    System { n: usize, two_s: u32 },
    Field { h_over_j: f64 },
}

impl CurveLabel {
    /// Identifier columns prefixed to every row of a multi-curve sweep.
    pub fn columns(&self) -> &'static [&'static str] {
        match self {
            CurveLabel::Single => &[],
            CurveLabel::System { .. } => &["n", "two_s"],
            CurveLabel::Field { .. } => &["h_over_j"],
        }
    }
}

#[derive(Debug, Clone)]
pub struct Curve {
    pub sys: SpinSystem,
    pub field: Option<FieldConfig>,
    pub label: CurveLabel,
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub curves: Vec<Curve>,
    pub direction: Direction,
    pub theta_range: (f64, f64),
    pub samples: usize,
    pub theta: f64,
    pub phi: f64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Resolved {
    pub fn thetas(&self) -> Vec<f64> {
        let (lo, hi) = self.theta_range;
        spin_manifold_core::verify::linspace(lo, hi, self.samples)
    }

    /// The only curve, for commands that do not sweep several.
    pub fn single(&self) -> Result<&Curve> {
        match self.curves.as_slice() {
            [one] => Ok(one),
            _ => Err(CliError::Config("this command takes a single system".to_string())),
        }
    }
}
