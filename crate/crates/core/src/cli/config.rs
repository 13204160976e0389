//! Problem configuration files.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::geometry::{FeasibleSet, Norm};
use crate::oracle;
use crate::regret::{DiscreteDistribution, RiskLevel};
use crate::solve::{MethodChoice, SolveOptions, SubgradientParams};

/// Which worst-case problem a config asks for.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveKind {
    /// Worst-case regret (expected, or CVaR when `alpha` is set).
    #[default]
    Drro,
    /// Worst-case expected cost.
    Dro,
}

impl ObjectiveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ObjectiveKind::Drro => "drro",
            ObjectiveKind::Dro => "dro",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadiusSweep {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub log: bool,
}

impl RadiusSweep {
    /// Radii in ascending order, both endpoints included. Log sweeps
    /// interpolate the base-10 exponent.
    pub fn radii(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i == 0 {
                    self.min
                } else if i == self.count - 1 {
                    self.max
                } else if self.log {
                    let (a, b) = (self.min.log10(), self.max.log10());
                    10f64.powf(a + (b - a) * i as f64 / last)
                } else {
                    self.min + (self.max - self.min) * i as f64 / last
                }
            })
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidInput("radius_sweep.count must be >= 1".into()));
        }
        for v in [self.min, self.max] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidRadius(v));
            }
        }
        if self.min > self.max {
            return Err(Error::InvalidInput("radius_sweep.min exceeds radius_sweep.max".into()));
        }
        if self.log && self.min <= 0.0 {
            return Err(Error::InvalidInput("log radius_sweep needs min > 0".into()));
        }
        Ok(())
    }
}

/// Optional overrides for solver and validation tolerances.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cvar_gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_refinements: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equivalence: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_solver: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimality: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stall_window: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stall_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_start: Option<bool>,
}

/// Tolerances with defaults filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub gap: f64,
    pub cvar_gap: f64,
    pub max_refinements: usize,
    pub equivalence: f64,
    pub cross_solver: f64,
    pub optimality: f64,
    pub samples: usize,
}

impl Tolerances {
    pub fn resolve(&self) -> Resolved {
        Resolved {
            gap: self.gap.unwrap_or(oracle::DEFAULT_GAP_TOL),
            cvar_gap: self.cvar_gap.unwrap_or(2e-2),
            max_refinements: self.max_refinements.unwrap_or(oracle::DEFAULT_MAX_REFINEMENTS),
            equivalence: self.equivalence.unwrap_or(1e-8),
            cross_solver: self.cross_solver.unwrap_or(1e-4),
            optimality: self.optimality.unwrap_or(1e-6),
            samples: self.samples.unwrap_or(200),
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = [
            ("gap", self.gap),
            ("cvar_gap", self.cvar_gap),
            ("equivalence", self.equivalence),
            ("cross_solver", self.cross_solver),
            ("optimality", self.optimality),
            ("step_scale", self.step_scale),
            ("stall_tol", self.stall_tol),
        ];
        for (name, v) in positive {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::InvalidInput(format!("tolerances.{name} must be > 0")));
                }
            }
        }
        if self.max_iter == Some(0) || self.stall_window == Some(0) {
            return Err(Error::InvalidInput("tolerances.max_iter and stall_window must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub set: FeasibleSet,
    pub nominal: DiscreteDistribution,
    pub ground_norm: Norm,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius_sweep: Option<RadiusSweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub method: MethodChoice,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    #[serde(default)]
    pub objective: ObjectiveKind,
}

/// Config parse failure with the JSON path of the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl ProblemConfig {
    pub fn from_json(text: &str) -> std::result::Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| ConfigError {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        cfg.validate().map_err(|e| ConfigError { path: String::new(), message: e.to_string() })?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.set.dim(), self.nominal.dim())?;
        match (&self.radius, &self.radius_sweep) {
            (Some(_), Some(_)) | (None, None) => {
                return Err(Error::InvalidInput("exactly one of radius and radius_sweep is required".into()))
            }
            (Some(r), None) if !(r.is_finite() && *r >= 0.0) => return Err(Error::InvalidRadius(*r)),
            (None, Some(s)) => s.validate()?,
            _ => {}
        }
        if let Some(a) = self.alpha {
            RiskLevel::new(a)?;
            if self.objective == ObjectiveKind::Dro {
                return Err(Error::InvalidInput("alpha applies only to the drro objective".into()));
            }
        }
        if let Some(t) = &self.tolerances {
            t.validate()?;
        }
        Ok(())
    }

    pub fn tolerances(&self) -> Resolved {
        self.tolerances.clone().unwrap_or_default().resolve()
    }

    /// Solver options, with `seed` driving the optional random start.
    pub fn solve_options(&self, seed: u64) -> SolveOptions {
        let t = self.tolerances.clone().unwrap_or_default();
        let d = SubgradientParams::default();
        SolveOptions {
            method: self.method,
            subgradient: SubgradientParams {
                max_iter: t.max_iter.unwrap_or(d.max_iter),
                step_scale: t.step_scale.unwrap_or(d.step_scale),
                stall_window: t.stall_window.unwrap_or(d.stall_window),
                stall_tol: t.stall_tol.unwrap_or(d.stall_tol),
                seed,
                random_start: t.random_start.unwrap_or(false),
            },
        }
    }

    /// Radii to solve: the scalar radius, or the sweep grid.
    pub fn radii(&self) -> Vec<f64> {
        match (&self.radius, &self.radius_sweep) {
            (Some(r), _) => vec![*r],
            (None, Some(s)) => s.radii(),
            (None, None) => Vec::new(),
        }
    }
}
