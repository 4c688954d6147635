//! Scenario configuration, read from TOML. Unknown keys are rejected.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// Rotation by `1 + 1/n` in every `(x_i, xi_i)` plane.
    LinearRotation,
    /// `(x + (1 + 1/n) xi, xi)`.
    Shear,
    /// Unit-time rotation after the kick `xi -> xi + sin(n x)/n^2`.
    OscillatoryHamiltonian,
    /// Time-one map of a user Hamiltonian.
    Custom,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 4] = [
        FamilyKind::LinearRotation,
        FamilyKind::Shear,
        FamilyKind::OscillatoryHamiltonian,
        FamilyKind::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::LinearRotation => "linear_rotation",
            FamilyKind::Shear => "shear",
            FamilyKind::OscillatoryHamiltonian => "oscillatory_hamiltonian",
            FamilyKind::Custom => "custom",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            FamilyKind::LinearRotation => {
                "rotation by 1 + 1/n in each (x_i, xi_i) plane; limit: rotation by 1"
            }
            FamilyKind::Shear => "(x, xi) -> (x + (1 + 1/n) xi, xi); limit: the unit shear",
            FamilyKind::OscillatoryHamiltonian => {
                "unit rotation after the kick xi -> xi + sin(n x)/n^2, the time-one map of \
                 H = (cos(n x) - 1)/n^3; C^1 limit: unit rotation"
            }
            FamilyKind::Custom => {
                "time-one map of a Hamiltonian expression in x, xi (or x1, x2, xi1, xi2) and n, \
                 with a separate expression for the limit"
            }
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| BenchError::InvalidConfig(format!("unknown family {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub family: FamilyKind,
    /// Half of the phase-space dimension (1 or 2).
    #[serde(default = "one")]
    pub half_dim: usize,
    /// Number of maps `N` in the sequence.
    pub sequence_length: usize,
    #[serde(default)]
    pub seed: u64,
    /// Stretch `xi -> (1 + defect) xi` applied after every map; nonzero
    /// values make the sequence non-symplectic.
    #[serde(default)]
    pub defect: f64,
}

fn one() -> usize {
    1
}

/// Approximation budgets `e_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Schedule {
    /// `scale / n`.
    Harmonic { scale: f64 },
    /// `scale * ratio^(n-1)`.
    Geometric { scale: f64, ratio: f64 },
    Constant { value: f64 },
    Explicit { values: Vec<f64> },
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::Harmonic { scale: 1.0 }
    }
}

impl Schedule {
    pub fn value(&self, n: usize) -> f64 {
        match self {
            Schedule::Harmonic { scale } => scale / n as f64,
            Schedule::Geometric { scale, ratio } => scale * ratio.powi(n as i32 - 1),
            Schedule::Constant { value } => *value,
            Schedule::Explicit { values } => values.get(n - 1).copied().unwrap_or(f64::NAN),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Schedule::Harmonic { scale } if *scale == 1.0 => "1/n".into(),
            Schedule::Harmonic { scale } => format!("{scale}/n"),
            Schedule::Geometric { scale, ratio } => format!("{scale} * {ratio}^(n-1)"),
            Schedule::Constant { value } => format!("{value}"),
            Schedule::Explicit { .. } => "explicit".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WindowSection {
    /// Absolute window radius; overrides `r_fraction`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    /// `r = r_fraction * r0` when `r` is not given.
    pub r_fraction: f64,
    /// Largest `r0` tried by the normalization.
    pub r_cap: f64,
}

impl Default for WindowSection {
    fn default() -> Self {
        WindowSection { r: None, r_fraction: 0.125, r_cap: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Largest symplectic residual accepted for an input map.
    pub residual_gate: f64,
    /// The schedule must end at or below `schedule_tail_ratio * e_1`.
    pub schedule_tail_ratio: f64,
    /// Allowed increase of the hull distance between consecutive `n`.
    pub monotone: f64,
    /// `|det dx'/dxi|` of the limit must stay above this fraction of its
    /// value at 0 on the window.
    pub section_floor: f64,
    /// Reported plane-fit residuals above this are flagged.
    pub plane_residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            residual_gate: 1e-6,
            schedule_tail_ratio: 0.5,
            monotone: 1e-6,
            section_floor: 0.1,
            plane_residual: 1e-6,
        }
    }
}

/// Sample counts. Unset entries depend on the half-dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sampling {
    pub residual_points: usize,
    pub approx_points: usize,
    /// Trajectories integrated through the recovered Hamiltonian flow.
    pub flow_checks: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_per_axis: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree_seeds: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalize_grid: Option<usize>,
    pub hull_points: usize,
    pub fiber_seeds: usize,
    pub plane_points: usize,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            residual_points: 64,
            approx_points: 64,
            flow_checks: 4,
            window_per_axis: None,
            degree_seeds: None,
            normalize_grid: None,
            hull_points: 64,
            fiber_seeds: 6,
            plane_points: 64,
        }
    }
}

impl Sampling {
    pub fn window_per_axis(&self, half_dim: usize) -> usize {
        self.window_per_axis.unwrap_or(if half_dim == 1 { 32 } else { 10 })
    }

    pub fn degree_seeds(&self, half_dim: usize) -> usize {
        self.degree_seeds.unwrap_or(if half_dim == 1 { 40 } else { 8 })
    }

    pub fn normalize_grid(&self, half_dim: usize) -> usize {
        self.normalize_grid.unwrap_or(if half_dim == 1 { 20 } else { 8 })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Budget {
    /// Wall-clock limit for a run.
    pub max_seconds: f64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_seconds: 300.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomSection {
    /// `H(x, xi, n)`; may use `n`.
    pub hamiltonian: String,
    /// `H(x, xi)` of the limit map.
    pub limit: String,
    #[serde(default = "default_flow_steps")]
    pub flow_steps: usize,
}

fn default_flow_steps() -> usize {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub schedule: Schedule,
    #[serde(default)]
    pub window: WindowSection,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default)]
    pub budget: Budget,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom: Option<CustomSection>,
}

impl ScenarioConfig {
    /// Built-in scenario: `N = 50`, half-dimension 1, seed 0.
    pub fn builtin(family: FamilyKind) -> ScenarioConfig {
        ScenarioConfig {
            scenario: ScenarioSection {
                family,
                half_dim: 1,
                sequence_length: 50,
                seed: 0,
                defect: 0.0,
            },
            schedule: Schedule::default(),
            window: WindowSection::default(),
            tolerances: Tolerances::default(),
            sampling: Sampling::default(),
            budget: Budget::default(),
            custom: (family == FamilyKind::Custom).then(|| CustomSection {
                hamiltonian: "0.5 * (x^2 + xi^2) * (1 + 1/n)".into(),
                limit: "0.5 * (x^2 + xi^2)".into(),
                flow_steps: default_flow_steps(),
            }),
        }
    }

    pub fn from_toml(text: &str) -> Result<ScenarioConfig, BenchError> {
        let cfg: ScenarioConfig =
            toml::from_str(text).map_err(|e| BenchError::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<ScenarioConfig, BenchError> {
        let text = std::fs::read_to_string(path)?;
        ScenarioConfig::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: String| Err(BenchError::InvalidConfig(m));
        let s = &self.scenario;
        if s.sequence_length < 3 {
            return bad(format!("sequence_length must be at least 3, got {}", s.sequence_length));
        }
        if !(1..=2).contains(&s.half_dim) {
            return bad(format!("half_dim must be 1 or 2, got {}", s.half_dim));
        }
        if !s.defect.is_finite() || s.defect <= -1.0 {
            return bad(format!("defect must be finite and > -1, got {}", s.defect));
        }
        if let Some(r) = self.window.r {
            if !(r > 0.0 && r.is_finite()) {
                return bad(format!("window r must be positive, got {r}"));
            }
        }
        let f = self.window.r_fraction;
        if !(f > 0.0 && f < 0.25) {
            return bad(format!("r_fraction must lie in (0, 1/4), got {f}"));
        }
        if !(self.window.r_cap > 0.0) {
            return bad("r_cap must be positive".into());
        }
        if let Schedule::Explicit { values } = &self.schedule {
            if values.len() != s.sequence_length {
                return bad(format!(
                    "explicit schedule has {} values for {} maps",
                    values.len(),
                    s.sequence_length
                ));
            }
        }
        match (s.family, &self.custom) {
            (FamilyKind::Custom, None) => bad("family custom needs a [custom] section".into()),
            (FamilyKind::Custom, Some(c)) if c.flow_steps == 0 => {
                bad("custom flow_steps must be positive".into())
            }
            (k, Some(_)) if k != FamilyKind::Custom => {
                bad(format!("[custom] given for family {k}"))
            }
            _ => Ok(()),
        }
    }
}
