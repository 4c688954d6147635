//! Report types and their JSON and CSV serializations.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ScenarioConfig;
use crate::BenchError;

pub const SCHEMA_VERSION: &str = "1.0.0";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerN {
    pub n: usize,
    pub error_bound: f64,
    /// Sampled sup of `|Phi_{n,1} - psi_n|` on `B_{r0}`.
    pub approx_error: Option<f64>,
    pub residual: f64,
    pub window_pass: Option<bool>,
    /// Sampled sup of `d(psi_n, psi)` on `B_{r0} x B_{A r0}`.
    pub window_sup: Option<f64>,
    pub lemma_pass: Option<bool>,
    pub degree: Option<i64>,
    pub hull_distance: Option<f64>,
    /// Base samples where no fiber point was found.
    pub fiber_missing: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub translation: Vec<f64>,
    pub a: f64,
    pub r0: f64,
    pub r: f64,
    pub chart_residuals: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowRecord {
    pub slice: [f64; 2],
    pub center: f64,
    pub half_width: f64,
    pub ball_radius: f64,
    pub shrink: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ladder {
    pub c1: f64,
    pub c2: f64,
    pub c: f64,
    pub eps: f64,
    pub r1: f64,
    pub rho: f64,
    pub windows: Vec<WindowRecord>,
    pub nesting_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RTrend {
    pub r: f64,
    #[serde(rename = "N_r")]
    pub n_r: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hull {
    pub base_samples: usize,
    pub monotone_from_n_r: bool,
    pub first: Option<f64>,
    pub last: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub det_at_origin: f64,
    pub min_ratio: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    /// "coisotropic" or "not coisotropic".
    pub result: String,
    pub lagrangian: bool,
    /// Rows are points of `R^{4k}`; columns span the fitted plane.
    pub plane: Vec<Vec<f64>>,
    pub residual: f64,
    pub residual_within_tolerance: bool,
    pub fit_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateFailure {
    pub step: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub error_schedule: String,
    pub c1: String,
    pub c2: String,
    pub slope_bound: String,
    pub window_fractions: String,
    pub mu: Vec<f64>,
    pub slices: Vec<String>,
}

impl Constants {
    pub fn new(schedule: String) -> Constants {
        Constants {
            error_schedule: schedule,
            c1: "(3Ar)^-1".into(),
            c2: "(2Ar)^-1".into(),
            slope_bound: "A = 2|w|".into(),
            window_fractions: "mu_i = (5 - i)/100".into(),
            mu: rigidity_core::cones::LADDER_MU.to_vec(),
            slices: ["(-r1/8, -r1/16)", "(-r1/4, 0)", "(-r1/2, r1/2)", "(-r1, r1)"]
                .map(String::from)
                .to_vec(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub schema_version: String,
    pub config: ScenarioConfig,
    #[serde(rename = "perN")]
    pub per_n: Vec<PerN>,
    #[serde(rename = "N_r")]
    pub n_r: Option<usize>,
    pub r_trend: Vec<RTrend>,
    pub normalization: Option<Normalization>,
    pub ladder: Option<Ladder>,
    pub section: Option<Section>,
    pub hull: Option<Hull>,
    pub verdict: Option<Verdict>,
    pub gate_failure: Option<GateFailure>,
    pub constants: Constants,
    pub notes: Vec<String>,
    pub timings: Vec<Timing>,
    pub hash: String,
}

impl RigidityReport {
    pub fn new(config: ScenarioConfig) -> RigidityReport {
        let label = config.schedule.label();
        RigidityReport {
            schema_version: SCHEMA_VERSION.into(),
            config,
            per_n: Vec::new(),
            n_r: None,
            r_trend: Vec::new(),
            normalization: None,
            ladder: None,
            section: None,
            hull: None,
            verdict: None,
            gate_failure: None,
            constants: Constants::new(label),
            notes: Vec::new(),
            timings: Vec::new(),
            hash: String::new(),
        }
    }

    /// SHA-256 of the JSON encoding with `timings` and `hash` left out.
    pub fn compute_hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("timings");
            obj.remove("hash");
        }
        let bytes = serde_json::to_vec(&v).expect("report serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn seal(&mut self) {
        self.hash = self.compute_hash();
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> Result<String, BenchError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| BenchError::IoFailure(std::io::Error::other(e));
        w.write_record(["n", "approx_error", "residual", "degree", "window_pass", "hull_distance"])
            .map_err(io)?;
        let opt = |v: Option<String>| v.unwrap_or_default();
        for row in &self.per_n {
            w.write_record([
                row.n.to_string(),
                opt(row.approx_error.map(|x| format!("{x:e}"))),
                format!("{:e}", row.residual),
                opt(row.degree.map(|d| d.to_string())),
                opt(row.window_pass.map(|b| b.to_string())),
                opt(row.hull_distance.map(|x| format!("{x:e}"))),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| BenchError::IoFailure(std::io::Error::other(e.to_string())))?;
        Ok(String::from_utf8(bytes).expect("csv is UTF-8"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// Writes `report.<ext>` into `dir`, creating it if needed.
pub fn emit_report(report: &RigidityReport, dir: &Path, format: Format) -> Result<PathBuf, BenchError> {
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("report.{}", format.extension()));
    let text = match format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv()?,
    };
    fs::write(&path, text)?;
    Ok(path)
}
