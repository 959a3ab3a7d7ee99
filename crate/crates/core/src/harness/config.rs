use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::dynamics::StepperConfig;
use crate::error::{KsError, Result};
use crate::spectral::TorusSpec;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Modes,
    Simulate,
    Picard,
    ComplexShift,
    Thresholds,
    Estimates,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Modes => "modes",
            Experiment::Simulate => "simulate",
            Experiment::Picard => "picard",
            Experiment::ComplexShift => "complex_shift",
            Experiment::Thresholds => "thresholds",
            Experiment::Estimates => "estimates",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataKind {
    #[default]
    Zero,
    SingleMode,
    RandomEnvelope,
    File,
}

/// Rescaling applied after construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleTo {
    Wiener0(f64),
    L2(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialData {
    #[serde(default)]
    pub kind: DataKind,
    #[serde(default)]
    pub amplitude: f64,
    /// Envelope exponent `p` of `|(û, v̂)| = amplitude·|k̃|^{-p}`.
    #[serde(default)]
    pub spectral_exponent: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "yes")]
    pub zero_mean: bool,
    #[serde(default = "yes")]
    pub gradient: bool,
    /// Lattice index for `single_mode`.
    #[serde(default = "unit_mode")]
    pub mode: [i64; 2],
    /// Spectra file for `file`.
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub scale_to: Option<ScaleTo>,
}

fn yes() -> bool {
    true
}

fn unit_mode() -> [i64; 2] {
    [1, 0]
}

impl Default for InitialData {
    fn default() -> Self {
        Self {
            kind: DataKind::Zero,
            amplitude: 0.0,
            spectral_exponent: 0.0,
            seed: 0,
            zero_mean: true,
            gradient: true,
            mode: unit_mode(),
            path: None,
            scale_to: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PicardSettings {
    #[serde(default = "default_iters")]
    pub max_iters: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_iters() -> usize {
    60
}

fn default_tol() -> f64 {
    1e-14
}

impl Default for PicardSettings {
    fn default() -> Self {
        Self {
            max_iters: default_iters(),
            tol: default_tol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexShiftSettings {
    #[serde(default)]
    pub alpha_vec: [f64; 2],
    #[serde(default = "default_levels")]
    pub levels: usize,
}

fn default_levels() -> usize {
    10
}

impl Default for ComplexShiftSettings {
    fn default() -> Self {
        Self {
            alpha_vec: [0.0, 0.0],
            levels: default_levels(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateSettings {
    #[serde(default = "default_probes")]
    pub probes: usize,
    /// Probe modes satisfy `|k_i| ≤ probe_kmax`.
    #[serde(default = "default_probe_kmax")]
    pub probe_kmax: i64,
    /// Probe sampling span `[0, probe_span]` with step `stepper.dt`.
    #[serde(default = "default_probe_span")]
    pub probe_span: f64,
    #[serde(default = "default_smoothing_times")]
    pub smoothing_times: Vec<f64>,
}

fn default_probes() -> usize {
    100
}

fn default_probe_kmax() -> i64 {
    4
}

fn default_probe_span() -> f64 {
    1.0
}

fn default_smoothing_times() -> Vec<f64> {
    vec![0.01, 0.1, 1.0]
}

impl Default for EstimateSettings {
    fn default() -> Self {
        Self {
            probes: default_probes(),
            probe_kmax: default_probe_kmax(),
            probe_span: default_probe_span(),
            smoothing_times: default_smoothing_times(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    /// Norm series file name inside `dir`.
    #[serde(default = "default_csv")]
    pub csv_path: PathBuf,
    /// Write a spectra snapshot every this many saved frames; 0 disables.
    #[serde(default)]
    pub spectra_every: usize,
}

fn default_dir() -> PathBuf {
    PathBuf::from("ks2d-out")
}

fn default_csv() -> PathBuf {
    PathBuf::from("norms.csv")
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            csv_path: default_csv(),
            spectra_every: 0,
        }
    }
}

/// Declarative experiment description, read from versioned JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema: u32,
    pub experiment: Experiment,
    pub domain: TorusSpec,
    #[serde(default)]
    pub initial_data: InitialData,
    pub stepper: StepperConfig,
    #[serde(default)]
    pub alpha: f64,
    /// Finite horizon for the space-time norms; `None` means `ℬ_α`.
    #[serde(default)]
    pub horizon: Option<f64>,
    /// `L²` cap of the continuation monitor; `None` disables the cap.
    #[serde(default)]
    pub m_cap: Option<f64>,
    #[serde(default)]
    pub picard: PicardSettings,
    #[serde(default)]
    pub complex_shift: ComplexShiftSettings,
    #[serde(default)]
    pub estimates: EstimateSettings,
    #[serde(default)]
    pub outputs: Outputs,
}

impl ScenarioConfig {
    pub fn new(experiment: Experiment, domain: TorusSpec) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            experiment,
            domain,
            initial_data: InitialData::default(),
            stepper: StepperConfig::new(1e-3, 1.0),
            alpha: 0.0,
            horizon: None,
            m_cap: None,
            picard: PicardSettings::default(),
            complex_shift: ComplexShiftSettings::default(),
            estimates: EstimateSettings::default(),
            outputs: Outputs::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| KsError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(KsError::Config(m));
        if self.schema != SCHEMA_VERSION {
            return bad(format!(
                "unsupported schema {} (expected {SCHEMA_VERSION})",
                self.schema
            ));
        }
        if self.experiment != Experiment::Modes && self.experiment != Experiment::Thresholds {
            self.stepper.steps().map_err(|e| KsError::Config(e.to_string()))?;
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be finite and >= 0, got {}", self.alpha));
        }
        if let Some(h) = self.horizon {
            if !(h > 0.0) {
                return bad(format!("horizon must be > 0, got {h}"));
            }
        }
        if let Some(m) = self.m_cap {
            if !(m > 0.0) {
                return bad(format!("m_cap must be > 0, got {m}"));
            }
        }
        let d = &self.initial_data;
        if !d.amplitude.is_finite() || !d.spectral_exponent.is_finite() {
            return bad("initial data parameters must be finite".into());
        }
        if d.kind == DataKind::File && d.path.is_none() {
            return bad("initial_data.kind = file needs initial_data.path".into());
        }
        if d.kind == DataKind::SingleMode {
            let [k1, k2] = d.mode;
            let idx = self.domain.position(k1, k2);
            if (k1, k2) == (0, 0) || idx.is_none() || idx.is_some_and(|i| self.domain.is_nyquist(i)) {
                return bad(format!("single mode {:?} is not a resolved nonzero mode", d.mode));
            }
        }
        if let Some(ScaleTo::Wiener0(x) | ScaleTo::L2(x)) = d.scale_to {
            if !(x >= 0.0 && x.is_finite()) {
                return bad(format!("scale_to target must be >= 0, got {x}"));
            }
        }
        if self.experiment == Experiment::ComplexShift && self.complex_shift.levels == 0 {
            return bad("complex_shift.levels must be >= 1".into());
        }
        if self.experiment == Experiment::Estimates {
            let e = &self.estimates;
            if e.probes == 0 || e.probe_kmax < 1 || !(e.probe_span > 0.0) {
                return bad("estimates need probes >= 1, probe_kmax >= 1 and probe_span > 0".into());
            }
            if e.smoothing_times.iter().any(|&t| !(t > 0.0)) {
                return bad("smoothing times must be > 0".into());
            }
        }
        if self.outputs.csv_path.as_os_str().is_empty() {
            return bad("outputs.csv_path must not be empty".into());
        }
        Ok(())
    }
}
