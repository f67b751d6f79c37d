//! Experiment configuration: a TOML file, overridden by command-line flags.
//!
//! Every field has a default, so an empty file (or no file) is valid. Unknown
//! keys are rejected.

use serde::{Deserialize, Serialize};

use crate::linalg::EnsembleClass;
use crate::qmap::MapClass;
use crate::resonator::SymmetryClass;
use crate::spectra::{Region, Tolerances};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub model: ModelConfig,
    pub tolerances: Tolerances,
    pub scan: ScanConfig,
    pub map: MapConfig,
    pub verify: VerifyConfig,
    pub poles: PolesConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            model: ModelConfig::default(),
            tolerances: Tolerances::default(),
            scan: ScanConfig::default(),
            map: MapConfig::default(),
            verify: VerifyConfig::default(),
            poles: PolesConfig::default(),
        }
    }
}

/// A single resonator pair drawn from the ensemble of its class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub class: SymmetryClass,
    pub m: usize,
    pub n: usize,
    pub transparency: f64,
    /// Rate in units of `mu_0 = sqrt(N) Delta / 2 pi`; ignored when `mu` is set.
    pub mu_over_mu0: f64,
    /// Absolute rate.
    pub mu: Option<f64>,
    /// Level spacing; measured from the sampled Hamiltonian when absent.
    pub delta: Option<f64>,
    pub sample_index: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            class: SymmetryClass::PtWithTprime,
            m: 40,
            n: 4,
            transparency: 0.5,
            mu_over_mu0: 1.0,
            mu: None,
            delta: None,
            sample_index: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    /// Grid of rates in units of `mu_0`.
    pub mu_over_mu0: Vec<f64>,
    pub samples: usize,
    pub bins: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            mu_over_mu0: (0..=16).map(|k| 0.25 * k as f64).collect(),
            samples: 20,
            bins: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MapConfig {
    pub class: MapClass,
    /// Ensemble of the internal evolution: `symmetric-unitary` or `unitary`.
    pub ensemble: EnsembleClass,
    pub m: usize,
    pub n: usize,
    pub transparency: f64,
    pub mu: f64,
    pub tau: f64,
    pub steps: usize,
    pub sample_index: u64,
}

impl Default for MapConfig {
    fn default() -> Self {
        Self {
            class: MapClass::Pt,
            ensemble: EnsembleClass::SymmetricUnitary,
            m: 64,
            n: 8,
            transparency: 0.5,
            mu: 0.1,
            tau: 1.0,
            steps: 1000,
            sample_index: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    /// Instances per symmetry class.
    pub samples: usize,
    /// Real frequencies probed per instance.
    pub frequencies: usize,
    /// Deliberately unbalances gain and loss to exercise the failure path.
    pub break_symmetry: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            samples: 3,
            frequencies: 4,
            break_symmetry: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdSearch {
    pub lo_over_mu0: f64,
    pub hi_over_mu0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct PolesConfig {
    /// Outer leads per side; defaults to `N`.
    pub leads: Option<usize>,
    /// Search rectangle; defaults to the seeds' bounding box widened by `Delta`.
    pub region: Option<Region>,
    pub threshold: Option<ThresholdSearch>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// Schema checks beyond what deserialization enforces.
    pub fn validate(&self) -> Result<(), String> {
        let m = &self.model;
        if m.n == 0 || m.n > m.m {
            return Err(format!("model: need 1 <= n <= m, got n = {}, m = {}", m.n, m.m));
        }
        if !(0.0..=1.0).contains(&m.transparency) {
            return Err(format!("model: transparency {} not in [0, 1]", m.transparency));
        }
        if !(m.mu_over_mu0.is_finite() && m.mu_over_mu0 >= 0.0) {
            return Err("model: mu_over_mu0 must be >= 0".into());
        }
        if m.mu.is_some_and(|x| !(x.is_finite() && x >= 0.0)) {
            return Err("model: mu must be >= 0".into());
        }
        if m.delta.is_some_and(|x| !(x.is_finite() && x > 0.0)) {
            return Err("model: delta must be > 0".into());
        }
        let t = &self.tolerances;
        if !(t.eps_real > 0.0 && t.delta_pair > 0.0) {
            return Err("tolerances must be > 0".into());
        }
        let s = &self.scan;
        if s.samples == 0 || s.bins == 0 {
            return Err("scan: samples and bins must be >= 1".into());
        }
        if s.mu_over_mu0.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err("scan: rates must be >= 0".into());
        }
        let q = &self.map;
        if q.n > q.m || q.m == 0 {
            return Err(format!("map: need 1 <= m and n <= m, got n = {}, m = {}", q.n, q.m));
        }
        if !matches!(q.ensemble, EnsembleClass::SymmetricUnitary | EnsembleClass::Unitary) {
            return Err("map: ensemble must be symmetric-unitary or unitary".into());
        }
        if !(0.0..=1.0).contains(&q.transparency) || !(q.mu >= 0.0) || !(q.tau > 0.0) {
            return Err("map: need 0 <= transparency <= 1, mu >= 0, tau > 0".into());
        }
        if self.verify.samples == 0 {
            return Err("verify: samples must be >= 1".into());
        }
        if let Some(th) = self.poles.threshold {
            if !(th.lo_over_mu0 >= 0.0 && th.hi_over_mu0 > th.lo_over_mu0) {
                return Err("poles.threshold: need 0 <= lo_over_mu0 < hi_over_mu0".into());
            }
        }
        if self.poles.leads.is_some_and(|l| l > m.m) {
            return Err("poles: more leads than modes".into());
        }
        Ok(())
    }
}
