use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::base_flow::{analytic_profile, BaseFlow, CatalogId, CatalogParams, MisesResolution};
use crate::error::{Error, Result};
use crate::evolution::{ConsistencyOptions, ScanConfig};
use crate::numerics::{build_stretched_grid, XGrid};
use crate::quasimode::QuasimodeConfig;
use crate::spectral::SpectralConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowConfig {
    /// Catalog name of the flow under study.
    pub catalog: String,
    pub params: CatalogParams,
    pub y_max: f64,
    pub n_y: usize,
    pub stretch: f64,
    pub x_end: f64,
    pub n_x: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            catalog: "critical_shear".into(),
            params: CatalogParams::default(),
            y_max: 40.0,
            n_y: 801,
            stretch: 3.0,
            x_end: 1.0,
            n_x: 41,
        }
    }
}

impl FlowConfig {
    pub fn build(&self, name: &str) -> Result<BaseFlow> {
        let id: CatalogId = name
            .parse()
            .map_err(|_| Error::config("flow.catalog", format!("unknown catalog flow `{name}`")))?;
        let xg = XGrid::uniform(self.x_end, self.n_x).map_err(|e| Error::config("flow.n_x", e.to_string()))?;
        let yg = build_stretched_grid(self.y_max, self.n_y, self.stretch)
            .map_err(|e| Error::config("flow.n_y", e.to_string()))?;
        analytic_profile(id, self.params, xg, yg).map_err(|e| Error::config("flow.params", e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuasimodeSection {
    pub eps_list: Vec<f64>,
    pub beta: f64,
    pub cutoff_inner: Option<f64>,
    pub cutoff_outer: Option<f64>,
    pub x_span: Option<f64>,
    pub n_x: usize,
    pub points_per_layer: f64,
    pub growth: f64,
    pub dx_factor: f64,
}

impl Default for QuasimodeSection {
    fn default() -> Self {
        let d = QuasimodeConfig::default();
        Self {
            eps_list: vec![1e-2, 2.5e-3, 1e-3],
            beta: d.beta,
            cutoff_inner: d.cutoff_inner,
            cutoff_outer: d.cutoff_outer,
            x_span: d.x_span,
            n_x: d.n_x,
            points_per_layer: d.points_per_layer,
            growth: d.growth,
            dx_factor: d.dx_factor,
        }
    }
}

impl QuasimodeSection {
    pub fn at(&self, eps: f64) -> QuasimodeConfig {
        QuasimodeConfig {
            eps,
            beta: self.beta,
            cutoff_inner: self.cutoff_inner,
            cutoff_outer: self.cutoff_outer,
            x_span: self.x_span,
            n_x: self.n_x,
            y_max: None,
            points_per_layer: self.points_per_layer,
            growth: self.growth,
            dx_factor: self.dx_factor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionSection {
    pub k_list: Vec<f64>,
    /// Absolute regularization rates.
    pub delta: Vec<f64>,
    /// Rates as fractions of the fitted slope.
    pub delta_fractions: Vec<f64>,
    pub sigma: f64,
    /// `dx = dx/k` for the scan.
    pub dx: f64,
    pub x_window: f64,
    pub points_per_layer: f64,
    pub growth: f64,
    pub growth_ratio: f64,
    /// Catalog flow whose quasimode supplies the initial data.
    pub data_flow: String,
    /// Control flow marched with the same data; empty for none.
    pub control: String,
    pub consistency_eps: f64,
    pub consistency: ConsistencyOptions,
}

impl Default for EvolutionSection {
    fn default() -> Self {
        let s = ScanConfig::default();
        Self {
            k_list: s.ks,
            delta: s.deltas,
            delta_fractions: s.delta_fractions,
            sigma: s.sigma,
            dx: s.dx_factor,
            x_window: s.x_window,
            points_per_layer: s.points_per_layer,
            growth: s.growth,
            growth_ratio: s.growth_ratio,
            data_flow: "critical_shear".into(),
            control: "monotone_exp".into(),
            consistency_eps: 1e-2,
            consistency: ConsistencyOptions::default(),
        }
    }
}

impl EvolutionSection {
    pub fn scan_config(&self, beta: f64) -> ScanConfig {
        ScanConfig {
            ks: self.k_list.clone(),
            deltas: self.delta.clone(),
            delta_fractions: self.delta_fractions.clone(),
            sigma: self.sigma,
            x_window: self.x_window,
            dx_factor: self.dx,
            points_per_layer: self.points_per_layer,
            growth: self.growth,
            growth_ratio: self.growth_ratio,
            beta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SteadySection {
    /// Inflow CSV with columns `Y,u1`; the Blasius inflow when absent.
    pub inflow: Option<PathBuf>,
    pub p_x: f64,
    pub x_end: f64,
    pub psi_max: f64,
    pub resolution: MisesResolution,
    pub n_y: usize,
}

impl Default for SteadySection {
    fn default() -> Self {
        Self {
            inflow: None,
            p_x: 0.0,
            x_end: 1.0,
            psi_max: 8.0,
            resolution: MisesResolution::default(),
            n_y: 201,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub flow: FlowConfig,
    pub spectral: SpectralConfig,
    /// Values of `C` for the existence check of the spectral condition.
    pub spectral_checks: Vec<f64>,
    pub quasimode: QuasimodeSection,
    pub evolution: EvolutionSection,
    pub steady: SteadySection,
    pub output_dir: PathBuf,
    pub rng_seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            flow: FlowConfig::default(),
            spectral: SpectralConfig::default(),
            spectral_checks: vec![0.5, 1.0, 2.0],
            quasimode: QuasimodeSection::default(),
            evolution: EvolutionSection::default(),
            steady: SteadySection::default(),
            output_dir: PathBuf::from("out"),
            rng_seed: 7,
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("--config", format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::config("--config", e.to_string()))
    }

    /// Checks that need no computation. Relative inflow paths resolve
    /// against the working directory.
    pub fn validate(&self) -> Result<()> {
        for name in [&self.flow.catalog, &self.evolution.data_flow] {
            name.parse::<CatalogId>()
                .map_err(|_| Error::config("flow.catalog", format!("unknown catalog flow `{name}`")))?;
        }
        if !self.evolution.control.is_empty() {
            self.evolution
                .control
                .parse::<CatalogId>()
                .map_err(|_| Error::config("evolution.control", format!("unknown catalog flow `{}`", self.evolution.control)))?;
        }
        if !(self.spectral.h > 0.0 && self.spectral.tol > 0.0) {
            return Err(Error::config("spectral", "h and tol must be positive"));
        }
        if let Some(z) = self.spectral.z_max {
            if !(z > 0.0) {
                return Err(Error::config("spectral.z_max", "must be positive"));
            }
        }
        if self.spectral_checks.iter().any(|&c| !(c > 0.0)) {
            return Err(Error::config("spectral_checks", "values of C must be positive"));
        }
        if self.quasimode.eps_list.is_empty() {
            return Err(Error::config("quasimode.eps_list", "must not be empty"));
        }
        for &eps in &self.quasimode.eps_list {
            self.quasimode.at(eps).validate()?;
        }
        self.evolution.scan_config(self.quasimode.beta).validate()?;
        if !(self.evolution.consistency_eps > 0.0 && self.evolution.consistency_eps < 1.0) {
            return Err(Error::config("evolution.consistency_eps", "must lie in (0, 1)"));
        }
        if let Some(p) = &self.steady.inflow {
            if !p.is_file() {
                return Err(Error::config("steady.inflow", format!("{} does not exist", p.display())));
            }
        }
        if !(self.steady.x_end > 0.0 && self.steady.psi_max > 0.0) || self.steady.n_y < 8 {
            return Err(Error::config("steady", "x_end, psi_max must be positive and n_y >= 8"));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
