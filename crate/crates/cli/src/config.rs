//! Run configuration file: TOML with the sections `sheet`, `atom`,
//! `geometry`, and the optional `sweep` and `engine`.

use std::path::{Path, PathBuf};

use cpg_core::lifshitz::{Delta1Method, Delta2Order, EngineSettings};
use cpg_core::thermo::MIN_STEP_K;
use cpg_core::units::{AtomModel, Configuration, GrapheneSheet, PolarizabilityMode, DEFAULT_FERMI_RATIO};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub sheet: SheetConfig,
    pub atom: AtomConfig,
    pub geometry: GeometryConfig,
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub engine: EngineConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SheetConfig {
    #[serde(rename = "gap_eV")]
    pub gap_ev: f64,
    #[serde(rename = "mu_eV")]
    pub mu_ev: f64,
    #[serde(default = "default_fermi_ratio")]
    pub fermi_ratio: f64,
}

fn default_fermi_ratio() -> f64 {
    DEFAULT_FERMI_RATIO
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    pub alpha0_nm3: f64,
    #[serde(rename = "omega0_eV")]
    pub omega0_ev: f64,
    pub mode: PolarizabilityMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub separation_nm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(rename = "T_min_K")]
    pub t_min_k: f64,
    #[serde(rename = "T_max_K")]
    pub t_max_k: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl SweepConfig {
    /// Sweep temperatures in increasing order; both ends are hit exactly.
    pub fn temperatures(&self) -> Vec<f64> {
        let n = self.points;
        let (lo, hi) = (self.t_min_k, self.t_max_k);
        (0..n)
            .map(|i| {
                let f = i as f64 / (n - 1) as f64;
                match (i, self.spacing) {
                    (0, _) => lo,
                    (i, _) if i + 1 == n => hi,
                    (_, Spacing::Linear) => lo + (hi - lo) * f,
                    (_, Spacing::Log) => (lo.ln() + (hi.ln() - lo.ln()) * f).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EngineConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub l_max_cap: usize,
    pub delta1_method: Delta1Method,
    /// How the thermal tensor enters `δ₂`; `full` is needed off the gapped regime.
    pub delta2_order: Delta2Order,
}

impl Default for EngineConfig {
    fn default() -> Self {
        let s = EngineSettings::default();
        Self {
            rel_tol: s.quadrature.rel_tol,
            abs_tol: s.quadrature.abs_tol,
            l_max_cap: s.l_max_cap,
            delta1_method: s.delta1_method,
            delta2_order: s.delta2_order,
        }
    }
}

/// A parsed and validated configuration file.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub path: PathBuf,
    pub raw: RunConfig,
    /// Physical configuration at a placeholder temperature of 1 K.
    pub base: Configuration,
    pub settings: EngineSettings,
}

impl LoadedConfig {
    pub fn at_temperature(&self, temperature_k: f64) -> CliResult<Configuration> {
        self.base
            .with_temperature(temperature_k)
            .map_err(|e| CliError::Usage(format!("temperature {temperature_k} K: {e}")))
    }

    pub fn sweep(&self) -> CliResult<&SweepConfig> {
        self.raw.sweep.as_ref().ok_or_else(|| CliError::Config {
            path: self.path.clone(),
            message: "the [sweep] section is required for this command".into(),
        })
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    fn validate(&self) -> Result<(Configuration, EngineSettings), String> {
        let sheet = GrapheneSheet::new(self.sheet.gap_ev, self.sheet.mu_ev, self.sheet.fermi_ratio)
            .map_err(|e| format!("[sheet] {e}"))?;
        let atom = AtomModel::new(self.atom.alpha0_nm3, self.atom.omega0_ev, self.atom.mode)
            .map_err(|e| format!("[atom] {e}"))?;
        let base = Configuration::new(sheet, atom, self.geometry.separation_nm, 1.0)
            .map_err(|e| format!("[geometry] {e}"))?;
        if let Some(s) = &self.sweep {
            if s.points < 2 {
                return Err(format!("[sweep] points must be >= 2, got {}", s.points));
            }
            // The entropy is a central difference with step ≥ MIN_STEP_K.
            if !(s.t_min_k > MIN_STEP_K && s.t_min_k.is_finite()) {
                return Err(format!("[sweep] T_min_K must exceed {MIN_STEP_K} K, got {}", s.t_min_k));
            }
            if !(s.t_max_k > s.t_min_k && s.t_max_k.is_finite()) {
                return Err(format!("[sweep] T_max_K must exceed T_min_K, got {}", s.t_max_k));
            }
        }
        let e = &self.engine;
        let quadrature = cpg_core::quadrature::QuadratureSpec::new(e.rel_tol, e.abs_tol, 2000)
            .map_err(|err| format!("[engine] {err}"))?;
        if e.l_max_cap == 0 {
            return Err("[engine] l_max_cap must be positive".into());
        }
        let settings = EngineSettings {
            quadrature,
            l_max_cap: e.l_max_cap,
            delta1_method: e.delta1_method,
            delta2_order: e.delta2_order,
            ..EngineSettings::default()
        };
        Ok((base, settings))
    }
}

/// Reads, parses and validates a configuration file. Every failure is a
/// configuration error naming the path.
pub fn load(path: &Path) -> CliResult<LoadedConfig> {
    let fail = |message: String| CliError::Config {
        path: path.to_path_buf(),
        message,
    };
    let text = std::fs::read_to_string(path).map_err(|e| fail(format!("cannot read config: {e}")))?;
    let raw = RunConfig::parse(&text).map_err(fail)?;
    let (base, settings) = raw.validate().map_err(fail)?;
    Ok(LoadedConfig {
        path: path.to_path_buf(),
        raw,
        base,
        settings,
    })
}
