//! Physical inputs in laboratory units (eV, nm, K) and their mapping to the
//! dimensionless variables used by the rest of the crate.
//!
//! Every quantity downstream of [`to_dimensionless`] is measured in units of
//! the characteristic frequency `ω_c = c / 2a`: Matsubara frequencies become
//! `ζ_l = τ l`, the gap becomes `δ = 2aΔ/ħc` and the chemical potential
//! `m = 2aμ/ħc`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// ħc in eV·nm (CODATA 2018).
pub const HBAR_C_EV_NM: f64 = 197.326_980_4;
/// Boltzmann constant in eV/K (CODATA 2018).
pub const BOLTZMANN_EV_PER_K: f64 = 8.617_333_262e-5;
/// Fine-structure constant e²/ħc.
pub const FINE_STRUCTURE: f64 = 1.0 / 137.035_999;
/// v_F / c for graphene.
pub const DEFAULT_FERMI_RATIO: f64 = 1.0 / 300.0;

/// Material parameters of the graphene sheet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrapheneSheet {
    gap_ev: f64,
    chem_potential_ev: f64,
    fermi_ratio: f64,
}

impl GrapheneSheet {
    pub fn new(gap_ev: f64, chem_potential_ev: f64, fermi_ratio: f64) -> Result<Self> {
        if !(gap_ev >= 0.0 && gap_ev.is_finite()) {
            return domain(format!("energy gap must be finite and >= 0, got {gap_ev}"));
        }
        if !(chem_potential_ev >= 0.0 && chem_potential_ev.is_finite()) {
            return domain(format!(
                "chemical potential must be finite and >= 0, got {chem_potential_ev}"
            ));
        }
        if !(fermi_ratio > 0.0 && fermi_ratio < 1.0) {
            return domain(format!("Fermi velocity ratio must lie in (0, 1), got {fermi_ratio}"));
        }
        Ok(Self {
            gap_ev,
            chem_potential_ev,
            fermi_ratio,
        })
    }

    /// Zero gap, zero doping.
    pub fn pristine() -> Self {
        Self {
            gap_ev: 0.0,
            chem_potential_ev: 0.0,
            fermi_ratio: DEFAULT_FERMI_RATIO,
        }
    }

    pub fn gap_ev(&self) -> f64 {
        self.gap_ev
    }

    pub fn chem_potential_ev(&self) -> f64 {
        self.chem_potential_ev
    }

    pub fn fermi_ratio(&self) -> f64 {
        self.fermi_ratio
    }

    /// `Δ > 2μ`: the thermal part of the tensor is exponentially suppressed.
    pub fn nernst_regime(&self) -> bool {
        self.gap_ev > 2.0 * self.chem_potential_ev
    }

    /// `Δ = 2μ` exactly.
    pub fn at_regime_boundary(&self) -> bool {
        self.gap_ev == 2.0 * self.chem_potential_ev
    }

    /// `(Δ − 2μ)/2` in eV; negative outside the Nernst regime.
    pub fn suppression_energy_ev(&self) -> f64 {
        0.5 * (self.gap_ev - 2.0 * self.chem_potential_ev)
    }
}

/// How the dynamic polarizability depends on imaginary frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolarizabilityMode {
    /// `α(iξ) = α₀` at every frequency.
    StaticOnly,
    /// `α(iξ) = α₀ ω₀² / (ω₀² + ξ²)`.
    SingleOscillator,
}

/// Atomic dynamic polarizability (Gaussian units, nm³).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomModel {
    alpha0_nm3: f64,
    omega0_ev: f64,
    mode: PolarizabilityMode,
}

impl AtomModel {
    /// `alpha0_nm3 = 0` is accepted and switches the interaction off.
    pub fn new(alpha0_nm3: f64, omega0_ev: f64, mode: PolarizabilityMode) -> Result<Self> {
        if !(alpha0_nm3 >= 0.0 && alpha0_nm3.is_finite()) {
            return domain(format!("static polarizability must be >= 0, got {alpha0_nm3}"));
        }
        if !(omega0_ev > 0.0 && omega0_ev.is_finite()) {
            return domain(format!("oscillator frequency must be > 0, got {omega0_ev}"));
        }
        Ok(Self {
            alpha0_nm3,
            omega0_ev,
            mode,
        })
    }

    /// Generic hydrogen-like scale (α₀ = 0.02 nm³, ħω₀ = 10 eV). Not a model
    /// of any particular atom; meant for smoke tests and examples.
    pub fn generic(mode: PolarizabilityMode) -> Self {
        Self {
            alpha0_nm3: 0.02,
            omega0_ev: 10.0,
            mode,
        }
    }

    pub fn alpha0_nm3(&self) -> f64 {
        self.alpha0_nm3
    }

    pub fn omega0_ev(&self) -> f64 {
        self.omega0_ev
    }

    pub fn mode(&self) -> PolarizabilityMode {
        self.mode
    }

    pub fn is_static(&self) -> bool {
        self.mode == PolarizabilityMode::StaticOnly
    }

    pub fn with_alpha0(mut self, alpha0_nm3: f64) -> Result<Self> {
        self = Self::new(alpha0_nm3, self.omega0_ev, self.mode)?;
        Ok(self)
    }

    /// `α(iξ) / α₀` for `ħξ` in eV.
    pub fn relative_polarizability(&self, xi_ev: f64) -> f64 {
        match self.mode {
            PolarizabilityMode::StaticOnly => 1.0,
            PolarizabilityMode::SingleOscillator => {
                if xi_ev.is_infinite() {
                    return 0.0;
                }
                let w2 = self.omega0_ev * self.omega0_ev;
                w2 / (w2 + xi_ev * xi_ev)
            }
        }
    }
}

/// `α(iξ)` in nm³ for `ħξ` in eV.
pub fn polarizability(atom: &AtomModel, xi_ev: f64) -> Result<f64> {
    if !(xi_ev >= 0.0) {
        return domain(format!("imaginary frequency must be >= 0, got {xi_ev}"));
    }
    Ok(atom.alpha0_nm3 * atom.relative_polarizability(xi_ev))
}

/// A single physical configuration: sheet, atom, separation and temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub sheet: GrapheneSheet,
    pub atom: AtomModel,
    separation_nm: f64,
    temperature_k: f64,
}

impl Configuration {
    pub fn new(
        sheet: GrapheneSheet,
        atom: AtomModel,
        separation_nm: f64,
        temperature_k: f64,
    ) -> Result<Self> {
        if !(separation_nm > 0.0 && separation_nm.is_finite()) {
            return domain(format!("separation must be > 0, got {separation_nm}"));
        }
        if !(temperature_k >= 0.0 && temperature_k.is_finite()) {
            return domain(format!("temperature must be >= 0, got {temperature_k}"));
        }
        Ok(Self {
            sheet,
            atom,
            separation_nm,
            temperature_k,
        })
    }

    pub fn separation_nm(&self) -> f64 {
        self.separation_nm
    }

    pub fn temperature_k(&self) -> f64 {
        self.temperature_k
    }

    pub fn with_temperature(&self, temperature_k: f64) -> Result<Self> {
        Self::new(self.sheet, self.atom, self.separation_nm, temperature_k)
    }

    /// Temperature at which the dimensionless temperature equals `tau`.
    pub fn temperature_for_tau(&self, tau: f64) -> f64 {
        tau * HBAR_C_EV_NM / (4.0 * PI * self.separation_nm * BOLTZMANN_EV_PER_K)
    }

    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        self.with_temperature(self.temperature_for_tau(tau))
    }

    pub fn kt_ev(&self) -> f64 {
        BOLTZMANN_EV_PER_K * self.temperature_k
    }

    /// `ω_c α₀ / (16π a³)` in eV: the free energy equals minus this scale
    /// times the dimensionless Matsubara sum `τ Σ' (α_l/α₀) g(ζ_l)`.
    pub fn energy_scale_ev(&self) -> f64 {
        let a = self.separation_nm;
        let omega_c = HBAR_C_EV_NM / (2.0 * a);
        omega_c * self.atom.alpha0_nm3() / (16.0 * PI * a * a * a)
    }
}

/// Dimensionless view of one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessState {
    /// `τ = 4π a k_B T / ħc`.
    pub tau: f64,
    /// `δ = 2aΔ / ħc`.
    pub delta: f64,
    /// `m = 2aμ / ħc`.
    pub m: f64,
    /// `ħω_c = ħc / 2a` in eV.
    pub omega_c_ev: f64,
    /// `ṽ = v_F / c`.
    pub fermi_ratio: f64,
}

impl DimensionlessState {
    /// `ζ_l = τ l`.
    pub fn zeta(&self, l: usize) -> f64 {
        self.tau * l as f64
    }

    /// `μ / k_BT = 2πm/τ`.
    pub fn mu_over_kt(&self) -> f64 {
        2.0 * PI * self.m / self.tau
    }

    /// `Δ / 2k_BT = πδ/τ`, which also equals `B_l D_l` at every `l`.
    pub fn half_gap_over_kt(&self) -> f64 {
        PI * self.delta / self.tau
    }

    /// `(Δ − 2μ) / 2k_BT`.
    pub fn suppression_exponent(&self) -> f64 {
        PI * (self.delta - 2.0 * self.m) / self.tau
    }

    pub fn kt_ev(&self) -> f64 {
        self.omega_c_ev * self.tau / (2.0 * PI)
    }

    /// Temperature in kelvin recovered from `τ`.
    pub fn temperature_k(&self) -> f64 {
        self.kt_ev() / BOLTZMANN_EV_PER_K
    }
}

pub fn to_dimensionless(cfg: &Configuration) -> Result<DimensionlessState> {
    let a = cfg.separation_nm();
    let t = cfg.temperature_k();
    if !(a > 0.0) {
        return domain(format!("separation must be > 0, got {a}"));
    }
    if !(t >= 0.0) {
        return domain(format!("temperature must be >= 0, got {t}"));
    }
    let two_a_over_hc = 2.0 * a / HBAR_C_EV_NM;
    Ok(DimensionlessState {
        tau: 4.0 * PI * a * BOLTZMANN_EV_PER_K * t / HBAR_C_EV_NM,
        delta: two_a_over_hc * cfg.sheet.gap_ev(),
        m: two_a_over_hc * cfg.sheet.chem_potential_ev(),
        omega_c_ev: HBAR_C_EV_NM / (2.0 * a),
        fermi_ratio: cfg.sheet.fermi_ratio(),
    })
}
