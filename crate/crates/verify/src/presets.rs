//! The three sheets the checks run on, at `a = 500 nm` with the generic
//! static atom. The temperature is a placeholder; sweeps set their own.

use cpg_core::units::{AtomModel, Configuration, GrapheneSheet, PolarizabilityMode, DEFAULT_FERMI_RATIO};

pub const SEPARATION_NM: f64 = 500.0;

fn build(gap_ev: f64, mu_ev: f64) -> Configuration {
    let sheet = GrapheneSheet::new(gap_ev, mu_ev, DEFAULT_FERMI_RATIO).expect("preset sheet is valid");
    let atom = AtomModel::generic(PolarizabilityMode::StaticOnly);
    Configuration::new(sheet, atom, SEPARATION_NM, 1.0).expect("preset configuration is valid")
}

/// `Δ = μ = 0`.
pub fn pristine() -> Configuration {
    build(0.0, 0.0)
}

/// `Δ = 0.2 eV`, `μ = 0.05 eV`: `Δ − 2μ = 0.1 eV`.
pub fn gapped() -> Configuration {
    build(0.2, 0.05)
}

/// `Δ = 2μ = 0.2 eV`.
pub fn boundary() -> Configuration {
    build(0.2, 0.1)
}
