//! Closed-form low-temperature laws for the gapped sheet.
//!
//! With `Δ > 0` the thermal correction from the discreteness of the
//! Matsubara sum behaves as `δ₁ ≈ −c₅ T⁵` and the entropy as
//! `S ≈ 5 c₅ T⁴`; the thermal-tensor part is suppressed by
//! `exp[−(Δ − 2μ)/2k_BT]`. The coefficient `c₅` comes in three variants:
//!
//! * `Nominal`: `8α(1 + ṽ²)/ṽ²`.
//! * `Zeta5`: the nominal value times `ζ(5)`, which the Bose integral
//!   `∫t⁴/(e^{2πt} − 1) dt = 24ζ(5)/(2π)⁵` produces.
//! * `Corrected`: `16ζ(5)α(1 − ṽ²)`, from the small-`x` expansion of the
//!   zero-temperature reflection coefficients carried through exactly.
//!
//! The numerics in [`crate::lifshitz`] follow `Corrected`; the other two
//! are kept so that the comparison can be reported.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::lifshitz::phi2;
use crate::quadrature::QuadratureSpec;
use crate::special::{exp_integral_ei_neg, ZETA_5};
use crate::thermo::least_squares;
use crate::units::{
    to_dimensionless, Configuration, DimensionlessState, GrapheneSheet, BOLTZMANN_EV_PER_K, FINE_STRUCTURE,
    HBAR_C_EV_NM,
};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Law {
    T5FreeEnergy,
    T4Entropy,
    ExpSuppression,
}

impl Law {
    pub fn label(self) -> &'static str {
        match self {
            Law::T5FreeEnergy => "T5-free-energy",
            Law::T4Entropy => "T4-entropy",
            Law::ExpSuppression => "exp-suppression",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientVariant {
    Nominal,
    Zeta5,
    Corrected,
}

impl CoefficientVariant {
    pub const ALL: [CoefficientVariant; 3] = [Self::Nominal, Self::Zeta5, Self::Corrected];

    pub fn label(self) -> &'static str {
        match self {
            Self::Nominal => "nominal",
            Self::Zeta5 => "zeta5",
            Self::Corrected => "corrected",
        }
    }
}

/// A low-temperature law with its coefficient.
///
/// For the power laws `coefficient` is in eV/K⁵: the free energy is
/// `−coefficient·T⁵` and the entropy `coefficient·T⁴` (eV/K), with
/// `exponent_or_slope` 5 or 4. For the suppression law the coefficient is
/// unused (1) and the slope of `ln|δ₂|` against `1/k_BT` is in eV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticPrediction {
    pub law: Law,
    pub variant: CoefficientVariant,
    pub coefficient: f64,
    pub exponent_or_slope: f64,
    /// Temperatures (K) where the law is expected to hold.
    pub validity_k: (f64, f64),
}

fn fermi_ratio_sq(sheet: &GrapheneSheet) -> f64 {
    sheet.fermi_ratio() * sheet.fermi_ratio()
}

/// Dimensionless factor `K` in `δ₁ = −K α₀ (k_BT)⁵ / ((ħc)³ Δ)`.
pub fn t5_factor(sheet: &GrapheneSheet, variant: CoefficientVariant) -> f64 {
    let v2 = fermi_ratio_sq(sheet);
    let nominal = 8.0 * FINE_STRUCTURE * (1.0 + v2) / v2;
    match variant {
        CoefficientVariant::Nominal => nominal,
        CoefficientVariant::Zeta5 => nominal * ZETA_5,
        CoefficientVariant::Corrected => 16.0 * ZETA_5 * FINE_STRUCTURE * (1.0 - v2),
    }
}

fn require_gap(cfg: &Configuration) -> Result<()> {
    if !(cfg.sheet.gap_ev() > 0.0) {
        return domain("the T⁵ law needs a gap; the gapless sheet follows a T³ law");
    }
    Ok(())
}

/// `c₅` (eV/K⁵) with `δ₁ ≈ −c₅ T⁵`. Only `α₀` enters, so the law holds for
/// either polarizability mode.
pub fn free_energy_coefficient(cfg: &Configuration, variant: CoefficientVariant) -> Result<f64> {
    require_gap(cfg)?;
    let k5 = BOLTZMANN_EV_PER_K.powi(5);
    Ok(t5_factor(&cfg.sheet, variant) * cfg.atom.alpha0_nm3() * k5 / (HBAR_C_EV_NM.powi(3) * cfg.sheet.gap_ev()))
}

/// Leading `δ₁` at the configuration's temperature, in eV.
pub fn delta1_asymptote_variant(cfg: &Configuration, variant: CoefficientVariant) -> Result<f64> {
    Ok(-free_energy_coefficient(cfg, variant)? * cfg.temperature_k().powi(5))
}

/// Leading `δ₁` with the nominal coefficient `8α(1 + ṽ²)/ṽ²`.
pub fn delta1_asymptote(cfg: &Configuration) -> Result<f64> {
    delta1_asymptote_variant(cfg, CoefficientVariant::Nominal)
}

/// Leading `δ₁` with the nominal coefficient times `ζ(5)`.
pub fn delta1_asymptote_zeta5(cfg: &Configuration) -> Result<f64> {
    delta1_asymptote_variant(cfg, CoefficientVariant::Zeta5)
}

/// Leading `δ₁ = −16ζ(5)α(1 − ṽ²) α₀ (k_BT)⁵ / ((ħc)³ Δ)`.
pub fn delta1_asymptote_corrected(cfg: &Configuration) -> Result<f64> {
    delta1_asymptote_variant(cfg, CoefficientVariant::Corrected)
}

/// Leading entropy `S = −∂δ₁/∂T = 5 c₅ T⁴` in eV/K.
pub fn entropy_asymptote_variant(cfg: &Configuration, variant: CoefficientVariant) -> Result<f64> {
    Ok(5.0 * free_energy_coefficient(cfg, variant)? * cfg.temperature_k().powi(4))
}

/// Leading entropy with the nominal coefficient `40α(1 + ṽ²)/ṽ²`.
pub fn entropy_asymptote(cfg: &Configuration) -> Result<f64> {
    entropy_asymptote_variant(cfg, CoefficientVariant::Nominal)
}

/// `(Δ − 2μ)/2` in eV: minus the slope of `ln|δ₂|` against `1/k_BT`.
/// Zero on the boundary `Δ = 2μ`, where there is no suppression.
pub fn delta2_suppression_slope(sheet: &GrapheneSheet) -> Result<f64> {
    let excess = sheet.gap_ev() - 2.0 * sheet.chem_potential_ev();
    if sheet.at_regime_boundary() {
        return Ok(0.0);
    }
    if !(excess > 0.0) {
        return Err(Error::Regime(format!(
            "no thermal suppression for Δ − 2μ = {excess} eV <= 0"
        )));
    }
    Ok(excess / 2.0)
}

/// The three laws for one coefficient variant. The power laws hold for
/// `k_BT ≤ Δ/20`, the suppression law for `k_BT ≤ (Δ − 2μ)/20`.
pub fn predictions(cfg: &Configuration, variant: CoefficientVariant) -> Result<Vec<AsymptoticPrediction>> {
    let c5 = free_energy_coefficient(cfg, variant)?;
    let power_window = (0.0, cfg.sheet.gap_ev() / (20.0 * BOLTZMANN_EV_PER_K));
    let mut out = vec![
        AsymptoticPrediction {
            law: Law::T5FreeEnergy,
            variant,
            coefficient: c5,
            exponent_or_slope: 5.0,
            validity_k: power_window,
        },
        AsymptoticPrediction {
            law: Law::T4Entropy,
            variant,
            coefficient: 5.0 * c5,
            exponent_or_slope: 4.0,
            validity_k: power_window,
        },
    ];
    if let Ok(slope) = delta2_suppression_slope(&cfg.sheet) {
        if slope > 0.0 {
            out.push(AsymptoticPrediction {
                law: Law::ExpSuppression,
                variant,
                coefficient: 1.0,
                exponent_or_slope: -slope,
                validity_k: (0.0, slope / (10.0 * BOLTZMANN_EV_PER_K)),
            });
        }
    }
    Ok(out)
}

/// `K` in `Φ(iη) − Φ(−iη) ≈ −iπ K η⁴` for small `η`: `2α(1 + ṽ²)/(3ṽ²δ)`
/// nominally (also behind the `Zeta5` variant), `4α(1 − ṽ²)/(3δ)` corrected.
pub fn bracket_coefficient(state: &DimensionlessState, variant: CoefficientVariant) -> Result<f64> {
    if !(state.delta > 0.0) {
        return domain("the small-x expansion needs δ > 0");
    }
    let v2 = state.fermi_ratio * state.fermi_ratio;
    Ok(match variant {
        CoefficientVariant::Nominal | CoefficientVariant::Zeta5 => {
            2.0 * FINE_STRUCTURE * (1.0 + v2) / (3.0 * v2 * state.delta)
        }
        CoefficientVariant::Corrected => 4.0 * FINE_STRUCTURE * (1.0 - v2) / (3.0 * state.delta),
    })
}

/// Prefactor `k` of the non-analytic term `k x⁴ Ei(−x)` of `Φ₂`. The
/// nominal form has `k = +K`; the corrected one `k = −K`, which is what
/// makes the bracket come out as `−iπKη⁴` with `Ei(−iη)` on the principal
/// branch.
pub fn phi2_small_x_prefactor(state: &DimensionlessState, variant: CoefficientVariant) -> Result<f64> {
    let k = bracket_coefficient(state, variant)?;
    Ok(match variant {
        CoefficientVariant::Corrected => -k,
        _ => k,
    })
}

/// `k x⁴ Ei(−x)` with the nominal prefactor `2α(1 + ṽ²)/(3ṽ²δ)`.
pub fn phi2_small_x_form(x: f64, cfg: &Configuration) -> Result<f64> {
    if !(x > 0.0 && x <= 0.5) {
        return domain(format!("small-x form needs 0 < x <= 0.5, got {x}"));
    }
    let state = to_dimensionless(cfg)?;
    let k = phi2_small_x_prefactor(&state, CoefficientVariant::Nominal)?;
    Ok(k * x.powi(4) * exp_integral_ei_neg(x)?)
}

/// Least-squares fit of `Φ₂(x) = a₂x² + k x⁴ Ei(−x) + C x⁴` on small real `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phi2Structure {
    pub a2: f64,
    /// Fitted when not supplied.
    pub k: f64,
    pub c: f64,
    pub max_relative_residual: f64,
}

/// Measures `C` (and `a₂`) from `Φ₂` on `x ∈ [0.005, 0.09]`. With
/// `k = None` the non-analytic prefactor is fitted as well.
pub fn fit_phi2_structure(state: &DimensionlessState, spec: &QuadratureSpec, k: Option<f64>) -> Result<Phi2Structure> {
    let xs: Vec<f64> = (0..12).map(|i| 0.005 * 1.3f64.powi(i)).collect();
    let mut rows = Vec::with_capacity(xs.len());
    for &x in &xs {
        let p = phi2(Complex64::new(x, 0.0), state, spec)?.re;
        let ei = exp_integral_ei_neg(x)?;
        rows.push((x, p, ei));
    }
    // Φ₂/x² = a₂ + k x²Ei(−x) + C x², linear in the unknowns.
    let basis = |x: f64, ei: f64| -> Vec<f64> {
        match k {
            Some(_) => vec![1.0, x * x],
            None => vec![1.0, x * x * ei, x * x],
        }
    };
    let design: Vec<Vec<f64>> = rows.iter().map(|&(x, _, ei)| basis(x, ei)).collect();
    let targets: Vec<f64> = rows
        .iter()
        .map(|&(x, p, ei)| p / (x * x) - k.map_or(0.0, |k| k * x * x * ei))
        .collect();
    let (sol, _, _) = least_squares(&design, &targets)?;
    let (a2, kk, c) = match k {
        Some(k) => (sol[0], k, sol[1]),
        None => (sol[0], sol[1], sol[2]),
    };
    let max_relative_residual = rows
        .iter()
        .map(|&(x, p, ei)| {
            let model = x * x * (a2 + kk * x * x * ei + c * x * x);
            ((p - model) / p).abs()
        })
        .fold(0.0, f64::max);
    Ok(Phi2Structure {
        a2,
        k: kk,
        c,
        max_relative_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{AtomModel, PolarizabilityMode, DEFAULT_FERMI_RATIO};
    use approx::assert_relative_eq;

    fn gapped(t: f64) -> Configuration {
        let sheet = GrapheneSheet::new(0.2, 0.05, DEFAULT_FERMI_RATIO).unwrap();
        Configuration::new(sheet, AtomModel::generic(PolarizabilityMode::StaticOnly), 500.0, t).unwrap()
    }

    #[test]
    fn nominal_coefficients() {
        let sheet = gapped(1.0).sheet;
        assert_relative_eq!(t5_factor(&sheet, CoefficientVariant::Nominal), 5254.2, max_relative = 1e-4);
        assert_relative_eq!(5.0 * t5_factor(&sheet, CoefficientVariant::Nominal), 26271.0, max_relative = 1e-4);
        assert_relative_eq!(
            t5_factor(&sheet, CoefficientVariant::Zeta5) / t5_factor(&sheet, CoefficientVariant::Nominal),
            ZETA_5
        );
    }

    #[test]
    fn bracket_prefactor_at_half() {
        let state = DimensionlessState {
            tau: 0.01,
            delta: 0.5,
            m: 0.0,
            omega_c_ev: 0.2,
            fermi_ratio: DEFAULT_FERMI_RATIO,
        };
        let k = phi2_small_x_prefactor(&state, CoefficientVariant::Nominal).unwrap();
        assert_relative_eq!(k, 875.8, max_relative = 2e-4);
    }

    #[test]
    fn small_x_form_at_half() {
        // x⁴ Ei(−x) at x = 0.5 is −0.03499.
        let cfg = gapped(1.0);
        let state = to_dimensionless(&cfg).unwrap();
        let k = phi2_small_x_prefactor(&state, CoefficientVariant::Nominal).unwrap();
        assert_relative_eq!(phi2_small_x_form(0.5, &cfg).unwrap() / k, -0.034_99, max_relative = 2e-4);
        assert!(phi2_small_x_form(0.0, &cfg).is_err());
        assert!(phi2_small_x_form(0.6, &cfg).is_err());
    }

    #[test]
    fn t5_law_scaling_and_sign() {
        let a = delta1_asymptote(&gapped(2.0)).unwrap();
        let b = delta1_asymptote(&gapped(4.0)).unwrap();
        assert!(a < 0.0 && b < 0.0);
        assert_relative_eq!(a / b, 1.0 / 32.0, max_relative = 1e-14);
        let s = entropy_asymptote(&gapped(2.0)).unwrap();
        assert_relative_eq!(s, -5.0 * a / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn gapless_sheet_is_rejected() {
        let cfg = Configuration::new(
            GrapheneSheet::pristine(),
            AtomModel::generic(PolarizabilityMode::StaticOnly),
            500.0,
            1.0,
        )
        .unwrap();
        assert!(matches!(delta1_asymptote(&cfg), Err(Error::Domain(_))));
    }

    #[test]
    fn suppression_slopes() {
        let s = |d: f64, m: f64| delta2_suppression_slope(&GrapheneSheet::new(d, m, DEFAULT_FERMI_RATIO).unwrap());
        assert_relative_eq!(s(0.2, 0.05).unwrap(), 0.05, max_relative = 1e-14);
        assert_relative_eq!(s(0.2, 0.0).unwrap(), 0.1);
        assert_eq!(s(0.2, 0.1).unwrap(), 0.0);
        assert!(matches!(s(0.2, 0.15), Err(Error::Regime(_))));
    }

    #[test]
    fn prediction_set() {
        let p = predictions(&gapped(1.0), CoefficientVariant::Corrected).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p[1].coefficient, 5.0 * p[0].coefficient);
        assert_relative_eq!(p[2].exponent_or_slope, -0.05, max_relative = 1e-14);
        assert!(p.iter().all(|q| q.validity_k.1 > q.validity_k.0));
    }
}
