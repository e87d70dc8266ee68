//! Entropy, low-temperature fits and the Nernst verdict.
//!
//! The entropy is `S = −∂F/∂T`. Only the thermal part `δ₁ + δ₂` depends on
//! `T`, so that part alone is differentiated: central differences at steps
//! `h` and `h/2` combined by one Richardson step.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::lifshitz::{resolve_delta1_method, thermal_correction, EngineSettings};
use crate::parallel::try_par_map;
use crate::units::{to_dimensionless, Configuration, BOLTZMANN_EV_PER_K};

/// Smallest finite-difference step, in kelvin.
pub const MIN_STEP_K: f64 = 1e-3;

/// Relative step `h/T`.
pub const RELATIVE_STEP: f64 = 0.02;

/// Relative noise assumed on the thermal free energy when judging whether a
/// difference is meaningful.
const FREE_ENERGY_NOISE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyPoint {
    pub temperature_k: f64,
    /// eV/K.
    pub entropy: f64,
    pub step_used_k: f64,
    /// eV/K; bounds the error through the size of the Richardson correction.
    pub error_estimate: f64,
}

/// Entropy at the configuration's temperature.
///
/// The `δ₁` method is fixed at the centre temperature so that all four
/// evaluations use the same path.
pub fn entropy(cfg: &Configuration, settings: &EngineSettings) -> Result<EntropyPoint> {
    let t = cfg.temperature_k();
    if !(t > 0.0) {
        return domain("entropy needs T > 0");
    }
    let fixed = EngineSettings {
        delta1_method: resolve_delta1_method(cfg, settings)?,
        ..*settings
    };
    let f = |temp: f64| thermal_correction(&cfg.with_temperature(temp)?, &fixed);
    differentiate(t, f)
}

/// `−dF/dT` at `t` by Richardson-extrapolated central differences.
pub fn differentiate<F>(t: f64, f: F) -> Result<EntropyPoint>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let h = (RELATIVE_STEP * t).max(MIN_STEP_K);
    if !(h < t) {
        return domain(format!("T = {t} K is below the minimum step {MIN_STEP_K} K"));
    }
    let temps = [t - h, t + h, t - h / 2.0, t + h / 2.0];
    let values = try_par_map(&temps, |&temp| f(temp))?;
    let coarse = -(values[1] - values[0]) / (2.0 * h);
    let fine = -(values[3] - values[2]) / h;
    let floor = FREE_ENERGY_NOISE * values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if (values[3] - values[2]).abs() < 10.0 * floor {
        return Err(Error::PrecisionLoss(format!(
            "free-energy difference over 2h = {h} K is within the noise floor at T = {t} K"
        )));
    }
    let entropy = (4.0 * fine - coarse) / 3.0;
    Ok(EntropyPoint {
        temperature_k: t,
        entropy,
        step_used_k: h,
        error_estimate: (entropy - fine).abs() / 2.0 + floor / h,
    })
}

/// Entropy at every configuration, in input order.
pub fn entropy_sweep(cfgs: &[Configuration], settings: &EngineSettings) -> Result<Vec<EntropyPoint>> {
    try_par_map(cfgs, |c| entropy(c, settings))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitModel {
    /// `|v| = coefficient · T^exponent`.
    PowerLaw,
    /// `|v| = coefficient · T^power · exp(slope/k_BT)`, slope in eV.
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub model: FitModel,
    pub exponent_or_slope: f64,
    /// Standard error of `exponent_or_slope`.
    pub standard_error: f64,
    /// Signed: carries the sign of the data.
    pub coefficient: f64,
    /// Power-type prefactor exponent of the exponential model; 0 for power laws.
    pub power: f64,
    pub r_squared: f64,
    /// Temperature range of the data, K.
    pub window_k: (f64, f64),
}

impl FitReport {
    /// Fitted value at `t`.
    pub fn evaluate(&self, t: f64) -> f64 {
        match self.model {
            FitModel::PowerLaw => self.coefficient * t.powf(self.exponent_or_slope),
            FitModel::Exponential => {
                self.coefficient * t.powf(self.power) * (self.exponent_or_slope / (BOLTZMANN_EV_PER_K * t)).exp()
            }
        }
    }
}

fn validate(points: &[(f64, f64)], needed: usize) -> Result<f64> {
    if points.len() < needed.max(5) {
        return Err(Error::InsufficientPoints {
            needed: needed.max(5),
            got: points.len(),
        });
    }
    if points.windows(2).any(|w| !(w[1].0 > w[0].0)) || !(points[0].0 > 0.0) {
        return domain("temperatures must be positive and strictly increasing");
    }
    let sign = points[0].1.signum();
    if points.iter().any(|p| p.1 == 0.0 || !p.1.is_finite() || p.1.signum() != sign) {
        return Err(Error::MixedSign);
    }
    Ok(sign)
}

/// Ordinary least squares `y ≈ X β`; returns `β`, the standard errors and `r²`.
pub(crate) fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let n = rows[0].len();
    let mut ata = vec![vec![0.0; n]; n];
    let mut aty = vec![0.0; n];
    for (r, &yv) in rows.iter().zip(y) {
        for i in 0..n {
            aty[i] += r[i] * yv;
            for j in 0..n {
                ata[i][j] += r[i] * r[j];
            }
        }
    }
    let inv = invert(ata)?;
    let beta: Vec<f64> = (0..n).map(|i| (0..n).map(|j| inv[i][j] * aty[j]).sum()).collect();
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (r, &yv) in rows.iter().zip(y) {
        let fit: f64 = r.iter().zip(&beta).map(|(a, b)| a * b).sum();
        ss_res += (yv - fit).powi(2);
        ss_tot += (yv - mean).powi(2);
    }
    let dof = (y.len() - n).max(1) as f64;
    let sigma2 = ss_res / dof;
    let se = (0..n).map(|i| (sigma2 * inv[i][i]).max(0.0).sqrt()).collect();
    let r2 = if ss_tot > 0.0 { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) } else { 1.0 };
    Ok((beta, se, r2))
}

/// Gauss-Jordan inverse of a small symmetric positive matrix.
fn invert(mut a: Vec<Vec<f64>>) -> Result<Vec<Vec<f64>>> {
    let n = a.len();
    let mut inv: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        if a[piv][col].abs() < f64::MIN_POSITIVE {
            return domain("fit design matrix is singular");
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col];
        for k in 0..n {
            a[col][k] /= d;
            inv[col][k] /= d;
        }
        for row in 0..n {
            if row != col {
                let f = a[row][col];
                for k in 0..n {
                    a[row][k] -= f * a[col][k];
                    inv[row][k] -= f * inv[col][k];
                }
            }
        }
    }
    Ok(inv)
}

/// Least squares on `(ln T, ln|v|)`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<FitReport> {
    let sign = validate(points, 5)?;
    let rows: Vec<Vec<f64>> = points.iter().map(|p| vec![1.0, p.0.ln()]).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1.abs().ln()).collect();
    let (beta, se, r2) = least_squares(&rows, &y)?;
    Ok(FitReport {
        model: FitModel::PowerLaw,
        exponent_or_slope: beta[1],
        standard_error: se[1],
        coefficient: sign * beta[0].exp(),
        power: 0.0,
        r_squared: r2,
        window_k: (points[0].0, points[points.len() - 1].0),
    })
}

/// Least squares of `ln|v| = c + n ln T + s/(k_BT)`; the slope `s` (eV)
/// is reported with `n` as the power-type prefactor.
pub fn fit_exponential_suppression(points: &[(f64, f64)]) -> Result<FitReport> {
    let sign = validate(points, 5)?;
    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|p| vec![1.0, p.0.ln(), 1.0 / (BOLTZMANN_EV_PER_K * p.0)])
        .collect();
    let y: Vec<f64> = points.iter().map(|p| p.1.abs().ln()).collect();
    let (beta, se, r2) = least_squares(&rows, &y)?;
    Ok(FitReport {
        model: FitModel::Exponential,
        exponent_or_slope: beta[2],
        standard_error: se[2],
        coefficient: sign * beta[0].exp(),
        power: beta[1],
        r_squared: r2,
        window_k: (points[0].0, points[points.len() - 1].0),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NernstVerdict {
    pub pass: bool,
    pub exponent: f64,
    pub coefficient: f64,
    /// `S₀` of the fit `S = S₀ + b Tᵏ + c Tᵏ⁺¹`, `k` the rounded exponent;
    /// NaN when the exponent is below 1.
    pub intercept: f64,
    pub intercept_error: f64,
    pub reason: String,
}

/// Verdict on entropy data: it passes when the entropy vanishes at least
/// linearly and its extrapolation to `T = 0` is zero within two standard
/// errors.
pub fn nernst_verdict_from_entropy(points: &[EntropyPoint]) -> Result<NernstVerdict> {
    let data: Vec<(f64, f64)> = points.iter().map(|p| (p.temperature_k, p.entropy)).collect();
    let (exponent, coefficient) = match fit_power_law(&data) {
        Ok(f) => (f.exponent_or_slope, f.coefficient),
        Err(Error::MixedSign) => (0.0, 0.0),
        Err(e) => return Err(e),
    };
    let power_ok = exponent >= 1.0;
    let scale = data.iter().fold(0.0f64, |m, p| m.max(p.1.abs()));
    let (intercept, intercept_error) = if power_ok {
        // Leading low-temperature powers are integers; the fitted exponent is
        // pulled off them by corrections, which the next power absorbs.
        let k = exponent.round();
        let rows: Vec<Vec<f64>> = data
            .iter()
            .map(|p| vec![1.0, p.0.powf(k), p.0.powf(k + 1.0)])
            .collect();
        let y: Vec<f64> = data.iter().map(|p| p.1 / scale).collect();
        let (beta, se, _) = least_squares(&rows, &y)?;
        // The fitted exponent is itself uncertain; an intercept below 5% of
        // the coldest entropy is indistinguishable from zero.
        let floor = 0.05 * data.iter().fold(f64::INFINITY, |m, p| m.min(p.1.abs()));
        (beta[0] * scale, (2.0 * se[0] * scale).max(floor) / 2.0)
    } else {
        (f64::NAN, f64::NAN)
    };
    let zero_ok = intercept.abs() <= 2.0 * intercept_error;
    let reason = match (power_ok, zero_ok) {
        (true, true) => format!("S ∝ T^{exponent:.3} and S(0) = {intercept:.3e} ± {intercept_error:.1e}"),
        (false, _) => format!("entropy exponent {exponent:.3} < 1"),
        (true, false) => format!("S(0) = {intercept:.3e} is not zero within {intercept_error:.1e}"),
    };
    Ok(NernstVerdict {
        pass: power_ok && zero_ok,
        exponent,
        coefficient,
        intercept,
        intercept_error,
        reason,
    })
}

/// Computes the entropy over a temperature sweep and judges it.
///
/// Requires `Δ ≥ 2μ` and a sweep that reaches `k_BT ≤ (Δ − 2μ)/20` for a
/// gapped sheet, or `τ ≤ 10⁻²` when `Δ = 2μ` (including the gapless sheet).
pub fn nernst_verdict(cfgs: &[Configuration], settings: &EngineSettings) -> Result<NernstVerdict> {
    let first = cfgs.first().ok_or(Error::InsufficientPoints { needed: 5, got: 0 })?;
    let sheet = first.sheet;
    if !sheet.nernst_regime() && !sheet.at_regime_boundary() {
        return Err(Error::Regime(format!(
            "μ = {} eV exceeds Δ/2 = {} eV",
            sheet.chem_potential_ev(),
            sheet.gap_ev() / 2.0
        )));
    }
    let coldest = cfgs
        .iter()
        .min_by(|a, b| a.temperature_k().total_cmp(&b.temperature_k()))
        .copied()
        .unwrap_or(*first);
    let reaches = if sheet.nernst_regime() {
        coldest.kt_ev() <= sheet.suppression_energy_ev() / 10.0
    } else {
        to_dimensionless(&coldest)?.tau <= 1e-2
    };
    if !reaches {
        return Err(Error::Regime("the sweep does not reach the low-temperature regime".into()));
    }
    let mut pts = entropy_sweep(cfgs, settings)?;
    pts.sort_by(|a, b| a.temperature_k.total_cmp(&b.temperature_k));
    nernst_verdict_from_entropy(&pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn differentiation_recovers_t5() {
        let a = 7e-15;
        for t in [0.5, 3.0, 40.0] {
            let p = differentiate(t, |x| Ok(-a * x.powi(5))).unwrap();
            let exact = 5.0 * a * t.powi(4);
            assert_relative_eq!(p.entropy, exact, max_relative = 1e-6);
            assert!((p.entropy - exact).abs() <= p.error_estimate);
        }
        assert!(matches!(differentiate(1.0, |_| Ok(1.0)), Err(Error::PrecisionLoss(_))));
        assert!(differentiate(5e-4, Ok).is_err());
    }

    fn synthetic(f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
        (0..11).map(|i| 1.0 + 0.2 * i as f64).map(|t| (t, f(t))).collect()
    }

    #[test]
    fn power_law_recovers_exact_data() {
        let r = fit_power_law(&synthetic(|t| 3.0 * t.powi(5))).unwrap();
        assert_relative_eq!(r.exponent_or_slope, 5.0, max_relative = 1e-12);
        assert_relative_eq!(r.coefficient, 3.0, max_relative = 1e-12);
        assert_relative_eq!(r.r_squared, 1.0, max_relative = 1e-12);
        let n = fit_power_law(&synthetic(|t| -2.0 * t.powi(3))).unwrap();
        assert_relative_eq!(n.coefficient, -2.0, max_relative = 1e-12);
        assert_relative_eq!(n.evaluate(2.0), -16.0, max_relative = 1e-12);
    }

    #[test]
    fn exponential_with_power_prefactor() {
        // Q = (Δ − 2μ)/2k_B with Δ − 2μ = 0.1 eV, sampled at k_BT ≤ 0.005 eV.
        let q_ev = 0.05;
        let pts: Vec<(f64, f64)> = (0..8)
            .map(|i| (0.002 + 0.0004 * i as f64) / BOLTZMANN_EV_PER_K)
            .map(|t| (t, t * t * (-q_ev / (BOLTZMANN_EV_PER_K * t)).exp()))
            .collect();
        let r = fit_exponential_suppression(&pts).unwrap();
        assert_relative_eq!(r.exponent_or_slope, -q_ev, max_relative = 1e-6);
        assert_relative_eq!(r.power, 2.0, max_relative = 1e-5);
    }

    #[test]
    fn fit_errors() {
        assert!(matches!(
            fit_power_law(&synthetic(|t| t)[..4]),
            Err(Error::InsufficientPoints { needed: 5, got: 4 })
        ));
        assert!(matches!(fit_power_law(&synthetic(|t| t - 1.5)), Err(Error::MixedSign)));
        let mut bad = synthetic(|t| t);
        bad.swap(2, 3);
        assert!(fit_power_law(&bad).is_err());
    }

    fn entropy_points(f: impl Fn(f64) -> f64) -> Vec<EntropyPoint> {
        (1..=8)
            .map(|i| {
                let t = 0.5 * i as f64;
                EntropyPoint {
                    temperature_k: t,
                    entropy: f(t),
                    step_used_k: 0.01,
                    error_estimate: 0.0,
                }
            })
            .collect()
    }

    #[test]
    fn verdicts() {
        let good = nernst_verdict_from_entropy(&entropy_points(|t| 2e-20 * t.powi(4))).unwrap();
        assert!(good.pass, "{}", good.reason);
        assert_relative_eq!(good.exponent, 4.0, max_relative = 1e-10);
        let flat = nernst_verdict_from_entropy(&entropy_points(|_| 1e-20)).unwrap();
        assert!(!flat.pass);
        let offset = nernst_verdict_from_entropy(&entropy_points(|t| 1e-20 + 1e-20 * t * t)).unwrap();
        assert!(!offset.pass, "{}", offset.reason);
    }

    #[test]
    fn doubling_points_keeps_a_pass() {
        let dense: Vec<EntropyPoint> = (1..=16)
            .map(|i| {
                let t = 0.25 * i as f64;
                EntropyPoint {
                    temperature_k: t,
                    entropy: 3e-21 * t.powi(4) * (1.0 + 0.01 * t),
                    step_used_k: 0.01,
                    error_estimate: 0.0,
                }
            })
            .collect();
        let sparse: Vec<EntropyPoint> = dense.iter().copied().skip(1).step_by(2).collect();
        assert!(nernst_verdict_from_entropy(&sparse).unwrap().pass);
        let d = nernst_verdict_from_entropy(&dense).unwrap();
        assert!(d.pass, "{d:?}");
    }
}
