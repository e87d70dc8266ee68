//! The four subcommands. Each returns what it prints, so tests can call
//! them without a process.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use cpg_core::asymptotics::{delta2_suppression_slope, free_energy_coefficient, CoefficientVariant};
use cpg_core::lifshitz::free_energy_breakdown;
use cpg_core::parallel::par_map;
use cpg_core::thermo::entropy;
use cpg_core::units::{to_dimensionless, Configuration};
use cpg_verify::{
    entropy_fit, log_grid, pristine_fit, run_suite, suppression_fit, t5_fit, Check, Suite, POWER_WINDOW_TAU,
    PRISTINE_WINDOW_TAU,
};
use serde::Serialize;

use crate::config::LoadedConfig;
use crate::error::{CliError, CliResult};
use crate::output::{write_rows, Format, SweepRow};

/// Free-energy breakdown at one temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyRecord {
    #[serde(rename = "e_zero_eV")]
    pub e_zero_ev: f64,
    #[serde(rename = "delta1_eV")]
    pub delta1_ev: f64,
    #[serde(rename = "delta2_eV")]
    pub delta2_ev: f64,
    #[serde(rename = "total_eV")]
    pub total_ev: f64,
    pub terms_used: usize,
    #[serde(rename = "tail_bound_eV")]
    pub tail_bound_ev: f64,
}

/// Returns the record and any advisory warnings.
pub fn energy(cfg: &LoadedConfig, temperature_k: f64) -> CliResult<(EnergyRecord, Vec<String>)> {
    let c = cfg.at_temperature(temperature_k)?;
    let b = free_energy_breakdown(&c, &cfg.settings)?;
    let record = EnergyRecord {
        e_zero_ev: unsigned_zero(b.e_zero),
        delta1_ev: unsigned_zero(b.delta1),
        delta2_ev: unsigned_zero(b.delta2),
        total_ev: unsigned_zero(b.total),
        terms_used: b.terms_used,
        tail_bound_ev: b.tail_bound,
    };
    Ok((record, b.warnings))
}

/// Maps `-0.0` to `0.0`; every other value is unchanged.
fn unsigned_zero(x: f64) -> f64 {
    x + 0.0
}

fn sweep_row(cfg: &LoadedConfig, c: &Configuration) -> CliResult<SweepRow> {
    let b = free_energy_breakdown(c, &cfg.settings)?;
    let s = entropy(c, &cfg.settings)?;
    Ok(SweepRow {
        t_k: c.temperature_k(),
        tau: to_dimensionless(c)?.tau,
        f_total_ev: unsigned_zero(b.total),
        e0_ev: unsigned_zero(b.e_zero),
        delta1_ev: unsigned_zero(b.delta1),
        delta2_ev: unsigned_zero(b.delta2),
        s_ev_per_k: s.entropy,
        s_err_ev_per_k: s.error_estimate,
    })
}

/// Rows of the configured sweep, computed concurrently, in temperature order.
pub fn sweep_rows(cfg: &LoadedConfig) -> CliResult<Vec<SweepRow>> {
    let temps = cfg.sweep()?.temperatures();
    let configs = temps
        .iter()
        .map(|&t| cfg.at_temperature(t))
        .collect::<CliResult<Vec<_>>>()?;
    par_map(&configs, |c| sweep_row(cfg, c)).into_iter().collect()
}

/// Writes the sweep to `out`. The file is created before any computation so
/// an unwritable path fails fast.
pub fn sweep(cfg: &LoadedConfig, out: &Path, format: Format) -> CliResult<usize> {
    cfg.sweep()?;
    let file = File::create(out).map_err(|e| CliError::io(out, e))?;
    let rows = sweep_rows(cfg)?;
    let mut w = BufWriter::new(file);
    write_rows(&rows, &mut w, format).map_err(|e| CliError::io(out, e))?;
    w.flush().map_err(|e| CliError::io(out, e))?;
    Ok(rows.len())
}

/// Runs a suite, printing each check as it completes.
pub fn verify(suite: Suite, mut out: impl Write) -> CliResult<Vec<Check>> {
    let checks = run_suite(suite, |c| {
        let _ = writeln!(out, "{c}");
    });
    let failed = checks.iter().filter(|c| !c.pass).count();
    let _ = writeln!(out, "{} of {} checks passed", checks.len() - failed, checks.len());
    if failed > 0 {
        return Err(CliError::VerificationFailed {
            failed,
            total: checks.len(),
        });
    }
    Ok(checks)
}

/// One line of the asymptotics table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticRow {
    pub law: &'static str,
    pub quantity: &'static str,
    pub variant: &'static str,
    pub predicted: f64,
    pub fitted: f64,
    pub relative_deviation: f64,
    pub window_k: (f64, f64),
}

impl AsymptoticRow {
    fn new(
        law: &'static str,
        quantity: &'static str,
        variant: &'static str,
        predicted: f64,
        fitted: f64,
        window_k: (f64, f64),
    ) -> Self {
        Self {
            law,
            quantity,
            variant,
            predicted,
            fitted,
            relative_deviation: ((fitted - predicted) / predicted).abs(),
            window_k,
        }
    }
}

/// Fits every law that applies to the sheet and compares it with the
/// predictions, all coefficient variants included.
pub fn asymptotics(cfg: &LoadedConfig) -> CliResult<Vec<AsymptoticRow>> {
    let base = &cfg.base;
    let sheet = &base.sheet;
    let settings = &cfg.settings;
    let mut rows = Vec::new();
    let power_taus = log_grid(POWER_WINDOW_TAU.0, POWER_WINDOW_TAU.1, 9);
    if sheet.gap_ev() == 0.0 && sheet.chem_potential_ev() == 0.0 {
        let fit = pristine_fit(base, &log_grid(PRISTINE_WINDOW_TAU.0, PRISTINE_WINDOW_TAU.1, 5))?;
        rows.push(AsymptoticRow::new("T3-pristine", "exponent", "-", 3.0, fit.exponent_or_slope, fit.window_k));
        return Ok(rows);
    }
    if sheet.gap_ev() <= 0.0 || !(sheet.nernst_regime() || sheet.at_regime_boundary()) {
        return Err(CliError::Config {
            path: cfg.path.clone(),
            message: "no low-temperature law applies: the sheet needs Δ = μ = 0 or Δ > 0 with μ ≤ Δ/2".into(),
        });
    }
    let fit = t5_fit(base, &power_taus, settings)?;
    rows.push(AsymptoticRow::new("T5-free-energy", "exponent", "-", 5.0, fit.exponent_or_slope, fit.window_k));
    for v in CoefficientVariant::ALL {
        let predicted = free_energy_coefficient(base, v)?;
        rows.push(AsymptoticRow::new("T5-free-energy", "coefficient", v.label(), predicted, -fit.coefficient, fit.window_k));
    }
    if sheet.nernst_regime() {
        let (_, fit) = entropy_fit(base, &power_taus, settings)?;
        rows.push(AsymptoticRow::new("T4-entropy", "exponent", "-", 4.0, fit.exponent_or_slope, fit.window_k));
        for v in CoefficientVariant::ALL {
            let predicted = 5.0 * free_energy_coefficient(base, v)?;
            rows.push(AsymptoticRow::new("T4-entropy", "coefficient", v.label(), predicted, fit.coefficient, fit.window_k));
        }
    }
    let slope = delta2_suppression_slope(sheet)?;
    if slope > 0.0 {
        let fit = suppression_fit(base, settings.delta2_order, 7)?;
        rows.push(AsymptoticRow::new("exp-suppression", "slope_eV", "-", -slope, fit.exponent_or_slope, fit.window_k));
    }
    Ok(rows)
}

/// Fixed-width table of [`asymptotics`] rows.
pub fn format_asymptotics(rows: &[AsymptoticRow]) -> String {
    let mut s = format!(
        "{:<16} {:<12} {:<10} {:>14} {:>14} {:>10}  {}\n",
        "law", "quantity", "variant", "predicted", "fitted", "rel_dev", "window_K"
    );
    for r in rows {
        s.push_str(&format!(
            "{:<16} {:<12} {:<10} {:>14.6e} {:>14.6e} {:>10.3e}  [{:.4}, {:.4}]\n",
            r.law, r.quantity, r.variant, r.predicted, r.fitted, r.relative_deviation, r.window_k.0, r.window_k.1
        ));
    }
    s
}
