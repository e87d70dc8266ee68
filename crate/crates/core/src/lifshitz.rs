//! Casimir-Polder free energy from the Lifshitz formula.
//!
//! In dimensionless form the free energy is
//! `F = −E_s τ Σ'_l α̂(ζ_l) g(ζ_l)` with
//! `g(ζ) = ∫_ζ^∞ dy e^{−y} [(2y² − ζ²) r_TM − ζ² r_TE]`,
//! `α̂ = α(iξ)/α₀` and `E_s = ħω_c α₀/(16π a³)`. The zero-temperature energy
//! replaces `τ Σ'` by `∫ dζ`. The thermal correction splits into `δ₁`
//! (discreteness of the sum, zero-temperature tensor) and `δ₂` (explicit
//! temperature dependence of the tensor, to first order).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::parallel::try_par_map;
use crate::quadrature::{
    integrate_panels, try_integrate_finite, try_integrate_semi_infinite, QuadratureResult, QuadratureSpec,
};
use crate::reflection::{thermal_correction_reduced, thermal_difference_reduced, ReflectionPair};
use crate::special::{psi_over_p, psi_over_p_complex};
use crate::summation::CompensatedSum;
use crate::tensor::{thermal_integrals, TensorPoint};
use crate::units::{to_dimensionless, Configuration, DimensionlessState, PolarizabilityMode, FINE_STRUCTURE};

/// Which tensor enters the reflection coefficients of a Matsubara sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TensorMode {
    ExactTensor,
    ZeroTTensor,
}

/// How the thermal parts of the tensor enter `δ₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Delta2Order {
    /// Reflection coefficients expanded to first order in the thermal parts.
    #[default]
    FirstOrder,
    /// Exact difference between the full and zero-temperature coefficients.
    Full,
}

/// How `δ₁` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Delta1Method {
    /// Matsubara sum minus its integral.
    Direct,
    /// Contour integral along the imaginary frequency axis.
    AbelPlana,
    /// Abel-Plana below the crossover temperature, direct above it.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineSettings {
    pub quadrature: QuadratureSpec,
    /// Hard cap on the number of Matsubara terms.
    pub l_max_cap: usize,
    pub delta1_method: Delta1Method,
    /// `τ` below which `Auto` switches to Abel-Plana.
    pub crossover_tau: f64,
    pub delta2_order: Delta2Order,
}

impl Default for EngineSettings {
    fn default() -> Self {
        Self {
            quadrature: QuadratureSpec::default(),
            l_max_cap: 1_000_000,
            delta1_method: Delta1Method::Auto,
            crossover_tau: 0.02,
            delta2_order: Delta2Order::FirstOrder,
        }
    }
}

impl EngineSettings {
    pub fn with_quadrature(quadrature: QuadratureSpec) -> Self {
        Self {
            quadrature,
            ..Self::default()
        }
    }
}

/// A truncated Matsubara sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatsubaraSum {
    pub free_energy_ev: f64,
    pub terms_used: usize,
    /// Bound on the omitted terms, in eV.
    pub tail_bound_ev: f64,
    /// Sum of the per-term quadrature error estimates, in eV.
    pub quadrature_error_ev: f64,
}

/// Free energy split into its zero-temperature and thermal parts (eV).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeEnergyBreakdown {
    pub e_zero: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub total: f64,
    pub terms_used: usize,
    pub tail_bound: f64,
    pub delta1_method: Delta1Method,
    /// `δ₂` was below the representable scale and reported as zero.
    pub delta2_negligible: bool,
    pub warnings: Vec<String>,
}

/// Static or oscillator polarizability relative to `α₀`, at `ζ`.
fn relative_alpha(cfg: &Configuration, state: &DimensionlessState, zeta: f64) -> f64 {
    cfg.atom.relative_polarizability(state.omega_c_ev * zeta)
}

fn bracket(y: f64, zeta: f64, r: ReflectionPair) -> f64 {
    (2.0 * y * y - zeta * zeta) * r.r_tm - zeta * zeta * r.r_te
}

/// `s` values where the integrand of `g` changes character: `ṽ²k2 = ζ²`
/// and `p = δ`.
fn structure_points(zeta: f64, state: &DimensionlessState) -> Vec<f64> {
    let v = state.fermi_ratio;
    let mut pts = Vec::with_capacity(2);
    let offset = |k2: f64| k2 / (zeta + (zeta * zeta + k2).sqrt());
    if zeta > 0.0 {
        pts.push(offset(zeta * zeta / (v * v)));
    }
    if state.delta > zeta {
        pts.push(offset((state.delta - zeta) * (state.delta + zeta) / (v * v)));
    }
    pts.retain(|s| *s > 0.0 && *s < 200.0);
    pts
}

fn inner_spec(spec: &QuadratureSpec) -> QuadratureSpec {
    QuadratureSpec {
        abs_tol: f64::MIN_POSITIVE,
        ..*spec
    }
}

/// `g(ζ)` with the zero-temperature tensor; the result carries `e^{−ζ}`.
/// A second `map_scale` gives an independent set of abscissae.
fn g_zero_t_mapped(
    zeta: f64,
    state: &DimensionlessState,
    spec: &QuadratureSpec,
    map_scale: f64,
) -> Result<QuadratureResult> {
    let v2 = state.fermi_ratio * state.fermi_ratio;
    let f = |s: f64| -> Result<f64> {
        let y = zeta + s;
        let p2 = zeta * zeta + v2 * s * (s + 2.0 * zeta);
        if p2 == 0.0 {
            // ζ = 0 and y² underflowed: the bracket carries a factor y².
            return Ok(0.0);
        }
        let q = psi_over_p(p2, state.delta)?;
        Ok((-s).exp() * bracket(y, zeta, ReflectionPair::from_kernel(y, p2, q)))
    };
    let mut r = try_integrate_semi_infinite(f, 0.0, map_scale, &structure_points(zeta, state), &inner_spec(spec))?;
    let e = (-zeta).exp();
    r.value *= e;
    r.abs_error_estimate *= e;
    Ok(r)
}

/// `g(ζ_l)` with the full tensor.
fn g_exact(l: usize, state: &DimensionlessState, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    let zeta = state.zeta(l);
    let v2 = state.fermi_ratio * state.fermi_ratio;
    let f = |s: f64| -> Result<f64> {
        let w = (-s).exp();
        // At ζ = 0 the bracket is at most 2y²: nothing to add below y = 1e-100.
        if w == 0.0 || zeta == 0.0 && s < 1e-100 {
            return Ok(0.0);
        }
        let pt = TensorPoint::matsubara_offset(state, l, s)?;
        let (y, k2) = (pt.y(), pt.k2());
        let p2 = zeta * zeta + v2 * k2;
        let q = psi_over_p(p2, state.delta)?;
        let (t00, t) = thermal_integrals(&pt, state, spec)?.unscaled();
        let a = FINE_STRUCTURE * q + t00 / k2;
        let b = FINE_STRUCTURE * q * p2 + t / k2;
        Ok(w * bracket(y, zeta, ReflectionPair::from_reduced(y, a, b)))
    };
    let mut r = try_integrate_semi_infinite(f, 0.0, 1.0, &structure_points(zeta, state), &inner_spec(spec))?;
    let e = (-zeta).exp();
    r.value *= e;
    r.abs_error_estimate *= e;
    Ok(r)
}

/// `e^{s} × g₂(ζ)`, the thermal-tensor bracket, with
/// `s = max((Δ − 2μ)/2k_BT, 0)` the common suppression exponent. `ζ` need
/// not be a Matsubara frequency.
fn g_delta2_scaled(
    zeta: f64,
    state: &DimensionlessState,
    spec: &QuadratureSpec,
    order: Delta2Order,
) -> Result<QuadratureResult> {
    let v2 = state.fermi_ratio * state.fermi_ratio;
    let f = |s: f64| -> Result<f64> {
        let w = (-s).exp();
        // At ζ = 0 the bracket is at most 2y²: nothing to add below y = 1e-100.
        if w == 0.0 || zeta == 0.0 && s < 1e-100 {
            return Ok(0.0);
        }
        let pt = TensorPoint::from_offset(zeta, s)?;
        let (y, k2) = (pt.y(), pt.k2());
        let p2 = zeta * zeta + v2 * k2;
        let q = psi_over_p(p2, state.delta)?;
        let th = thermal_integrals(&pt, state, spec)?;
        let a1 = th.prefactor * th.i00 / k2;
        let b1 = -th.prefactor * th.ix / k2;
        let a0 = FINE_STRUCTURE * q;
        let dr = match order {
            Delta2Order::FirstOrder => thermal_correction_reduced(y, a0, a0 * p2, a1, b1),
            Delta2Order::Full => thermal_difference_reduced(y, a0, a0 * p2, a1, b1, (-th.log_scale).exp()),
        };
        Ok(w * bracket(y, zeta, dr))
    };
    let mut r = try_integrate_semi_infinite(f, 0.0, 1.0, &structure_points(zeta, state), &inner_spec(spec))?;
    let e = (-zeta).exp();
    r.value *= e;
    r.abs_error_estimate *= e;
    Ok(r)
}

/// `∫_Z^∞ 2e^{−ζ}(ζ² + 2ζ + 2) dζ`: bounds `τ Σ_{l ≥ L} |g(τl)|` for `Z = τL`,
/// because `|r| ≤ 1` gives `|g(ζ)| ≤ 2e^{−ζ}(ζ² + 2ζ + 2)`.
pub fn matsubara_tail_bound(z: f64) -> f64 {
    2.0 * (-z).exp() * (z * z + 4.0 * z + 6.0)
}

/// Smallest `Z` with `matsubara_tail_bound(Z) ≤ target`.
fn tail_cutoff(target: f64) -> f64 {
    let mut z = 1.0;
    while matsubara_tail_bound(z) > target {
        z += 0.25;
        if z > 800.0 {
            break;
        }
    }
    z
}

fn weighted_matsubara_sum(values: &[(f64, f64)], tau: f64) -> (f64, f64) {
    let mut sum = CompensatedSum::new();
    let mut err = CompensatedSum::new();
    for (l, (v, e)) in values.iter().enumerate() {
        let w = if l == 0 { 0.5 } else { 1.0 };
        sum.add(w * v);
        err.add(w * e);
    }
    (tau * sum.value(), tau * err.value())
}

fn check_warm(state: &DimensionlessState) -> Result<()> {
    if !(state.tau > 0.0) {
        return domain("a Matsubara sum needs T > 0");
    }
    Ok(())
}

/// Number of terms and dimensionless tail bound for a target.
fn truncation(state: &DimensionlessState, target: f64, cap: usize) -> (usize, f64) {
    let z = tail_cutoff(target);
    let wanted = (z / state.tau).ceil() as usize + 1;
    let n = wanted.min(cap.max(1));
    (n, matsubara_tail_bound(state.tau * n as f64))
}

/// Dimensionless `τ Σ' α̂_l g(ζ_l)` with the chosen tensor.
fn matsubara_sum_dimensionless(
    cfg: &Configuration,
    state: &DimensionlessState,
    mode: TensorMode,
    settings: &EngineSettings,
) -> Result<(f64, f64, usize, f64)> {
    matsubara_sum_mapped(cfg, state, mode, settings, 1.0)
}

fn matsubara_sum_mapped(
    cfg: &Configuration,
    state: &DimensionlessState,
    mode: TensorMode,
    settings: &EngineSettings,
    map_scale: f64,
) -> Result<(f64, f64, usize, f64)> {
    check_warm(state)?;
    let spec = &settings.quadrature;
    let (n, tail) = truncation(state, spec.abs_tol / 10.0, settings.l_max_cap);
    let ls: Vec<usize> = (0..n).collect();
    let terms = try_par_map(&ls, |&l| -> Result<(f64, f64)> {
        let r = match mode {
            TensorMode::ZeroTTensor => g_zero_t_mapped(state.zeta(l), state, spec, map_scale)?,
            TensorMode::ExactTensor => g_exact(l, state, spec)?,
        };
        let a = relative_alpha(cfg, state, state.zeta(l));
        Ok((a * r.value, a * r.abs_error_estimate))
    })?;
    let (sum, err) = weighted_matsubara_sum(&terms, state.tau);
    Ok((sum, err, n, tail))
}

/// Lifshitz free energy as a truncated Matsubara sum.
pub fn matsubara_free_energy(cfg: &Configuration, mode: TensorMode, spec: &QuadratureSpec) -> Result<MatsubaraSum> {
    matsubara_free_energy_with(cfg, mode, &EngineSettings::with_quadrature(*spec))
}

pub fn matsubara_free_energy_with(
    cfg: &Configuration,
    mode: TensorMode,
    settings: &EngineSettings,
) -> Result<MatsubaraSum> {
    let state = to_dimensionless(cfg)?;
    let scale = cfg.energy_scale_ev();
    let (sum, err, n, tail) = matsubara_sum_dimensionless(cfg, &state, mode, settings)?;
    Ok(MatsubaraSum {
        free_energy_ev: -scale * sum,
        terms_used: n,
        tail_bound_ev: scale * tail,
        quadrature_error_ev: scale * err,
    })
}

/// Dimensionless `∫₀^∞ α̂(ζ) g(ζ) dζ`.
fn zero_t_integral(cfg: &Configuration, state: &DimensionlessState, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    zero_t_integral_mapped(cfg, state, spec, 1.0)
}

fn zero_t_integral_mapped(
    cfg: &Configuration,
    state: &DimensionlessState,
    spec: &QuadratureSpec,
    map_scale: f64,
) -> Result<QuadratureResult> {
    let inner = *spec;
    let f = |zeta: f64| -> Result<f64> {
        let g = g_zero_t_mapped(zeta, state, &inner, map_scale)?;
        Ok(relative_alpha(cfg, state, zeta) * g.value)
    };
    let mut breaks = vec![];
    if state.delta > 0.0 {
        breaks.push(state.delta);
    }
    try_integrate_semi_infinite(f, 0.0, map_scale, &breaks, spec)
}

/// Casimir-Polder energy at `T = 0` with the zero-temperature tensor, in eV.
pub fn zero_temperature_energy(cfg: &Configuration, spec: &QuadratureSpec) -> Result<f64> {
    let state = to_dimensionless(cfg)?;
    Ok(-cfg.energy_scale_ev() * zero_t_integral(cfg, &state, spec)?.value)
}

/// `δ₁` from the direct difference, with its error budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectDelta1 {
    pub value_ev: f64,
    /// Spread between two evaluations on independent abscissae, plus the
    /// rounding of the two large terms and the Matsubara tail bound.
    pub error_estimate_ev: f64,
    pub terms_used: usize,
    pub tail_bound_ev: f64,
    /// The difference is below 10³ times the error estimate.
    pub precision_loss: bool,
}

fn tightened(spec: &QuadratureSpec) -> QuadratureSpec {
    QuadratureSpec {
        rel_tol: spec.rel_tol.min(1e-12),
        abs_tol: spec.abs_tol.min(1e-17),
        max_subdivisions: spec.max_subdivisions.max(4000),
        ..*spec
    }
}

/// Second map scale for the error estimate of the direct difference.
const ALTERNATE_MAP_SCALE: f64 = 1.37;

/// `δ₁` as Matsubara sum minus integral, both with the zero-temperature
/// tensor, without judging the precision.
///
/// The two terms agree to many digits at low temperature, so the quadrature
/// estimates (which sit at the rounding floor) say little about the
/// difference. The error is instead measured by repeating the computation on
/// a different set of abscissae.
pub fn delta1_direct_detailed(cfg: &Configuration, spec: &QuadratureSpec) -> Result<DirectDelta1> {
    let state = to_dimensionless(cfg)?;
    let tight = tightened(spec);
    let settings = EngineSettings::with_quadrature(tight);
    let run = |map_scale: f64| -> Result<(f64, f64, f64, usize, f64)> {
        let (sum, _, n, tail) = matsubara_sum_mapped(cfg, &state, TensorMode::ZeroTTensor, &settings, map_scale)?;
        let integral = zero_t_integral_mapped(cfg, &state, &tight, map_scale)?.value;
        Ok((sum - integral, sum, integral, n, tail))
    };
    let (d, sum, integral, n, tail) = run(1.0)?;
    let (d_alt, ..) = run(ALTERNATE_MAP_SCALE)?;
    let rounding = 0.5 * f64::EPSILON * (sum.abs() + integral.abs());
    let err = (d - d_alt).abs() + rounding + tail;
    let scale = cfg.energy_scale_ev();
    Ok(DirectDelta1 {
        value_ev: -scale * d,
        error_estimate_ev: scale * err,
        terms_used: n,
        tail_bound_ev: scale * tail,
        precision_loss: d.abs() < 1e3 * err,
    })
}

/// `δ₁ = F(zero-T tensor) − E(T = 0)` computed directly.
///
/// Fails with [`Error::PrecisionLoss`] when the difference is smaller than
/// 10³ times the combined quadrature error estimates.
pub fn delta1_free_energy_direct(cfg: &Configuration, spec: &QuadratureSpec) -> Result<f64> {
    let r = delta1_direct_detailed(cfg, spec)?;
    if r.precision_loss {
        return Err(Error::PrecisionLoss(format!(
            "δ₁ = {:e} eV is within 10³ of its error estimate {:e} eV",
            r.value_ev, r.error_estimate_ev
        )));
    }
    Ok(r.value_ev)
}

// ---------------------------------------------------------------------------
// Complex continuation: Φ₁, Φ₂, Φ

/// Reflection coefficients at complex `x` (frequency) and `y`.
fn reflection_complex(x: Complex64, y: Complex64, state: &DimensionlessState) -> Result<(Complex64, Complex64)> {
    let v2 = state.fermi_ratio * state.fermi_ratio;
    let p2 = x * x + v2 * (y - x) * (y + x);
    let q = psi_over_p_complex(p2, state.delta)?;
    let a = FINE_STRUCTURE * q;
    let tm = y * a / (y * a + 2.0);
    let te = -a * p2 / (a * p2 + 2.0 * y);
    Ok((tm, te))
}

/// `∫_x^∞` along the horizontal ray `y = x + s`, `s ≥ 0`.
fn ray_integral<F>(x: Complex64, state: &DimensionlessState, spec: &QuadratureSpec, body: F) -> Result<Complex64>
where
    F: Fn(Complex64, Complex64, Complex64) -> Complex64,
{
    if x.norm() > 5.0 {
        return Err(Error::Branch(format!("|x| = {} exceeds the validated range 5", x.norm())));
    }
    let f = |s: f64| -> Result<Complex64> {
        let y = x + s;
        let (tm, te) = reflection_complex(x, y, state)?;
        Ok((-y).exp() * body(y, tm, te))
    };
    let v = state.fermi_ratio;
    let mut breaks = vec![];
    let ax = x.norm();
    if ax > 0.0 {
        breaks.push(ax * ((1.0 + 1.0 / (v * v)).sqrt() - 1.0));
    }
    breaks.retain(|b| *b < 200.0);
    Ok(try_integrate_semi_infinite(f, 0.0, 1.0, &breaks, &inner_spec(spec))?.value)
}

/// `Φ₁(x) = 2∫_x^∞ y² e^{−y} r_TM dy`.
pub fn phi1(x: Complex64, state: &DimensionlessState, spec: &QuadratureSpec) -> Result<Complex64> {
    ray_integral(x, state, spec, |y, tm, _| 2.0 * y * y * tm)
}

/// `Φ₂(x) = −x² ∫_x^∞ e^{−y} (r_TM + r_TE) dy`.
pub fn phi2(x: Complex64, state: &DimensionlessState, spec: &QuadratureSpec) -> Result<Complex64> {
    Ok(-x * x * ray_integral(x, state, spec, |_, tm, te| tm + te)?)
}

/// `Φ = Φ₁ + Φ₂`; equals `g(x)` on the positive real axis.
pub fn phi(x: Complex64, state: &DimensionlessState, spec: &QuadratureSpec) -> Result<Complex64> {
    ray_integral(x, state, spec, |y, tm, te| (2.0 * y * y - x * x) * tm - x * x * te)
}

/// Real root of `αPQ + 2y` on `y > 0` for `x = iη`, where the TE
/// coefficient has a pole on the real axis, with the derivative there.
fn te_pole(eta: f64, state: &DimensionlessState) -> Result<(f64, f64)> {
    let v2 = state.fermi_ratio * state.fermi_ratio;
    let p2_of = |y: f64| v2 * y * y - (1.0 - v2) * eta * eta;
    let den = |y: f64| -> Result<f64> {
        let p2 = p2_of(y);
        Ok(FINE_STRUCTURE * p2 * psi_over_p(p2, state.delta)? + 2.0 * y)
    };
    let mut lo = 0.0;
    let mut hi = eta.max(1e-300);
    while den(hi)? <= 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Branch(format!("no TE pole found for η = {eta}")));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if den(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let y0 = 0.5 * (lo + hi);
    let h = (y0 * 1e-4).max(1e-300);
    let slope = (den(y0 + h)? - den((y0 - h).max(0.0))?) / (y0 + h - (y0 - h).max(0.0));
    Ok((y0, slope))
}

/// `Im Φ(iη)` for real `η ≥ 0`.
///
/// The ray from `iη` is deformed onto the segment `[iη, 0]` plus the
/// positive real axis. On the real axis the integrand is real apart from a
/// simple TE pole, which contributes half its residue; only the segment and
/// the pole remain. Requires `η < 0.9 δ`, below the pair-creation branch
/// point.
pub fn im_phi_imaginary_axis(eta: f64, state: &DimensionlessState, spec: &QuadratureSpec) -> Result<f64> {
    if !(eta >= 0.0) {
        return domain(format!("η must be >= 0, got {eta}"));
    }
    if eta < 1e-75 {
        // Im Φ(iη) = O(η⁴) is below the double range.
        return Ok(0.0);
    }
    if !(eta < 0.9 * state.delta) {
        return Err(Error::Branch(format!(
            "η = {eta} is beyond the validated range 0.9δ = {}",
            0.9 * state.delta
        )));
    }
    let v2 = state.fermi_ratio * state.fermi_ratio;
    let (y0, slope) = te_pole(eta, state)?;
    let f = |u: f64| -> Result<f64> {
        let y = Complex64::new(0.0, u);
        let p2 = -v2 * u * u - (1.0 - v2) * eta * eta;
        let q = psi_over_p(p2, state.delta)?;
        let a = FINE_STRUCTURE * q;
        let tm = y * a / (y * a + 2.0);
        let te = -a * p2 / (a * p2 + 2.0 * y);
        let val = (-y).exp() * ((eta * eta - 2.0 * u * u) * tm + eta * eta * te);
        Ok(val.re)
    };
    let breaks: Vec<f64> = [y0, 10.0 * y0]
        .into_iter()
        .filter(|b| *b > 0.0 && *b < eta)
        .collect();
    let mut pts = vec![0.0];
    pts.extend(breaks);
    pts.push(eta);
    let inner = inner_spec(spec);
    let mut seg = CompensatedSum::new();
    for w in pts.windows(2) {
        seg.add(try_integrate_finite(f, w[0], w[1], &inner)?.value);
    }
    let pole = -2.0 * PI * eta * eta * y0 * (-y0).exp() / slope;
    Ok(-seg.value() + pole)
}

/// Dimensionless `δ₁` (`τΣ'α̂g − ∫α̂g`) from the Abel-Plana formula.
fn abel_plana_dimensionless(cfg: &Configuration, state: &DimensionlessState, spec: &QuadratureSpec) -> Result<f64> {
    check_warm(state)?;
    if !(state.delta > 0.0) {
        return Err(Error::Branch(
            "the Abel-Plana path needs a gap: Φ is not analytic at x = 0 for δ = 0".into(),
        ));
    }
    let mut eta_max = 0.9 * state.delta;
    let alpha_at = |eta: f64| -> f64 {
        match cfg.atom.mode() {
            PolarizabilityMode::StaticOnly => 1.0,
            PolarizabilityMode::SingleOscillator => {
                let w0 = cfg.atom.omega0_ev();
                let xi = state.omega_c_ev * eta;
                w0 * w0 / ((w0 - xi) * (w0 + xi))
            }
        }
    };
    if cfg.atom.mode() == PolarizabilityMode::SingleOscillator {
        eta_max = eta_max.min(0.9 * cfg.atom.omega0_ev() / state.omega_c_ev);
    }
    let tau = state.tau;
    // e^{−2πt} drops below 1e-20 of its initial size by t = 7.4
    let t_full: f64 = 7.4;
    let t_max = t_full.min(eta_max / tau);
    let inner = inner_spec(spec);
    let f = |t: f64| -> Result<f64> {
        if t == 0.0 {
            return Ok(0.0);
        }
        let eta = tau * t;
        Ok(alpha_at(eta) * im_phi_imaginary_axis(eta, state, &inner)? / (2.0 * PI * t).exp_m1())
    };
    let r = try_integrate_finite(f, 0.0, t_max, &inner)?;
    if t_max < t_full {
        // Omitted tail: the integrand beyond t_max decays at least like
        // e^{−2πt}; take its last value as the envelope.
        let edge = f(t_max * (1.0 - 1e-12))?.abs();
        let tail = edge / (2.0 * PI) * 10.0;
        if tail > 1e-6 * r.value.abs() {
            return Err(Error::Branch(format!(
                "Abel-Plana tail beyond t = {t_max} is not negligible (τ = {tau} too high for this gap)"
            )));
        }
    }
    Ok(-2.0 * tau * r.value)
}

/// `δ₁` from the Abel-Plana representation, in eV.
pub fn abel_plana_delta1(cfg: &Configuration, spec: &QuadratureSpec) -> Result<f64> {
    let state = to_dimensionless(cfg)?;
    Ok(-cfg.energy_scale_ev() * abel_plana_dimensionless(cfg, &state, spec)?)
}

// ---------------------------------------------------------------------------
// δ₂

/// Below this `E_s e^{−(Δ−2μ)/2k_BT}` (eV), `δ₂` is reported as zero.
pub const DELTA2_NEGLIGIBLE_EV: f64 = 1e-40;

/// Outcome of a `δ₂` evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Delta2 {
    pub value_ev: f64,
    pub terms_used: usize,
    pub negligible: bool,
}

/// Matsubara terms of `δ₂` summed one by one; the rest is an integral over
/// `ζ` with Euler-Maclaurin end corrections.
const DELTA2_HEAD: usize = 64;

/// Beyond this `ζ` the remaining terms are below `e^{−40}` of the sum.
const DELTA2_TAIL_NEGLIGIBLE_Z: f64 = 40.0;

/// Upper end of the tail integral.
const DELTA2_TAIL_END: f64 = 80.0;

/// First-order thermal-tensor part `δ₂` in eV, with diagnostics.
pub fn delta2_detailed(cfg: &Configuration, spec: &QuadratureSpec) -> Result<Delta2> {
    delta2_detailed_with(cfg, spec, Delta2Order::FirstOrder)
}

/// Thermal-tensor part `δ₂` in eV at the chosen order.
pub fn delta2_detailed_with(cfg: &Configuration, spec: &QuadratureSpec, order: Delta2Order) -> Result<Delta2> {
    let state = to_dimensionless(cfg)?;
    check_warm(&state)?;
    let scale = cfg.energy_scale_ev();
    let log_scale = state.suppression_exponent().max(0.0);
    if scale == 0.0 || (scale.ln() - log_scale) < DELTA2_NEGLIGIBLE_EV.ln() {
        return Ok(Delta2 {
            value_ev: 0.0,
            terms_used: 0,
            negligible: true,
        });
    }
    let term = |zeta: f64| -> Result<(f64, f64)> {
        let r = g_delta2_scaled(zeta, &state, spec, order)?;
        let a = relative_alpha(cfg, &state, zeta);
        Ok((a * r.value, a * r.abs_error_estimate))
    };
    let ls: Vec<usize> = (0..=DELTA2_HEAD).collect();
    let head = try_par_map(&ls, |&l| term(state.zeta(l)))?;
    let (direct, _) = weighted_matsubara_sum(&head[..DELTA2_HEAD], state.tau);
    let z0 = state.zeta(DELTA2_HEAD);
    let tail = if z0 < DELTA2_TAIL_NEGLIGIBLE_Z {
        // Euler-Maclaurin: the summand is smooth in ζ well above ζ₁.
        let h: Vec<f64> = head[DELTA2_HEAD - 2..].iter().map(|t| t.0).collect();
        let mut points = vec![z0];
        if state.delta > z0 && state.delta < DELTA2_TAIL_END {
            points.push(state.delta);
        }
        points.push(DELTA2_TAIL_END);
        let outer = QuadratureSpec {
            abs_tol: (spec.rel_tol * direct.abs()).max(f64::MIN_POSITIVE),
            ..*spec
        };
        let integral = integrate_panels(&|z| Ok(term(z)?.0), &points, &outer)?.value;
        integral + state.tau * h[2] / 2.0 - state.tau * (3.0 * h[2] - 4.0 * h[1] + h[0]) / 24.0
    } else {
        0.0
    };
    Ok(Delta2 {
        value_ev: -scale * (-log_scale).exp() * (direct + tail),
        terms_used: DELTA2_HEAD + 1,
        negligible: false,
    })
}

/// `δ₂` in eV.
pub fn delta2_free_energy(cfg: &Configuration, spec: &QuadratureSpec) -> Result<f64> {
    Ok(delta2_detailed(cfg, spec)?.value_ev)
}

// ---------------------------------------------------------------------------

/// Picks the `δ₁` path for a configuration.
pub fn resolve_delta1_method(cfg: &Configuration, settings: &EngineSettings) -> Result<Delta1Method> {
    let state = to_dimensionless(cfg)?;
    Ok(match settings.delta1_method {
        Delta1Method::Auto => {
            if state.tau < settings.crossover_tau && state.delta > 0.0 {
                Delta1Method::AbelPlana
            } else {
                Delta1Method::Direct
            }
        }
        m => m,
    })
}

/// `δ₁` in eV by the configured method.
pub fn delta1_free_energy(cfg: &Configuration, settings: &EngineSettings) -> Result<(f64, Delta1Method)> {
    let method = resolve_delta1_method(cfg, settings)?;
    let value = match method {
        Delta1Method::AbelPlana => abel_plana_delta1(cfg, &settings.quadrature)?,
        _ => delta1_direct_detailed(cfg, &settings.quadrature)?.value_ev,
    };
    Ok((value, method))
}

/// Full breakdown at the configuration's temperature; `total` is `(δ₁ + δ₂) + E₀`.
pub fn free_energy_breakdown(cfg: &Configuration, settings: &EngineSettings) -> Result<FreeEnergyBreakdown> {
    let state = to_dimensionless(cfg)?;
    let spec = &settings.quadrature;
    let mut warnings = Vec::new();
    if !cfg.sheet.nernst_regime() && !cfg.sheet.at_regime_boundary() {
        warnings.push(format!(
            "μ = {} eV exceeds Δ/2 = {} eV: outside the regime of the low-temperature laws",
            cfg.sheet.chem_potential_ev(),
            cfg.sheet.gap_ev() / 2.0
        ));
    }
    let e_zero = zero_temperature_energy(cfg, spec)?;
    if state.tau == 0.0 {
        if state.delta < 2.0 * state.m {
            return Err(Error::Regime("T = 0 with μ > Δ/2 is not supported".into()));
        }
        return Ok(FreeEnergyBreakdown {
            e_zero,
            delta1: 0.0,
            delta2: 0.0,
            total: e_zero,
            terms_used: 0,
            tail_bound: 0.0,
            delta1_method: settings.delta1_method,
            delta2_negligible: true,
            warnings,
        });
    }
    let method = resolve_delta1_method(cfg, settings)?;
    let (delta1, terms_used, tail_bound) = match method {
        Delta1Method::AbelPlana => (abel_plana_delta1(cfg, spec)?, 0, 0.0),
        _ => {
            let r = delta1_direct_detailed(cfg, spec)?;
            if r.precision_loss {
                warnings.push(format!(
                    "δ₁ = {:e} eV is within 10³ of its error estimate {:e} eV",
                    r.value_ev, r.error_estimate_ev
                ));
            }
            (r.value_ev, r.terms_used, r.tail_bound_ev)
        }
    };
    let d2 = delta2_detailed_with(cfg, spec, settings.delta2_order)?;
    let terms_used = terms_used.max(d2.terms_used);
    Ok(FreeEnergyBreakdown {
        e_zero,
        delta1,
        delta2: d2.value_ev,
        total: delta1 + d2.value_ev + e_zero,
        terms_used,
        tail_bound,
        delta1_method: method,
        delta2_negligible: d2.negligible,
        warnings,
    })
}

/// Thermal correction `δ₁ + δ₂` in eV.
pub fn thermal_correction(cfg: &Configuration, settings: &EngineSettings) -> Result<f64> {
    let (d1, _) = delta1_free_energy(cfg, settings)?;
    Ok(d1 + delta2_detailed_with(cfg, &settings.quadrature, settings.delta2_order)?.value_ev)
}
