//! Polarization tensor of gapped, doped graphene at imaginary frequency.
//!
//! Every component carries a factor `y² − ζ²`, stored on [`TensorPoint`] as
//! `k2`. The zero-temperature parts are closed form. The thermal parts are
//! one-dimensional integrals over `t = u − D` of the Fermi occupation times
//! the `X` functions; the integrand starts at `t = 0` with an `exp(−B t)`
//! envelope.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::quadrature::{try_integrate_finite, try_integrate_semi_infinite, QuadratureSpec};
use crate::special::{fermi_dirac_scaled, psi_over_p};
use crate::units::{DimensionlessState, FINE_STRUCTURE};

/// A point `(ζ, y)` of the Lifshitz integration domain `y ≥ ζ ≥ 0`.
///
/// The point at `y = ζ` itself is moved one rounding step inside the domain,
/// which keeps `k2 = y² − ζ²` strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensorPoint {
    l: Option<usize>,
    zeta: f64,
    y: f64,
    k2: f64,
}

impl TensorPoint {
    pub fn new(zeta: f64, y: f64) -> Result<Self> {
        if !(y >= zeta) {
            return domain(format!("tensor point needs y >= ζ, got y = {y}, ζ = {zeta}"));
        }
        Self::from_offset(zeta, y - zeta)
    }

    /// The point `y = ζ + s`; `k2 = s(s + 2ζ)` is then free of cancellation.
    pub fn from_offset(zeta: f64, s: f64) -> Result<Self> {
        if !(zeta >= 0.0 && zeta.is_finite()) {
            return domain(format!("ζ must be finite and >= 0, got {zeta}"));
        }
        if !(s >= 0.0 && s.is_finite()) {
            return domain(format!("y − ζ must be finite and >= 0, got {s}"));
        }
        let s = if s == 0.0 { (zeta * f64::EPSILON).max(1e-150) } else { s };
        Ok(Self {
            l: None,
            zeta,
            y: zeta + s,
            k2: s * (s + 2.0 * zeta),
        })
    }

    /// Point at the Matsubara frequency `ζ_l = τ l`.
    pub fn matsubara(state: &DimensionlessState, l: usize, y: f64) -> Result<Self> {
        let mut pt = Self::new(state.zeta(l), y)?;
        pt.l = Some(l);
        Ok(pt)
    }

    pub fn matsubara_offset(state: &DimensionlessState, l: usize, s: f64) -> Result<Self> {
        let mut pt = Self::from_offset(state.zeta(l), s)?;
        pt.l = Some(l);
        Ok(pt)
    }

    pub fn l(&self) -> Option<usize> {
        self.l
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    /// `y² − ζ²`.
    pub fn k2(&self) -> f64 {
        self.k2
    }

    /// `p² = ζ² + ṽ²(y² − ζ²)`.
    pub fn p_squared(&self, fermi_ratio: f64) -> f64 {
        self.zeta * self.zeta + fermi_ratio * fermi_ratio * self.k2
    }
}

/// `(Π̃₀₀, Π̃)` split into zero-temperature and thermal parts.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TensorComponents {
    pub pi00_zero: f64,
    pub pi_zero: f64,
    pub pi00_thermal: f64,
    pub pi_thermal: f64,
}

/// `a + b`, or zero when the sum is at the rounding level of the parts.
///
/// Static transverse response with the Fermi level in the band cancels
/// exactly; what survives the subtraction has no meaningful sign.
fn cancelling_sum(a: f64, b: f64) -> f64 {
    let sum = a + b;
    if sum.abs() <= 8.0 * f64::EPSILON * a.abs().max(b.abs()) {
        0.0
    } else {
        sum
    }
}

impl TensorComponents {
    pub fn pi00(&self) -> f64 {
        cancelling_sum(self.pi00_zero, self.pi00_thermal)
    }

    pub fn pi(&self) -> f64 {
        cancelling_sum(self.pi_zero, self.pi_thermal)
    }

    pub fn with_thermal(mut self, pi00_thermal: f64, pi_thermal: f64) -> Self {
        self.pi00_thermal = pi00_thermal;
        self.pi_thermal = pi_thermal;
        self
    }
}

/// `Ψ(δ/p)/p` at the point.
pub fn kernel(pt: &TensorPoint, state: &DimensionlessState) -> Result<f64> {
    psi_over_p(pt.p_squared(state.fermi_ratio), state.delta)
}

/// Zero-temperature parts `Π̃₀₀⁽⁰⁾ = α k2 Ψ(D)/p` and `Π̃⁽⁰⁾ = α k2 p Ψ(D)`;
/// the thermal fields are left at zero.
pub fn tensor_zero_t(pt: &TensorPoint, state: &DimensionlessState) -> Result<TensorComponents> {
    let q = kernel(pt, state)?;
    let p2 = pt.p_squared(state.fermi_ratio);
    let pi00 = FINE_STRUCTURE * pt.k2 * q;
    Ok(TensorComponents {
        pi00_zero: pi00,
        pi_zero: pi00 * p2,
        ..Default::default()
    })
}

#[derive(Debug, Clone, Copy)]
struct Geometry {
    zeta: f64,
    p: f64,
    p2: f64,
    /// `ṽ² k2 = p² − ζ²`
    eta: f64,
    delta: f64,
    d: f64,
}

impl Geometry {
    fn new(pt: &TensorPoint, state: &DimensionlessState) -> Result<Self> {
        let v = state.fermi_ratio;
        let eta = v * v * pt.k2;
        let p2 = pt.zeta * pt.zeta + eta;
        if !(p2 > 0.0) {
            return domain(format!("p vanishes at ζ = {}, y = {}", pt.zeta, pt.y));
        }
        let p = p2.sqrt();
        Ok(Self {
            zeta: pt.zeta,
            p,
            p2,
            eta,
            delta: state.delta,
            d: state.delta / p,
        })
    }

    /// Positive root in `t` of `Re R(t)`, if there is one.
    fn radicand_root(&self) -> Option<f64> {
        let dz = self.delta * self.zeta;
        let lead = (self.p2 - dz) * ((self.p2 + dz) / self.p2);
        if !(lead > 0.0) {
            return None;
        }
        let disc = (self.delta * self.delta + lead).sqrt();
        Some(lead / (self.p * (self.delta + disc)))
    }

    /// Negative root of the (real) radicand at `ζ = 0`.
    fn negative_root(&self) -> f64 {
        -(self.delta + (self.delta * self.delta + self.p2).sqrt()) / self.p
    }

    /// `(√R X₀₀, √R X)` at `u = D + t` with `R > 0` supplied as `√R`
    /// (ζ = 0 only). Finite as `√R → 0`, where X itself diverges.
    fn x_static_scaled(&self, t: f64, sqrt_r: f64) -> (f64, f64) {
        let (p, p2, dl) = (self.p, self.p2, self.delta);
        let r = sqrt_r * sqrt_r;
        // P − R = t(2δp + Pt)
        let p_minus_r = t * (2.0 * dl * p + p2 * t);
        let n = (r - dl * dl) / p;
        let x00 = if n > 0.0 {
            // Divided through by P term by term: P(√R + n) underflows for tiny p.
            let q2 = (sqrt_r / p).powi(2);
            let d2 = (dl / p).powi(2);
            (q2 * p_minus_r + dl * dl * (2.0 * q2 - d2)) / (sqrt_r + n)
        } else {
            sqrt_r - n
        };
        (x00, p * p_minus_r)
    }

    fn x_shifted(&self, t: f64) -> (f64, f64) {
        let Geometry {
            zeta,
            p,
            p2,
            eta,
            delta,
            d,
        } = *self;
        let u = d + t;
        if zeta == 0.0 {
            let r = p2 - t * (2.0 * delta * p + p2 * t);
            if r > 0.0 {
                let sr = r.sqrt();
                let (a, b) = self.x_static_scaled(t, sr);
                return (a / sr, b / sr);
            }
            return (1.0, 0.0);
        }
        let re_r = (p2 - delta * zeta) * ((p2 + delta * zeta) / p2) - t * (2.0 * delta * p + p2 * t);
        let r = Complex64::new(re_r, 2.0 * zeta * (delta + p * t));
        let sr = r.sqrt();
        let n = Complex64::new(p * (1.0 - u) * (1.0 + u), 2.0 * zeta * u);
        // P − R, free of cancellation as t → 0.
        let p2_minus_r = Complex64::new(
            (delta * zeta).powi(2) / p2 + t * (2.0 * delta * p + p2 * t),
            -2.0 * zeta * (delta + p * t),
        );
        if eta <= zeta * zeta {
            // Expansion about the light-cone point p = ζ, where N/√R = 1 + iu
            // exactly; the deviations are O(η) and computed directly.
            let one_iu = Complex64::new(1.0, u);
            let c = one_iu * one_iu;
            let e = eta / (p + zeta);
            let i = Complex64::i();
            let diff = -2.0 * i * u * p * e * c - 4.0 * u * u * e * e - c * (eta * d * d);
            let x00 = -(diff / (sr * (n + one_iu * sr))).re;
            let shift = Complex64::new(eta * d * d, -2.0 * u * p * e) / (sr + p * one_iu);
            // −η + pη/√R, using p − √R = (P − R)/(p + √R).
            let x = eta * (p2_minus_r / (sr * (p + sr))).re - p * shift.re;
            (x00, x)
        } else {
            // R = pN + δ²η/P, so R − N² = N u (pu − 2iζ) + δ²η/P.
            let x00 = if u < 1.0 {
                let r_minus_n2 = n * Complex64::new(p * u * u, -2.0 * zeta * u) + delta * delta * eta / p2;
                (r_minus_n2 / (sr * (sr + n))).re
            } else {
                1.0 - (n / sr).re
            };
            let x = (p2_minus_r / sr * (p - zeta * zeta / (p + sr))).re;
            (x00, x)
        }
    }
}

/// `X₀₀(u)` and `X(u)` at a tensor point, for `u ≥ D = δ/p`.
pub fn x_functions(u: f64, pt: &TensorPoint, state: &DimensionlessState) -> Result<(f64, f64)> {
    let g = Geometry::new(pt, state)?;
    if !(u >= g.d) {
        return domain(format!("X functions need u >= D = {}, got {u}", g.d));
    }
    Ok(g.x_shifted(u - g.d))
}

/// `∫₀^∞ w(t) X₀₀ dt` and `∫₀^∞ w(t) X dt` for a positive weight `w`.
/// `tail(t0)` must return `∫_{t0}^∞ w dt`.
fn weighted_x_integrals<W, T>(
    g: &Geometry,
    weight: W,
    tail: T,
    decay: f64,
    extra_break: Option<f64>,
    spec: &QuadratureSpec,
) -> Result<(f64, f64)>
where
    W: Fn(f64) -> f64,
    T: Fn(f64) -> f64,
{
    let inner = QuadratureSpec {
        abs_tol: f64::MIN_POSITIVE,
        ..*spec
    };
    // Both integrals share every abscissa: integrate them as the real and
    // imaginary parts of one complex integrand.
    if g.zeta == 0.0 {
        // Real radicand with a square-root zero at t_r; beyond it X₀₀ = 1 and
        // X = 0. Below it, t = t_r(1 − v²) removes the endpoint singularity.
        let tr = g.radicand_root().unwrap_or(0.0);
        if !(tr > 0.0) {
            return Ok((tail(0.0), 0.0));
        }
        let t2 = g.negative_root();
        let f = |v: f64| -> Result<Complex64> {
            let t = tr * (1.0 - v) * (1.0 + v);
            // √R = v S, and the Jacobian 2 t_r v cancels its v.
            let s = g.p * (tr * (t - t2)).sqrt();
            let (x00, x) = g.x_static_scaled(t, v * s);
            let jac = 2.0 * tr * weight(t) / s;
            Ok(Complex64::new(x00 * jac, x * jac))
        };
        let c = try_integrate_finite(f, 0.0, 1.0, &inner)?;
        return Ok((c.value.re + tail(tr), c.value.im));
    }
    let mut breaks = Vec::with_capacity(2);
    if let Some(tr) = g.radicand_root() {
        breaks.push(tr);
    }
    if let Some(b) = extra_break {
        breaks.push(b);
    }
    let f = |t: f64| -> Result<Complex64> {
        let w = weight(t);
        let (x00, x) = g.x_shifted(t);
        Ok(Complex64::new(w * x00, w * x))
    };
    let c = try_integrate_semi_infinite(f, 0.0, decay, &breaks, &inner)?;
    Ok((c.value.re, c.value.im))
}

/// `∫_{t0}^∞ dt e^{s}/(e^{Bt + c} + 1)`.
fn fermi_tail_scaled(b: f64, c: f64, log_scale: f64, t0: f64) -> f64 {
    let z = b * t0 + c;
    if z > 0.0 {
        let e = (-z).exp();
        let ratio = if e < 1e-8 { 1.0 - 0.5 * e } else { e.ln_1p() / e };
        (log_scale - z).exp() * ratio / b
    } else {
        log_scale.exp() * (-z + z.exp().ln_1p()) / b
    }
}

/// Thermal tensor integrals in scaled form: the physical parts are
/// `Π̃₀₀⁽¹⁾ = (4αp/ṽ²) e^{−s} i00` and `Π̃⁽¹⁾ = −(4αp/ṽ²) e^{−s} ix`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ThermalIntegrals {
    pub i00: f64,
    pub ix: f64,
    pub log_scale: f64,
    pub prefactor: f64,
}

impl ThermalIntegrals {
    pub(crate) fn unscaled(&self) -> (f64, f64) {
        let s = (-self.log_scale).exp();
        (self.prefactor * s * self.i00, -self.prefactor * s * self.ix)
    }
}

pub(crate) fn thermal_integrals(
    pt: &TensorPoint,
    state: &DimensionlessState,
    spec: &QuadratureSpec,
) -> Result<ThermalIntegrals> {
    let g = Geometry::new(pt, state)?;
    let v = state.fermi_ratio;
    let prefactor = 4.0 * FINE_STRUCTURE * g.p / (v * v);
    if state.tau == 0.0 {
        if state.delta >= 2.0 * state.m {
            return Ok(ThermalIntegrals {
                i00: 0.0,
                ix: 0.0,
                log_scale: 0.0,
                prefactor,
            });
        }
        return domain("thermal tensor at T = 0 is only defined for Δ >= 2μ");
    }
    let b = PI * g.p / state.tau;
    let mu = state.mu_over_kt();
    let bd = state.half_gap_over_kt();
    let log_scale = (bd - mu).max(0.0);
    let weight = |t: f64| {
        let bt = b * t + bd;
        fermi_dirac_scaled(bt + mu, log_scale) + fermi_dirac_scaled(bt - mu, log_scale)
    };
    let tail = |t0: f64| {
        fermi_tail_scaled(b, bd + mu, log_scale, t0) + fermi_tail_scaled(b, bd - mu, log_scale, t0)
    };
    let step = (mu > bd).then(|| (mu - bd) / b);
    let (i00, ix) = weighted_x_integrals(&g, weight, tail, 1.0 / b, step, spec)?;
    Ok(ThermalIntegrals {
        i00,
        ix,
        log_scale,
        prefactor,
    })
}

/// Thermal parts `(Π̃₀₀⁽¹⁾, Π̃⁽¹⁾)` from the full Fermi occupation.
pub fn tensor_thermal(
    pt: &TensorPoint,
    state: &DimensionlessState,
    spec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    Ok(thermal_integrals(pt, state, spec)?.unscaled())
}

/// Zero-temperature plus thermal parts at one point.
pub fn tensor_exact(
    pt: &TensorPoint,
    state: &DimensionlessState,
    spec: &QuadratureSpec,
) -> Result<TensorComponents> {
    let (a, b) = tensor_thermal(pt, state, spec)?;
    Ok(tensor_zero_t(pt, state)?.with_thermal(a, b))
}

/// Low-temperature form of the thermal parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowTemperatureTensor {
    pub pi00_thermal: f64,
    pub pi_thermal: f64,
    /// Set when `Δ = 2μ`: the exponential prefactor is then 1 and the
    /// approximation carries no suppression.
    pub at_boundary: bool,
}

/// Keeps only the `exp[−(B u − μ/k_BT)]` part of the occupation:
/// `Π̃₀₀⁽¹⁾ ≈ e^{−(Δ−2μ)/2k_BT} (4αp/ṽ²) ∫₀^∞ e^{−Bt} X₀₀(t + D) dt`, and
/// likewise for `Π̃⁽¹⁾` with `X` and an overall minus sign.
///
/// Valid for `Δ > 2μ` and `k_BT ≤ (Δ − 2μ)/20`. At `μ = 0` both occupation
/// terms are equal and the exact parts are twice this.
pub fn tensor_thermal_lowt(
    pt: &TensorPoint,
    state: &DimensionlessState,
    spec: &QuadratureSpec,
) -> Result<LowTemperatureTensor> {
    let at_boundary = state.delta == 2.0 * state.m;
    if !(state.tau > 0.0) {
        return domain("low-temperature tensor needs T > 0");
    }
    let exponent = state.suppression_exponent();
    if !at_boundary {
        if state.delta < 2.0 * state.m {
            return Err(Error::Regime(format!(
                "low-temperature tensor needs Δ >= 2μ (δ = {}, m = {})",
                state.delta, state.m
            )));
        }
        if exponent < 10.0 {
            return Err(Error::Regime(format!(
                "low-temperature tensor needs k_BT <= (Δ − 2μ)/20; (Δ − 2μ)/2k_BT = {exponent}"
            )));
        }
    }
    let g = Geometry::new(pt, state)?;
    let v = state.fermi_ratio;
    let prefactor = 4.0 * FINE_STRUCTURE * g.p / (v * v);
    let b = PI * g.p / state.tau;
    let (i00, ix) = weighted_x_integrals(
        &g,
        |t| (-b * t).exp(),
        |t0| (-b * t0).exp() / b,
        1.0 / b,
        None,
        spec,
    )?;
    let s = (-exponent).exp();
    Ok(LowTemperatureTensor {
        pi00_thermal: prefactor * s * i00,
        pi_thermal: -prefactor * s * ix,
        at_boundary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::DEFAULT_FERMI_RATIO;
    use approx::assert_relative_eq;

    fn state(tau: f64, delta: f64, m: f64) -> DimensionlessState {
        DimensionlessState {
            tau,
            delta,
            m,
            omega_c_ev: 0.197_326_980_4,
            fermi_ratio: DEFAULT_FERMI_RATIO,
        }
    }

    #[test]
    fn point_nudges_off_the_light_cone() {
        let pt = TensorPoint::new(0.7, 0.7).unwrap();
        assert!(pt.y() > 0.7 && pt.k2() > 0.0);
        assert!(TensorPoint::new(0.7, 0.6).is_err());
        let pt = TensorPoint::from_offset(0.0, 0.0).unwrap();
        assert!(pt.k2() > 0.0);
        let s = state(0.1, 0.5, 0.0);
        let pt = TensorPoint::matsubara(&s, 3, 1.0).unwrap();
        assert_eq!(pt.l(), Some(3));
        assert_relative_eq!(pt.zeta(), 0.3, max_relative = 1e-15);
    }

    #[test]
    fn zero_t_tie_and_pristine_reduction() {
        let s = state(0.1, 0.5, 0.0);
        let pt = TensorPoint::new(0.4, 1.3).unwrap();
        let tc = tensor_zero_t(&pt, &s).unwrap();
        let p2 = pt.p_squared(s.fermi_ratio);
        assert_relative_eq!(tc.pi_zero, p2 * tc.pi00_zero, max_relative = 1e-15);
        let pristine = state(0.1, 0.0, 0.0);
        let tc = tensor_zero_t(&pt, &pristine).unwrap();
        assert_relative_eq!(
            tc.pi00_zero / pt.k2() * p2.sqrt() / FINE_STRUCTURE,
            PI,
            max_relative = 1e-14
        );
    }

    #[test]
    fn light_cone_expansion_matches_direct_form() {
        // the two algebraically equal forms agree where both are accurate
        let s = state(0.1, 0.8, 0.0);
        for &(zeta, y, u) in &[(0.3, 5.0, 2.0), (0.5, 40.0, 3.5), (1.0, 200.0, 0.9)] {
            let pt = TensorPoint::new(zeta, y).unwrap();
            let g = Geometry::new(&pt, &s).unwrap();
            assert!(g.eta <= zeta * zeta);
            let (a00, ax) = g.x_shifted(u - g.d);
            let n = Complex64::new(g.p * (1.0 - u * u), 2.0 * zeta * u);
            let r = Complex64::new(
                g.p2 - g.p2 * u * u + g.eta * g.d * g.d,
                2.0 * zeta * g.p * u,
            );
            let sr = r.sqrt();
            let m = Complex64::new(zeta * zeta - g.p2 * u * u + g.eta * g.d * g.d, 2.0 * zeta * g.p * u);
            let b00 = 1.0 - (n / sr).re;
            let bx = zeta * zeta - g.p * (m / sr).re;
            assert_relative_eq!(a00, b00, max_relative = 1e-6);
            assert_relative_eq!(ax, bx, max_relative = 1e-6);
        }
    }

    #[test]
    fn static_x_functions() {
        // pristine, ζ = 0, u = 0: exact cancellation
        let s = state(0.1, 0.0, 0.0);
        let pt = TensorPoint::new(0.0, 1.0).unwrap();
        let (x00, x) = x_functions(0.0, &pt, &s).unwrap();
        assert!(x00.abs() < 1e-15 && x.abs() < 1e-15);
        // negative radicand → X₀₀ = 1
        let (x00, x) = x_functions(3.0, &pt, &s).unwrap();
        assert_eq!((x00, x), (1.0, 0.0));
        // gapped, u = D: X₀₀ = D²
        let s = state(0.1, 0.003, 0.0);
        let pt = TensorPoint::new(0.0, 1.0).unwrap();
        let d = 0.003 / (DEFAULT_FERMI_RATIO * 1.0);
        let (x00, _) = x_functions(d, &pt, &s).unwrap();
        assert_relative_eq!(x00, d * d, max_relative = 1e-13);
        assert!(x_functions(0.5 * d, &pt, &s).is_err());
    }

    #[test]
    fn thermal_parts_vanish_at_zero_temperature() {
        let s = state(0.0, 0.5, 0.1);
        let pt = TensorPoint::new(0.0, 1.0).unwrap();
        assert_eq!(tensor_thermal(&pt, &s, &QuadratureSpec::default()).unwrap(), (0.0, 0.0));
        let doped = state(0.0, 0.1, 0.2);
        assert!(tensor_thermal(&pt, &doped, &QuadratureSpec::default()).is_err());
    }

    #[test]
    fn low_t_regime_guard() {
        let spec = QuadratureSpec::default();
        let pt = TensorPoint::new(0.05, 1.0).unwrap();
        assert!(matches!(
            tensor_thermal_lowt(&pt, &state(0.05, 0.2, 0.2), &spec),
            Err(Error::Regime(_))
        ));
        assert!(matches!(
            tensor_thermal_lowt(&pt, &state(0.5, 0.5, 0.0), &spec),
            Err(Error::Regime(_))
        ));
        let b = tensor_thermal_lowt(&pt, &state(0.05, 0.4, 0.2), &spec).unwrap();
        assert!(b.at_boundary && b.pi00_thermal.is_finite());
    }

    #[test]
    fn fermi_tail_closed_form() {
        let (b, c) = (2.0, 0.7);
        let num = crate::quadrature::integrate_semi_infinite(
            |t: f64| 1.0 / ((b * t + c).exp() + 1.0),
            0.3,
            1.0 / b,
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert_relative_eq!(fermi_tail_scaled(b, c, 0.0, 0.3), num.value, max_relative = 1e-12);
        assert_relative_eq!(
            fermi_tail_scaled(b, 800.0, 795.0, 0.0),
            (-5.0f64).exp() / b,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            fermi_tail_scaled(b, -3.0, 0.0, 0.0),
            (1.0 + 3.0f64.exp()).ln() / b,
            max_relative = 1e-14
        );
    }
}
