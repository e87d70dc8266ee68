//! TM and TE reflection coefficients of the sheet at imaginary frequency.
//!
//! Both coefficients are ratios in which `k2 = y² − ζ²` divides out, so
//! they are evaluated from `Π̃₀₀/k2` and `Π̃/k2`:
//! `r_TM = yA/(yA + 2)` and `r_TE = −B/(B + 2y)`.

use crate::error::{domain, Result};
use crate::tensor::{TensorComponents, TensorPoint};
use crate::units::FINE_STRUCTURE;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReflectionPair {
    pub r_tm: f64,
    pub r_te: f64,
}

impl ReflectionPair {
    /// From the tensor components divided by `k2`.
    pub fn from_reduced(y: f64, pi00_reduced: f64, pi_reduced: f64) -> Self {
        let a = y * pi00_reduced;
        Self {
            r_tm: a / (a + 2.0),
            r_te: -pi_reduced / (pi_reduced + 2.0 * y),
        }
    }

    /// Zero-temperature coefficients from the kernel `Q = Ψ(δ/p)/p`.
    pub fn from_kernel(y: f64, p2: f64, q: f64) -> Self {
        let a = FINE_STRUCTURE * q;
        Self::from_reduced(y, a, a * p2)
    }
}

fn reduced(pt: &TensorPoint, pi00: f64, pi: f64) -> Result<(f64, f64)> {
    let k2 = pt.k2();
    if !(k2 > 0.0) {
        return domain(format!("reflection needs y > ζ, got y = {}, ζ = {}", pt.y(), pt.zeta()));
    }
    Ok((pi00 / k2, pi / k2))
}

/// Coefficients with the full tensor `Π̃ = Π̃⁽⁰⁾ + Π̃⁽¹⁾`.
pub fn reflection_exact(pt: &TensorPoint, tc: &TensorComponents) -> Result<ReflectionPair> {
    let (a, b) = reduced(pt, tc.pi00(), tc.pi())?;
    Ok(ReflectionPair::from_reduced(pt.y(), a, b))
}

/// Coefficients with the zero-temperature parts only.
pub fn reflection_zero_t(pt: &TensorPoint, tc: &TensorComponents) -> Result<ReflectionPair> {
    let (a, b) = reduced(pt, tc.pi00_zero, tc.pi_zero)?;
    Ok(ReflectionPair::from_reduced(pt.y(), a, b))
}

/// First-order change of the coefficients caused by the thermal parts.
pub fn reflection_thermal_correction(pt: &TensorPoint, tc: &TensorComponents) -> Result<ReflectionPair> {
    let (a0, b0) = reduced(pt, tc.pi00_zero, tc.pi_zero)?;
    let (a1, b1) = reduced(pt, tc.pi00_thermal, tc.pi_thermal)?;
    Ok(thermal_correction_reduced(pt.y(), a0, b0, a1, b1))
}

/// `δr_TM = 2y δA/(yA + 2)²`, `δr_TE = −2y δB/(B + 2y)²` in reduced form.
pub(crate) fn thermal_correction_reduced(y: f64, a0: f64, b0: f64, a1: f64, b1: f64) -> ReflectionPair {
    thermal_difference_reduced(y, a0, b0, a1, b1, 0.0)
}

/// Exact change `r(A₀ + εA₁) − r(A₀)` divided by `ε`, written without
/// subtracting the two coefficients. `ε = 0` gives the first-order change.
pub(crate) fn thermal_difference_reduced(
    y: f64,
    a0: f64,
    b0: f64,
    a1: f64,
    b1: f64,
    scale: f64,
) -> ReflectionPair {
    let dm0 = y * a0 + 2.0;
    let de0 = b0 + 2.0 * y;
    let dm = dm0 + scale * y * a1;
    let de = de0 + scale * b1;
    ReflectionPair {
        r_tm: 2.0 * y * a1 / (dm * dm0),
        r_te: -2.0 * y * b1 / (de * de0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::tensor_zero_t;
    use crate::units::{DimensionlessState, DEFAULT_FERMI_RATIO};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn state(delta: f64) -> DimensionlessState {
        DimensionlessState {
            tau: 0.1,
            delta,
            m: 0.0,
            omega_c_ev: 0.2,
            fermi_ratio: DEFAULT_FERMI_RATIO,
        }
    }

    #[test]
    fn pristine_static_tm_value() {
        let s = state(0.0);
        for &y in &[1e-3, 0.5, 7.0] {
            let pt = TensorPoint::new(0.0, y).unwrap();
            let tc = tensor_zero_t(&pt, &s).unwrap();
            let r = reflection_zero_t(&pt, &tc).unwrap();
            assert_relative_eq!(r.r_tm, 0.774_72, max_relative = 1e-5);
            let exact = FINE_STRUCTURE * PI / (FINE_STRUCTURE * PI + 2.0 * DEFAULT_FERMI_RATIO);
            assert_relative_eq!(r.r_tm, exact, max_relative = 1e-14);
            assert_eq!(reflection_exact(&pt, &tc).unwrap(), r);
        }
    }

    #[test]
    fn static_te_value() {
        let s = state(0.6);
        let pt = TensorPoint::new(0.0, 2.0).unwrap();
        let tc = tensor_zero_t(&pt, &s).unwrap();
        let r = reflection_zero_t(&pt, &tc).unwrap();
        let v = DEFAULT_FERMI_RATIO;
        let psi = crate::special::psi_real(0.6 / (v * 2.0)).unwrap();
        let x = FINE_STRUCTURE * v * psi;
        assert_relative_eq!(r.r_te, -x / (x + 2.0), max_relative = 1e-13);
        assert!(r.r_te < 0.0);
    }

    #[test]
    fn limits() {
        let r = ReflectionPair::from_reduced(1.0, 1e300, 0.0);
        assert_relative_eq!(r.r_tm, 1.0);
        assert_eq!(r.r_te, 0.0);
        let pt = TensorPoint::new(0.3, 1.0).unwrap();
        let tc = TensorComponents {
            pi00_zero: 0.2,
            pi_zero: 0.1,
            ..Default::default()
        };
        assert_eq!(reflection_thermal_correction(&pt, &tc).unwrap(), ReflectionPair::default());
        let warm = tc.with_thermal(0.01, 0.0);
        assert!(reflection_thermal_correction(&pt, &warm).unwrap().r_tm > 0.0);
    }

    #[test]
    fn correction_is_first_order() {
        let pt = TensorPoint::new(0.3, 1.1).unwrap();
        let base = TensorComponents {
            pi00_zero: 0.05,
            pi_zero: 0.02,
            ..Default::default()
        };
        let gap = |h: f64| {
            let tc = base.with_thermal(0.01 * h, 0.004 * h);
            let e = reflection_exact(&pt, &tc).unwrap();
            let z = reflection_zero_t(&pt, &tc).unwrap();
            let c = reflection_thermal_correction(&pt, &tc).unwrap();
            ((e.r_tm - z.r_tm - c.r_tm).abs(), (e.r_te - z.r_te - c.r_te).abs())
        };
        let (a1, b1) = gap(1.0);
        let (a2, b2) = gap(0.5);
        assert_relative_eq!(a1 / a2, 4.0, max_relative = 0.02);
        assert_relative_eq!(b1 / b2, 4.0, max_relative = 0.02);
    }
}
