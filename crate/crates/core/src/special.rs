//! Scalar special functions used by the polarization tensor and the
//! asymptotic laws.
//!
//! Branch conventions: complex square roots and arctangents are principal
//! (`Re √z ≥ 0`, cut along the negative real axis; `atan` cut along the
//! imaginary axis beyond `±i`). With these choices `Ψ(δ/p)/p` is an even
//! function of `p` and therefore an analytic function of `p²` away from the
//! pair-creation cut `p² ≤ −δ²`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// Riemann ζ(5).
pub const ZETA_5: f64 = 1.036_927_755_143_369_9;

/// Coefficient of `z^m` in the small-argument series of `Ψ(δ/p)/p`.
fn kernel_coefficient(m: usize) -> f64 {
    let m = m as f64;
    4.0 * (m + 1.0) / ((2.0 * m + 1.0) * (2.0 * m + 3.0))
}

/// Number of series terms needed for ~1e-17 relative accuracy at `|z|`.
fn series_terms(abs_z: f64) -> usize {
    if abs_z < 1e-300 {
        return 1;
    }
    let n = (-39.0 / abs_z.ln()).ceil() as usize + 2;
    n.clamp(1, 64)
}

/// `S(z) = Σ (−1)^m c_m z^m`, convergent for `|z| < 1`.
fn kernel_series(z: f64) -> f64 {
    let n = series_terms(z.abs());
    let mut acc = 0.0;
    for m in (0..n).rev() {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        acc = acc * z + sign * kernel_coefficient(m);
    }
    acc
}

fn kernel_series_complex(z: Complex64) -> Complex64 {
    let n = series_terms(z.norm());
    let mut acc = Complex64::new(0.0, 0.0);
    for m in (0..n).rev() {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        acc = acc * z + sign * kernel_coefficient(m);
    }
    acc
}

/// `Ψ(x) = 2[x + (1 − x²) arctan(1/x)]` for real `x ≥ 0`.
pub fn psi_real(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return domain(format!("Ψ needs a non-negative real argument, got {x}"));
    }
    if x == 0.0 {
        return Ok(PI);
    }
    if x > 2.0 {
        // Ψ(x) = (2/x) S(1/x²); the closed form cancels catastrophically here.
        let w = 1.0 / x;
        return Ok(2.0 * w * kernel_series(w * w));
    }
    Ok(2.0 * (x + (1.0 - x * x) * (1.0 / x).atan()))
}

/// `Ψ(x)` for complex `x`, principal branch.
pub fn psi(x: Complex64) -> Result<Complex64> {
    if x == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(PI, 0.0));
    }
    if x.re == 0.0 && x.im.abs() == 1.0 {
        return Err(Error::Branch(format!("Ψ is singular at x = {x}")));
    }
    if x.norm() > 2.0 {
        let w = x.inv();
        return Ok(2.0 * w * kernel_series_complex(w * w));
    }
    Ok(2.0 * (x + (1.0 - x * x) * x.inv().atan()))
}

/// `Ψ(δ/p)/p` as a function of `P = p²`, for real `P`.
///
/// Finite and positive on `(−δ², ∞)`; the lower end is the pair-creation
/// threshold. For `δ = 0` it reduces to `π/p` and needs `P > 0`.
pub fn psi_over_p(p2: f64, delta: f64) -> Result<f64> {
    if delta == 0.0 {
        if p2 > 0.0 {
            return Ok(PI / p2.sqrt());
        }
        return Err(Error::Branch(format!("gapless kernel needs p² > 0, got {p2}")));
    }
    let z = p2 / (delta * delta);
    if z.abs() <= 0.5 {
        return Ok(2.0 / delta * kernel_series(z));
    }
    if z > 0.0 {
        let p = p2.sqrt();
        let d = delta / p;
        return Ok(2.0 * (d + (1.0 - d * d) * (p / delta).atan()) / p);
    }
    if z <= -1.0 {
        return Err(Error::Branch(format!(
            "p² = {p2} lies on the pair-creation cut (p² <= -δ² = {})",
            -delta * delta
        )));
    }
    let w = (-p2).sqrt();
    let r = delta / w;
    Ok(2.0 * (-delta / (w * w) + (1.0 + r * r) * (w / delta).atanh() / w))
}

/// Complex continuation of [`psi_over_p`].
pub fn psi_over_p_complex(p2: Complex64, delta: f64) -> Result<Complex64> {
    let on_negative_axis = p2.im == 0.0 && p2.re <= 0.0;
    if delta == 0.0 {
        if on_negative_axis {
            return Err(Error::Branch(format!("gapless kernel is cut at p² = {p2}")));
        }
        return Ok(PI / p2.sqrt());
    }
    let z = p2 / (delta * delta);
    if z.norm() <= 0.5 {
        return Ok(2.0 / delta * kernel_series_complex(z));
    }
    if on_negative_axis && z.re <= -1.0 {
        return Err(Error::Branch(format!("p² = {p2} lies on the pair-creation cut")));
    }
    let p = p2.sqrt();
    let d = delta / p;
    Ok(2.0 * (d + (1.0 - d * d) * (p / delta).atan()) / p)
}

/// `p = √(ṽ²y² + (1 − ṽ²)ζ²)` on the physical domain `y ≥ ζ ≥ 0`.
pub fn p_factor(y: f64, zeta: f64, v: f64) -> Result<f64> {
    if !(zeta >= 0.0 && y >= zeta) {
        return domain(format!("p_factor needs y >= ζ >= 0, got y = {y}, ζ = {zeta}"));
    }
    if !(v > 0.0 && v < 1.0) {
        return domain(format!("Fermi ratio must lie in (0, 1), got {v}"));
    }
    let k2 = (y - zeta) * (y + zeta);
    Ok((zeta * zeta + v * v * k2).sqrt())
}

/// Exponential integral `E₁(x)` for real `x > 0`.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain(format!("E1 needs x > 0, got {x}"));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    if x <= 1.0 {
        let mut term = 1.0;
        let mut sum = 0.0;
        let mut k = 1.0;
        loop {
            term *= -x / k;
            let add = -term / k;
            sum += add;
            if add.abs() <= 1e-17 * sum.abs() {
                break;
            }
            k += 1.0;
        }
        return Ok(-EULER_GAMMA - x.ln() + sum);
    }
    // Modified Lentz evaluation of the continued fraction.
    let tiny = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            return Ok(h * (-x).exp());
        }
    }
    Err(Error::NonConvergence {
        value: h * (-x).exp(),
        abs_error: f64::NAN,
        subdivisions: 10_000,
    })
}

/// `Ei(−x) = −E₁(x)` for `x > 0`.
pub fn exp_integral_ei_neg(x: f64) -> Result<f64> {
    Ok(-exp_integral_e1(x)?)
}

/// `1/(e^z + 1)` without overflow.
pub(crate) fn fermi_dirac(z: f64) -> f64 {
    if z > 0.0 {
        let e = (-z).exp();
        e / (1.0 + e)
    } else {
        1.0 / (z.exp() + 1.0)
    }
}

/// `1/(e^{z+s} + 1) · e^{s}` for `z + s ≥ 0`, i.e. a Fermi factor rescaled by
/// `e^{s}` so that exponentially small weights keep their mantissa.
pub(crate) fn fermi_dirac_scaled(z: f64, log_scale: f64) -> f64 {
    if z > 0.0 {
        let e = (-z).exp();
        (log_scale - z).exp() / (1.0 + e)
    } else {
        log_scale.exp() / (z.exp() + 1.0)
    }
}

/// Occupation weight `[e^{Bu+μ/kT} + 1]⁻¹ + [e^{Bu−μ/kT} + 1]⁻¹`.
pub fn fermi_weight(u: f64, b: f64, mu_over_kt: f64) -> f64 {
    let bu = b * u;
    fermi_dirac(bu + mu_over_kt) + fermi_dirac(bu - mu_over_kt)
}
