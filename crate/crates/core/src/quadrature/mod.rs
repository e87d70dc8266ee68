//! One-dimensional quadrature over finite and semi-infinite intervals.
//!
//! Two independent schemes live here: adaptive Gauss–Kronrod (G10/K21,
//! the production path) and tanh-sinh (double-exponential), kept as a
//! cross-check. Semi-infinite ranges `[lo, ∞)` are mapped onto `[0, 1)` with
//! `y = lo + L s/(1 − s)`, where `L` is the integrand's decay scale. The same
//! map is used by both schemes.

mod gauss_kronrod;
mod tanh_sinh;

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::summation::CompensatedSum;

pub use gauss_kronrod::adaptive_gauss_kronrod;
pub use tanh_sinh::tanh_sinh;

/// Integration rule behind every engine integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    #[default]
    GaussKronrod,
    /// Tanh-sinh on each panel; slower, used to cross-check.
    TanhSinh,
}

/// Tolerances and budget for one integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    #[serde(default)]
    pub scheme: Scheme,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_subdivisions: 2000,
            scheme: Scheme::GaussKronrod,
        }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && abs_tol > 0.0) {
            return Err(Error::Domain(format!(
                "tolerances must be positive (rel {rel_tol}, abs {abs_tol})"
            )));
        }
        if max_subdivisions == 0 {
            return Err(Error::Domain("max_subdivisions must be positive".into()));
        }
        Ok(Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
            scheme: Scheme::GaussKronrod,
        })
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub(crate) fn target(&self, value_magnitude: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value_magnitude)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<T = f64> {
    pub value: T,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

/// Values that can be integrated: real or complex.
pub trait QuadValue:
    Copy + Default + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(&self) -> f64;
    fn is_finite_value(&self) -> bool;
    fn to_parts(self) -> [f64; 2];
    fn from_parts(parts: [f64; 2]) -> Self;
}

impl QuadValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
    fn to_parts(self) -> [f64; 2] {
        [self, 0.0]
    }
    fn from_parts(parts: [f64; 2]) -> Self {
        parts[0]
    }
}

impl QuadValue for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn to_parts(self) -> [f64; 2] {
        [self.re, self.im]
    }
    fn from_parts(parts: [f64; 2]) -> Self {
        Complex64::new(parts[0], parts[1])
    }
}

/// Compensated sum of real or complex values.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct ValueSum {
    parts: [CompensatedSum; 2],
}

impl ValueSum {
    pub(crate) fn add<T: QuadValue>(&mut self, v: T) {
        let [a, b] = v.to_parts();
        self.parts[0].add(a);
        self.parts[1].add(b);
    }

    pub(crate) fn value<T: QuadValue>(&self) -> T {
        T::from_parts([self.parts[0].value(), self.parts[1].value()])
    }
}

/// Map from `s ∈ [0, 1)` to `y ∈ [lo, ∞)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SemiInfiniteMap {
    lo: f64,
    scale: f64,
}

impl SemiInfiniteMap {
    pub(crate) fn new(lo: f64, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Domain(format!("decay scale must be positive, got {scale}")));
        }
        if !lo.is_finite() {
            return Err(Error::Domain(format!("lower limit must be finite, got {lo}")));
        }
        Ok(Self { lo, scale })
    }

    pub(crate) fn point(&self, s: f64) -> f64 {
        self.lo + self.scale * s / (1.0 - s)
    }

    pub(crate) fn inverse(&self, y: f64) -> f64 {
        let d = (y - self.lo) / self.scale;
        d / (1.0 + d)
    }

    pub(crate) fn wrap<'a, T, F>(&'a self, f: &'a F) -> impl Fn(f64) -> Result<T> + 'a
    where
        T: QuadValue,
        F: Fn(f64) -> Result<T>,
    {
        move |s: f64| {
            let one_minus = 1.0 - s;
            let y = self.point(s);
            if !y.is_finite() {
                return Ok(T::default());
            }
            let v = f(y)?;
            if v.magnitude() == 0.0 {
                return Ok(v);
            }
            Ok(v * (self.scale / (one_minus * one_minus)))
        }
    }
}

fn lift<T, F: Fn(f64) -> T>(f: F) -> impl Fn(f64) -> Result<T> {
    move |x| Ok(f(x))
}

/// Integral over consecutive panels `[points[i], points[i+1]]` with the
/// rule selected by `spec.scheme`.
pub fn integrate_panels<T, F>(f: &F, points: &[f64], spec: &QuadratureSpec) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> Result<T>,
{
    match spec.scheme {
        Scheme::GaussKronrod => adaptive_gauss_kronrod(f, points, spec),
        Scheme::TanhSinh => {
            if points.len() < 2 {
                return Err(Error::Domain("need at least one panel".into()));
            }
            let mut value = ValueSum::default();
            let mut abs_error_estimate = 0.0;
            let mut evaluations = 0;
            for w in points.windows(2) {
                if !(w[0] < w[1]) {
                    return Err(Error::Domain(format!("panel [{}, {}] is empty or reversed", w[0], w[1])));
                }
                let r = tanh_sinh(f, w[0], w[1], spec)?;
                value.add(r.value);
                abs_error_estimate += r.abs_error_estimate;
                evaluations += r.evaluations;
            }
            Ok(QuadratureResult {
                value: value.value(),
                abs_error_estimate,
                evaluations,
            })
        }
    }
}

/// Integral over `[lo, hi]`; adaptive Gauss–Kronrod unless the spec selects tanh-sinh.
pub fn integrate_finite<T, F>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    try_integrate_finite(lift(f), lo, hi, spec)
}

/// As [`integrate_finite`], for integrands that can fail.
pub fn try_integrate_finite<T, F>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> Result<T>,
{
    if !(lo < hi) {
        return Err(Error::Domain(format!("integration needs lo < hi, got [{lo}, {hi}]")));
    }
    integrate_panels(&f, &[lo, hi], spec)
}

/// Integral over `[lo, ∞)` for integrands decaying at least
/// like `exp(−(y − lo)/decay_scale)`.
pub fn integrate_semi_infinite<T, F>(
    f: F,
    lo: f64,
    decay_scale: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    try_integrate_semi_infinite(lift(f), lo, decay_scale, &[], spec)
}

/// Fallible semi-infinite integration with optional interior breakpoints
/// (in the original variable) where the integrand is known to have structure.
pub fn try_integrate_semi_infinite<T, F>(
    f: F,
    lo: f64,
    decay_scale: f64,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> Result<T>,
{
    let map = SemiInfiniteMap::new(lo, decay_scale)?;
    let mut points = vec![0.0];
    let mut inner: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|b| b.is_finite() && *b > lo)
        .map(|b| map.inverse(b))
        .filter(|s| *s > 0.0 && *s < 1.0)
        .collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    points.extend(inner);
    points.push(1.0);
    let g = map.wrap(&f);
    integrate_panels(&g, &points, spec)
}

/// Tanh-sinh over `[lo, hi]`.
pub fn tanh_sinh_finite<T, F>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> Result<T>,
{
    if !(lo < hi) {
        return Err(Error::Domain(format!("integration needs lo < hi, got [{lo}, {hi}]")));
    }
    tanh_sinh(&f, lo, hi, spec)
}

/// Tanh-sinh over `[lo, ∞)` through the same map as the Gauss–Kronrod path.
pub fn tanh_sinh_semi_infinite<T, F>(
    f: F,
    lo: f64,
    decay_scale: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> Result<T>,
{
    let map = SemiInfiniteMap::new(lo, decay_scale)?;
    let g = map.wrap(&f);
    tanh_sinh(&g, 0.0, 1.0, spec)
}
