//! Dual-quadrature comparisons and seeded randomized invariant grids.

use std::f64::consts::PI;

use cpg_core::lifshitz::{
    abel_plana_delta1, delta2_detailed_with, im_phi_imaginary_axis, matsubara_free_energy, phi, zero_temperature_energy,
    Delta2Order, TensorMode,
};
use cpg_core::parallel::try_par_map;
use cpg_core::quadrature::{QuadratureSpec, Scheme};
use cpg_core::reflection::{reflection_exact, reflection_thermal_correction, reflection_zero_t};
use cpg_core::special::p_factor;
use cpg_core::tensor::{kernel, tensor_exact, TensorComponents, TensorPoint};
use cpg_core::units::{
    to_dimensionless, AtomModel, Configuration, DimensionlessState, GrapheneSheet, PolarizabilityMode,
    BOLTZMANN_EV_PER_K, DEFAULT_FERMI_RATIO, HBAR_C_EV_NM,
};
use cpg_core::Result;
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::presets;

/// One integrand family evaluated under both quadrature schemes.
#[derive(Debug, Clone)]
pub struct DualQuadrature {
    pub family: &'static str,
    pub gauss_kronrod: f64,
    pub tanh_sinh: f64,
    pub deviation: f64,
}

/// Every integrand family at `rel_tol = 1e-12` under Gauss-Kronrod and
/// tanh-sinh.
pub fn dual_quadrature() -> Result<Vec<DualQuadrature>> {
    let gapped = presets::gapped();
    let pristine = presets::pristine();
    let st = to_dimensionless(&gapped)?;
    type Family<'a> = (&'static str, Box<dyn Fn(&QuadratureSpec) -> Result<f64> + 'a>);
    let families: Vec<Family> = vec![
        ("zero-temperature energy", Box::new(|s| zero_temperature_energy(&gapped, s))),
        (
            "full-tensor Matsubara sum",
            Box::new(|s| {
                Ok(matsubara_free_energy(&pristine.with_tau(2.0)?, TensorMode::ExactTensor, s)?.free_energy_ev)
            }),
        ),
        ("Φ on the real ray", Box::new(|s| Ok(phi(Complex64::new(0.3, 0.0), &st, s)?.re))),
        ("Im Φ on the imaginary axis", Box::new(|s| im_phi_imaginary_axis(0.1, &st, s))),
        ("Abel-Plana δ₁", Box::new(|s| abel_plana_delta1(&gapped.with_tau(0.05)?, s))),
        (
            "thermal-tensor δ₂",
            Box::new(|s| {
                let c = gapped.with_temperature(0.005 / BOLTZMANN_EV_PER_K)?;
                Ok(delta2_detailed_with(&c, s, Delta2Order::FirstOrder)?.value_ev)
            }),
        ),
    ];
    let gk = QuadratureSpec::default().with_rel_tol(1e-12);
    let ts = gk.with_scheme(Scheme::TanhSinh);
    families
        .into_iter()
        .map(|(family, f)| {
            let (a, b) = (f(&gk)?, f(&ts)?);
            Ok(DualQuadrature {
                family,
                gauss_kronrod: a,
                tanh_sinh: b,
                deviation: ((a - b) / a).abs(),
            })
        })
        .collect()
}

/// Result of one randomized invariant.
#[derive(Debug, Clone)]
pub struct PropertyTally {
    pub name: &'static str,
    pub points: usize,
    pub failures: usize,
    /// First failing sample, if any.
    pub note: String,
}

fn tally<P: Sync + std::fmt::Debug>(
    name: &'static str,
    samples: Vec<P>,
    holds: impl Fn(&P) -> Result<bool> + Sync + Send,
) -> Result<PropertyTally> {
    let ok = try_par_map(&samples, holds)?;
    let failures = ok.iter().filter(|&&b| !b).count();
    let note = ok
        .iter()
        .position(|&b| !b)
        .map(|i| format!(", first at {:?}", samples[i]))
        .unwrap_or_default();
    Ok(PropertyTally {
        name,
        points: samples.len(),
        failures,
        note,
    })
}

fn state(delta: f64, m: f64, tau: f64) -> DimensionlessState {
    DimensionlessState {
        tau,
        delta,
        m,
        omega_c_ev: HBAR_C_EV_NM / 1000.0,
        fermi_ratio: DEFAULT_FERMI_RATIO,
    }
}

fn log_uniform(rng: &mut StdRng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..hi.ln()).exp()
}

fn free_energy_config(gap: f64, mu_frac: f64, a: f64, tau: f64) -> Result<Configuration> {
    let sheet = GrapheneSheet::new(gap, mu_frac * gap, DEFAULT_FERMI_RATIO)?;
    let atom = AtomModel::generic(PolarizabilityMode::SingleOscillator);
    Configuration::new(sheet, atom, a, 1.0)?.with_tau(tau)
}

/// Randomized invariants from a fixed seed.
pub fn property_grids(seed: u64) -> Result<Vec<PropertyTally>> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::new();

    let samples: Vec<_> = (0..2000)
        .map(|_| {
            let delta = rng.random_range(0.0..4.0);
            let m = rng.random_range(0.0..1.5) * f64::max(delta, 0.1);
            let tau = log_uniform(&mut rng, 1e-3, 3.0);
            let l = rng.random_range(0..40usize);
            let s = log_uniform(&mut rng, 1e-6, 40.0);
            (delta, m, tau, l, s)
        })
        .collect();
    out.push(tally("0 ≤ r_TM ≤ 1, −1 ≤ r_TE ≤ 0", samples, |&(delta, m, tau, l, s)| {
        let st = state(delta, m, tau);
        let pt = TensorPoint::matsubara_offset(&st, l, s)?;
        let tc = tensor_exact(&pt, &st, &QuadratureSpec::default())?;
        Ok([reflection_exact(&pt, &tc)?, reflection_zero_t(&pt, &tc)?]
            .iter()
            .all(|r| (0.0..=1.0).contains(&r.r_tm) && (-1.0..=0.0).contains(&r.r_te)))
    })?);

    let samples: Vec<_> = (0..10_000)
        .map(|_| {
            let zeta = rng.random_range(0.0..50.0);
            (zeta, zeta + rng.random_range(0.0..50.0), log_uniform(&mut rng, 1e-4, 0.9))
        })
        .collect();
    out.push(tally("ζ ≤ p ≤ y", samples, |&(zeta, y, v)| {
        let p = p_factor(y, zeta, v)?;
        Ok(p >= zeta * (1.0 - 1e-15) && p <= y * (1.0 + 1e-15))
    })?);

    let samples: Vec<_> = (0..10_000)
        .map(|_| (rng.random_range(0.0..20.0), log_uniform(&mut rng, 1e-8, 20.0)))
        .collect();
    out.push(tally("pristine kernel = π/p", samples, |&(zeta, s)| {
        let st = state(0.0, 0.0, 0.1);
        let pt = TensorPoint::from_offset(zeta, s)?;
        let p = pt.p_squared(st.fermi_ratio).sqrt();
        Ok((kernel(&pt, &st)? * p / PI - 1.0).abs() < 1e-14)
    })?);

    let samples: Vec<_> = (0..2000)
        .map(|_| {
            let y = rng.random_range(0.01..20.0);
            let frac = rng.random_range(0.0..0.99);
            let a = log_uniform(&mut rng, 1e-4, 10.0);
            let b = log_uniform(&mut rng, 1e-4, 10.0);
            (y, frac, a, b, rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
        .collect();
    out.push(tally("first-order remainder is quadratic", samples, |&(y, frac, a, b, ta, tb)| {
        let pt = TensorPoint::new(frac * y, y)?;
        let k2 = pt.k2();
        let base = TensorComponents {
            pi00_zero: a * k2,
            pi_zero: b * k2,
            ..Default::default()
        };
        let remainder = |eps: f64| -> Result<(f64, f64)> {
            let tc = base.with_thermal(eps * ta * a * k2, eps * tb * b * k2);
            let exact = reflection_exact(&pt, &tc)?;
            let zero = reflection_zero_t(&pt, &tc)?;
            let lin = reflection_thermal_correction(&pt, &tc)?;
            Ok((exact.r_tm - zero.r_tm - lin.r_tm, exact.r_te - zero.r_te - lin.r_te))
        };
        let (r1, r2) = (remainder(1e-3)?, remainder(5e-4)?);
        // Remainders at rounding level carry no information.
        Ok([(r1.0, r2.0), (r1.1, r2.1)]
            .iter()
            .all(|&(x1, x2)| x1.abs() <= 1e-13 || (x1 / x2 - 4.0).abs() < 0.05))
    })?);

    let samples: Vec<_> = (0..2000)
        .map(|_| {
            let zeta = rng.random_range(0.0..10.0);
            let s = log_uniform(&mut rng, 1e-6, 30.0);
            let delta = rng.random_range(0.0..4.0);
            (zeta, s, delta, log_uniform(&mut rng, 1e-2, 2.0))
        })
        .collect();
    out.push(tally("Matsubara bracket ≥ 0", samples, |&(zeta, s, delta, tau)| {
        let st = state(delta, 0.3 * delta, tau);
        let pt = TensorPoint::from_offset(zeta, s)?;
        let tc = tensor_exact(&pt, &st, &QuadratureSpec::default())?;
        let r = reflection_exact(&pt, &tc)?;
        let y = pt.y();
        Ok((2.0 * y * y - zeta * zeta) * r.r_tm - zeta * zeta * r.r_te >= 0.0)
    })?);

    let draw = |rng: &mut StdRng| {
        (
            rng.random_range(0.0..0.4),
            rng.random_range(0.0..0.8),
            log_uniform(rng, 100.0, 3000.0),
            log_uniform(rng, 0.05, 4.0),
        )
    };
    let samples: Vec<_> = (0..1000).map(|_| draw(&mut rng)).collect();
    out.push(tally("F < 0 (zero-temperature tensor)", samples, |&(gap, mu, a, tau)| {
        let cfg = free_energy_config(gap, mu, a, tau)?;
        Ok(matsubara_free_energy(&cfg, TensorMode::ZeroTTensor, &QuadratureSpec::default())?.free_energy_ev < 0.0)
    })?);

    let samples: Vec<_> = (0..32)
        .map(|_| {
            let mut d = draw(&mut rng);
            // Exact-tensor sums get costly below τ ≈ 0.5.
            d.3 = rng.random_range(0.5..4.0);
            d
        })
        .collect();
    out.push(tally("F < 0 (full tensor)", samples, |&(gap, mu, a, tau)| {
        let cfg = free_energy_config(gap, mu, a, tau)?;
        let spec = QuadratureSpec::default().with_rel_tol(1e-6);
        Ok(matsubara_free_energy(&cfg, TensorMode::ExactTensor, &spec)?.free_energy_ev < 0.0)
    })?);

    Ok(out)
}
