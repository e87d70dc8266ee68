//! Randomized invariants of the tensor, the reflection coefficients and the
//! free energy.

use std::f64::consts::PI;

use cpg_core::lifshitz::*;
use cpg_core::quadrature::{QuadratureSpec, Scheme};
use cpg_core::reflection::*;
use cpg_core::special::p_factor;
use cpg_core::tensor::*;
use cpg_core::units::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn state(delta: f64, m: f64, tau: f64) -> DimensionlessState {
    DimensionlessState {
        tau,
        delta,
        m,
        omega_c_ev: HBAR_C_EV_NM / 1000.0,
        fermi_ratio: DEFAULT_FERMI_RATIO,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn reflection_coefficients_are_bounded(
        delta in 0.0..4.0f64,
        m_frac in 0.0..1.5f64,
        tau in 1e-3..3.0f64,
        l in 0usize..40,
        s in 1e-6..40.0f64,
    ) {
        let st = state(delta, m_frac * delta.max(0.1), tau);
        let pt = TensorPoint::matsubara_offset(&st, l, s).unwrap();
        let tc = tensor_exact(&pt, &st, &QuadratureSpec::default()).unwrap();
        for r in [reflection_exact(&pt, &tc).unwrap(), reflection_zero_t(&pt, &tc).unwrap()] {
            prop_assert!((0.0..=1.0).contains(&r.r_tm), "r_TM = {}", r.r_tm);
            prop_assert!((-1.0..=0.0).contains(&r.r_te), "r_TE = {}", r.r_te);
        }
    }

    #[test]
    fn p_lies_between_zeta_and_y(zeta in 0.0..50.0f64, s in 0.0..50.0f64, v in 1e-4..0.9f64) {
        let y = zeta + s;
        let p = p_factor(y, zeta, v).unwrap();
        prop_assert!(p >= zeta * (1.0 - 1e-15) && p <= y * (1.0 + 1e-15));
    }

    #[test]
    fn pristine_kernel_is_pi_over_p(zeta in 0.0..20.0f64, s in 1e-8..20.0f64) {
        let st = state(0.0, 0.0, 0.1);
        let pt = TensorPoint::from_offset(zeta, s).unwrap();
        let p = pt.p_squared(st.fermi_ratio).sqrt();
        let q = kernel(&pt, &st).unwrap();
        prop_assert!((q * p / PI - 1.0).abs() < 1e-14);
    }

    #[test]
    fn first_order_remainder_is_quadratic(
        y in 0.01..20.0f64,
        frac in 0.0..0.99f64,
        a in 1e-4..10.0f64,
        b in 1e-4..10.0f64,
        ta in -1.0..1.0f64,
        tb in -1.0..1.0f64,
    ) {
        let pt = TensorPoint::new(frac * y, y).unwrap();
        let k2 = pt.k2();
        let base = TensorComponents { pi00_zero: a * k2, pi_zero: b * k2, ..Default::default() };
        let remainder = |eps: f64| {
            let tc = base.with_thermal(eps * ta * a * k2, eps * tb * b * k2);
            let exact = reflection_exact(&pt, &tc).unwrap();
            let zero = reflection_zero_t(&pt, &tc).unwrap();
            let lin = reflection_thermal_correction(&pt, &tc).unwrap();
            (exact.r_tm - zero.r_tm - lin.r_tm, exact.r_te - zero.r_te - lin.r_te)
        };
        let (r1, r2) = (remainder(1e-3), remainder(5e-4));
        for (x1, x2) in [(r1.0, r2.0), (r1.1, r2.1)] {
            if x1.abs() > 1e-13 {
                prop_assert!((x1 / x2 - 4.0).abs() < 0.05, "ratio {}", x1 / x2);
            }
        }
    }

    #[test]
    fn matsubara_bracket_is_positive(
        zeta in 0.0..10.0f64,
        s in 1e-6..30.0f64,
        delta in 0.0..4.0f64,
        tau in 1e-2..2.0f64,
    ) {
        let st = state(delta, 0.3 * delta, tau);
        let pt = TensorPoint::from_offset(zeta, s).unwrap();
        let tc = tensor_exact(&pt, &st, &QuadratureSpec::default()).unwrap();
        let r = reflection_exact(&pt, &tc).unwrap();
        let y = pt.y();
        let bracket = (2.0 * y * y - zeta * zeta) * r.r_tm - zeta * zeta * r.r_te;
        prop_assert!(bracket >= 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn free_energy_is_attractive(
        gap in 0.0..0.4f64,
        mu_frac in 0.0..0.8f64,
        a in 100.0..3000.0f64,
        tau in 0.5..4.0f64,
    ) {
        let sheet = GrapheneSheet::new(gap, mu_frac * gap, DEFAULT_FERMI_RATIO).unwrap();
        let atom = AtomModel::generic(PolarizabilityMode::SingleOscillator);
        let cfg = Configuration::new(sheet, atom, a, 1.0).unwrap().with_tau(tau).unwrap();
        let f = matsubara_free_energy(&cfg, TensorMode::ExactTensor, &QuadratureSpec::default()).unwrap();
        prop_assert!(f.free_energy_ev < 0.0);
    }
}

#[test]
fn schemes_agree_on_every_integrand_family() {
    let atom = AtomModel::generic(PolarizabilityMode::StaticOnly);
    let gapped = Configuration::new(GrapheneSheet::new(0.2, 0.05, DEFAULT_FERMI_RATIO).unwrap(), atom, 500.0, 1.0)
        .unwrap();
    let pristine = Configuration::new(GrapheneSheet::pristine(), atom, 500.0, 1.0).unwrap();
    let gk = QuadratureSpec::default().with_rel_tol(1e-12);
    let ts = gk.with_scheme(Scheme::TanhSinh);
    let st = to_dimensionless(&gapped).unwrap();
    type Family<'a> = (&'a str, Box<dyn Fn(&QuadratureSpec) -> f64 + 'a>);
    let families: Vec<Family> = vec![
        ("zero-temperature energy", Box::new(|s| zero_temperature_energy(&gapped, s).unwrap())),
        (
            "full-tensor Matsubara sum",
            Box::new(|s| {
                let c = pristine.with_tau(2.0).unwrap();
                matsubara_free_energy(&c, TensorMode::ExactTensor, s).unwrap().free_energy_ev
            }),
        ),
        ("Φ on the ray", Box::new(|s| phi(Complex64::new(0.3, 0.0), &st, s).unwrap().re)),
        ("Im Φ on the imaginary axis", Box::new(|s| im_phi_imaginary_axis(0.1, &st, s).unwrap())),
        (
            "Abel-Plana δ₁",
            Box::new(|s| abel_plana_delta1(&gapped.with_tau(0.05).unwrap(), s).unwrap()),
        ),
        (
            "thermal-tensor δ₂",
            Box::new(|s| {
                let c = gapped.with_temperature(0.005 / BOLTZMANN_EV_PER_K).unwrap();
                delta2_detailed_with(&c, s, Delta2Order::FirstOrder).unwrap().value_ev
            }),
        ),
    ];
    for (name, f) in families {
        let (a, b) = (f(&gk), f(&ts));
        assert!(((a - b) / a).abs() < 1e-9, "{name}: {a:e} vs {b:e}");
    }
}

#[test]
fn static_tensor_survives_vanishing_momentum() {
    // p ~ 1e-152: tanh-sinh samples this close to the endpoints.
    for delta in [0.0, 1.0] {
        let st = state(delta, 0.0, 1.0);
        for s in [1e-150, 1e-120, 1e-80] {
            let pt = TensorPoint::from_offset(0.0, s).unwrap();
            let (a, b) = tensor_thermal(&pt, &st, &QuadratureSpec::default()).unwrap();
            assert!(a.is_finite() && b.is_finite(), "δ = {delta}, s = {s}: {a}, {b}");
        }
    }
}

#[test]
fn static_te_coefficient_keeps_its_sign_when_the_response_cancels() {
    // Fermi level in the band: the static transverse response vanishes and
    // only rounding residue of either sign survives the sum.
    let st = state(1.9347833302560655, 2.631716007272656, 0.010916014474744643);
    for s in [1.8041348300773886e-5, 1e-4, 1e-2] {
        let pt = TensorPoint::matsubara_offset(&st, 0, s).unwrap();
        let tc = tensor_exact(&pt, &st, &QuadratureSpec::default()).unwrap();
        let r = reflection_exact(&pt, &tc).unwrap();
        assert!((-1.0..=0.0).contains(&r.r_te), "s = {s}: r_TE = {}", r.r_te);
    }
}
