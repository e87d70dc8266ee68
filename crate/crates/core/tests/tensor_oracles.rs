//! Tensor values frozen from an independent 30-digit evaluation of the
//! defining integrals (direct `u` variable, principal square root).

use approx::assert_relative_eq;
use cpg_core::quadrature::QuadratureSpec;
use cpg_core::tensor::{tensor_thermal, x_functions, TensorPoint};
use cpg_core::units::{DimensionlessState, DEFAULT_FERMI_RATIO};

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
fn x_functions_spot_values() {
    let pt = TensorPoint::new(0.5, 1.0).unwrap();
    let (x00, x) = x_functions(2.0, &pt, &state(0.1, 0.5, 0.0)).unwrap();
    assert_relative_eq!(x00, 1.666_618_779_214_85e-5, max_relative = 1e-10);
    assert_relative_eq!(x, -4.166_591_946_434_947_2e-6, max_relative = 1e-10);

    let pt = TensorPoint::new(0.2, 6.0).unwrap();
    let (x00, x) = x_functions(6.5, &pt, &state(0.1, 1.1, 0.0)).unwrap();
    assert_relative_eq!(x00, 8.304_344_248_081_073e-3, max_relative = 1e-12);
    assert_relative_eq!(x, -3.330_178_033_015_503e-4, max_relative = 1e-12);

    // far from the light cone: the direct form is used
    let pt = TensorPoint::new(0.05, 900.0).unwrap();
    let (x00, x) = x_functions(1.3, &pt, &state(0.1, 0.4, 0.0)).unwrap();
    assert_relative_eq!(x00, 0.974_287_869_595_391_9, max_relative = 1e-12);
    assert_relative_eq!(x, 0.117_589_397_637_572_93, max_relative = 1e-12);
}

#[test]
fn thermal_tensor_spot_values() {
    let spec = QuadratureSpec::default();
    let cases = [
        (0.3, 1.2, 0.5, 0.1, 0.1, 8.047_964_973_874_687e-7, 7.243_234_485_541_79e-8),
        (0.0, 2.0, 0.0, 0.0, 0.05, 45.422_424_953_542_96, -5.039_111_075_500_667e-4),
        (0.2, 3.0, 0.3, 0.25, 0.2, 0.820_585_213_354_606_7, 0.032_842_521_760_839_42),
    ];
    for (zeta, y, delta, m, tau, e00, e) in cases {
        let pt = TensorPoint::new(zeta, y).unwrap();
        let (a, b) = tensor_thermal(&pt, &state(tau, delta, m), &spec).unwrap();
        assert_relative_eq!(a, e00, max_relative = 1e-9);
        assert_relative_eq!(b, e, max_relative = 1e-9);
    }
    let pt = TensorPoint::new(0.0, 0.8).unwrap();
    let (a, b) = tensor_thermal(&pt, &state(0.1, 0.5, 0.1), &spec).unwrap();
    assert_relative_eq!(a, 0.112_722_699_144_283_36, max_relative = 1e-9);
    assert!((b - -1.429_013_565_971_313e-11).abs() < 1e-9 * a);
}
