use super::{QuadValue, QuadratureResult, QuadratureSpec, ValueSum};
use crate::error::{Error, Result};

// 21-point Kronrod abscissae (non-negative half); odd indices are the
// 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_478_126,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
    roundoff_limited: bool,
}

fn eval<T: QuadValue, F: Fn(f64) -> Result<T>>(f: &F, x: f64) -> Result<T> {
    let v = f(x)?;
    if !v.is_finite_value() {
        return Err(Error::NonFiniteIntegrand { at: x });
    }
    Ok(v)
}

fn rule<T: QuadValue, F: Fn(f64) -> Result<T>>(f: &F, a: f64, b: f64) -> Result<Panel<T>> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = eval(f, center)?;
    let mut fv1 = [T::default(); 10];
    let mut fv2 = [T::default(); 10];
    let mut res_k = fc * WGK[10];
    let mut res_g = T::default();
    let mut res_abs = fc.magnitude() * WGK[10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = eval(f, center - dx)?;
        let f2 = eval(f, center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k = res_k + (f1 + f2) * WGK[j];
        res_abs += WGK[j] * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            res_g = res_g + (f1 + f2) * WG[j / 2];
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[10] * (fc - mean).magnitude();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).magnitude() + (fv2[j] - mean).magnitude());
    }
    let abs_half = half.abs();
    let value = res_k * half;
    res_abs *= abs_half;
    res_asc *= abs_half;
    let mut error = ((res_k - res_g) * half).magnitude();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    let mut roundoff_limited = false;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) && floor >= error {
        error = floor;
        roundoff_limited = true;
    }
    // Panels too narrow to bisect are final.
    if center <= a || center >= b || (b - a).abs() <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
        roundoff_limited = true;
    }
    Ok(Panel {
        a,
        b,
        value,
        error,
        roundoff_limited,
    })
}

/// Globally adaptive G10/K21 over consecutive panels `[points[i], points[i+1]]`.
///
/// Bisects the panel with the largest error estimate until the summed
/// estimate meets `max(abs_tol, rel_tol·|I|)`. Panels whose estimate sits at
/// the rounding floor are not refined further.
pub fn adaptive_gauss_kronrod<T, F>(f: &F, points: &[f64], spec: &QuadratureSpec) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> Result<T>,
{
    if points.len() < 2 {
        return Err(Error::Domain("need at least one panel".into()));
    }
    let mut panels: Vec<Panel<T>> = Vec::with_capacity(64);
    for w in points.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::Domain(format!("panel [{}, {}] is empty or reversed", w[0], w[1])));
        }
        panels.push(rule(f, w[0], w[1])?);
    }
    let mut evaluations = 21 * panels.len();
    let mut subdivisions = 0usize;
    loop {
        let (total, err): (T, f64) = totals(&mut panels);
        if err <= spec.target(total.magnitude()) {
            return Ok(QuadratureResult {
                value: total,
                abs_error_estimate: err,
                evaluations,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.roundoff_limited)
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i);
        let Some(i) = worst else {
            // Everything left is at the rounding floor: this is as good as it gets.
            return Ok(QuadratureResult {
                value: total,
                abs_error_estimate: err,
                evaluations,
            });
        };
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::NonConvergence {
                value: total.magnitude(),
                abs_error: err,
                subdivisions,
            });
        }
        let p = panels.swap_remove(i);
        let mid = 0.5 * (p.a + p.b);
        panels.push(rule(f, p.a, mid)?);
        panels.push(rule(f, mid, p.b)?);
        evaluations += 42;
        subdivisions += 1;
    }
}

fn totals<T: QuadValue>(panels: &mut [Panel<T>]) -> (T, f64) {
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut value = ValueSum::default();
    let mut err = ValueSum::default();
    for p in panels.iter() {
        value.add(p.value);
        err.add(p.error);
    }
    (value.value(), err.value::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integrate_poly(deg: i32) -> (f64, f64) {
        let f = |x: f64| -> Result<f64> { Ok(x.powi(deg)) };
        let p = rule(&f, -1.0, 1.0).unwrap();
        let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
        (p.value, exact)
    }

    #[test]
    fn kronrod_rule_is_exact_through_degree_31() {
        for deg in 0..=31 {
            let (v, exact) = integrate_poly(deg);
            assert!((v - exact).abs() < 1e-15, "degree {deg}: {v} vs {exact}");
        }
        let (v, exact) = integrate_poly(34);
        assert!((v - exact).abs() > 1e-15);
    }

    #[test]
    fn weights_sum_to_two() {
        let k: f64 = WGK[10] + 2.0 * WGK[..10].iter().sum::<f64>();
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_interior_kink() {
        let f = |x: f64| -> Result<f64> { Ok((x - 0.3).abs()) };
        let r = adaptive_gauss_kronrod(&f, &[0.0, 1.0], &QuadratureSpec::default()).unwrap();
        assert!((r.value - (0.045 + 0.245)).abs() < 1e-12);
    }
}
