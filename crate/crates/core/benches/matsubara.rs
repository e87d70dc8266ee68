use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use cpg_core::lifshitz::{matsubara_free_energy, TensorMode};
use cpg_core::parallel::par_map;
use cpg_core::quadrature::QuadratureSpec;
use cpg_core::units::{AtomModel, Configuration, GrapheneSheet, PolarizabilityMode, DEFAULT_FERMI_RATIO};

fn gapped(tau: f64) -> Configuration {
    let sheet = GrapheneSheet::new(0.2, 0.05, DEFAULT_FERMI_RATIO).unwrap();
    let atom = AtomModel::generic(PolarizabilityMode::StaticOnly);
    Configuration::new(sheet, atom, 500.0, 1.0).unwrap().with_tau(tau).unwrap()
}

fn energy(cfg: &Configuration, mode: TensorMode) -> f64 {
    matsubara_free_energy(cfg, mode, &QuadratureSpec::default()).unwrap().free_energy_ev
}

/// A temperature sweep mapped over the pool and in a plain loop.
fn sweep(c: &mut Criterion) {
    let cfgs: Vec<Configuration> = (0..16).map(|i| gapped(0.2 + 0.1 * i as f64)).collect();
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    group.bench_function("par_map", |b| b.iter(|| par_map(&cfgs, |c| energy(c, TensorMode::ZeroTTensor))));
    group.bench_function("sequential", |b| {
        b.iter(|| cfgs.iter().map(|c| energy(c, TensorMode::ZeroTTensor)).collect::<Vec<_>>())
    });
    group.finish();
}

/// One Matsubara sum on the global pool and on a single worker.
fn matsubara_sum(c: &mut Criterion) {
    let mut group = c.benchmark_group("matsubara_sum");
    group.sample_size(10);
    for (mode, tau) in [(TensorMode::ZeroTTensor, 0.05), (TensorMode::ExactTensor, 1.0)] {
        let cfg = gapped(tau);
        let id = format!("{mode:?}");
        group.bench_with_input(BenchmarkId::new("pool", &id), &cfg, |b, cfg| b.iter(|| energy(cfg, mode)));
        #[cfg(feature = "parallel")]
        {
            let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
            group.bench_with_input(BenchmarkId::new("single-worker", &id), &cfg, |b, cfg| {
                b.iter(|| single.install(|| energy(cfg, mode)))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, sweep, matsubara_sum);
criterion_main!(benches);
