use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use shearwave::dno::dno_apply;
use shearwave::envelope::{EnvelopeModel, EnvelopeStepper, Variant};
use shearwave::harness::{initial_envelope, initial_surface, ScenarioConfig};
use shearwave::normalform::{envelope_to_surface, NormalFormFlow};
use shearwave::{compute_coefficients, DnoExpansion, EulerStepper, SpectralGrid};

fn scenario(n: usize) -> ScenarioConfig {
    let n = n.to_string();
    ScenarioConfig::from_pairs([("gamma", "-2"), ("k0", "10"), ("B0", "0.002"), ("n_nodes", n.as_str())]).unwrap()
}

fn kernels(c: &mut Criterion) {
    for n in [256usize, 512] {
        let cfg = scenario(n);
        let p = cfg.params().unwrap();
        let grid = SpectralGrid::shared(n).unwrap();
        let u = initial_envelope(&cfg, grid.clone(), &p);
        let surface = initial_surface(&u, &p, 0.05).unwrap();
        let dno = DnoExpansion::default();

        c.bench_with_input(BenchmarkId::new("dno_apply", n), &surface, |b, s| {
            b.iter(|| dno_apply(&dno, black_box(&s.eta), black_box(&s.xi)).unwrap())
        });

        let mut euler = EulerStepper::new(grid.clone(), p, dno, 0.005).unwrap();
        let mut sp = surface.to_spectral();
        c.bench_function(&format!("euler_step/{n}"), |b| {
            b.iter(|| euler.step_spectral(&mut sp).unwrap())
        });

        let flow = NormalFormFlow::new(grid.clone(), &p).unwrap();
        let canon = envelope_to_surface(&u, &p, 0.05).unwrap();
        let (e, z) = (canon.eta.spectrum(), canon.zeta.spectrum());
        c.bench_function(&format!("k3_flow_rhs/{n}"), |b| {
            b.iter(|| flow.rhs_spectral(black_box(&e), black_box(&z)))
        });

        let model = EnvelopeModel::new(grid.clone(), &p, compute_coefficients(&p).unwrap(), Variant::Narrowband);
        let mut env = EnvelopeStepper::new(model, 0.005).unwrap();
        let mut us = u.spectrum();
        c.bench_function(&format!("dysthe_step/{n}"), |b| {
            b.iter(|| env.step_spectral(&mut us).unwrap())
        });
    }
}

criterion_group!(benches, kernels);
criterion_main!(benches);
