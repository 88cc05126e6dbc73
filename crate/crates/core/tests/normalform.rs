mod common;

use std::sync::Arc;

use common::*;
use proptest::prelude::*;
use shearwave::coeffs::a0_from_b0;
use shearwave::normalform::*;
use shearwave::{CanonicalState, ComplexField, PhysicalParams, RealField, SpectralGrid, Symbol, C64};

const GAMMAS: [f64; 5] = [-2.0, -1.0, 0.0, 1.0, 2.0];

fn params(gamma: f64) -> PhysicalParams {
    PhysicalParams::new(1.0, gamma, 4.0, 0.05).unwrap()
}

fn state(g: &Arc<SpectralGrid>, kmax: usize, amp: f64, seed: u64) -> CanonicalState {
    let mut r = rng(seed);
    CanonicalState {
        eta: random_field(g, kmax, amp, &mut r),
        zeta: random_field(g, kmax, amp, &mut r),
        time: 0.0,
    }
}

fn canon(g: &Arc<SpectralGrid>, eta: &[C64], zeta: &[C64]) -> CanonicalState {
    CanonicalState {
        eta: RealField::from_spectrum(g.clone(), eta),
        zeta: RealField::from_spectrum(g.clone(), zeta),
        time: 0.0,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn integral(a: &RealField, b: &RealField) -> f64 {
    let prod: Vec<f64> = a.values().iter().zip(b.values()).map(|(x, y)| x * y).collect();
    a.grid().trapezoid(&prod)
}

/// `dH⁽²⁾/ds` at `s = 0` along the flow, by centred differences combined so
/// that the O(h²) error cancels.
#[test]
fn cohomological_identity() {
    let g = grid(32);
    for (i, gamma) in GAMMAS.into_iter().enumerate() {
        let p = params(gamma);
        let flow = NormalFormFlow::new(g.clone(), &p).unwrap();
        let c = state(&g, 5, 0.02, 100 + i as u64);
        let (e, z) = (c.eta.spectrum(), c.zeta.spectrum());
        let h2_at = |s: f64| {
            let (a, b) = flow.integrate(&e, &z, 0.0, s, s.abs() / 4.0).unwrap();
            h2(&canon(&g, &a, &b), &p)
        };
        let d = |h: f64| (h2_at(h) - h2_at(-h)) / (2.0 * h);
        let h = 0.05;
        let deriv = (4.0 * d(h) - d(2.0 * h)) / 3.0;
        let h3 = h3_spectral(&c, &p).unwrap();
        assert!(rel(deriv, h3) < 1e-6, "gamma={gamma}: dH2/ds {deriv:e} vs H3 {h3:e}");
    }
}

#[test]
fn k3_physical_matches_triad_sums() {
    for (n, kmax) in [(16, 4), (32, 7), (64, 12)] {
        let g = grid(n);
        for (i, gamma) in [-2.0, -1.0, 1.0, 2.0].into_iter().enumerate() {
            let p = params(gamma);
            let c = state(&g, kmax, 0.3, 7 * n as u64 + i as u64);
            let f = functionals(&c, &p).unwrap();
            assert!(
                rel(f.k3_physical, f.k3_spectral) < 1e-9,
                "n={n} gamma={gamma}: {} vs {}",
                f.k3_physical,
                f.k3_spectral
            );
            assert!(
                rel(f.k3_spectral_z, f.k3_spectral) < 1e-9,
                "n={n} gamma={gamma}: z form {}",
                f.k3_spectral_z
            );
            assert!(f.min_denominator > 0.0);
        }
    }
}

/// At γ = 0 the η̃ flow is inviscid Burgers, `∂ₛv = −v∂ₓv`. The reference
/// integrates that equation directly with the same steps.
#[test]
fn burgers_reduction() {
    let g = grid(64);
    let p = params(0.0);
    let flow = NormalFormFlow::new(g.clone(), &p).unwrap();
    let c = state(&g, 4, 0.05, 5);
    let ds = 0.01;
    let (e, _) = flow
        .integrate(&c.eta.spectrum(), &c.zeta.spectrum(), 0.0, -1.0, ds)
        .unwrap();
    let flowed = g.applied(&e, &Symbol::Hilbert);

    let burgers = |v: &[C64]| -> Vec<C64> {
        let sq = g.product_real(v, v);
        g.applied(&sq, &Symbol::Dx).iter().map(|x| -0.5 * x).collect()
    };
    let mut v = g.applied(&c.eta.spectrum(), &Symbol::Hilbert);
    let start = v.clone();
    let h = -ds;
    let add = |x: &[C64], s: f64, y: &[C64]| -> Vec<C64> { x.iter().zip(y).map(|(a, b)| a + s * b).collect() };
    for _ in 0..100 {
        let k1 = burgers(&v);
        let k2 = burgers(&add(&v, 0.5 * h, &k1));
        let k3 = burgers(&add(&v, 0.5 * h, &k2));
        let k4 = burgers(&add(&v, h, &k3));
        for j in 0..v.len() {
            v[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
    }
    let moved = spec_max_diff(&v, &start);
    let diff = spec_max_diff(&flowed, &v);
    assert!(moved > 1e-4, "flow did not move: {moved:e}");
    assert!(diff < 1e-12 * moved, "diff {diff:e} vs displacement {moved:e}");
}

#[test]
fn zeta_flow_reduces_at_zero_vorticity() {
    let g = grid(32);
    let c = state(&g, 6, 0.5, 8);
    let fs = FlowState {
        eta: c.eta.clone(),
        zeta: c.zeta.clone(),
        s: 0.0,
    };
    let (_, dz) = k3_rhs(&fs, &params(0.0)).unwrap();
    let dzt = dz.apply_symbol(&Symbol::Hilbert).unwrap();
    let et = c.eta.apply_symbol(&Symbol::Hilbert).unwrap();
    let zt_x = c
        .zeta
        .apply_symbol(&Symbol::Hilbert)
        .unwrap()
        .apply_symbol(&Symbol::Dx)
        .unwrap();
    let prod = et.dealiased_product(&zt_x).unwrap();
    let mean = prod.mean();
    let want: Vec<f64> = prod.values().iter().map(|v| -(v - mean)).collect();
    assert!(max_diff(dzt.values(), &want) < 1e-14 * (1.0 + max_abs(&want)) + 1e-15);
}

#[test]
fn k3_conserved_along_its_flow() {
    let g = grid(64);
    for (i, gamma) in GAMMAS.into_iter().enumerate() {
        let p = params(gamma);
        let flow = NormalFormFlow::new(g.clone(), &p).unwrap();
        let c = state(&g, 8, 0.02, 40 + i as u64);
        let k0 = k3_physical(&c, &p);
        let (mut e, mut z) = (c.eta.spectrum(), c.zeta.spectrum());
        for j in 0..4 {
            let s = -(j as f64) * 0.25;
            (e, z) = flow.integrate(&e, &z, s, s - 0.25, 0.005).unwrap();
            let k = k3_physical(&canon(&g, &e, &z), &p);
            assert!(
                rel(k, k0) < 1e-8,
                "gamma={gamma} s={}: drift {:e}",
                s - 0.25,
                rel(k, k0)
            );
        }
    }
}

#[test]
fn eta_mean_stays_zero_without_vorticity() {
    let g = grid(64);
    let p = params(0.0);
    let flow = NormalFormFlow::new(g.clone(), &p).unwrap();
    let c = state(&g, 8, 0.05, 3);
    let (mut e, mut z) = (c.eta.spectrum(), c.zeta.spectrum());
    for j in 0..10 {
        let s = -(j as f64) * 0.1;
        (e, z) = flow.integrate(&e, &z, s, s - 0.1, 0.005).unwrap();
        assert!(e[0].norm() < 1e-12, "s={}: {:e}", s - 0.1, e[0].norm());
    }
}

/// With vorticity the η-equation has a nonzero mean: each of its unwrapped
/// products averages to a quadratic form, evaluated here by parts.
#[test]
fn eta_mean_rate_with_vorticity() {
    let g = grid(32);
    for gamma in [-2.0, -1.0, 1.0, 2.0] {
        let p = params(gamma);
        let gr = p.g;
        let c = state(&g, 6, 0.1, 77);
        let fs = FlowState {
            eta: c.eta.clone(),
            zeta: c.zeta.clone(),
            s: 0.0,
        };
        let (de, _) = k3_rhs(&fs, &p).unwrap();
        let sym = |f: &RealField, s: Symbol| f.apply_symbol(&s).unwrap();
        let (eta, zeta) = (&c.eta, &c.zeta);
        let eta_x = sym(eta, Symbol::Dx);
        let eta_t = sym(eta, Symbol::Hilbert);
        let i_eta = sym(eta, Symbol::InvDx);
        let d_zeta = sym(zeta, Symbol::AbsD);
        let len = 2.0 * std::f64::consts::PI;
        let want = (gamma / gr * integral(zeta, &eta_x)
            + gamma.powi(2) / (4.0 * gr * gr) * integral(zeta, &d_zeta)
            + gamma.powi(2) / (4.0 * gr) * integral(eta, eta)
            - gamma.powi(3) / (4.0 * gr * gr) * integral(zeta, &eta_t)
            + gamma.powi(4) / (16.0 * gr * gr) * integral(&eta_t, &i_eta))
            / len;
        assert!(
            (de.mean() - want).abs() < 1e-13 * want.abs().max(1e-3),
            "gamma={gamma}: {} vs {want}",
            de.mean()
        );
        assert!(want.abs() > 1e-6);
    }
}

/// The flow is `(∂ₛη, ∂ₛζ) = (δK/δζ, −δK/δη)`. K⁽³⁾ is cubic, so the
/// Richardson combination of centred differences is its exact derivative.
#[test]
fn flow_is_gradient_of_k3() {
    let g = grid(32);
    for (i, gamma) in GAMMAS.into_iter().enumerate() {
        let p = params(gamma);
        let c = state(&g, 6, 0.3, 200 + i as u64);
        let dir = state(&g, 6, 0.3, 300 + i as u64);
        let fs = FlowState {
            eta: c.eta.clone(),
            zeta: c.zeta.clone(),
            s: 0.0,
        };
        let (de, dz) = k3_rhs(&fs, &p).unwrap();
        let shifted = |h: f64| {
            let mv = |a: &RealField, b: &RealField| {
                RealField::new(
                    g.clone(),
                    a.values().iter().zip(b.values()).map(|(x, y)| x + h * y).collect(),
                )
                .unwrap()
            };
            k3_physical(
                &CanonicalState {
                    eta: mv(&c.eta, &dir.eta),
                    zeta: mv(&c.zeta, &dir.zeta),
                    time: 0.0,
                },
                &p,
            )
        };
        let d = |h: f64| (shifted(h) - shifted(-h)) / (2.0 * h);
        let h = 0.1;
        let fd = (4.0 * d(h) - d(2.0 * h)) / 3.0;
        let grad = integral(&de, &dir.zeta) - integral(&dz, &dir.eta);
        assert!(rel(fd, grad) < 1e-9, "gamma={gamma}: {fd:e} vs {grad:e}");
    }
}

#[test]
fn envelope_round_trip() {
    let g = grid(128);
    let p = PhysicalParams::from_b0(1.0, -1.0, 10.0, 0.002).unwrap();
    let u = ComplexField::from_fn(g.clone(), |x| C64::new(0.002 * (1.0 + 0.1 * x.cos()), 0.0002 * x.sin()));
    let ds = 0.01;
    let surf = envelope_to_surface(&u, &p, ds).unwrap();
    let back = surface_to_envelope(&surf, &p, ds).unwrap();
    let err = u
        .values()
        .iter()
        .zip(back.values())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
    assert!(err < 1e-12 * 0.002, "round trip error {err:e}");
}

#[test]
fn zero_envelope_reconstructs_rest() {
    let g = grid(32);
    let p = params(1.0);
    let u = ComplexField::zeros(g.clone());
    let s = envelope_to_surface(&u, &p, 0.1).unwrap();
    assert_eq!(s.eta.max_abs(), 0.0);
    assert_eq!(s.zeta.max_abs(), 0.0);
    let r = partial_reconstruct(&u, &p);
    assert_eq!(r.eta.max_abs(), 0.0);
    let c = CanonicalState {
        eta: RealField::zeros(g.clone()),
        zeta: RealField::zeros(g),
        time: 0.0,
    };
    assert_eq!(surface_to_envelope(&c, &p, 0.1).unwrap().max_abs(), 0.0);
}

#[test]
fn partial_reconstruction_of_uniform_envelope() {
    let g = grid(64);
    for gamma in [-2.0, 0.0, 2.0] {
        let b0 = 0.002;
        let p = PhysicalParams::from_b0(1.0, gamma, 10.0, b0).unwrap();
        let u = ComplexField::constant(g.clone(), C64::new(b0, 0.0));
        let s = partial_reconstruct(&u, &p);
        let spec = s.eta.spectrum();
        let amp = 2.0 * spec[10].norm();
        assert!(
            rel(amp, a0_from_b0(b0, &p)) < 1e-12,
            "gamma={gamma}: {amp} vs {}",
            a0_from_b0(b0, &p)
        );
        let others: f64 = spec
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != 10 && *k != 54)
            .map(|(_, c)| c.norm())
            .sum();
        assert!(others < 1e-17);
    }
}

/// The bound second harmonic scales as `B₀²` and is already captured by a
/// two-step RK4 integration of the flow.
#[test]
fn second_harmonic_from_flow() {
    let g = grid(64);
    let p = PhysicalParams::from_b0(1.0, 0.0, 10.0, 0.002).unwrap();
    let harmonic = |b0: f64, ds: f64| {
        let u = ComplexField::constant(g.clone(), C64::new(b0, 0.0));
        let s = envelope_to_surface(&u, &p, ds).unwrap();
        let partial = partial_reconstruct(&u, &p);
        let diff: Vec<f64> = s
            .eta
            .values()
            .iter()
            .zip(partial.eta.values())
            .map(|(a, b)| a - b)
            .collect();
        (2.0 * s.eta.spectrum()[20].norm(), max_abs(&diff))
    };
    let (h1, d1) = harmonic(0.002, 0.001);
    let (h2v, _) = harmonic(0.004, 0.001);
    let (coarse, _) = harmonic(0.002, 0.5);
    assert!((h2v / h1 - 4.0).abs() < 0.05, "ratio {}", h2v / h1);
    assert!(rel(coarse, h1) < 1e-4, "{coarse:e} vs {h1:e}");
    // Partial and full reconstructions differ by the bound harmonic.
    assert!(rel(d1, h1) < 0.05, "{d1:e} vs {h1:e}");
}

#[test]
fn stokes_surface_has_flat_envelope() {
    let g = grid(128);
    let p = PhysicalParams::from_b0(1.0, 1.0, 10.0, 0.002).unwrap();
    let u = ComplexField::constant(g.clone(), C64::new(0.002, 0.0));
    let surf = envelope_to_surface(&u, &p, 0.01).unwrap();
    let back = surface_to_envelope(&surf, &p, 0.01).unwrap();
    let mods: Vec<f64> = back.values().iter().map(|v| v.norm()).collect();
    let (lo, hi) = mods
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    assert!((hi - lo) / hi < 1e-10, "|u| spread {}", (hi - lo) / hi);
}

#[test]
fn oracle_refuses_large_grids() {
    let g = grid(128);
    let c = state(&g, 4, 0.1, 1);
    assert!(matches!(functionals(&c, &params(1.0)), Err(shearwave::Error::Usage(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn rhs_is_quadratic(seed in any::<u64>(), gamma in -2.5f64..2.5, t in -3.0f64..3.0) {
        let g = grid(32);
        let p = params(gamma);
        let c = state(&g, 6, 0.2, seed);
        let scale = |f: &RealField| RealField::new(g.clone(), f.values().iter().map(|v| t * v).collect()).unwrap();
        let a = k3_rhs(&FlowState { eta: c.eta.clone(), zeta: c.zeta.clone(), s: 0.0 }, &p).unwrap();
        let b = k3_rhs(&FlowState { eta: scale(&c.eta), zeta: scale(&c.zeta), s: 0.0 }, &p).unwrap();
        let tol = 1e-13 * t * t * (1.0 + max_abs(a.0.values()) + max_abs(a.1.values()));
        let e: Vec<f64> = a.0.values().iter().map(|v| t * t * v).collect();
        let z: Vec<f64> = a.1.values().iter().map(|v| t * t * v).collect();
        prop_assert!(max_diff(b.0.values(), &e) <= tol + 1e-300);
        prop_assert!(max_diff(b.1.values(), &z) <= tol + 1e-300);
    }

    #[test]
    fn h3_is_odd(seed in any::<u64>(), gamma in -2.0f64..2.0) {
        let g = grid(16);
        let p = params(gamma);
        let c = state(&g, 4, 0.5, seed);
        let neg = CanonicalState {
            eta: RealField::new(g.clone(), c.eta.values().iter().map(|v| -v).collect()).unwrap(),
            zeta: RealField::new(g.clone(), c.zeta.values().iter().map(|v| -v).collect()).unwrap(),
            time: 0.0,
        };
        let (a, b) = (h3_spectral(&c, &p).unwrap(), h3_spectral(&neg, &p).unwrap());
        prop_assert!((a + b).abs() <= 1e-13 * a.abs().max(1e-300));
    }
}
