mod common;

use common::*;
use proptest::prelude::*;
use shearwave::{ComplexField, RealField, Symbol, C64};

fn field(n: usize, kmax: usize, seed: u64) -> RealField {
    random_field(&grid(n), kmax, 1.0, &mut rng(seed))
}

#[test]
fn round_trip_transform() {
    let g = grid(64);
    let f = field(64, 31, 1);
    let back = RealField::from_spectrum(g.clone(), &f.spectrum());
    assert!(max_diff(back.values(), f.values()) < 1e-12 * max_abs(f.values()));
    let c = ComplexField::from_fn(g.clone(), |x| C64::new(x.sin(), (3.0 * x).cos()));
    let back = ComplexField::from_spectrum(g, &c.spectrum());
    let d = c
        .values()
        .iter()
        .zip(back.values())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
    assert!(d < 1e-14);
}

#[test]
fn inverse_operators_zero_the_mean() {
    let g = grid(32);
    let f = RealField::from_fn(g.clone(), |x| 1.0 + x.cos()).spectrum();
    assert!((f[0].re - 1.0).abs() < 1e-15);
    for s in [
        Symbol::InvAbsD,
        Symbol::InvDx,
        Symbol::A { g: 1.0, gamma: 0.5 },
        Symbol::Hilbert,
    ] {
        assert_eq!(g.applied(&f, &s)[0], C64::new(0.0, 0.0), "{s:?}");
    }
}

#[test]
fn zero_mean_field_has_small_mode_zero() {
    let f = field(128, 40, 9);
    assert!(f.spectrum()[0].norm() <= 1e-13 * f.l2_norm());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hilbert_squared_is_minus_identity(seed in any::<u64>()) {
        let f = field(64, 31, seed);
        let hh = f.apply_symbol(&Symbol::Hilbert).unwrap().apply_symbol(&Symbol::Hilbert).unwrap();
        let neg: Vec<f64> = f.values().iter().map(|v| -v).collect();
        prop_assert!(max_diff(hh.values(), &neg) < 1e-12 * max_abs(f.values()));
    }

    #[test]
    fn derivative_inverts_antiderivative(seed in any::<u64>()) {
        let f = field(64, 20, seed);
        let a = f.apply_symbol(&Symbol::InvDx).unwrap();
        let back = a.apply_symbol(&Symbol::Dx).unwrap();
        prop_assert!(max_diff(back.values(), f.values()) < 1e-12 * max_abs(f.values()));
        let h = f.apply_symbol(&Symbol::Hilbert).unwrap();
        let d = a.apply_symbol(&Symbol::AbsD).unwrap();
        prop_assert!(max_diff(h.values(), d.values()) < 1e-12 * max_abs(f.values()));
    }

    #[test]
    fn parseval(seed in any::<u64>()) {
        let g = grid(64);
        let mut r = rng(seed);
        let f = random_field(&g, 31, 1.0, &mut r);
        let h = random_field(&g, 31, 1.0, &mut r);
        let prod: Vec<f64> = f.values().iter().zip(h.values()).map(|(a, b)| a * b).collect();
        let phys = g.trapezoid(&prod);
        let spec = g.inner(&f.spectrum(), &h.spectrum());
        let scale = f.l2_norm() * h.l2_norm();
        prop_assert!((phys - spec).abs() < 1e-12 * scale, "{} vs {}", phys, spec);
    }

    #[test]
    fn symbols_are_linear(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let g = grid(32);
        let mut r = rng(seed);
        let f = random_field(&g, 15, 1.0, &mut r);
        let h = random_field(&g, 15, 1.0, &mut r);
        let comb = RealField::new(
            g.clone(),
            f.values().iter().zip(h.values()).map(|(x, y)| a * x + b * y).collect(),
        )
        .unwrap();
        for s in [
            Symbol::Hilbert,
            Symbol::AbsD,
            Symbol::InvAbsD,
            Symbol::Dx,
            Symbol::InvDx,
            Symbol::A { g: 1.0, gamma: -1.5 },
            Symbol::InvA { g: 1.0, gamma: -1.5 },
            Symbol::Omega { g: 1.0, gamma: 2.0 },
        ] {
            let lhs = comb.apply_symbol(&s).unwrap();
            let (sf, sh) = (f.apply_symbol(&s).unwrap(), h.apply_symbol(&s).unwrap());
            let rhs: Vec<f64> = sf.values().iter().zip(sh.values()).map(|(x, y)| a * x + b * y).collect();
            let scale = 1.0 + max_abs(&rhs);
            prop_assert!(max_diff(lhs.values(), &rhs) < 1e-12 * scale, "{:?}", s);
        }
    }

    #[test]
    fn dealiased_product_matches_fine_grid(seed in any::<u64>()) {
        // A product truncated to the grid must equal the exact product on a grid
        // wide enough to hold every sum mode.
        let n = 64;
        let g = grid(n);
        let fine = grid(2 * n);
        let mut r = rng(seed);
        let f = random_field(&g, n / 2 - 1, 1.0, &mut r);
        let h = random_field(&g, n / 2 - 1, 1.0, &mut r);
        let p = f.dealiased_product(&h).unwrap().spectrum();
        let lift = |s: &[C64]| {
            let mut c = vec![C64::new(0.0, 0.0); 2 * n];
            for k in -(n as i64 / 2 - 1)..(n as i64 / 2) {
                c[fine.index_of(k).unwrap()] = s[g.index_of(k).unwrap()];
            }
            RealField::from_spectrum(fine.clone(), &c)
        };
        let exact = lift(&f.spectrum()).dealiased_product(&lift(&h.spectrum())).unwrap().spectrum();
        for k in -(n as i64 / 2 - 1)..(n as i64 / 2) {
            let d = (p[g.index_of(k).unwrap()] - exact[fine.index_of(k).unwrap()]).norm();
            prop_assert!(d < 1e-13, "k={} diff {}", k, d);
        }
    }
}
