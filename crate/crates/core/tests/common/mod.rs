#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use shearwave::{RealField, SpectralGrid, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn grid(n: usize) -> Arc<SpectralGrid> {
    SpectralGrid::shared(n).unwrap()
}

/// Zero-mean real field with random coefficients on modes `1..=kmax`,
/// each of size at most `amp`.
pub fn random_field(grid: &Arc<SpectralGrid>, kmax: usize, amp: f64, rng: &mut impl Rng) -> RealField {
    let n = grid.n();
    let mut c = vec![C64::new(0.0, 0.0); n];
    for k in 1..=kmax {
        let v = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * (0.5 * amp);
        c[k] = v;
        c[n - k] = v.conj();
    }
    RealField::from_spectrum(grid.clone(), &c)
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn spec_max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

pub fn spec_max(a: &[C64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.norm()))
}
