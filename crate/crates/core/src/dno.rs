//! Taylor expansion of the deep-water Dirichlet–Neumann operator.
//!
//! Terms `j <= 2` follow the explicit operator formulas. Higher terms use the
//! recursion
//!
//! ```text
//! G_n ξ = (1/n!) |D|^{n-1} D(ηⁿ Dξ) − Σ_{l=1..n} |D|^l [ (η^l / l!) G_{n-l} ξ ]
//! ```
//!
//! with `D = −i∂ₓ`. All products are formed on the 3N/2 padded grid.

use crate::error::{Error, Result};
use crate::spectral::{RealField, SpectralGrid, C64};

pub const DEFAULT_ORDER: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DnoExpansion {
    order: usize,
}

impl Default for DnoExpansion {
    fn default() -> Self {
        Self { order: DEFAULT_ORDER }
    }
}

fn ik(k: f64) -> C64 {
    C64::new(0.0, k)
}

/// `|k|^p · (ik)^q` applied in place, Nyquist cleared.
fn mul_powers(grid: &SpectralGrid, c: &mut [C64], p: i32, q: i32) {
    let ks = grid.wavenumbers();
    for (v, &k) in c.iter_mut().zip(ks) {
        let mut f = C64::new(k.abs().powi(p), 0.0);
        for _ in 0..q {
            f *= ik(k);
        }
        *v *= f;
    }
    c[grid.nyquist_index()] = C64::new(0.0, 0.0);
}

fn pointwise(a: &[f64], b: &[f64], s: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| s * x * y).collect()
}

impl DnoExpansion {
    pub fn new(order: usize) -> Self {
        Self { order }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `[G⁽⁰⁾ξ, …, G⁽ᵘᵖᵗᵒ⁾ξ]` as spectra. The first three use the explicit
    /// formulas, the rest the recursion.
    pub fn terms_spectral(&self, grid: &SpectralGrid, eta: &[C64], xi: &[C64], upto: usize) -> Vec<Vec<C64>> {
        let mut terms: Vec<Vec<C64>> = Vec::with_capacity(upto + 1);
        let g0 = grid.applied(xi, &crate::spectral::Symbol::AbsD);
        let mut dxi = xi.to_vec();
        mul_powers(grid, &mut dxi, 0, 1);
        terms.push(g0.clone());
        if upto == 0 {
            return terms;
        }

        let padded = grid.to_padded_real_many(&[eta, &dxi, &g0]);
        let (ep, dxp, g0p) = (&padded[0], &padded[1], &padded[2]);
        let powers = eta_powers(ep, upto);

        // G1 = DηD − |D|η|D|.
        let (mut a, mut b) = pair(grid, &pointwise(ep, dxp, 1.0), &pointwise(ep, g0p, 1.0));
        mul_powers(grid, &mut a, 0, 1);
        let eta_g0 = b.clone();
        mul_powers(grid, &mut b, 1, 0);
        let g1: Vec<C64> = a.iter().zip(&b).map(|(x, y)| -x - y).collect();
        terms.push(g1);
        if upto == 1 {
            return terms;
        }

        // G2 = −½(|D|²η²|D| + |D|η²|D|² − 2|D|η|D|η|D|).
        let mut d_eta_g0 = eta_g0;
        mul_powers(grid, &mut d_eta_g0, 1, 0);
        let mut dd_xi = g0.clone();
        mul_powers(grid, &mut dd_xi, 1, 0);
        let pads = grid.to_padded_real_many(&[&d_eta_g0, &dd_xi]);
        let e2 = pointwise(ep, ep, 1.0);
        let f = grid.from_padded_real_many(&[
            &pointwise(&e2, g0p, 1.0),
            &pointwise(&e2, &pads[1], 1.0),
            &pointwise(ep, &pads[0], 1.0),
        ]);
        let mut t1 = f[0].clone();
        mul_powers(grid, &mut t1, 2, 0);
        let mut t2: Vec<C64> = f[1].iter().zip(&f[2]).map(|(x, y)| x - 2.0 * y).collect();
        mul_powers(grid, &mut t2, 1, 0);
        let g2: Vec<C64> = t1.iter().zip(&t2).map(|(x, y)| -0.5 * (x + y)).collect();
        terms.push(g2);
        if upto == 2 {
            return terms;
        }

        let mut gpad = vec![g0p.clone()];
        let rest = grid.to_padded_real_many(&[&terms[1], &terms[2]]);
        gpad.extend(rest);
        recurse(grid, &powers, dxp, &mut terms, &mut gpad, upto);
        terms
    }

    /// All terms from the recursion alone, including `j = 1, 2`.
    pub fn recursive_terms_spectral(&self, grid: &SpectralGrid, eta: &[C64], xi: &[C64], upto: usize) -> Vec<Vec<C64>> {
        let g0 = grid.applied(xi, &crate::spectral::Symbol::AbsD);
        let mut dxi = xi.to_vec();
        mul_powers(grid, &mut dxi, 0, 1);
        let padded = grid.to_padded_real_many(&[eta, &dxi, &g0]);
        let powers = eta_powers(&padded[0], upto);
        let mut terms = vec![g0];
        let mut gpad = vec![padded[2].clone()];
        recurse(grid, &powers, &padded[1], &mut terms, &mut gpad, upto);
        terms
    }

    /// `Σ_{j ≤ order} G⁽ʲ⁾ξ` as a spectrum.
    pub fn apply_spectral(&self, grid: &SpectralGrid, eta: &[C64], xi: &[C64]) -> Result<Vec<C64>> {
        let terms = self.terms_spectral(grid, eta, xi, self.order);
        let mut sum = vec![C64::new(0.0, 0.0); grid.n()];
        for t in &terms {
            for (s, v) in sum.iter_mut().zip(t) {
                *s += v;
            }
        }
        if sum.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::numeric("non-finite Dirichlet-Neumann evaluation"));
        }
        Ok(sum)
    }
}

/// `η^l / l!` on the padded grid for `l = 0..=upto`.
fn eta_powers(ep: &[f64], upto: usize) -> Vec<Vec<f64>> {
    let mut powers = vec![vec![1.0; ep.len()]];
    for l in 1..=upto {
        let next = pointwise(&powers[l - 1], ep, 1.0 / l as f64);
        powers.push(next);
    }
    powers
}

fn pair(grid: &SpectralGrid, a: &[f64], b: &[f64]) -> (Vec<C64>, Vec<C64>) {
    grid.from_padded_real_pair(a, Some(b))
}

/// Extend `terms` (and their padded values `gpad`) up to index `upto`.
fn recurse(
    grid: &SpectralGrid,
    powers: &[Vec<f64>],
    dxp: &[f64],
    terms: &mut Vec<Vec<C64>>,
    gpad: &mut Vec<Vec<f64>>,
    upto: usize,
) {
    let n = grid.n();
    for order in terms.len()..=upto {
        // Products: (ηⁿ/n!)ξₓ and (η^l/l!)G_{n−l}ξ for l = 1..n.
        let mut prods: Vec<Vec<f64>> = Vec::with_capacity(order + 1);
        prods.push(pointwise(&powers[order], dxp, 1.0));
        for l in 1..=order {
            prods.push(pointwise(&powers[l], &gpad[order - l], 1.0));
        }
        let refs: Vec<&[f64]> = prods.iter().map(|v| v.as_slice()).collect();
        let spectra = grid.from_padded_real_many(&refs);

        let ks = grid.wavenumbers();
        let mut g = vec![C64::new(0.0, 0.0); n];
        for (i, &k) in ks.iter().enumerate() {
            let ak = k.abs();
            // (1/n!)|D|^{n−1} D(ηⁿ Dξ) = −|D|^{n−1} ∂ₓ[(ηⁿ/n!) ∂ₓξ].
            let mut v = C64::new(0.0, 0.0);
            let mut pow = 1.0;
            for s in &spectra[1..=order] {
                pow *= ak;
                v -= pow * s[i];
            }
            g[i] = v - pow / ak.max(f64::MIN_POSITIVE) * ik(k) * spectra[0][i];
        }
        g[grid.nyquist_index()] = C64::new(0.0, 0.0);
        if order < upto {
            gpad.push(grid.to_padded_real(&g));
        }
        terms.push(g);
    }
}

fn check_inputs(eta: &RealField, xi: &RealField) -> Result<()> {
    if eta.grid().n() != xi.grid().n() {
        return Err(Error::config("eta and xi live on different grids"));
    }
    if !eta.values().iter().chain(xi.values()).all(|v| v.is_finite()) {
        return Err(Error::numeric("non-finite input to the Dirichlet-Neumann operator"));
    }
    Ok(())
}

/// `G⁽ʲ⁾(η)ξ`.
pub fn dno_term(dno: &DnoExpansion, j: usize, eta: &RealField, xi: &RealField) -> Result<RealField> {
    if j > dno.order {
        return Err(Error::Usage(format!(
            "term {j} exceeds the expansion order {}",
            dno.order
        )));
    }
    check_inputs(eta, xi)?;
    let grid = eta.grid();
    let terms = dno.terms_spectral(grid, &eta.spectrum(), &xi.spectrum(), j);
    Ok(RealField::from_spectrum(grid.clone(), &terms[j]))
}

/// `Σ_{j ≤ order} G⁽ʲ⁾(η)ξ`.
pub fn dno_apply(dno: &DnoExpansion, eta: &RealField, xi: &RealField) -> Result<RealField> {
    check_inputs(eta, xi)?;
    let grid = eta.grid();
    let s = dno.apply_spectral(grid, &eta.spectrum(), &xi.spectrum())?;
    Ok(RealField::from_spectrum(grid.clone(), &s))
}
