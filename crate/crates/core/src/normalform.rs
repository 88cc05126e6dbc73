//! Third-order Birkhoff normal form: the auxiliary Hamiltonian `K⁽³⁾`, the
//! flow it generates, envelope ↔ surface reconstruction, and oracle
//! evaluations of `H⁽²⁾`, `H⁽³⁾`, `K⁽³⁾` by triad sums.
//!
//! The flow right-hand sides are quadratic, so each is stored as a list of
//! `coef · Outer(A · B)` terms over the fields `η, η̃, ∂ₓη, ∂ₓη̃, ∂ₓ⁻¹η,
//! ∂ₓ⁻¹η̃, ζ, ζ̃, ∂ₓζ, ∂ₓζ̃` with `f̃ = Hf`. The η-equation keeps the mean its
//! products generate; the mean of ζ is held at zero.

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use crate::coeffs::{big_omega, omega, PhysicalParams};
use crate::error::{Error, Result};
use crate::euler::{eta_zeta_from_z, h2_from_z, z_spectrum, CanonicalState};
use crate::spectral::{sgn, ComplexField, RealField, SpectralGrid, Symbol, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Largest grid accepted by the O(N²) triad-sum oracles.
pub const ORACLE_MAX_N: usize = 64;

/// State of the auxiliary flow at flow time `s`.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub eta: RealField,
    pub zeta: RealField,
    pub s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum F {
    Eta,
    EtaT,
    EtaX,
    EtaTX,
    IEta,
    IEtaT,
    Zeta,
    ZetaT,
    ZetaX,
    ZetaTX,
}

const FIELDS: [F; 10] = [
    F::Eta,
    F::EtaT,
    F::EtaX,
    F::EtaTX,
    F::IEta,
    F::IEtaT,
    F::Zeta,
    F::ZetaT,
    F::ZetaX,
    F::ZetaTX,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outer {
    Id,
    H,
    AbsD,
    InvAbsD,
    Dx,
    InvDx,
}

const OUTERS: [Outer; 6] = [
    Outer::Id,
    Outer::H,
    Outer::AbsD,
    Outer::InvAbsD,
    Outer::Dx,
    Outer::InvDx,
];

impl Outer {
    fn symbol(self) -> Option<Symbol> {
        match self {
            Outer::Id => None,
            Outer::H => Some(Symbol::Hilbert),
            Outer::AbsD => Some(Symbol::AbsD),
            Outer::InvAbsD => Some(Symbol::InvAbsD),
            Outer::Dx => Some(Symbol::Dx),
            Outer::InvDx => Some(Symbol::InvDx),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Term {
    coef: f64,
    outer: Outer,
    a: F,
    b: F,
}

fn t(coef: f64, outer: Outer, a: F, b: F) -> Term {
    Term { coef, outer, a, b }
}

/// `∂ₛη = ∂_ζ K⁽³⁾`.
fn eta_terms(gamma: f64, g: f64) -> Vec<Term> {
    use Outer::*;
    use F::*;
    let (g1, g2, g3, g4) = (gamma, gamma.powi(2), gamma.powi(3), gamma.powi(4));
    let c1 = g1 / (2.0 * g);
    let c2 = g2 / (4.0 * g * g);
    let c2b = g2 / (4.0 * g);
    let c3 = -g3 / (8.0 * g * g);
    let c4 = g4 / (16.0 * g * g);
    vec![
        // ½H∂ₓ(η̃²) = ½|D|(η̃²)
        t(0.5, AbsD, EtaT, EtaT),
        t(c1, Id, Zeta, EtaX),
        t(-c1, Id, EtaT, ZetaTX),
        t(-c1, AbsD, Zeta, EtaT),
        t(c2, Id, Zeta, ZetaTX),
        t(0.5 * c2, AbsD, Zeta, Zeta),
        t(-c2b, Id, IEta, EtaX),
        t(c2b, H, Eta, EtaT),
        t(c2b, AbsD, EtaT, IEta),
        t(c3, Id, Zeta, EtaT),
        t(c3, Id, ZetaTX, IEta),
        t(c3, AbsD, Zeta, IEta),
        t(c4, H, Eta, IEta),
        t(c4, Id, EtaT, IEta),
    ]
}

/// `∂ₛζ = −∂_η K⁽³⁾`.
fn zeta_terms(gamma: f64, g: f64) -> Vec<Term> {
    use Outer::*;
    use F::*;
    let (g1, g2, g3, g4, g5) = (gamma, gamma.powi(2), gamma.powi(3), gamma.powi(4), gamma.powi(5));
    let c1 = g1 / 2.0;
    let c1b = g1 / (2.0 * g);
    let c2 = -g2 / (4.0 * g);
    let c3 = g3 / (8.0 * g);
    let c3b = -g3 / (16.0 * g * g);
    let c4 = g4 / (16.0 * g * g);
    let c5 = -g5 / (64.0 * g * g);
    vec![
        t(1.0, H, EtaT, ZetaTX),
        t(c1, Id, Eta, EtaT),
        t(-0.5 * c1, H, Eta, Eta),
        t(c1b, Id, Zeta, ZetaX),
        t(-c1b, H, Zeta, ZetaTX),
        t(c2, Dx, Zeta, IEta),
        t(c2, InvDx, Zeta, EtaX),
        t(-c2, Id, ZetaT, EtaT),
        t(c2, H, Eta, ZetaT),
        t(-c2, H, ZetaTX, IEta),
        t(-c2, InvDx, ZetaTX, EtaT),
        t(c3, InvDx, EtaTX, IEtaT),
        t(-c3, AbsD, IEta, IEtaT),
        t(c3, InvAbsD, EtaTX, IEta),
        t(c3b, H, Zeta, Zeta),
        t(2.0 * c3b, InvDx, Zeta, ZetaTX),
        t(c4, Id, ZetaT, IEta),
        t(-c4, InvDx, Eta, ZetaT),
        t(c4, H, Zeta, IEta),
        t(c4, InvDx, Zeta, EtaT),
        t(c5, H, IEta, IEta),
        t(2.0 * c5, InvDx, EtaT, IEta),
    ]
}

/// Spectrum of each derived field from `η̂, ζ̂`.
fn field_spectra(grid: &SpectralGrid, eta: &[C64], zeta: &[C64]) -> Vec<Vec<C64>> {
    let mult = |c: &[C64], f: fn(f64) -> C64| {
        let mut out = c.to_vec();
        grid.apply_fn(&mut out, f);
        out[0] = ZERO;
        out
    };
    FIELDS
        .iter()
        .map(|f| match f {
            F::Eta => mult(eta, |_| C64::new(1.0, 0.0)),
            F::EtaT => mult(eta, |k| C64::new(0.0, -sgn(k))),
            F::EtaX => mult(eta, |k| C64::new(0.0, k)),
            F::EtaTX => mult(eta, |k| C64::new(k.abs(), 0.0)),
            F::IEta => mult(eta, |k| if k == 0.0 { ZERO } else { C64::new(0.0, -1.0 / k) }),
            F::IEtaT => mult(eta, |k| if k == 0.0 { ZERO } else { C64::new(-1.0 / k.abs(), 0.0) }),
            F::Zeta => mult(zeta, |_| C64::new(1.0, 0.0)),
            F::ZetaT => mult(zeta, |k| C64::new(0.0, -sgn(k))),
            F::ZetaX => mult(zeta, |k| C64::new(0.0, k)),
            F::ZetaTX => mult(zeta, |k| C64::new(k.abs(), 0.0)),
        })
        .collect()
}

fn index(f: F) -> usize {
    FIELDS.iter().position(|&x| x == f).unwrap()
}

/// Generator of the normal-form flow for fixed parameters.
#[derive(Debug, Clone)]
pub struct NormalFormFlow {
    grid: Arc<SpectralGrid>,
    eta_terms: Vec<Term>,
    zeta_terms: Vec<Term>,
}

impl NormalFormFlow {
    pub fn new(grid: Arc<SpectralGrid>, params: &PhysicalParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            grid,
            eta_terms: eta_terms(params.gamma, params.g),
            zeta_terms: zeta_terms(params.gamma, params.g),
        })
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    fn assemble(&self, pads: &[Vec<f64>], terms: &[Term], keep_mean: bool) -> Vec<C64> {
        let m = self.grid.padded_len();
        let mut groups: Vec<(Outer, Vec<f64>)> = Vec::new();
        for outer in OUTERS {
            let mut acc = vec![0.0; m];
            let mut used = false;
            for term in terms.iter().filter(|t| t.outer == outer && t.coef != 0.0) {
                let (a, b) = (&pads[index(term.a)], &pads[index(term.b)]);
                for j in 0..m {
                    acc[j] += term.coef * a[j] * b[j];
                }
                used = true;
            }
            if used {
                groups.push((outer, acc));
            }
        }
        let refs: Vec<&[f64]> = groups.iter().map(|(_, v)| v.as_slice()).collect();
        let spectra = self.grid.from_padded_real_many(&refs);
        let mut out = vec![ZERO; self.grid.n()];
        for ((outer, _), mut s) in groups.into_iter().zip(spectra) {
            if let Some(sym) = outer.symbol() {
                self.grid.apply(&mut s, &sym);
            }
            for (o, v) in out.iter_mut().zip(&s) {
                *o += v;
            }
        }
        if !keep_mean {
            out[0] = ZERO;
        }
        out[self.grid.nyquist_index()] = ZERO;
        out
    }

    /// `(∂ₛη̂, ∂ₛζ̂)`. The η-equation keeps its mean, which the `γ/2g` group
    /// makes nonzero. The mean of `η` is carried along but does not enter the
    /// products; the mean of `ζ` is a gauge and is held at zero.
    pub fn rhs_spectral(&self, eta: &[C64], zeta: &[C64]) -> (Vec<C64>, Vec<C64>) {
        let spectra = field_spectra(&self.grid, eta, zeta);
        let refs: Vec<&[C64]> = spectra.iter().map(|v| v.as_slice()).collect();
        let pads = self.grid.to_padded_real_many(&refs);
        (
            self.assemble(&pads, &self.eta_terms, true),
            self.assemble(&pads, &self.zeta_terms, false),
        )
    }

    /// RK4 from `s0` to `s1` in steps of magnitude close to `ds`.
    pub fn integrate(&self, eta: &[C64], zeta: &[C64], s0: f64, s1: f64, ds: f64) -> Result<(Vec<C64>, Vec<C64>)> {
        if !(ds > 0.0 && ds.is_finite()) {
            return Err(Error::config(format!("ds must be positive, got {ds}")));
        }
        let steps = ((s1 - s0).abs() / ds).round().max(1.0) as usize;
        let h = (s1 - s0) / steps as f64;
        let mut e = eta.to_vec();
        e[self.grid.nyquist_index()] = ZERO;
        let mut z = zeta.to_vec();
        z[0] = ZERO;
        let add = |x: &[C64], s: f64, y: &[C64]| -> Vec<C64> { x.iter().zip(y).map(|(a, b)| a + s * b).collect() };
        for i in 0..steps {
            let (k1e, k1z) = self.rhs_spectral(&e, &z);
            let (k2e, k2z) = self.rhs_spectral(&add(&e, 0.5 * h, &k1e), &add(&z, 0.5 * h, &k1z));
            let (k3e, k3z) = self.rhs_spectral(&add(&e, 0.5 * h, &k2e), &add(&z, 0.5 * h, &k2z));
            let (k4e, k4z) = self.rhs_spectral(&add(&e, h, &k3e), &add(&z, h, &k3z));
            for j in 0..e.len() {
                e[j] += h / 6.0 * (k1e[j] + 2.0 * k2e[j] + 2.0 * k3e[j] + k4e[j]);
                z[j] += h / 6.0 * (k1z[j] + 2.0 * k2z[j] + 2.0 * k3z[j] + k4z[j]);
            }
            if e.iter().chain(&z).any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                let s = s0 + (i + 1) as f64 * h;
                return Err(Error::numeric_at(format!("normal-form flow blew up at s = {s:.6}"), i));
            }
        }
        Ok((e, z))
    }
}

/// `(∂ₛη, ∂ₛζ)` of the normal-form flow.
pub fn k3_rhs(state: &FlowState, params: &PhysicalParams) -> Result<(RealField, RealField)> {
    let grid = state.eta.grid();
    let flow = NormalFormFlow::new(grid.clone(), params)?;
    let (a, b) = flow.rhs_spectral(&state.eta.spectrum(), &state.zeta.spectrum());
    if a.iter().chain(&b).any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::numeric(format!("non-finite normal-form rhs at s = {}", state.s)));
    }
    Ok((
        RealField::from_spectrum(grid.clone(), &a),
        RealField::from_spectrum(grid.clone(), &b),
    ))
}

fn carrier(p: &PhysicalParams) -> i64 {
    p.k0.round() as i64
}

/// `ẑ_{k₀+λ} = û_λ`; modes pushed past the resolved band are dropped.
pub fn modulate(grid: &SpectralGrid, u: &[C64], k0: i64) -> Vec<C64> {
    let mut z = vec![ZERO; grid.n()];
    for (i, &k) in grid.wavenumbers().iter().enumerate() {
        if let Some(j) = grid.index_of(k as i64 + k0) {
            if j != grid.nyquist_index() {
                z[j] = u[i];
            }
        }
    }
    z
}

/// `û_λ = ẑ_{k₀+λ}`.
pub fn demodulate(grid: &SpectralGrid, z: &[C64], k0: i64) -> Vec<C64> {
    let mut u = vec![ZERO; grid.n()];
    for (i, &k) in grid.wavenumbers().iter().enumerate() {
        if let Some(j) = grid.index_of(k as i64 + k0) {
            u[i] = z[j];
        }
    }
    u
}

fn seed(u: &ComplexField, p: &PhysicalParams) -> (Vec<C64>, Vec<C64>) {
    let grid = u.grid();
    let z = modulate(grid, &u.spectrum(), carrier(p));
    eta_zeta_from_z(grid, p, &z)
}

/// First-harmonic reconstruction: `z = u e^{ik₀x}` mapped back to `(η, ζ)`.
pub fn partial_reconstruct(u: &ComplexField, params: &PhysicalParams) -> CanonicalState {
    let grid = u.grid();
    let (eta, zeta) = seed(u, params);
    CanonicalState {
        eta: RealField::from_spectrum(grid.clone(), &eta),
        zeta: RealField::from_spectrum(grid.clone(), &zeta),
        time: 0.0,
    }
}

/// Full reconstruction: seed at `s = 0` and integrate the flow to `s = −1`.
pub fn envelope_to_surface(u: &ComplexField, params: &PhysicalParams, ds: f64) -> Result<CanonicalState> {
    let grid = u.grid();
    let flow = NormalFormFlow::new(grid.clone(), params)?;
    let (eta, zeta) = seed(u, params);
    let (eta, zeta) = flow.integrate(&eta, &zeta, 0.0, -1.0, ds)?;
    Ok(CanonicalState {
        eta: RealField::from_spectrum(grid.clone(), &eta),
        zeta: RealField::from_spectrum(grid.clone(), &zeta),
        time: 0.0,
    })
}

/// Forward transform: flow from `s = −1` to `s = 0`, then `u = z e^{−ik₀x}`.
pub fn surface_to_envelope(state: &CanonicalState, params: &PhysicalParams, ds: f64) -> Result<ComplexField> {
    let grid = state.eta.grid();
    let flow = NormalFormFlow::new(grid.clone(), params)?;
    let (eta, zeta) = flow.integrate(&state.eta.spectrum(), &state.zeta.spectrum(), -1.0, 0.0, ds)?;
    let z = z_spectrum(grid, params, &eta, &zeta);
    Ok(ComplexField::from_spectrum(
        grid.clone(),
        &demodulate(grid, &z, carrier(params)),
    ))
}

/// `H⁽²⁾ = ∫Ω_k|z_k|² dk`.
pub fn h2(state: &CanonicalState, p: &PhysicalParams) -> f64 {
    let grid = state.eta.grid();
    h2_from_z(
        grid,
        p,
        &z_spectrum(grid, p, &state.eta.spectrum(), &state.zeta.spectrum()),
    )
}

/// Physical-space `K⁽³⁾` by trapezoid quadrature on the padded grid, where the
/// cubic integrand is integrated exactly.
pub fn k3_physical(state: &CanonicalState, p: &PhysicalParams) -> f64 {
    let grid = state.eta.grid();
    let mut eta = state.eta.spectrum();
    let mut zeta = state.zeta.spectrum();
    eta[0] = ZERO;
    zeta[0] = ZERO;
    let spectra = field_spectra(grid, &eta, &zeta);
    let refs: Vec<&[C64]> = spectra.iter().map(|v| v.as_slice()).collect();
    let f = grid.to_padded_real_many(&refs);
    let (e, et, ex, etx, ie, iet) = (&f[0], &f[1], &f[2], &f[3], &f[4], &f[5]);
    let (z, zt, _zx, ztx) = (&f[6], &f[7], &f[8], &f[9]);
    let (gam, g) = (p.gamma, p.g);
    let mut sum = 0.0;
    for j in 0..e.len() {
        let v = 0.5 * et[j] * et[j] * ztx[j]
            - gam / (4.0 * g) * (g * e[j] * e[j] * et[j] - z[j] * z[j] * ex[j] + 2.0 * z[j] * et[j] * ztx[j])
            - gam.powi(2) / (4.0 * g * g)
                * (g * ie[j] * ex[j] * z[j] + g * e[j] * et[j] * zt[j]
                    - g * et[j] * ztx[j] * ie[j]
                    - 0.5 * z[j] * z[j] * ztx[j])
            - gam.powi(3) / (16.0 * g * g)
                * (z[j] * z[j] * et[j] + 2.0 * z[j] * ztx[j] * ie[j] - 2.0 * g * ie[j] * etx[j] * iet[j])
            - gam.powi(4) / (16.0 * g * g) * (e[j] * zt[j] - et[j] * z[j]) * ie[j]
            - gam.powi(5) / (64.0 * g * g) * et[j] * ie[j] * ie[j];
        sum += v;
    }
    sum * 2.0 * PI / e.len() as f64
}

/// Grid size, wavenumbers, and the spectra of η and ζ.
type OracleSpectra = (usize, Vec<f64>, Vec<C64>, Vec<C64>);

fn oracle_spectra(state: &CanonicalState) -> Result<OracleSpectra> {
    let grid = state.eta.grid();
    let n = grid.n();
    if n > ORACLE_MAX_N {
        return Err(Error::Usage(format!(
            "triad-sum oracle limited to N <= {ORACLE_MAX_N}, got N = {n}"
        )));
    }
    Ok((
        n,
        grid.wavenumbers().to_vec(),
        state.eta.spectrum(),
        state.zeta.spectrum(),
    ))
}

/// Visit every triad `k₁ + k₂ + k₃ = 0` of resolved nonzero modes.
fn for_each_triad(n: usize, ks: &[f64], mut f: impl FnMut([usize; 3], [f64; 3])) {
    let h = (n / 2) as i64;
    for i1 in 1..n {
        for i2 in 1..n {
            if i1 == n / 2 || i2 == n / 2 {
                continue;
            }
            let (k1, k2) = (ks[i1], ks[i2]);
            let k3 = -(k1 + k2) as i64;
            if k3 == 0 || k3 <= -h || k3 >= h {
                continue;
            }
            let i3 = k3.rem_euclid(n as i64) as usize;
            f([i1, i2, i3], [k1, k2, k3 as f64]);
        }
    }
}

fn checked_real(v: C64, what: &str) -> Result<f64> {
    if !v.re.is_finite() || v.im.abs() > 1e-8 * v.re.abs().max(1e-300) + 1e-300 {
        return Err(Error::numeric(format!("{what}: triad sum not real ({v})")));
    }
    Ok(v.re)
}

/// `H⁽³⁾` by the triad sum over `k₁+k₂+k₃ = 0`.
pub fn h3_spectral(state: &CanonicalState, p: &PhysicalParams) -> Result<f64> {
    let (n, ks, e, z) = oracle_spectra(state)?;
    let mut acc = ZERO;
    for_each_triad(n, &ks, |[i1, i2, i3], [k1, k2, k3]| {
        let w = 1.0 + sgn(k1) * sgn(k3);
        if w == 0.0 {
            return;
        }
        acc += w
            * (k1.abs() * k3.abs() * z[i1] * e[i2] * z[i3] + C64::new(0.0, 0.5 * p.gamma * k2) * e[i1] * z[i2] * e[i3]);
    });
    // −1/(2√(2π)) times (2π)^{3/2} from the discrete normalization.
    checked_real(-PI * acc, "H3")
}

/// `K⁽³⁾` by the triad sum of its `(η, ζ)` Fourier form.
pub fn k3_spectral(state: &CanonicalState, p: &PhysicalParams) -> Result<f64> {
    let (n, ks, e, z) = oracle_spectra(state)?;
    let (gam, g) = (p.gamma, p.g);
    let i = C64::new(0.0, 1.0);
    let mut acc = ZERO;
    for_each_triad(n, &ks, |[i1, i2, i3], [k1, k2, k3]| {
        let w = 1.0 + sgn(k1) * sgn(k3);
        if w == 0.0 {
            return;
        }
        let (a1, a2, a3) = (k1.abs(), k2.abs(), k3.abs());
        let s2 = sgn(k2);
        let big = (gam.powi(4) / 8.0 + gam * gam / 2.0 * g * a2 + g * g * a1 * a3) / (g * g * a1 * a3);
        let first = -0.5 * gam * s2 * e[i1] * e[i2] * e[i3] + i * a2 * e[i1] * z[i2] * e[i3]
            - 2.0 * i * a3 * e[i1] * e[i2] * z[i3];
        let w2 = omega(k2, p).powi(2);
        let w3 = omega(k3, p).powi(2);
        let second = 2.0 * w3 * a1 * a2 * z[i1] * z[i2] * e[i3] - w2 * a1 * a3 * z[i1] * e[i2] * z[i3]
            + i * 0.5 * gam * s2 * a1 * a2 * a3 * z[i1] * z[i2] * z[i3];
        acc += w * (-big * first + gam * s2 / (g * g * a1 * a3) * second);
    });
    // (2π)^{3/2} / (4i√(2π)) = π/(2i).
    checked_real(acc * PI / (2.0 * i), "K3")
}

/// `K⁽³⁾` by the triad sum of its complex-coordinate form, with the smallest
/// `|Ω|`-combination denominator met in the sum.
pub fn k3_spectral_z(state: &CanonicalState, p: &PhysicalParams) -> Result<(f64, f64)> {
    let (n, ks, e, zeta) = oracle_spectra(state)?;
    let grid = state.eta.grid();
    let z = z_spectrum(grid, p, &e, &zeta);
    let neg = |idx: usize| (n - idx) % n;
    let a = |k: f64| (omega(k, p) / k.abs()).sqrt();
    let om = |k: f64| big_omega(k, p);
    let mut acc = ZERO;
    let mut min_den = f64::INFINITY;
    for_each_triad(n, &ks, |[i1, i2, i3], [k1, k2, k3]| {
        let w = 1.0 + sgn(k1) * sgn(k3);
        if w == 0.0 {
            return;
        }
        let kern = w / (a(k1) * a(k2) * a(k3)) * (omega(k1, p) * omega(k3, p) - 0.5 * p.gamma * omega(k2, p) * sgn(k2));
        let d1 = om(k1) + om(k2) + om(k3);
        let d2 = om(-k1) + om(-k2) - om(k3);
        let d3 = om(-k1) - om(k2) + om(-k3);
        min_den = min_den.min(d1.abs()).min(d2.abs()).min(d3.abs());
        let (z1, z2, z3) = (z[i1], z[i2], z[i3]);
        let (m1, m2, m3) = (z[neg(i1)], z[neg(i2)], z[neg(i3)]);
        let t1 = (z1 * z2 * z3 - (z1 * z2 * z3).conj()) / d1;
        let t2 = 2.0 * (m1.conj() * m2.conj() * z3 - m1 * m2 * z3.conj()) / d2;
        let t3 = (m1.conj() * z2 * m3.conj() - m1 * z2.conj() * m3) / d3;
        acc += kern * (t1 + t2 - t3);
    });
    // (2π)^{3/2} / (8i√π) = π/(2√2 i).
    let v = checked_real(acc * PI / (2.0 * SQRT_2 * C64::new(0.0, 1.0)), "K3 (z form)")?;
    Ok((v, min_den))
}

/// Oracle values on a small grid.
#[derive(Debug, Clone, Copy)]
pub struct Functionals {
    pub h2: f64,
    pub h3: f64,
    pub k3_physical: f64,
    pub k3_spectral: f64,
    pub k3_spectral_z: f64,
    /// Smallest `|Ω|`-combination denominator in the complex-coordinate sum.
    pub min_denominator: f64,
}

pub fn functionals(state: &CanonicalState, params: &PhysicalParams) -> Result<Functionals> {
    let (k3z, min_den) = k3_spectral_z(state, params)?;
    Ok(Functionals {
        h2: h2(state, params),
        h3: h3_spectral(state, params)?,
        k3_physical: k3_physical(state, params),
        k3_spectral: k3_spectral(state, params)?,
        k3_spectral_z: k3z,
        min_denominator: min_den,
    })
}
