//! Full nonlinear water-wave system in surface variables with constant
//! vorticity, its invariants, and the canonical changes of variables.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::Arc;

use crate::coeffs::PhysicalParams;
use crate::dno::DnoExpansion;
use crate::error::{Error, Result};
use crate::spectral::{sgn, ComplexField, RealField, SpectralGrid, Symbol, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Surface elevation and trace of the velocity potential.
#[derive(Debug, Clone)]
pub struct SurfaceState {
    pub eta: RealField,
    pub xi: RealField,
    pub time: f64,
}

/// Surface elevation and canonical potential `ζ = ξ − (γ/2)∂ₓ⁻¹η`.
#[derive(Debug, Clone)]
pub struct CanonicalState {
    pub eta: RealField,
    pub zeta: RealField,
    pub time: f64,
}

/// Surface state held as spectra, used by the time stepper.
#[derive(Debug, Clone)]
pub struct SpectralSurface {
    pub eta: Vec<C64>,
    pub xi: Vec<C64>,
    pub time: f64,
}

impl SpectralSurface {
    /// `∫η dx = 2π η̂₀`; the stepper leaves `η̂₀` exactly unchanged.
    pub fn volume(&self) -> f64 {
        2.0 * PI * self.eta[0].re
    }
}

impl SurfaceState {
    pub fn rest(grid: Arc<SpectralGrid>) -> Self {
        Self {
            eta: RealField::zeros(grid.clone()),
            xi: RealField::zeros(grid),
            time: 0.0,
        }
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        self.eta.grid()
    }

    pub fn to_spectral(&self) -> SpectralSurface {
        SpectralSurface {
            eta: self.eta.spectrum(),
            xi: self.xi.spectrum(),
            time: self.time,
        }
    }

    pub fn from_spectral(grid: &Arc<SpectralGrid>, s: &SpectralSurface) -> Self {
        Self {
            eta: RealField::from_spectrum(grid.clone(), &s.eta),
            xi: RealField::from_spectrum(grid.clone(), &s.xi),
            time: s.time,
        }
    }

    fn check(&self) -> Result<()> {
        if self.eta.grid().n() != self.xi.grid().n() {
            return Err(Error::config("eta and xi live on different grids"));
        }
        if !self.eta.values().iter().chain(self.xi.values()).all(|v| v.is_finite()) {
            return Err(Error::numeric("non-finite surface state"));
        }
        Ok(())
    }
}

fn scaled(grid: &SpectralGrid, c: &[C64], f: impl Fn(f64) -> C64) -> Vec<C64> {
    let mut out = c.to_vec();
    grid.apply_fn(&mut out, f);
    out
}

fn dx(grid: &SpectralGrid, c: &[C64]) -> Vec<C64> {
    scaled(grid, c, |k| C64::new(0.0, k))
}

fn inv_dx(grid: &SpectralGrid, c: &[C64]) -> Vec<C64> {
    grid.applied(c, &Symbol::InvDx)
}

fn all_finite(c: &[C64]) -> bool {
    c.iter().all(|v| v.re.is_finite() && v.im.is_finite())
}

/// Spectral right-hand side. Returns `(∂ₜη̂, ∂ₜξ̂)`, or only the part left
/// after removing the linear operator when `remainder` is set.
fn rhs_spectral(
    grid: &SpectralGrid,
    p: &PhysicalParams,
    dno: &DnoExpansion,
    eta: &[C64],
    xi: &[C64],
    remainder: bool,
) -> Result<(Vec<C64>, Vec<C64>)> {
    let gam = p.gamma;
    let gxi = dno.apply_spectral(grid, eta, xi)?;
    let etax = dx(grid, eta);
    let xix = dx(grid, xi);
    let pads = grid.to_padded_real_many(&[eta, &etax, &xix, &gxi]);
    let (e, ex, sx, gp) = (&pads[0], &pads[1], &pads[2], &pads[3]);

    let m = e.len();
    let mut pq = vec![0.0; m];
    let mut qq = vec![0.0; m];
    for j in 0..m {
        let w = gp[j] + ex[j] * sx[j];
        pq[j] = -0.5 * sx[j] * sx[j] + 0.5 * w * w / (1.0 + ex[j] * ex[j]) + gam * e[j] * sx[j];
        qq[j] = gam * e[j] * ex[j];
    }
    let f = grid.from_padded_real_many(&[&pq, &qq]);
    let (fp, fq) = (&f[0], &f[1]);

    let ks = grid.wavenumbers();
    let n = grid.n();
    let mut deta = vec![ZERO; n];
    let mut dxi = vec![ZERO; n];
    // ∂ₓ⁻¹ applied to Gξ (or to Gξ − |D|ξ for the remainder).
    for i in 0..n {
        let k = ks[i];
        let g_lin = if remainder { k.abs() * xi[i] } else { ZERO };
        let gn = gxi[i] - g_lin;
        deta[i] = gn + fq[i];
        let inv = if k == 0.0 { ZERO } else { gn * C64::new(0.0, -1.0 / k) };
        dxi[i] = fp[i] + gam * inv;
        if !remainder {
            dxi[i] -= p.g * eta[i];
        }
    }
    deta[0] = ZERO;
    deta[n / 2] = ZERO;
    dxi[n / 2] = ZERO;
    if !all_finite(&deta) || !all_finite(&dxi) {
        return Err(Error::numeric("non-finite right-hand side"));
    }
    Ok((deta, dxi))
}

/// `(∂ₜη, ∂ₜξ)` of the full system.
pub fn rhs_full(state: &SurfaceState, params: &PhysicalParams, dno: &DnoExpansion) -> Result<(RealField, RealField)> {
    state.check()?;
    let grid = state.grid();
    let (a, b) = rhs_spectral(grid, params, dno, &state.eta.spectrum(), &state.xi.spectrum(), false)?;
    Ok((
        RealField::from_spectrum(grid.clone(), &a),
        RealField::from_spectrum(grid.clone(), &b),
    ))
}

/// Per-mode propagator of `∂ₜη = |D|ξ, ∂ₜξ = −gη + γHξ` as a row-major 2×2.
pub fn linear_propagator(k: f64, t: f64, p: &PhysicalParams) -> [C64; 4] {
    if k == 0.0 {
        return [C64::new(1.0, 0.0), ZERO, C64::new(-p.g * t, 0.0), C64::new(1.0, 0.0)];
    }
    let s = sgn(k);
    let w = crate::coeffs::omega(k, p);
    let (c, sn) = ((w * t).cos(), (w * t).sin() / w);
    let phase = C64::from_polar(1.0, -0.5 * p.gamma * s * t);
    let shift = C64::new(0.0, 0.5 * p.gamma * s);
    // L + (iγs/2)I = [[iγs/2, |k|], [−g, −iγs/2]].
    let m = [shift, C64::new(k.abs(), 0.0), C64::new(-p.g, 0.0), -shift];
    [
        phase * (c + sn * m[0]),
        phase * (sn * m[1]),
        phase * (sn * m[2]),
        phase * (c + sn * m[3]),
    ]
}

fn apply_prop(e: &[[C64; 4]], a: &[C64], b: &[C64]) -> (Vec<C64>, Vec<C64>) {
    let mut x = vec![ZERO; a.len()];
    let mut y = vec![ZERO; a.len()];
    for i in 0..a.len() {
        let m = &e[i];
        x[i] = m[0] * a[i] + m[1] * b[i];
        y[i] = m[2] * a[i] + m[3] * b[i];
    }
    (x, y)
}

fn axpy(y: &[C64], s: f64, x: &[C64]) -> Vec<C64> {
    y.iter().zip(x).map(|(a, b)| a + s * b).collect()
}

/// Integrating-factor RK4 stepper for the full system.
#[derive(Debug, Clone)]
pub struct EulerStepper {
    grid: Arc<SpectralGrid>,
    params: PhysicalParams,
    dno: DnoExpansion,
    dt: f64,
    half: Vec<[C64; 4]>,
    full: Vec<[C64; 4]>,
    /// Abort once `max|η|` may exceed this bound.
    pub crest_limit: Option<f64>,
    steps: usize,
}

impl EulerStepper {
    pub fn new(grid: Arc<SpectralGrid>, params: PhysicalParams, dno: DnoExpansion, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::config(format!("dt must be positive, got {dt}")));
        }
        params.validate()?;
        let ks = grid.wavenumbers();
        let half = ks.iter().map(|&k| linear_propagator(k, 0.5 * dt, &params)).collect();
        let full = ks.iter().map(|&k| linear_propagator(k, dt, &params)).collect();
        Ok(Self {
            grid,
            params,
            dno,
            dt,
            half,
            full,
            crest_limit: None,
            steps: 0,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn dno(&self) -> &DnoExpansion {
        &self.dno
    }

    pub fn steps_taken(&self) -> usize {
        self.steps
    }

    fn nonlinear(&self, a: &[C64], b: &[C64]) -> Result<(Vec<C64>, Vec<C64>)> {
        rhs_spectral(&self.grid, &self.params, &self.dno, a, b, true)
    }

    /// Advance a spectral state by one step in place.
    pub fn step_spectral(&mut self, s: &mut SpectralSurface) -> Result<()> {
        let step = self.steps;
        let tag = |e: Error| match e {
            Error::Numeric { context, .. } => Error::numeric_at(context, step),
            other => other,
        };
        let h = self.dt;
        let (w0, w1) = (&s.eta, &s.xi);
        let (a0, a1) = self.nonlinear(w0, w1).map_err(tag)?;

        let (b_in0, b_in1) = apply_prop(&self.half, &axpy(w0, 0.5 * h, &a0), &axpy(w1, 0.5 * h, &a1));
        let (b0, b1) = self.nonlinear(&b_in0, &b_in1).map_err(tag)?;

        let (ew0, ew1) = apply_prop(&self.half, w0, w1);
        let (c0, c1) = self
            .nonlinear(&axpy(&ew0, 0.5 * h, &b0), &axpy(&ew1, 0.5 * h, &b1))
            .map_err(tag)?;

        let (e2w0, e2w1) = apply_prop(&self.full, w0, w1);
        let (ec0, ec1) = apply_prop(&self.half, &c0, &c1);
        let (d0, d1) = self
            .nonlinear(&axpy(&e2w0, h, &ec0), &axpy(&e2w1, h, &ec1))
            .map_err(tag)?;

        let (e2a0, e2a1) = apply_prop(&self.full, &a0, &a1);
        let bc0: Vec<C64> = b0.iter().zip(&c0).map(|(x, y)| x + y).collect();
        let bc1: Vec<C64> = b1.iter().zip(&c1).map(|(x, y)| x + y).collect();
        let (ebc0, ebc1) = apply_prop(&self.half, &bc0, &bc1);

        let n = w0.len();
        let mut n0 = vec![ZERO; n];
        let mut n1 = vec![ZERO; n];
        for i in 0..n {
            n0[i] = e2w0[i] + h / 6.0 * (e2a0[i] + 2.0 * ebc0[i] + d0[i]);
            n1[i] = e2w1[i] + h / 6.0 * (e2a1[i] + 2.0 * ebc1[i] + d1[i]);
        }
        // Volume is conserved exactly.
        n0[0] = w0[0];
        if !all_finite(&n0) || !all_finite(&n1) {
            return Err(Error::numeric_at("non-finite state after step", step));
        }
        if let Some(limit) = self.crest_limit {
            // Σ|η̂_k| bounds max|η|; only transform when the bound is exceeded.
            let bound: f64 = n0.iter().map(|c| c.norm()).sum();
            if bound > limit {
                let crest = self.grid.inverse_real(&n0).iter().fold(0.0f64, |m, v| m.max(v.abs()));
                if crest > limit {
                    return Err(Error::numeric_at(
                        format!(
                            "blow-up: max|eta| = {crest:.6e} exceeds {limit:.6e} at t = {:.6}",
                            s.time + h
                        ),
                        step,
                    ));
                }
            }
        }
        s.eta = n0;
        s.xi = n1;
        s.time += h;
        self.steps += 1;
        Ok(())
    }

    /// Advance a physical-space state by one step.
    pub fn step(&mut self, state: &SurfaceState) -> Result<SurfaceState> {
        state.check()?;
        let mut s = state.to_spectral();
        self.step_spectral(&mut s)?;
        Ok(SurfaceState::from_spectral(&self.grid, &s))
    }
}

/// `½∫[ξGξ − γη²ξₓ + (γ²/3)η³ + gη²] dx` by the trapezoid rule.
pub fn energy_full(state: &SurfaceState, p: &PhysicalParams, dno: &DnoExpansion) -> Result<f64> {
    state.check()?;
    let grid = state.grid();
    let eta_hat = state.eta.spectrum();
    let xi_hat = state.xi.spectrum();
    let gxi = grid.inverse_real(&dno.apply_spectral(grid, &eta_hat, &xi_hat)?);
    let xix = grid.inverse_real(&dx(grid, &xi_hat));
    let (g, gam) = (p.g, p.gamma);
    let integrand: Vec<f64> = (0..grid.n())
        .map(|j| {
            let (e, x) = (state.eta.values()[j], state.xi.values()[j]);
            x * gxi[j] - gam * e * e * xix[j] + gam * gam / 3.0 * e * e * e + g * e * e
        })
        .collect();
    Ok(0.5 * grid.trapezoid(&integrand))
}

/// `½∫[ψGψ − γη²ζₓ − (γ²/6)η³ + gη²] dx` with `ψ = ζ + (γ/2)∂ₓ⁻¹η`.
pub fn energy_canonical(state: &CanonicalState, p: &PhysicalParams, dno: &DnoExpansion) -> Result<f64> {
    let grid = state.eta.grid();
    let eta_hat = state.eta.spectrum();
    let zeta_hat = state.zeta.spectrum();
    let psi_hat = axpy(&zeta_hat, 0.5 * p.gamma, &inv_dx(grid, &eta_hat));
    let psi = grid.inverse_real(&psi_hat);
    let gpsi = grid.inverse_real(&dno.apply_spectral(grid, &eta_hat, &psi_hat)?);
    let zx = grid.inverse_real(&dx(grid, &zeta_hat));
    let (g, gam) = (p.g, p.gamma);
    let integrand: Vec<f64> = (0..grid.n())
        .map(|j| {
            let e = state.eta.values()[j];
            psi[j] * gpsi[j] - gam * e * e * zx[j] - gam * gam / 6.0 * e * e * e + g * e * e
        })
        .collect();
    let v = 0.5 * grid.trapezoid(&integrand);
    if !v.is_finite() {
        return Err(Error::numeric("non-finite energy"));
    }
    Ok(v)
}

/// `I = ∫(ηξₓ − ½γη²) dx`.
pub fn momentum(state: &SurfaceState, p: &PhysicalParams) -> f64 {
    let grid = state.grid();
    let xix = grid.inverse_real(&dx(grid, &state.xi.spectrum()));
    let integrand: Vec<f64> = state
        .eta
        .values()
        .iter()
        .zip(&xix)
        .map(|(e, x)| e * x - 0.5 * p.gamma * e * e)
        .collect();
    grid.trapezoid(&integrand)
}

/// `V = ∫η dx`.
pub fn volume(state: &SurfaceState) -> f64 {
    state.eta.integral()
}

/// `ζ = ξ − (γ/2)∂ₓ⁻¹η`.
pub fn xi_to_zeta(state: &SurfaceState, p: &PhysicalParams) -> CanonicalState {
    let grid = state.grid();
    let shift = inv_dx(grid, &state.eta.spectrum());
    let zeta = axpy(&state.xi.spectrum(), -0.5 * p.gamma, &shift);
    CanonicalState {
        eta: state.eta.clone(),
        zeta: RealField::from_spectrum(grid.clone(), &zeta),
        time: state.time,
    }
}

/// `ξ = ζ + (γ/2)∂ₓ⁻¹η`.
pub fn zeta_to_xi(state: &CanonicalState, p: &PhysicalParams) -> SurfaceState {
    let grid = state.eta.grid();
    let shift = inv_dx(grid, &state.eta.spectrum());
    let xi = axpy(&state.zeta.spectrum(), 0.5 * p.gamma, &shift);
    SurfaceState {
        eta: state.eta.clone(),
        xi: RealField::from_spectrum(grid.clone(), &xi),
        time: state.time,
    }
}

/// `ẑ_k = (a_k η̂_k + i a_k⁻¹ ζ̂_k)/√2` on spectra.
pub fn z_spectrum(grid: &SpectralGrid, p: &PhysicalParams, eta: &[C64], zeta: &[C64]) -> Vec<C64> {
    let a = Symbol::A { g: p.g, gamma: p.gamma };
    let ai = Symbol::InvA { g: p.g, gamma: p.gamma };
    let mut out = vec![ZERO; grid.n()];
    for (i, &k) in grid.wavenumbers().iter().enumerate() {
        out[i] = FRAC_1_SQRT_2 * (a.eval(k) * eta[i] + C64::new(0.0, 1.0) * ai.eval(k) * zeta[i]);
    }
    out[grid.nyquist_index()] = ZERO;
    out
}

/// Inverse of [`z_spectrum`]: `(η̂, ζ̂)`.
pub fn eta_zeta_from_z(grid: &SpectralGrid, p: &PhysicalParams, z: &[C64]) -> (Vec<C64>, Vec<C64>) {
    let a = Symbol::A { g: p.g, gamma: p.gamma };
    let ai = Symbol::InvA { g: p.g, gamma: p.gamma };
    let n = grid.n();
    let mut eta = vec![ZERO; n];
    let mut zeta = vec![ZERO; n];
    for (i, &k) in grid.wavenumbers().iter().enumerate() {
        if k == 0.0 || i == n / 2 {
            continue;
        }
        let zm = z[(n - i) % n].conj();
        eta[i] = FRAC_1_SQRT_2 * ai.eval(k) * (z[i] + zm);
        zeta[i] = FRAC_1_SQRT_2 * a.eval(k) * (z[i] - zm) * C64::new(0.0, -1.0);
    }
    (eta, zeta)
}

/// `z = (a(D)η + i a(D)⁻¹ζ)/√2`.
pub fn to_complex_z(state: &CanonicalState, p: &PhysicalParams) -> ComplexField {
    let grid = state.eta.grid();
    let z = z_spectrum(grid, p, &state.eta.spectrum(), &state.zeta.spectrum());
    ComplexField::from_spectrum(grid.clone(), &z)
}

pub fn from_complex_z(z: &ComplexField, p: &PhysicalParams, time: f64) -> CanonicalState {
    let grid = z.grid();
    let (eta, zeta) = eta_zeta_from_z(grid, p, &z.spectrum());
    CanonicalState {
        eta: RealField::from_spectrum(grid.clone(), &eta),
        zeta: RealField::from_spectrum(grid.clone(), &zeta),
        time,
    }
}

/// `H⁽²⁾ = ∫Ω_k |z_k|² dk` in the discrete normalization `2π Σ Ω_k |ẑ_k|²`.
pub fn h2_from_z(grid: &SpectralGrid, p: &PhysicalParams, z: &[C64]) -> f64 {
    let om = Symbol::Dispersion { g: p.g, gamma: p.gamma };
    2.0 * PI
        * grid
            .wavenumbers()
            .iter()
            .zip(z)
            .filter(|(k, _)| **k != 0.0)
            .map(|(&k, c)| om.eval(k).re * c.norm_sqr())
            .sum::<f64>()
}
