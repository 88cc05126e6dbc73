//! Hamiltonian Dysthe envelope equation with ε absorbed into `u` and `X ≡ x`:
//!
//! ```text
//! i∂ₜu = L(D)u + β₀|u|²u − iβ|u|²∂ₓu − β₃ u|D||u|²
//! ```
//!
//! where `L` is the Taylor-expanded dispersion, the exact `Ω(k₀ + λ)`, or the
//! expanded dispersion seen from a frame moving at the group velocity.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::coeffs::{big_omega, ModelCoefficients, PhysicalParams};
use crate::error::{Error, Result};
use crate::spectral::{ComplexField, SpectralGrid, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Narrowband,
    FullDispersion,
    MovingFrame,
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "narrowband" => Ok(Variant::Narrowband),
            "full-dispersion" | "full_dispersion" => Ok(Variant::FullDispersion),
            "moving-frame" | "moving_frame" => Ok(Variant::MovingFrame),
            other => Err(Error::config(format!("unknown envelope variant '{other}'"))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Narrowband => "narrowband",
            Variant::FullDispersion => "full-dispersion",
            Variant::MovingFrame => "moving-frame",
        })
    }
}

#[derive(Debug, Clone)]
pub struct EnvelopeState {
    pub u: ComplexField,
    pub time: f64,
    pub variant: Variant,
}

/// Linear symbol `L(λ)`, the frequency of mode `λ` in the absence of nonlinearity.
pub fn linear_symbol(lambda: f64, p: &PhysicalParams, c: &ModelCoefficients, variant: Variant) -> f64 {
    let disp = -c.disp2(p.g) * lambda * lambda + c.disp3(p.g) * lambda.powi(3);
    match variant {
        Variant::Narrowband => c.big_omega0 + c.cg * lambda + disp,
        Variant::FullDispersion => big_omega(p.k0 + lambda, p),
        Variant::MovingFrame => disp,
    }
}

/// Envelope equation for fixed parameters and variant.
#[derive(Debug, Clone)]
pub struct EnvelopeModel {
    grid: Arc<SpectralGrid>,
    coeffs: ModelCoefficients,
    variant: Variant,
    symbol: Vec<f64>,
}

impl EnvelopeModel {
    pub fn new(grid: Arc<SpectralGrid>, params: &PhysicalParams, coeffs: ModelCoefficients, variant: Variant) -> Self {
        let mut symbol: Vec<f64> = grid
            .wavenumbers()
            .iter()
            .map(|&l| linear_symbol(l, params, &coeffs, variant))
            .collect();
        symbol[grid.nyquist_index()] = 0.0;
        Self {
            grid,
            coeffs,
            variant,
            symbol,
        }
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn coeffs(&self) -> &ModelCoefficients {
        &self.coeffs
    }

    pub fn symbol(&self) -> &[f64] {
        &self.symbol
    }

    /// Spectrum of `β₀|u|²u − iβ|u|²∂ₓu − β₃u|D||u|²`.
    pub fn nonlinear_spectral(&self, u: &[C64]) -> Vec<C64> {
        let g = &self.grid;
        let c = &self.coeffs;
        let mut ux = u.to_vec();
        g.apply_fn(&mut ux, |k| C64::new(0.0, k));
        let up = g.to_padded(u);
        let uxp = g.to_padded(&ux);
        let m = up.len();
        let abs2: Vec<f64> = up.iter().map(|v| v.norm_sqr()).collect();
        let mut mean_flow = g.from_padded_real(&abs2);
        g.apply_fn(&mut mean_flow, |k| C64::new(k.abs(), 0.0));
        let mf = g.to_padded_real(&mean_flow);
        let i = C64::new(0.0, 1.0);
        let mut prod = vec![ZERO; m];
        for j in 0..m {
            prod[j] = c.beta0 * abs2[j] * up[j] - i * c.beta * abs2[j] * uxp[j] - c.beta3 * up[j] * mf[j];
        }
        let mut out = g.from_padded(&prod);
        out[g.nyquist_index()] = ZERO;
        out
    }

    /// Spectrum of `i∂ₜu`.
    pub fn rhs_spectral(&self, u: &[C64]) -> Vec<C64> {
        let mut out = self.nonlinear_spectral(u);
        for ((o, v), l) in out.iter_mut().zip(u).zip(&self.symbol) {
            *o += l * v;
        }
        out
    }
}

fn check_finite(c: &[C64], what: &str) -> Result<()> {
    if c.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::numeric(format!("non-finite {what}")))
    }
}

/// `i∂ₜu` for the given variant.
pub fn dysthe_rhs(
    u: &ComplexField,
    params: &PhysicalParams,
    coeffs: &ModelCoefficients,
    variant: Variant,
) -> Result<ComplexField> {
    let model = EnvelopeModel::new(u.grid().clone(), params, *coeffs, variant);
    let r = model.rhs_spectral(&u.spectrum());
    check_finite(&r, "envelope right-hand side")?;
    Ok(ComplexField::from_spectrum(u.grid().clone(), &r))
}

/// Integrating-factor RK4 for the envelope, exact on `L(D)`.
#[derive(Debug, Clone)]
pub struct EnvelopeStepper {
    model: EnvelopeModel,
    dt: f64,
    half: Vec<C64>,
    full: Vec<C64>,
    steps: usize,
}

impl EnvelopeStepper {
    pub fn new(model: EnvelopeModel, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::config(format!("dt must be positive, got {dt}")));
        }
        let half = model
            .symbol
            .iter()
            .map(|l| C64::from_polar(1.0, -l * 0.5 * dt))
            .collect();
        let full = model.symbol.iter().map(|l| C64::from_polar(1.0, -l * dt)).collect();
        Ok(Self {
            model,
            dt,
            half,
            full,
            steps: 0,
        })
    }

    pub fn model(&self) -> &EnvelopeModel {
        &self.model
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn nl(&self, u: &[C64]) -> Vec<C64> {
        // ∂ₜu = −iL u − i N(u); this is the second part.
        self.model
            .nonlinear_spectral(u)
            .into_iter()
            .map(|v| C64::new(v.im, -v.re))
            .collect()
    }

    /// Advance a spectrum by one step.
    pub fn step_spectral(&mut self, u: &mut [C64]) -> Result<()> {
        let h = self.dt;
        let n = u.len();
        let (e1, e2) = (&self.half, &self.full);
        let a = self.nl(u);
        let b_in: Vec<C64> = (0..n).map(|j| e1[j] * (u[j] + 0.5 * h * a[j])).collect();
        let b = self.nl(&b_in);
        let c_in: Vec<C64> = (0..n).map(|j| e1[j] * u[j] + 0.5 * h * b[j]).collect();
        let c = self.nl(&c_in);
        let d_in: Vec<C64> = (0..n).map(|j| e2[j] * u[j] + h * e1[j] * c[j]).collect();
        let d = self.nl(&d_in);
        for j in 0..n {
            u[j] = e2[j] * u[j] + h / 6.0 * (e2[j] * a[j] + 2.0 * e1[j] * (b[j] + c[j]) + d[j]);
        }
        if let Err(Error::Numeric { context, .. }) = check_finite(u, "envelope state") {
            return Err(Error::numeric_at(context, self.steps));
        }
        self.steps += 1;
        Ok(())
    }

    pub fn step(&mut self, state: &EnvelopeState) -> Result<EnvelopeState> {
        if state.variant != self.model.variant {
            return Err(Error::Usage(format!(
                "state variant {} does not match stepper variant {}",
                state.variant, self.model.variant
            )));
        }
        let mut u = state.u.spectrum();
        self.step_spectral(&mut u)?;
        Ok(EnvelopeState {
            u: ComplexField::from_spectrum(self.model.grid.clone(), &u),
            time: state.time + self.dt,
            variant: state.variant,
        })
    }
}

/// Reduced Hamiltonian of the chosen variant. The quadratic part is
/// `2π Σ L(λ)|û_λ|²`, which is the trapezoid value of the band-limited
/// quadratic integrand; the quartic part is integrated by the trapezoid rule.
pub fn reduced_hamiltonian(
    u: &ComplexField,
    params: &PhysicalParams,
    coeffs: &ModelCoefficients,
    variant: Variant,
) -> f64 {
    let model = EnvelopeModel::new(u.grid().clone(), params, *coeffs, variant);
    reduced_hamiltonian_spectral(&model, &u.spectrum())
}

pub fn reduced_hamiltonian_spectral(model: &EnvelopeModel, u: &[C64]) -> f64 {
    let g = &model.grid;
    let c = &model.coeffs;
    let quad: f64 = 2.0 * PI * u.iter().zip(&model.symbol).map(|(v, l)| l * v.norm_sqr()).sum::<f64>();
    let mut ux = u.to_vec();
    g.apply_fn(&mut ux, |k| C64::new(0.0, k));
    let uv = g.inverse(u);
    let uxv = g.inverse(&ux);
    let abs2: Vec<f64> = uv.iter().map(|v| v.norm_sqr()).collect();
    let mut mf = g.forward_real(&abs2);
    g.apply_fn(&mut mf, |k| C64::new(k.abs(), 0.0));
    let mf = g.inverse_real(&mf);
    let integrand: Vec<f64> = (0..uv.len())
        .map(|j| {
            let im = (uv[j].conj() * uxv[j]).im;
            0.5 * c.beta0 * abs2[j] * abs2[j] + 0.5 * c.beta * abs2[j] * im - 0.5 * c.beta3 * abs2[j] * mf[j]
        })
        .collect();
    quad + g.trapezoid(&integrand)
}

/// Wave action `M = ∫|u|² dX`.
pub fn action(u: &ComplexField) -> f64 {
    u.grid().trapezoid(&u.abs_sq().into_values())
}

/// Uniform Stokes envelope `B₀ e^{−i(Ω₀ + β₀B₀²)t}`.
pub fn stokes_envelope(b0: f64, t: f64, grid: Arc<SpectralGrid>, coeffs: &ModelCoefficients) -> ComplexField {
    let phase = -(coeffs.big_omega0 + coeffs.beta0 * b0 * b0) * t;
    ComplexField::constant(grid, C64::from_polar(b0, phase))
}
