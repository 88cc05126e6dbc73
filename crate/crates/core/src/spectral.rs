//! Periodic pseudo-spectral kernel on `[0, 2π)`.
//!
//! Spectra are stored in standard FFT order and normalized so that
//! `f(x_j) = Σ_k c_k e^{i k x_j}`. Index `i` carries wavenumber `i` for
//! `i < N/2` and `i − N` otherwise. The Nyquist entry is treated as zero by
//! every symbol and every dealiased product.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub type C64 = Complex64;

const I: C64 = C64::new(0.0, 1.0);

/// Uniform periodic grid with cached transform plans for `N` and `3N/2`.
pub struct SpectralGrid {
    n: usize,
    m: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    pad_fwd: Arc<dyn Fft<f64>>,
    pad_inv: Arc<dyn Fft<f64>>,
    k: Vec<f64>,
}

impl fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("n", &self.n)
            .field("padded", &self.m)
            .finish()
    }
}

impl SpectralGrid {
    /// Build a grid of `n` nodes. `n` must be a power of two and at least 16.
    pub fn new(n: usize) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::config(format!("n_nodes must be a power of two >= 16, got {n}")));
        }
        let m = 3 * n / 2;
        let mut planner = FftPlanner::new();
        let k = (0..n)
            .map(|i| if i < n / 2 { i as f64 } else { i as f64 - n as f64 })
            .collect();
        Ok(Self {
            n,
            m,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
            pad_fwd: planner.plan_fft_forward(m),
            pad_inv: planner.plan_fft_inverse(m),
            k,
        })
    }

    pub fn shared(n: usize) -> Result<Arc<Self>> {
        Self::new(n).map(Arc::new)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Length of the zero-padded product grid.
    pub fn padded_len(&self) -> usize {
        self.m
    }

    pub fn length(&self) -> f64 {
        2.0 * PI
    }

    pub fn dx(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    /// Wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.k
    }

    pub fn nyquist_index(&self) -> usize {
        self.n / 2
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| j as f64 * self.dx()).collect()
    }

    /// Index holding wavenumber `k`, if representable.
    pub fn index_of(&self, k: i64) -> Option<usize> {
        let h = (self.n / 2) as i64;
        if k >= -h && k < h {
            Some(k.rem_euclid(self.n as i64) as usize)
        } else {
            None
        }
    }

    pub fn forward(&self, values: &[C64]) -> Vec<C64> {
        debug_assert_eq!(values.len(), self.n);
        let mut buf = values.to_vec();
        self.fwd.process(&mut buf);
        let s = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|c| *c *= s);
        buf
    }

    pub fn inverse(&self, coeffs: &[C64]) -> Vec<C64> {
        debug_assert_eq!(coeffs.len(), self.n);
        let mut buf = coeffs.to_vec();
        self.inv.process(&mut buf);
        buf
    }

    pub fn forward_real(&self, values: &[f64]) -> Vec<C64> {
        let buf: Vec<C64> = values.iter().map(|&v| C64::new(v, 0.0)).collect();
        self.forward(&buf)
    }

    /// Inverse transform keeping the real part. The input is assumed Hermitian.
    pub fn inverse_real(&self, coeffs: &[C64]) -> Vec<f64> {
        self.inverse(coeffs).into_iter().map(|c| c.re).collect()
    }

    /// Multiply a spectrum in place by `symbol`; the Nyquist entry is cleared.
    pub fn apply(&self, coeffs: &mut [C64], symbol: &Symbol) {
        for (c, &k) in coeffs.iter_mut().zip(&self.k) {
            *c *= symbol.eval(k);
        }
        coeffs[self.n / 2] = C64::new(0.0, 0.0);
    }

    pub fn applied(&self, coeffs: &[C64], symbol: &Symbol) -> Vec<C64> {
        let mut out = coeffs.to_vec();
        self.apply(&mut out, symbol);
        out
    }

    /// Multiply a spectrum in place by an arbitrary closure of `k`.
    pub fn apply_fn(&self, coeffs: &mut [C64], f: impl Fn(f64) -> C64) {
        for (c, &k) in coeffs.iter_mut().zip(&self.k) {
            *c *= f(k);
        }
        coeffs[self.n / 2] = C64::new(0.0, 0.0);
    }

    fn embed(&self, coeffs: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|c| *c = C64::new(0.0, 0.0));
        let h = self.n / 2;
        out[..h].copy_from_slice(&coeffs[..h]);
        // Skip the Nyquist entry.
        out[self.m - h + 1..].copy_from_slice(&coeffs[h + 1..]);
    }

    fn truncate(&self, padded: &[C64]) -> Vec<C64> {
        let h = self.n / 2;
        let s = 1.0 / self.m as f64;
        let mut out = vec![C64::new(0.0, 0.0); self.n];
        for i in 0..h {
            out[i] = padded[i] * s;
        }
        for i in h + 1..self.n {
            out[i] = padded[self.m - self.n + i] * s;
        }
        out
    }

    /// Values of a complex band-limited function on the padded grid.
    pub fn to_padded(&self, coeffs: &[C64]) -> Vec<C64> {
        let mut buf = vec![C64::new(0.0, 0.0); self.m];
        self.embed(coeffs, &mut buf);
        self.pad_inv.process(&mut buf);
        buf
    }

    /// Spectrum (truncated to `N` modes) of values given on the padded grid.
    pub fn from_padded(&self, values: &[C64]) -> Vec<C64> {
        let mut buf = values.to_vec();
        self.pad_fwd.process(&mut buf);
        self.truncate(&buf)
    }

    pub fn to_padded_real(&self, coeffs: &[C64]) -> Vec<f64> {
        self.to_padded(coeffs).into_iter().map(|c| c.re).collect()
    }

    /// Two real fields to the padded grid with one complex transform.
    pub fn to_padded_real_pair(&self, a: &[C64], b: &[C64]) -> (Vec<f64>, Vec<f64>) {
        let z: Vec<C64> = a.iter().zip(b).map(|(&x, &y)| x + I * y).collect();
        let v = self.to_padded(&z);
        (v.iter().map(|c| c.re).collect(), v.iter().map(|c| c.im).collect())
    }

    pub fn from_padded_real(&self, values: &[f64]) -> Vec<C64> {
        let mut s = self.from_padded_real_pair(values, None).0;
        s[0].im = 0.0;
        s
    }

    /// Spectra of two real padded-grid fields with one complex transform.
    /// With `b = None` only the first spectrum is meaningful.
    pub fn from_padded_real_pair(&self, a: &[f64], b: Option<&[f64]>) -> (Vec<C64>, Vec<C64>) {
        let mut buf: Vec<C64> = match b {
            Some(b) => a.iter().zip(b).map(|(&x, &y)| C64::new(x, y)).collect(),
            None => a.iter().map(|&x| C64::new(x, 0.0)).collect(),
        };
        self.pad_fwd.process(&mut buf);
        let w = self.truncate(&buf);
        if b.is_none() {
            return (w, Vec::new());
        }
        let n = self.n;
        let mut ua = vec![C64::new(0.0, 0.0); n];
        let mut ub = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            if i == n / 2 {
                continue;
            }
            let j = (n - i) % n;
            let wc = w[j].conj();
            ua[i] = 0.5 * (w[i] + wc);
            ub[i] = -0.5 * I * (w[i] - wc);
        }
        (ua, ub)
    }

    /// Several real fields to the padded grid, two per transform.
    pub fn to_padded_real_many(&self, fields: &[&[C64]]) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(fields.len());
        for chunk in fields.chunks(2) {
            if chunk.len() == 2 {
                let (a, b) = self.to_padded_real_pair(chunk[0], chunk[1]);
                out.push(a);
                out.push(b);
            } else {
                out.push(self.to_padded_real(chunk[0]));
            }
        }
        out
    }

    /// Spectra of several real padded-grid fields, two per transform.
    pub fn from_padded_real_many(&self, values: &[&[f64]]) -> Vec<Vec<C64>> {
        let mut out = Vec::with_capacity(values.len());
        for chunk in values.chunks(2) {
            if chunk.len() == 2 {
                let (a, b) = self.from_padded_real_pair(chunk[0], Some(chunk[1]));
                out.push(a);
                out.push(b);
            } else {
                out.push(self.from_padded_real(chunk[0]));
            }
        }
        out
    }

    /// Dealiased product of two real fields given by their spectra.
    pub fn product_real(&self, a: &[C64], b: &[C64]) -> Vec<C64> {
        let (pa, pb) = self.to_padded_real_pair(a, b);
        let prod: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| x * y).collect();
        self.from_padded_real(&prod)
    }

    /// Dealiased product of two complex fields given by their spectra.
    pub fn product(&self, a: &[C64], b: &[C64]) -> Vec<C64> {
        let pa = self.to_padded(a);
        let pb = self.to_padded(b);
        let prod: Vec<C64> = pa.iter().zip(&pb).map(|(x, y)| x * y).collect();
        self.from_padded(&prod)
    }

    /// Periodic trapezoid rule.
    pub fn trapezoid(&self, values: &[f64]) -> f64 {
        self.dx() * values.iter().sum::<f64>()
    }

    /// `∫ f g dx` from spectra: `2π Σ f_k conj(g_k)` (real part).
    pub fn inner(&self, f: &[C64], g: &[C64]) -> f64 {
        2.0 * PI * f.iter().zip(g).map(|(a, b)| (a * b.conj()).re).sum::<f64>()
    }
}

/// Scalar deep-water frequency `ω(k) = sqrt(γ²/4 + g|k|)`.
pub fn omega_of(k: f64, g: f64, gamma: f64) -> f64 {
    (0.25 * gamma * gamma + g * k.abs()).sqrt()
}

pub fn sgn(k: f64) -> f64 {
    if k > 0.0 {
        1.0
    } else if k < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub type CustomSymbol = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

/// Fourier multipliers used throughout the crate.
#[derive(Clone)]
pub enum Symbol {
    /// `H = −i sgn(D)`.
    Hilbert,
    AbsD,
    InvAbsD,
    Dx,
    InvDx,
    /// `a(D) = sqrt(ω(D)/|D|)`.
    A {
        g: f64,
        gamma: f64,
    },
    InvA {
        g: f64,
        gamma: f64,
    },
    /// `ω(D)`.
    Omega {
        g: f64,
        gamma: f64,
    },
    /// `Ω(D) = (γ/2) sgn(D) + ω(D)`.
    Dispersion {
        g: f64,
        gamma: f64,
    },
    Custom(CustomSymbol),
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Hilbert => write!(f, "H"),
            Symbol::AbsD => write!(f, "|D|"),
            Symbol::InvAbsD => write!(f, "|D|^-1"),
            Symbol::Dx => write!(f, "dx"),
            Symbol::InvDx => write!(f, "dx^-1"),
            Symbol::A { g, gamma } => write!(f, "a(D; g={g}, gamma={gamma})"),
            Symbol::InvA { g, gamma } => write!(f, "a^-1(D; g={g}, gamma={gamma})"),
            Symbol::Omega { g, gamma } => write!(f, "omega(D; g={g}, gamma={gamma})"),
            Symbol::Dispersion { g, gamma } => write!(f, "Omega(D; g={g}, gamma={gamma})"),
            Symbol::Custom(_) => write!(f, "custom"),
        }
    }
}

impl Symbol {
    /// Look a symbol up by name. `g` and `gamma` are used by the dispersive ones.
    pub fn parse(name: &str, g: f64, gamma: f64) -> Result<Self> {
        Ok(match name.trim() {
            "H" | "hilbert" => Symbol::Hilbert,
            "|D|" | "absd" => Symbol::AbsD,
            "|D|^-1" | "inv_absd" => Symbol::InvAbsD,
            "dx" => Symbol::Dx,
            "dx^-1" | "inv_dx" => Symbol::InvDx,
            "a" => Symbol::A { g, gamma },
            "a^-1" | "inv_a" => Symbol::InvA { g, gamma },
            "omega" => Symbol::Omega { g, gamma },
            "Omega" | "dispersion" => Symbol::Dispersion { g, gamma },
            other => return Err(Error::config(format!("unknown symbol '{other}'"))),
        })
    }

    pub fn eval(&self, k: f64) -> C64 {
        let re = |v: f64| C64::new(v, 0.0);
        if k == 0.0 {
            // Every multiplier here either vanishes at k = 0 or is zeroed there
            // by convention; only the custom one is left alone.
            return match self {
                Symbol::Omega { g, gamma } => re(omega_of(0.0, *g, *gamma)),
                Symbol::Dispersion { g, gamma } => re(omega_of(0.0, *g, *gamma)),
                Symbol::Custom(f) => f(0.0),
                _ => re(0.0),
            };
        }
        match self {
            Symbol::Hilbert => C64::new(0.0, -sgn(k)),
            Symbol::AbsD => re(k.abs()),
            Symbol::InvAbsD => re(1.0 / k.abs()),
            Symbol::Dx => C64::new(0.0, k),
            Symbol::InvDx => C64::new(0.0, -1.0 / k),
            Symbol::A { g, gamma } => re((omega_of(k, *g, *gamma) / k.abs()).sqrt()),
            Symbol::InvA { g, gamma } => re((k.abs() / omega_of(k, *g, *gamma)).sqrt()),
            Symbol::Omega { g, gamma } => re(omega_of(k, *g, *gamma)),
            Symbol::Dispersion { g, gamma } => re(0.5 * gamma * sgn(k) + omega_of(k, *g, *gamma)),
            Symbol::Custom(f) => f(k),
        }
    }

    /// Whether `s(−k) = conj(s(k))` on the given wavenumbers.
    pub fn is_hermitian_on(&self, ks: &[f64]) -> bool {
        ks.iter().all(|&k| {
            let a = self.eval(k);
            let b = self.eval(-k).conj();
            (a - b).norm() <= 1e-14 * (1.0 + a.norm())
        })
    }
}

fn check_finite_real(values: &[f64], what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::numeric(format!("non-finite values in {what}")))
    }
}

fn check_same_grid(a: &SpectralGrid, b: &SpectralGrid) -> Result<()> {
    if a.n == b.n {
        Ok(())
    } else {
        Err(Error::config(format!("grid mismatch: {} vs {} nodes", a.n, b.n)))
    }
}

/// Real grid function.
#[derive(Debug, Clone)]
pub struct RealField {
    grid: Arc<SpectralGrid>,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: Arc<SpectralGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::config(format!(
                "field has {} values, grid has {} nodes",
                values.len(),
                grid.n
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<SpectralGrid>) -> Self {
        let n = grid.n;
        Self {
            grid,
            values: vec![0.0; n],
        }
    }

    pub fn from_fn(grid: Arc<SpectralGrid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().into_iter().map(f).collect();
        Self { grid, values }
    }

    /// Build from a spectrum; the imaginary part of the result is dropped.
    pub fn from_spectrum(grid: Arc<SpectralGrid>, coeffs: &[C64]) -> Self {
        let values = grid.inverse_real(coeffs);
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn spectrum(&self) -> Vec<C64> {
        self.grid.forward_real(&self.values)
    }

    pub fn apply_symbol(&self, symbol: &Symbol) -> Result<Self> {
        check_finite_real(&self.values, "apply_symbol input")?;
        if !symbol.is_hermitian_on(self.grid.wavenumbers()) {
            return Err(Error::Usage(format!(
                "symbol {symbol:?} does not map real fields to real fields"
            )));
        }
        let mut c = self.spectrum();
        self.grid.apply(&mut c, symbol);
        Ok(Self::from_spectrum(self.grid.clone(), &c))
    }

    pub fn dealiased_product(&self, other: &Self) -> Result<Self> {
        check_same_grid(&self.grid, &other.grid)?;
        let c = self.grid.product_real(&self.spectrum(), &other.spectrum());
        Ok(Self::from_spectrum(self.grid.clone(), &c))
    }

    pub fn integral(&self) -> f64 {
        self.grid.trapezoid(&self.values)
    }

    /// `sqrt(∫ f² dx)` by the trapezoid rule.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.dx() * self.values.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Zero-mode coefficient.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.grid.n as f64
    }
}

/// Complex grid function.
#[derive(Debug, Clone)]
pub struct ComplexField {
    grid: Arc<SpectralGrid>,
    values: Vec<C64>,
}

impl ComplexField {
    pub fn new(grid: Arc<SpectralGrid>, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::config(format!(
                "field has {} values, grid has {} nodes",
                values.len(),
                grid.n
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<SpectralGrid>) -> Self {
        let n = grid.n;
        Self {
            grid,
            values: vec![C64::new(0.0, 0.0); n],
        }
    }

    pub fn constant(grid: Arc<SpectralGrid>, v: C64) -> Self {
        let n = grid.n;
        Self {
            grid,
            values: vec![v; n],
        }
    }

    pub fn from_fn(grid: Arc<SpectralGrid>, f: impl Fn(f64) -> C64) -> Self {
        let values = grid.nodes().into_iter().map(f).collect();
        Self { grid, values }
    }

    pub fn from_spectrum(grid: Arc<SpectralGrid>, coeffs: &[C64]) -> Self {
        let values = grid.inverse(coeffs);
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn spectrum(&self) -> Vec<C64> {
        self.grid.forward(&self.values)
    }

    pub fn apply_symbol(&self, symbol: &Symbol) -> Result<Self> {
        if !self.values.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::numeric("non-finite values in apply_symbol input"));
        }
        let mut c = self.spectrum();
        self.grid.apply(&mut c, symbol);
        Ok(Self::from_spectrum(self.grid.clone(), &c))
    }

    pub fn dealiased_product(&self, other: &Self) -> Result<Self> {
        check_same_grid(&self.grid, &other.grid)?;
        let c = self.grid.product(&self.spectrum(), &other.spectrum());
        Ok(Self::from_spectrum(self.grid.clone(), &c))
    }

    pub fn abs_sq(&self) -> RealField {
        RealField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|c| c.norm_sqr()).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, c| m.max(c.norm()))
    }
}
