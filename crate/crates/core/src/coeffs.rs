//! Closed-form scalars: dispersion, envelope-model coefficients, the exact
//! quartic interaction kernels and the Benjamin–Feir predictor.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectral::{omega_of, sgn};

/// Physical parameters shared by every solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub g: f64,
    pub gamma: f64,
    pub k0: f64,
    /// Steepness `ε = k₀A₀`.
    pub epsilon: f64,
}

impl PhysicalParams {
    pub fn new(g: f64, gamma: f64, k0: f64, epsilon: f64) -> Result<Self> {
        let p = Self { g, gamma, k0, epsilon };
        p.validate()?;
        Ok(p)
    }

    /// Parameters with `ε = k₀A₀` derived from the envelope amplitude `B₀`.
    pub fn from_b0(g: f64, gamma: f64, k0: f64, b0: f64) -> Result<Self> {
        let mut p = Self::new(g, gamma, k0, 0.0)?;
        p.epsilon = k0 * a0_from_b0(b0, &p);
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.g, self.gamma, self.k0, self.epsilon]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::config("parameters must be finite"));
        }
        if self.g <= 0.0 {
            return Err(Error::config(format!("g must be positive, got {}", self.g)));
        }
        if self.k0 <= 0.0 {
            return Err(Error::config(format!("k0 must be positive, got {}", self.k0)));
        }
        let w0 = self.omega0();
        if 2.0 * w0 - self.gamma <= 0.0 || self.big_omega0() == 0.0 {
            return Err(Error::Domain("2*omega0 - gamma and Omega0 must be nonzero".into()));
        }
        Ok(())
    }

    pub fn omega0(&self) -> f64 {
        omega(self.k0, self)
    }

    pub fn big_omega0(&self) -> f64 {
        big_omega(self.k0, self)
    }
}

/// `ω(k) = sqrt(γ²/4 + g|k|)`.
pub fn omega(k: f64, p: &PhysicalParams) -> f64 {
    omega_of(k, p.g, p.gamma)
}

/// `Ω(k) = (γ/2) sgn(k) + ω(k)`.
pub fn big_omega(k: f64, p: &PhysicalParams) -> f64 {
    0.5 * p.gamma * sgn(k) + omega(k, p)
}

/// `a(k) = sqrt(ω(k)/|k|)`, undefined at `k = 0`.
pub fn a(k: f64, p: &PhysicalParams) -> Result<f64> {
    if k == 0.0 {
        return Err(Error::Domain("a(k) is undefined at k = 0".into()));
    }
    Ok((omega(k, p) / k.abs()).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelCoefficients {
    pub omega0: f64,
    pub big_omega0: f64,
    /// Group velocity `Ω′(k₀) = g/(2ω₀)`.
    pub cg: f64,
    pub beta0: f64,
    pub beta3: f64,
    pub beta: f64,
    pub c0l: f64,
    pub c0r: f64,
    pub c1l: f64,
    pub c1r: f64,
    pub c2l: f64,
    pub c2r: f64,
    pub c3l: f64,
    pub c3r1: f64,
    pub c3r2: f64,
}

impl ModelCoefficients {
    /// Second-order dispersion coefficient `g²/(8ω₀³)`.
    pub fn disp2(&self, g: f64) -> f64 {
        g * g / (8.0 * self.omega0.powi(3))
    }

    /// Third-order dispersion coefficient `g³/(16ω₀⁵)`.
    pub fn disp3(&self, g: f64) -> f64 {
        g.powi(3) / (16.0 * self.omega0.powi(5))
    }

    /// `8π[c₀ʳ − ½(c₁ʳ + c₂ʳ + c₃ʳ¹)]` recomputed from the ladder.
    pub fn beta_from_ladder(&self) -> f64 {
        8.0 * PI * (self.c0r - 0.5 * (self.c1r + self.c2r + self.c3r1))
    }

    /// `c₀ˡ − ½(c₁ˡ + c₂ˡ + c₃ˡ)`.
    pub fn leading_assembly(&self) -> f64 {
        self.c0l - 0.5 * (self.c1l + self.c2l + self.c3l)
    }

    /// Rows for printing: `(name, value)`.
    pub fn table(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("omega0", self.omega0),
            ("Omega0", self.big_omega0),
            ("cg", self.cg),
            ("beta0", self.beta0),
            ("beta3", self.beta3),
            ("beta", self.beta),
            ("c0l", self.c0l),
            ("c0r", self.c0r),
            ("c1l", self.c1l),
            ("c1r", self.c1r),
            ("c2l", self.c2l),
            ("c2r", self.c2r),
            ("c3l", self.c3l),
            ("c3r1", self.c3r1),
            ("c3r2", self.c3r2),
        ]
    }
}

fn nonzero(v: f64, what: &str) -> Result<f64> {
    if v == 0.0 || !v.is_finite() {
        Err(Error::Domain(format!("{what} vanishes")))
    } else {
        Ok(v)
    }
}

pub fn compute_coefficients(p: &PhysicalParams) -> Result<ModelCoefficients> {
    p.validate()?;
    let (g, gam, k0) = (p.g, p.gamma, p.k0);
    let w0 = p.omega0();
    let om0 = nonzero(p.big_omega0(), "Omega0")?;
    let two_w0_m_gam = nonzero(2.0 * w0 - gam, "2*omega0 - gamma")?;

    let beta0 = k0.powi(3) * (w0 - gam) * (gam * gam + 4.0 * w0 * w0) / (2.0 * w0 * om0 * two_w0_m_gam);
    let beta3 = k0 * k0 * w0 * w0 / (om0 * om0);

    let sp = omega(2.0 * k0, p);
    let om_p2 = big_omega(2.0 * k0, p);
    let om_m2 = big_omega(-2.0 * k0, p);
    let den1 = nonzero(2.0 * om0 + om_m2, "2*Omega0 + Omega(-2k0)")?;
    let den2 = nonzero(2.0 * om0 - om_p2, "2*Omega0 - Omega(2k0)")?;
    let w02 = w0 * w0;

    let c0l = k0.powi(3) * om0 * om0 / (8.0 * PI * w02);
    let c0r = 3.0 * k0 * k0 * om0 * om0 / (16.0 * PI * w02) - gam * g * k0.powi(3) * om0 / (32.0 * PI * w02 * w02);

    let c1l = k0.powi(3) * (2.0 * w02 + gam * sp).powi(2) / (16.0 * PI * w02 * sp * den1);
    let c1r = g
        * c1l
        * (2.0 * om_p2 / (sp * (2.0 * w02 + gam * sp)) - 1.0 / (2.0 * w02) - 1.0 / (2.0 * sp * sp)
            + 3.0 / (2.0 * g * k0)
            - (sp + w0) / (2.0 * sp * w0 * den1));

    let c2l = -k0.powi(3) * (2.0 * w02 - gam * sp).powi(2) / (16.0 * PI * w02 * sp * den2);
    let c2r = g
        * c2l
        * (2.0 * om_m2 / (sp * (2.0 * w02 - gam * sp)) - 1.0 / (2.0 * w02) - 1.0 / (2.0 * sp * sp)
            + 3.0 / (2.0 * g * k0)
            - (sp - w0) / (2.0 * sp * w0 * den2));

    let c3l = gam * gam * k0 * k0 * w0 / (2.0 * PI * g * om0);
    let c3r1 = c3l * (1.0 / k0 + g * gam / (8.0 * om0 * w02));
    let c3r2 = k0 * k0 * w02 / (2.0 * PI * om0 * om0);

    let beta = 8.0 * PI * (c0r - 0.5 * (c1r + c2r + c3r1));

    Ok(ModelCoefficients {
        omega0: w0,
        big_omega0: om0,
        cg: g / (2.0 * w0),
        beta0,
        beta3,
        beta,
        c0l,
        c0r,
        c1l,
        c1r,
        c2l,
        c2r,
        c3l,
        c3r1,
        c3r2,
    })
}

// ---------------------------------------------------------------------------
// Quartic kernels

/// `S₁₂₃ = (1 + s₁s₃)/(a₁a₂a₃) · (k₁k₃a₁²a₃² − (γ/2)k₂a₂²)`.
pub fn s123(k1: f64, k2: f64, k3: f64, p: &PhysicalParams) -> Result<f64> {
    let pref = 1.0 + sgn(k1) * sgn(k3);
    if pref == 0.0 {
        return Ok(0.0);
    }
    let (a1, a2, a3) = (a(k1, p)?, a(k2, p)?, a(k3, p)?);
    Ok(pref / (a1 * a2 * a3) * (k1 * k3 * a1 * a1 * a3 * a3 - 0.5 * p.gamma * k2 * a2 * a2))
}

/// `A₁₂₃ = (S₁₂₃ + S₃₁₂ − S₂₃₁)/(8√π)`.
pub fn a123(k1: f64, k2: f64, k3: f64, p: &PhysicalParams) -> Result<f64> {
    Ok((s123(k1, k2, k3, p)? + s123(k3, k1, k2, p)? - s123(k2, k3, k1, p)?) / (8.0 * PI.sqrt()))
}

pub fn d1(k1: f64, k2: f64, k3: f64, k4: f64, p: &PhysicalParams) -> Result<f64> {
    let (a1, a2, a3, a4) = (a(k1, p)?, a(k2, p)?, a(k3, p)?, a(k4, p)?);
    Ok(a1 * a4 / (32.0 * PI * a2 * a3) * k1.abs() * k4.abs() * (k1.abs() + k4.abs() - 2.0 * (k3 + k4).abs()))
}

pub fn d2(k1: f64, k2: f64, k3: f64, k4: f64, p: &PhysicalParams) -> Result<f64> {
    let (a1, a2, a3, a4) = (a(k1, p)?, a(k2, p)?, a(k3, p)?, a(k4, p)?);
    Ok(p.gamma * a1 / (32.0 * PI * a2 * a3 * a4)
        * k1.abs()
        * sgn(k4)
        * (k1.abs() + k4.abs() - (k3 + k4).abs() - (k3 + k1).abs()))
}

pub fn d3(k1: f64, k2: f64, k3: f64, k4: f64, p: &PhysicalParams) -> Result<f64> {
    let (a1, a2, a3, a4) = (a(k1, p)?, a(k2, p)?, a(k3, p)?, a(k4, p)?);
    Ok(p.gamma * p.gamma / (128.0 * PI * a1 * a2 * a3 * a4)
        * sgn(k1)
        * sgn(k4)
        * (k1.abs() + k4.abs() - 2.0 * (k3 + k4).abs()))
}

type Kernel4 = fn(f64, f64, f64, f64, &PhysicalParams) -> Result<f64>;

/// The six argument orders shared by `T₁⁽¹⁾, T₁⁽²⁾, T₁⁽³⁾`, with their signs
/// for each of the three kernels.
fn t1_part(d: Kernel4, signs: [f64; 6], k: [f64; 4], p: &PhysicalParams) -> Result<f64> {
    let [k1, k2, k3, k4] = k;
    let args = [
        (k1, k2, -k3, -k4),
        (-k4, -k3, k2, k1),
        (k1, -k3, k2, -k4),
        (-k4, k2, -k3, k1),
        (k1, -k4, -k3, k2),
        (-k4, k2, k1, -k3),
    ];
    let mut s = 0.0;
    for (sg, (a1, a2, a3, a4)) in signs.iter().zip(args) {
        s += sg * d(a1, a2, a3, a4, p)?;
    }
    Ok(s)
}

pub fn t1_parts(k1: f64, k2: f64, k3: f64, k4: f64, p: &PhysicalParams) -> Result<[f64; 3]> {
    let k = [k1, k2, k3, k4];
    Ok([
        t1_part(d1, [-1.0, -1.0, -1.0, -1.0, 1.0, 1.0], k, p)?,
        t1_part(d2, [1.0, -1.0, 1.0, -1.0, 1.0, -1.0], k, p)?,
        t1_part(d3, [1.0; 6], k, p)?,
    ])
}

pub fn t1(k1: f64, k2: f64, k3: f64, k4: f64, p: &PhysicalParams) -> Result<f64> {
    Ok(t1_parts(k1, k2, k3, k4, p)?.iter().sum())
}

fn resonant(den: f64, what: &str) -> Result<f64> {
    if den.abs() < 1e-14 {
        Err(Error::Domain(format!("resonant denominator {what}")))
    } else {
        Ok(1.0 / den)
    }
}

pub fn t2_1(k1: f64, k2: f64, k3: f64, k4: f64, p: &PhysicalParams) -> Result<f64> {
    let s = |x: f64, y: f64, z: f64| s123(x, y, z, p);
    let l = s(-k1 - k2, k1, k2)? + s(k2, -k1 - k2, k1)? + s(k1, k2, -k1 - k2)?;
    let r = s(-k3 - k4, k3, k4)? + s(k4, -k3 - k4, k3)? + s(k3, k4, -k3 - k4)?;
    let w = |k| big_omega(k, p);
    let den = resonant(w(k1) + w(k2) + w(-k1 - k2), "Omega1+Omega2+Omega(-1-2)")?
        + resonant(w(k3) + w(k4) + w(-k3 - k4), "Omega3+Omega4+Omega(-3-4)")?;
    Ok(l * r * den / (64.0 * PI))
}

pub fn t2_2(k1: f64, k2: f64, k3: f64, k4: f64, p: &PhysicalParams) -> Result<f64> {
    let w = |k| big_omega(k, p);
    let den = resonant(w(k1) + w(k2) - w(k1 + k2), "Omega1+Omega2-Omega(1+2)")?
        + resonant(w(k3) + w(k4) - w(k3 + k4), "Omega3+Omega4-Omega(3+4)")?;
    Ok(-a123(-k1, -k2, k1 + k2, p)? * a123(-k3, -k4, k3 + k4, p)? * den)
}

pub fn t2_3(k1: f64, k2: f64, k3: f64, k4: f64, p: &PhysicalParams) -> Result<f64> {
    let w = |k| big_omega(k, p);
    let den = resonant(w(k3 - k1) + w(k1) - w(k3), "Omega(3-1)+Omega1-Omega3")?
        + resonant(w(k2 - k4) + w(k4) - w(k2), "Omega(2-4)+Omega4-Omega2")?;
    Ok(4.0 * a123(k1 - k3, -k1, k3, p)? * a123(k4 - k2, -k4, k2, p)? * den)
}

/// Every quartic kernel at one wavenumber quartet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticKernels {
    /// `S` and `A` at the first three arguments.
    pub s: f64,
    pub a: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub t1: f64,
    pub t2_1: f64,
    pub t2_2: f64,
    pub t2_3: f64,
    pub t2: f64,
    /// `T = T₁ − ½T₂`.
    pub t: f64,
}

pub fn quartic_kernels(k1: f64, k2: f64, k3: f64, k4: f64, p: &PhysicalParams) -> Result<QuarticKernels> {
    let t1v = t1(k1, k2, k3, k4, p)?;
    let (x1, x2, x3) = (
        t2_1(k1, k2, k3, k4, p)?,
        t2_2(k1, k2, k3, k4, p)?,
        t2_3(k1, k2, k3, k4, p)?,
    );
    let t2 = x1 + x2 + x3;
    Ok(QuarticKernels {
        s: s123(k1, k2, k3, p)?,
        a: a123(k1, k2, k3, p)?,
        d1: d1(k1, k2, k3, k4, p)?,
        d2: d2(k1, k2, k3, k4, p)?,
        d3: d3(k1, k2, k3, k4, p)?,
        t1: t1v,
        t2_1: x1,
        t2_2: x2,
        t2_3: x3,
        t2,
        t: t1v - 0.5 * t2,
    })
}

/// Average of a `z₁z₂z̄₃z̄₄` kernel over the index symmetries of the quartic
/// monomial: `1↔2`, `3↔4` and the exchange `(12)↔(34)`.
pub fn symmetrize4(k: [f64; 4], f: impl Fn(f64, f64, f64, f64) -> Result<f64>) -> Result<f64> {
    let [a, b, c, d] = k;
    let perms = [
        (a, b, c, d),
        (b, a, c, d),
        (a, b, d, c),
        (b, a, d, c),
        (c, d, a, b),
        (d, c, a, b),
        (c, d, b, a),
        (d, c, b, a),
    ];
    let mut s = 0.0;
    for (x, y, z, w) in perms {
        s += f(x, y, z, w)?;
    }
    Ok(s / 8.0)
}

// ---------------------------------------------------------------------------
// Benjamin–Feir predictor

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BfGrowth {
    /// The factor `Γ(λ)`.
    pub gamma_factor: f64,
    pub alpha: f64,
    /// `√α` when `α > 0`, else zero.
    pub sigma: f64,
    pub unstable: bool,
    pub sigma_over_omega0: f64,
}

pub fn bf_growth_rate(lambda: f64, b0: f64, p: &PhysicalParams) -> Result<BfGrowth> {
    let c = compute_coefficients(p)?;
    Ok(bf_growth_with(lambda, b0, p, &c))
}

/// Same as [`bf_growth_rate`] with precomputed coefficients.
pub fn bf_growth_with(lambda: f64, b0: f64, p: &PhysicalParams, c: &ModelCoefficients) -> BfGrowth {
    let d2 = c.disp2(p.g);
    let gamma_factor = 2.0 * b0 * b0 * (c.beta0 - p.epsilon * c.beta3 * lambda.abs()) - d2 * lambda * lambda;
    let alpha = d2 * lambda * lambda * gamma_factor;
    let unstable = alpha > 0.0;
    let sigma = if unstable { alpha.sqrt() } else { 0.0 };
    BfGrowth {
        gamma_factor,
        alpha,
        sigma,
        unstable,
        sigma_over_omega0: sigma / c.omega0,
    }
}

/// `B₀ = A₀ sqrt(ω₀/(2k₀))`.
pub fn b0_from_a0(a0: f64, p: &PhysicalParams) -> f64 {
    a0 * (p.omega0() / (2.0 * p.k0)).sqrt()
}

pub fn a0_from_b0(b0: f64, p: &PhysicalParams) -> f64 {
    b0 / (p.omega0() / (2.0 * p.k0)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Amplitude {
    /// Surface amplitude `A₀`.
    Surface,
    /// Envelope amplitude `B₀`.
    Envelope,
}

/// Convert an amplitude of the given kind to the other kind.
pub fn amplitude_convert(value: f64, from: Amplitude, p: &PhysicalParams) -> f64 {
    match from {
        Amplitude::Surface => b0_from_a0(value, p),
        Amplitude::Envelope => a0_from_b0(value, p),
    }
}
