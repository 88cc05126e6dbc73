//! Scenario configuration, orchestration, diagnostics and file output.

mod config;
pub mod io;
mod scenarios;

pub use config::{AmplitudeSpec, Reconstruction, RunKind, ScenarioConfig, KEYS};
pub use scenarios::{
    energy_check, initial_envelope, initial_surface, l2_rel_err, reconstruct_check, run_compare, run_dysthe, run_full,
    write_outputs, EnergyReport, ReconstructReport, RunOutput, Snapshot,
};

use crate::coeffs::{bf_growth_with, compute_coefficients};
use crate::error::{Error, Result};

/// Carrier and first sideband amplitudes `|û₀|, |û_{−λ}|, |û_λ|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sideband {
    pub carrier: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Sideband {
    /// RMS of the two sidebands.
    pub fn amplitude(&self) -> f64 {
        (0.5 * (self.lower * self.lower + self.upper * self.upper)).sqrt()
    }
}

/// One output time. Quantities that a run does not compute are NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub l2_rel_err: f64,
    pub h_full: f64,
    pub h_reduced: f64,
    pub i: f64,
    pub m: f64,
    pub max_eta: f64,
    pub sideband: Option<Sideband>,
}

impl DiagnosticsRecord {
    pub fn empty(t: f64) -> Self {
        Self {
            t,
            l2_rel_err: f64::NAN,
            h_full: f64::NAN,
            h_reduced: f64::NAN,
            i: f64::NAN,
            m: f64::NAN,
            max_eta: f64::NAN,
            sideband: None,
        }
    }
}

/// Append-only series with strictly increasing time.
#[derive(Debug, Clone, Default)]
pub struct Series {
    records: Vec<DiagnosticsRecord>,
}

impl Series {
    pub fn push(&mut self, r: DiagnosticsRecord) -> Result<()> {
        if let Some(last) = self.records.last() {
            if r.t.partial_cmp(&last.t) != Some(std::cmp::Ordering::Greater) {
                return Err(Error::Usage(format!("series time {} does not follow {}", r.t, last.t)));
            }
        }
        self.records.push(r);
        Ok(())
    }

    pub fn records(&self) -> &[DiagnosticsRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<DiagnosticsRecord> {
        self.records
    }
}

// ---------------------------------------------------------------------------
// Growth-rate fit

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthSample {
    pub t: f64,
    pub amplitude: f64,
    /// Amplitude at which growth is no longer linear.
    pub ceiling: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthFit {
    pub found: bool,
    pub rate: f64,
    pub intercept: f64,
    pub window: (f64, f64),
    pub points: usize,
}

impl GrowthFit {
    fn not_found() -> Self {
        Self {
            found: false,
            rate: f64::NAN,
            intercept: f64::NAN,
            window: (f64::NAN, f64::NAN),
            points: 0,
        }
    }
}

/// Minimum number of samples in a fit window.
pub const MIN_WINDOW_POINTS: usize = 8;
/// Growth must reach this multiple of the initial amplitude to count.
pub const GROWTH_ONSET: f64 = 2.0;
/// Growth is treated as linear while the sideband stays below this fraction of the carrier.
pub const LINEAR_CEILING: f64 = 0.2;

/// Samples from a series' sideband columns.
pub fn growth_samples(records: &[DiagnosticsRecord]) -> Vec<GrowthSample> {
    records
        .iter()
        .filter_map(|r| {
            r.sideband.map(|s| GrowthSample {
                t: r.t,
                amplitude: s.amplitude(),
                ceiling: LINEAR_CEILING * s.carrier,
            })
        })
        .collect()
}

/// Least-squares slope of `log amplitude` over the linear-growth window: from
/// the first sample at `GROWTH_ONSET` times the initial amplitude up to the
/// earlier of the ceiling crossing and the peak.
pub fn measure_growth(samples: &[GrowthSample]) -> GrowthFit {
    let Some(first) = samples.first() else {
        return GrowthFit::not_found();
    };
    if first.amplitude.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return GrowthFit::not_found();
    }
    let Some(start) = samples
        .iter()
        .position(|s| s.amplitude >= GROWTH_ONSET * first.amplitude)
    else {
        return GrowthFit::not_found();
    };
    let mut end = start;
    let mut peak = samples[start].amplitude;
    for (j, s) in samples.iter().enumerate().skip(start + 1) {
        if s.amplitude >= s.ceiling || s.amplitude < peak {
            break;
        }
        peak = s.amplitude;
        end = j;
    }
    let window = &samples[start..=end];
    if window.len() < MIN_WINDOW_POINTS {
        return GrowthFit::not_found();
    }
    let n = window.len() as f64;
    let tm = window.iter().map(|s| s.t).sum::<f64>() / n;
    let ym = window.iter().map(|s| s.amplitude.ln()).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for s in window {
        let dt = s.t - tm;
        sxy += dt * (s.amplitude.ln() - ym);
        sxx += dt * dt;
    }
    let rate = sxy / sxx;
    GrowthFit {
        found: rate > 0.0,
        rate,
        intercept: ym - rate * tm,
        window: (window[0].t, window[window.len() - 1].t),
        points: window.len(),
    }
}

// ---------------------------------------------------------------------------
// Stability map

pub const STABILITY_HEADER: [&str; 4] = ["gamma", "lambda", "Gamma", "sigma_over_omega0"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityRow {
    pub gamma: f64,
    pub lambda: f64,
    pub gamma_factor: f64,
    pub sigma: f64,
    pub sigma_over_omega0: f64,
}

/// `Γ` and `σ/ω₀` on the grid `config.gammas × {λ_step, 2λ_step, …, λ_max}`.
pub fn run_stability_map(cfg: &ScenarioConfig) -> Result<Vec<StabilityRow>> {
    let steps = (cfg.lambda_max / cfg.lambda_step).round() as usize;
    let mut rows = Vec::with_capacity(cfg.gammas.len() * steps);
    for &gamma in &cfg.gammas {
        let p = cfg.params_for(gamma)?;
        let c = compute_coefficients(&p)?;
        let b0 = cfg.b0(&p);
        for j in 1..=steps {
            let lambda = j as f64 * cfg.lambda_step;
            let bf = bf_growth_with(lambda, b0, &p, &c);
            rows.push(StabilityRow {
                gamma,
                lambda,
                gamma_factor: bf.gamma_factor,
                sigma: bf.sigma,
                sigma_over_omega0: bf.sigma_over_omega0,
            });
        }
    }
    Ok(rows)
}

pub fn write_stability(path: &std::path::Path, rows: &[StabilityRow]) -> Result<()> {
    io::write_table(
        path,
        &STABILITY_HEADER,
        rows.iter()
            .map(|r| vec![r.gamma, r.lambda, r.gamma_factor, r.sigma_over_omega0]),
    )
}
