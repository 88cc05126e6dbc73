use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::Arc;

use crate::coeffs::{compute_coefficients, ModelCoefficients, PhysicalParams};
use crate::dno::DnoExpansion;
use crate::envelope::{action, reduced_hamiltonian_spectral, EnvelopeModel, EnvelopeStepper, Variant};
use crate::error::{Error, Result};
use crate::euler::{
    energy_full, momentum, xi_to_zeta, z_spectrum, zeta_to_xi, CanonicalState, EulerStepper, SurfaceState,
};
use crate::normalform::{demodulate, envelope_to_surface, partial_reconstruct, surface_to_envelope};
use crate::spectral::{ComplexField, RealField, SpectralGrid, C64};

use super::config::{Reconstruction, RunKind, ScenarioConfig};
use super::{io, DiagnosticsRecord, Series, Sideband};

/// Fields stored at a snapshot time. Which ones are present depends on the run.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    /// Full-solver surface.
    pub surface: Option<SurfaceState>,
    /// Surface reconstructed from the envelope.
    pub model_surface: Option<SurfaceState>,
    pub envelope: Option<ComplexField>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub kind: RunKind,
    pub records: Vec<DiagnosticsRecord>,
    pub snapshots: Vec<Snapshot>,
}

/// `u(x, 0) = B₀[1 + 0.1 cos(λx)]`.
pub fn initial_envelope(cfg: &ScenarioConfig, grid: Arc<SpectralGrid>, p: &PhysicalParams) -> ComplexField {
    let b0 = cfg.b0(p);
    let lam = cfg.lambda_pert;
    ComplexField::from_fn(grid, |x| C64::new(b0 * (1.0 + 0.1 * (lam * x).cos()), 0.0))
}

/// Surface obtained by full reconstruction of `u`.
pub fn initial_surface(u: &ComplexField, p: &PhysicalParams, ds: f64) -> Result<SurfaceState> {
    Ok(zeta_to_xi(&envelope_to_surface(u, p, ds)?, p))
}

/// `‖a − b‖₂ / ‖a‖₂` with trapezoid quadrature; zero for identical fields.
pub fn l2_rel_err(a: &RealField, b: &RealField) -> f64 {
    let g = a.grid();
    let diff: Vec<f64> = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y) * (x - y))
        .collect();
    let num = g.trapezoid(&diff);
    if num == 0.0 {
        return 0.0;
    }
    let den: Vec<f64> = a.values().iter().map(|x| x * x).collect();
    (num / g.trapezoid(&den)).sqrt()
}

fn crest(f: &RealField) -> f64 {
    f.values().iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn with_context(e: Error, label: &str) -> Error {
    match e {
        Error::Numeric { context, step } => Error::Numeric {
            context: format!("{label}: {context}"),
            step,
        },
        Error::Configuration(m) => Error::Configuration(format!("{label}: {m}")),
        other => other,
    }
}

fn sideband_of(spec: &[C64], grid: &SpectralGrid, lambda: i64) -> Sideband {
    let at = |k: i64| grid.index_of(k).map(|i| spec[i].norm()).unwrap_or(0.0);
    Sideband {
        carrier: at(0),
        lower: at(-lambda),
        upper: at(lambda),
    }
}

/// Everything shared by the time-marching runs.
struct Setup {
    grid: Arc<SpectralGrid>,
    p: PhysicalParams,
    coeffs: ModelCoefficients,
    dno: DnoExpansion,
    u0: ComplexField,
    outputs: BTreeSet<usize>,
    snapshots: BTreeSet<usize>,
    total: usize,
    label: String,
}

impl Setup {
    fn new(cfg: &ScenarioConfig, label: &str) -> Result<Self> {
        cfg.validate()?;
        let label = format!("{label} (gamma = {})", cfg.gamma);
        let p = cfg.params().map_err(|e| with_context(e, &label))?;
        let coeffs = compute_coefficients(&p).map_err(|e| with_context(e, &label))?;
        let grid = SpectralGrid::shared(cfg.n_nodes)?;
        let total = cfg.total_steps();
        let every = cfg.steps_per_output();
        let snapshots: BTreeSet<usize> = cfg
            .snapshot_times
            .iter()
            .map(|t| ((t / cfg.dt).round() as usize).min(total))
            .collect();
        let mut outputs: BTreeSet<usize> = (0..=total).step_by(every).collect();
        outputs.insert(total);
        outputs.extend(&snapshots);
        Ok(Self {
            u0: initial_envelope(cfg, grid.clone(), &p),
            grid,
            p,
            coeffs,
            dno: DnoExpansion::new(cfg.dno_order),
            outputs,
            snapshots,
            total,
            label,
        })
    }

    fn time(&self, cfg: &ScenarioConfig, step: usize) -> f64 {
        step as f64 * cfg.dt
    }

    fn lambda(&self, cfg: &ScenarioConfig) -> i64 {
        cfg.lambda_pert.round() as i64
    }

    fn euler(&self, cfg: &ScenarioConfig, s0: &SurfaceState) -> Result<EulerStepper> {
        let mut st = EulerStepper::new(self.grid.clone(), self.p, self.dno, cfg.dt)?;
        st.crest_limit = Some(cfg.crest_factor * s0.eta.max_abs());
        Ok(st)
    }

    fn envelope(&self, cfg: &ScenarioConfig) -> Result<(EnvelopeModel, EnvelopeStepper)> {
        let model = EnvelopeModel::new(self.grid.clone(), &self.p, self.coeffs, cfg.variant);
        let stepper = EnvelopeStepper::new(model.clone(), cfg.dt)?;
        Ok((model, stepper))
    }

    fn model_surface(&self, cfg: &ScenarioConfig, u: &ComplexField) -> Result<CanonicalState> {
        match cfg.reconstruction {
            Reconstruction::Full => envelope_to_surface(u, &self.p, cfg.ds),
            Reconstruction::Partial => Ok(partial_reconstruct(u, &self.p)),
        }
        .map_err(|e| with_context(e, &format!("{}: reconstruction", self.label)))
    }

    fn initial_surface(&self, cfg: &ScenarioConfig) -> Result<SurfaceState> {
        initial_surface(&self.u0, &self.p, cfg.ds)
            .map_err(|e| with_context(e, &format!("{}: initial data", self.label)))
    }
}

fn stamp(mut s: SurfaceState, t: f64) -> SurfaceState {
    s.time = t;
    s
}

fn fixed_frame(cfg: &ScenarioConfig) -> Result<()> {
    if cfg.variant == Variant::MovingFrame {
        return Err(Error::config(
            "variant: moving-frame envelopes cannot be compared with a fixed-frame surface",
        ));
    }
    Ok(())
}

/// Full solver and envelope solver side by side from the same reconstructed
/// initial surface, with the relative L² distance between the full surface
/// and the surface reconstructed from the envelope.
pub fn run_compare(cfg: &ScenarioConfig) -> Result<RunOutput> {
    fixed_frame(cfg)?;
    let su = Setup::new(cfg, "compare")?;
    let s0 = su.initial_surface(cfg)?;
    let mut euler = su.euler(cfg, &s0)?;
    let (model, mut env) = su.envelope(cfg)?;
    let mut sp = s0.to_spectral();
    let mut u = su.u0.spectrum();
    let mut series = Series::default();
    let mut snaps = Vec::new();
    let lam = su.lambda(cfg);

    for step in 0..=su.total {
        if su.outputs.contains(&step) {
            let t = su.time(cfg, step);
            let full = stamp(SurfaceState::from_spectral(&su.grid, &sp), t);
            let uf = ComplexField::from_spectrum(su.grid.clone(), &u);
            let model_state = su.model_surface(cfg, &uf)?;
            series.push(DiagnosticsRecord {
                t,
                l2_rel_err: l2_rel_err(&full.eta, &model_state.eta),
                h_full: energy_full(&full, &su.p, &su.dno)?,
                h_reduced: reduced_hamiltonian_spectral(&model, &u),
                i: momentum(&full, &su.p),
                m: action(&uf),
                max_eta: crest(&full.eta),
                sideband: Some(sideband_of(&u, &su.grid, lam)),
            })?;
            if su.snapshots.contains(&step) {
                snaps.push(Snapshot {
                    t,
                    model_surface: Some(stamp(zeta_to_xi(&model_state, &su.p), t)),
                    surface: Some(full),
                    envelope: Some(uf),
                });
            }
        }
        if step == su.total {
            break;
        }
        euler
            .step_spectral(&mut sp)
            .map_err(|e| with_context(e, &format!("{}: full solver", su.label)))?;
        env.step_spectral(&mut u)
            .map_err(|e| with_context(e, &format!("{}: envelope solver", su.label)))?;
    }
    Ok(RunOutput {
        kind: RunKind::Compare,
        records: series.into_records(),
        snapshots: snaps,
    })
}

/// Envelope solver alone. The surface diagnostics use the configured reconstruction.
pub fn run_dysthe(cfg: &ScenarioConfig) -> Result<RunOutput> {
    let su = Setup::new(cfg, "dysthe")?;
    let (model, mut env) = su.envelope(cfg)?;
    let mut u = su.u0.spectrum();
    let mut series = Series::default();
    let mut snaps = Vec::new();
    let lam = su.lambda(cfg);
    // Only a fixed-frame envelope maps back to a physical surface.
    let surface = cfg.variant != Variant::MovingFrame;

    for step in 0..=su.total {
        if su.outputs.contains(&step) {
            let t = su.time(cfg, step);
            let uf = ComplexField::from_spectrum(su.grid.clone(), &u);
            let model_state = if surface {
                Some(su.model_surface(cfg, &uf)?)
            } else {
                None
            };
            let mut r = DiagnosticsRecord::empty(t);
            r.h_reduced = reduced_hamiltonian_spectral(&model, &u);
            r.m = action(&uf);
            r.max_eta = model_state.as_ref().map_or(f64::NAN, |s| crest(&s.eta));
            r.sideband = Some(sideband_of(&u, &su.grid, lam));
            series.push(r)?;
            if su.snapshots.contains(&step) {
                snaps.push(Snapshot {
                    t,
                    surface: None,
                    model_surface: model_state.map(|s| stamp(zeta_to_xi(&s, &su.p), t)),
                    envelope: Some(uf),
                });
            }
        }
        if step == su.total {
            break;
        }
        env.step_spectral(&mut u)
            .map_err(|e| with_context(e, &format!("{}: envelope solver", su.label)))?;
    }
    Ok(RunOutput {
        kind: RunKind::Dysthe,
        records: series.into_records(),
        snapshots: snaps,
    })
}

/// Full solver alone from the reconstructed initial surface. Sidebands are
/// read from the complex coordinate around the carrier.
pub fn run_full(cfg: &ScenarioConfig) -> Result<RunOutput> {
    let su = Setup::new(cfg, "full")?;
    let s0 = su.initial_surface(cfg)?;
    let mut euler = su.euler(cfg, &s0)?;
    let mut sp = s0.to_spectral();
    let mut series = Series::default();
    let mut snaps = Vec::new();
    let lam = su.lambda(cfg);
    let k0 = cfg.k0.round() as i64;

    for step in 0..=su.total {
        if su.outputs.contains(&step) {
            let t = su.time(cfg, step);
            let full = stamp(SurfaceState::from_spectral(&su.grid, &sp), t);
            let c = xi_to_zeta(&full, &su.p);
            let z = z_spectrum(&su.grid, &su.p, &c.eta.spectrum(), &c.zeta.spectrum());
            let mut r = DiagnosticsRecord::empty(t);
            r.h_full = energy_full(&full, &su.p, &su.dno)?;
            r.i = momentum(&full, &su.p);
            r.max_eta = crest(&full.eta);
            r.sideband = Some(sideband_of(&demodulate(&su.grid, &z, k0), &su.grid, lam));
            series.push(r)?;
            if su.snapshots.contains(&step) {
                snaps.push(Snapshot {
                    t,
                    surface: Some(full),
                    model_surface: None,
                    envelope: None,
                });
            }
        }
        if step == su.total {
            break;
        }
        euler
            .step_spectral(&mut sp)
            .map_err(|e| with_context(e, &format!("{}: full solver", su.label)))?;
    }
    Ok(RunOutput {
        kind: RunKind::Full,
        records: series.into_records(),
        snapshots: snaps,
    })
}

fn snapshot_name(prefix: &str, t: f64) -> String {
    format!("{prefix}_t{t:010.3}.csv")
}

/// Write series, sidebands, snapshots and the effective config into
/// `output_dir`. Returns the written paths.
pub fn write_outputs(cfg: &ScenarioConfig, out: &RunOutput) -> Result<Vec<PathBuf>> {
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let cfg_path = dir.join("config.txt");
    std::fs::write(&cfg_path, cfg.to_text()).map_err(|e| Error::io(&cfg_path, e))?;
    written.push(cfg_path);
    let series = dir.join("series.csv");
    io::write_series(&series, &out.records)?;
    written.push(series);
    if out.records.iter().any(|r| r.sideband.is_some()) {
        let sb = dir.join("sidebands.csv");
        io::write_sidebands(&sb, &out.records)?;
        written.push(sb);
    }
    for s in &out.snapshots {
        if let Some(f) = &s.surface {
            let path = dir.join(snapshot_name("surface_full", s.t));
            io::write_surface(&path, f)?;
            written.push(path);
        }
        if let Some(f) = &s.model_surface {
            let path = dir.join(snapshot_name("surface_model", s.t));
            io::write_surface(&path, f)?;
            written.push(path);
        }
        if let Some(u) = &s.envelope {
            let path = dir.join(snapshot_name("envelope", s.t));
            io::write_envelope(&path, u)?;
            written.push(path);
        }
    }
    Ok(written)
}

// ---------------------------------------------------------------------------
// Checks

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructReport {
    /// `max|u − T(T⁻¹u)| / max|u|` for the initial envelope.
    pub round_trip_err: f64,
    /// Relative L² distance between full and partial reconstructions.
    pub partial_vs_full: f64,
    /// Amplitude of the `2k₀` harmonic of the reconstructed uniform wave.
    pub second_harmonic: f64,
    /// Irrotational Stokes value `½k₀A₀²`.
    pub stokes_second_harmonic: f64,
    pub mean_eta: f64,
}

impl ReconstructReport {
    pub fn to_text(&self) -> String {
        [
            ("round_trip_err", self.round_trip_err),
            ("partial_vs_full", self.partial_vs_full),
            ("second_harmonic", self.second_harmonic),
            ("stokes_second_harmonic", self.stokes_second_harmonic),
            ("mean_eta", self.mean_eta),
        ]
        .iter()
        .map(|(k, v)| format!("{k} = {}\n", io::fmt_f64(*v)))
        .collect()
    }
}

/// Reconstruct the initial envelope, transform back, and compare.
pub fn reconstruct_check(cfg: &ScenarioConfig) -> Result<ReconstructReport> {
    let su = Setup::new(cfg, "reconstruct-check")?;
    let full = envelope_to_surface(&su.u0, &su.p, cfg.ds)?;
    let back = surface_to_envelope(&full, &su.p, cfg.ds)?;
    let diff = su
        .u0
        .values()
        .iter()
        .zip(back.values())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
    let partial = partial_reconstruct(&su.u0, &su.p);

    let b0 = cfg.b0(&su.p);
    let uniform = ComplexField::constant(su.grid.clone(), C64::new(b0, 0.0));
    let stokes = envelope_to_surface(&uniform, &su.p, cfg.ds)?;
    let k2 = su
        .grid
        .index_of(2 * cfg.k0.round() as i64)
        .expect("validated: 2k0 resolved");
    let a0 = cfg.a0(&su.p);
    Ok(ReconstructReport {
        round_trip_err: diff / su.u0.max_abs(),
        partial_vs_full: l2_rel_err(&full.eta, &partial.eta),
        second_harmonic: 2.0 * stokes.eta.spectrum()[k2].norm(),
        stokes_second_harmonic: 0.5 * cfg.k0 * a0 * a0,
        mean_eta: full.eta.mean(),
    })
}

#[derive(Debug, Clone)]
pub struct EnergyReport {
    pub dt: f64,
    /// Maximum relative drifts of `H` and `I` over the run at `dt`.
    pub h_drift: f64,
    pub i_drift: f64,
    /// The same at `dt/2`.
    pub h_drift_half: f64,
    pub i_drift_half: f64,
    /// Initial `∫η dx`; nonzero when the reconstruction carries a set-up.
    pub volume: f64,
    /// `max|∫η dx − volume|` over the run at `dt`.
    pub volume_drift: f64,
    pub records: Vec<DiagnosticsRecord>,
}

impl EnergyReport {
    /// Observed order of the energy drift, `log₂(drift(dt)/drift(dt/2))`.
    pub fn order(&self) -> f64 {
        (self.h_drift / self.h_drift_half).log2()
    }

    pub fn to_text(&self) -> String {
        [
            ("dt", self.dt),
            ("h_drift", self.h_drift),
            ("i_drift", self.i_drift),
            ("h_drift_half_dt", self.h_drift_half),
            ("i_drift_half_dt", self.i_drift_half),
            ("observed_order", self.order()),
            ("volume", self.volume),
            ("volume_drift", self.volume_drift),
        ]
        .iter()
        .map(|(k, v)| format!("{k} = {}\n", io::fmt_f64(*v)))
        .collect()
    }
}

/// Full solver from the reconstructed initial surface at `dt` and `dt/2`,
/// tracking the drift of energy and momentum.
pub fn energy_check(cfg: &ScenarioConfig) -> Result<EnergyReport> {
    let su = Setup::new(cfg, "energy-check")?;
    let s0 = su.initial_surface(cfg)?;
    let h0 = energy_full(&s0, &su.p, &su.dno)?;
    let i0 = momentum(&s0, &su.p);
    let v0 = s0.to_spectral().volume();
    let run = |dt: f64, keep: bool| -> Result<(f64, f64, f64, Vec<DiagnosticsRecord>)> {
        let mut st = EulerStepper::new(su.grid.clone(), su.p, su.dno, dt)?;
        st.crest_limit = Some(cfg.crest_factor * s0.eta.max_abs());
        let steps = (cfg.t_end / dt).round() as usize;
        let every = ((cfg.output_interval / dt).round() as usize).max(1);
        let mut sp = s0.to_spectral();
        let (mut dh, mut di, mut vol) = (0.0f64, 0.0f64, 0.0f64);
        let mut series = Series::default();
        for step in 0..=steps {
            if step % every == 0 || step == steps {
                let s = SurfaceState::from_spectral(&su.grid, &sp);
                let h = energy_full(&s, &su.p, &su.dno)?;
                let i = momentum(&s, &su.p);
                dh = dh.max(((h - h0) / h0).abs());
                di = di.max(((i - i0) / i0).abs());
                vol = vol.max((sp.volume() - v0).abs());
                if keep {
                    let mut r = DiagnosticsRecord::empty(step as f64 * dt);
                    r.h_full = h;
                    r.i = i;
                    r.max_eta = crest(&s.eta);
                    series.push(r)?;
                }
            }
            if step < steps {
                st.step_spectral(&mut sp)
                    .map_err(|e| with_context(e, &format!("{}: full solver", su.label)))?;
            }
        }
        Ok((dh, di, vol, series.into_records()))
    };
    let (h_drift, i_drift, volume_drift, records) = run(cfg.dt, true)?;
    let (h_drift_half, i_drift_half, _, _) = run(0.5 * cfg.dt, false)?;
    Ok(EnergyReport {
        dt: cfg.dt,
        h_drift,
        i_drift,
        h_drift_half,
        i_drift_half,
        volume: v0,
        volume_drift,
        records,
    })
}
