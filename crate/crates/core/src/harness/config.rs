//! Flat `key = value` scenario configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::coeffs::{a0_from_b0, b0_from_a0, PhysicalParams};
use crate::envelope::Variant;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunKind {
    Full,
    Dysthe,
    Compare,
    StabilityMap,
    ReconstructCheck,
    EnergyCheck,
}

impl FromStr for RunKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "full" | "simulate-full" => RunKind::Full,
            "dysthe" | "simulate-dysthe" => RunKind::Dysthe,
            "compare" => RunKind::Compare,
            "stability-map" => RunKind::StabilityMap,
            "reconstruct-check" => RunKind::ReconstructCheck,
            "energy-check" => RunKind::EnergyCheck,
            other => return Err(Error::config(format!("kind: unknown run kind '{other}'"))),
        })
    }
}

impl fmt::Display for RunKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunKind::Full => "full",
            RunKind::Dysthe => "dysthe",
            RunKind::Compare => "compare",
            RunKind::StabilityMap => "stability-map",
            RunKind::ReconstructCheck => "reconstruct-check",
            RunKind::EnergyCheck => "energy-check",
        })
    }
}

/// How the weakly nonlinear surface is recovered from the envelope.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reconstruction {
    Full,
    Partial,
}

impl FromStr for Reconstruction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "full" => Ok(Reconstruction::Full),
            "partial" => Ok(Reconstruction::Partial),
            other => Err(Error::config(format!(
                "reconstruction: expected full or partial, got '{other}'"
            ))),
        }
    }
}

impl fmt::Display for Reconstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reconstruction::Full => "full",
            Reconstruction::Partial => "partial",
        })
    }
}

/// The wave amplitude as given; the other one is derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AmplitudeSpec {
    B0(f64),
    A0(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub kind: RunKind,
    pub g: f64,
    pub gamma: f64,
    pub k0: f64,
    pub amplitude: AmplitudeSpec,
    pub lambda_pert: f64,
    pub n_nodes: usize,
    pub dt: f64,
    pub t_end: f64,
    pub dno_order: usize,
    pub snapshot_times: Vec<f64>,
    pub variant: Variant,
    pub output_dir: PathBuf,
    pub output_interval: f64,
    pub reconstruction: Reconstruction,
    /// Flow step for reconstruction; defaults to `dt`.
    pub ds: f64,
    /// Blow-up threshold as a multiple of the initial crest.
    pub crest_factor: f64,
    pub gammas: Vec<f64>,
    pub lambda_max: f64,
    pub lambda_step: f64,
}

/// Recognised keys.
pub const KEYS: &[&str] = &[
    "kind",
    "g",
    "gamma",
    "k0",
    "B0",
    "A0",
    "lambda_pert",
    "n_nodes",
    "dt",
    "t_end",
    "dno_order",
    "snapshot_times",
    "variant",
    "output_dir",
    "output_interval",
    "reconstruction",
    "ds",
    "crest_factor",
    "gammas",
    "lambda_max",
    "lambda_step",
];

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::config(format!("{key}: cannot parse '{}'", v.trim())))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect()
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",")
}

impl ScenarioConfig {
    /// Build from `(key, value)` pairs; later pairs override earlier ones.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let mut map: BTreeMap<&str, &str> = BTreeMap::new();
        for (k, v) in pairs {
            let k = k.trim();
            if !KEYS.contains(&k) {
                return Err(Error::config(format!("{k}: unknown key")));
            }
            map.insert(k, v);
        }
        let get = |k: &str| map.get(k).copied();
        let require = |k: &str| get(k).ok_or_else(|| Error::config(format!("{k}: missing required key")));

        let kind: RunKind = match get("kind") {
            Some(v) => parse("kind", v)?,
            None => RunKind::Compare,
        };
        let gamma = match (get("gamma"), kind) {
            (Some(v), _) => parse("gamma", v)?,
            (None, RunKind::StabilityMap) => 0.0,
            (None, _) => return Err(Error::config("gamma: missing required key")),
        };
        let k0: f64 = parse("k0", require("k0")?)?;
        let amplitude = match (get("B0"), get("A0")) {
            (Some(b), None) => AmplitudeSpec::B0(parse("B0", b)?),
            (None, Some(a)) => AmplitudeSpec::A0(parse("A0", a)?),
            (Some(_), Some(_)) => return Err(Error::config("B0/A0: give exactly one amplitude, not both")),
            (None, None) => return Err(Error::config("B0: missing required key (or give A0)")),
        };
        let dt: f64 = get("dt").map(|v| parse("dt", v)).transpose()?.unwrap_or(0.005);
        let cfg = Self {
            kind,
            g: get("g").map(|v| parse("g", v)).transpose()?.unwrap_or(1.0),
            gamma,
            k0,
            amplitude,
            lambda_pert: get("lambda_pert")
                .map(|v| parse("lambda_pert", v))
                .transpose()?
                .unwrap_or(1.0),
            n_nodes: get("n_nodes").map(|v| parse("n_nodes", v)).transpose()?.unwrap_or(512),
            dt,
            t_end: get("t_end").map(|v| parse("t_end", v)).transpose()?.unwrap_or(1000.0),
            dno_order: get("dno_order")
                .map(|v| parse("dno_order", v))
                .transpose()?
                .unwrap_or(6),
            snapshot_times: get("snapshot_times")
                .map(|v| parse_list("snapshot_times", v))
                .transpose()?
                .unwrap_or_default(),
            variant: get("variant")
                .map(|v| parse("variant", v))
                .transpose()?
                .unwrap_or(Variant::Narrowband),
            output_dir: PathBuf::from(get("output_dir").unwrap_or("out").trim()),
            output_interval: get("output_interval")
                .map(|v| parse("output_interval", v))
                .transpose()?
                .unwrap_or(1.0),
            reconstruction: get("reconstruction")
                .map(|v| parse("reconstruction", v))
                .transpose()?
                .unwrap_or(Reconstruction::Full),
            ds: get("ds").map(|v| parse("ds", v)).transpose()?.unwrap_or(dt),
            crest_factor: get("crest_factor")
                .map(|v| parse("crest_factor", v))
                .transpose()?
                .unwrap_or(10.0),
            gammas: get("gammas")
                .map(|v| parse_list("gammas", v))
                .transpose()?
                .unwrap_or_else(|| vec![-2.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.0]),
            lambda_max: get("lambda_max")
                .map(|v| parse("lambda_max", v))
                .transpose()?
                .unwrap_or(20.0),
            lambda_step: get("lambda_step")
                .map(|v| parse("lambda_step", v))
                .transpose()?
                .unwrap_or(0.01),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `(key, value)` pairs of a flat text file; `#` starts a comment.
    pub fn pairs_from_text(text: &str) -> Result<Vec<(String, String)>> {
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {}: expected key = value, got '{line}'", i + 1)))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(pairs)
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let pairs = Self::pairs_from_text(text)?;
        Self::from_pairs(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_text(&text)
    }

    /// Flat text form; `parse_text(to_text())` reproduces the config.
    pub fn to_text(&self) -> String {
        let amp = match self.amplitude {
            AmplitudeSpec::B0(b) => format!("B0 = {b}"),
            AmplitudeSpec::A0(a) => format!("A0 = {a}"),
        };
        let mut lines = vec![
            format!("kind = {}", self.kind),
            format!("g = {}", self.g),
            format!("gamma = {}", self.gamma),
            format!("k0 = {}", self.k0),
            amp,
            format!("lambda_pert = {}", self.lambda_pert),
            format!("n_nodes = {}", self.n_nodes),
            format!("dt = {}", self.dt),
            format!("t_end = {}", self.t_end),
            format!("dno_order = {}", self.dno_order),
            format!("snapshot_times = {}", join(&self.snapshot_times)),
            format!("variant = {}", self.variant),
            format!("output_dir = {}", self.output_dir.display()),
            format!("output_interval = {}", self.output_interval),
            format!("reconstruction = {}", self.reconstruction),
            format!("ds = {}", self.ds),
            format!("crest_factor = {}", self.crest_factor),
            format!("gammas = {}", join(&self.gammas)),
            format!("lambda_max = {}", self.lambda_max),
            format!("lambda_step = {}", self.lambda_step),
        ];
        lines.push(String::new());
        lines.join("\n")
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("dt", self.dt),
            ("ds", self.ds),
            ("output_interval", self.output_interval),
            ("crest_factor", self.crest_factor),
            ("lambda_step", self.lambda_step),
            ("lambda_max", self.lambda_max),
        ];
        for (k, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!("{k}: must be positive, got {v}")));
            }
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::config(format!(
                "t_end: must be non-negative, got {}",
                self.t_end
            )));
        }
        if self.k0.fract() != 0.0 || self.k0 <= 0.0 {
            return Err(Error::config(format!(
                "k0: must be a positive integer, got {}",
                self.k0
            )));
        }
        if self.lambda_pert.fract() != 0.0 || self.lambda_pert <= 0.0 {
            return Err(Error::config(format!(
                "lambda_pert: must be a positive integer on the periodic cell, got {}",
                self.lambda_pert
            )));
        }
        if 2.0 * self.k0 >= (self.n_nodes / 2) as f64 {
            return Err(Error::config(format!(
                "n_nodes: {} too small to resolve the 2k0 harmonic of k0 = {}",
                self.n_nodes, self.k0
            )));
        }
        match self.amplitude {
            AmplitudeSpec::B0(v) | AmplitudeSpec::A0(v) if !(v >= 0.0 && v.is_finite()) => {
                return Err(Error::config(format!("B0/A0: must be non-negative, got {v}")));
            }
            _ => {}
        }
        for t in &self.snapshot_times {
            if !(*t >= 0.0 && *t <= self.t_end) {
                return Err(Error::config(format!("snapshot_times: {t} outside [0, t_end]")));
            }
        }
        Ok(())
    }

    /// Parameters with ε = k₀A₀.
    pub fn params(&self) -> Result<PhysicalParams> {
        self.params_for(self.gamma)
    }

    pub fn params_for(&self, gamma: f64) -> Result<PhysicalParams> {
        let mut p = PhysicalParams::new(self.g, gamma, self.k0, 0.0)?;
        p.epsilon = self.k0 * self.a0(&p);
        p.validate()?;
        Ok(p)
    }

    pub fn b0(&self, p: &PhysicalParams) -> f64 {
        match self.amplitude {
            AmplitudeSpec::B0(b) => b,
            AmplitudeSpec::A0(a) => b0_from_a0(a, p),
        }
    }

    pub fn a0(&self, p: &PhysicalParams) -> f64 {
        match self.amplitude {
            AmplitudeSpec::B0(b) => a0_from_b0(b, p),
            AmplitudeSpec::A0(a) => a,
        }
    }

    /// Steps between consecutive outputs.
    pub fn steps_per_output(&self) -> usize {
        ((self.output_interval / self.dt).round() as usize).max(1)
    }

    pub fn total_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}
