use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use shearwave::harness::{self, io, RunKind, ScenarioConfig};
use shearwave::{compute_coefficients, PhysicalParams};

#[derive(Parser)]
#[command(
    name = "shearwave",
    version,
    about = "Deep-water gravity waves over constant vorticity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full nonlinear solver from the reconstructed initial surface.
    SimulateFull(Opts),
    /// Run the envelope equation.
    SimulateDysthe(Opts),
    /// Run both solvers and log the relative L2 error between them.
    Compare(Opts),
    /// Sweep gamma and lambda and write the instability map.
    StabilityMap(Opts),
    /// Reconstruct the initial envelope, transform back and report the mismatch.
    ReconstructCheck(Opts),
    /// Track energy and momentum drift of the full solver at dt and dt/2.
    EnergyCheck(Opts),
    /// Print the envelope-model coefficients.
    Coeffs(Opts),
}

/// Every flag mirrors a config key and overrides the value from `--config`.
#[derive(Args, Clone, Default)]
struct Opts {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (key `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    g: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    #[arg(long)]
    k0: Option<String>,
    #[arg(long = "B0", alias = "b0")]
    b0: Option<String>,
    #[arg(long = "A0", alias = "a0")]
    a0: Option<String>,
    #[arg(long = "lambda_pert", alias = "lambda-pert")]
    lambda_pert: Option<String>,
    #[arg(long = "n_nodes", alias = "n-nodes")]
    n_nodes: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long = "t_end", alias = "t-end")]
    t_end: Option<String>,
    #[arg(long = "dno_order", alias = "dno-order")]
    dno_order: Option<String>,
    /// Comma-separated list.
    #[arg(long = "snapshot_times", alias = "snapshot-times")]
    snapshot_times: Option<String>,
    /// narrowband | full-dispersion | moving-frame
    #[arg(long)]
    variant: Option<String>,
    #[arg(long = "output_interval", alias = "output-interval")]
    output_interval: Option<String>,
    /// full | partial
    #[arg(long)]
    reconstruction: Option<String>,
    #[arg(long)]
    ds: Option<String>,
    #[arg(long = "crest_factor", alias = "crest-factor")]
    crest_factor: Option<String>,
    /// Comma-separated list, for stability-map.
    #[arg(long, allow_hyphen_values = true)]
    gammas: Option<String>,
    #[arg(long = "lambda_max", alias = "lambda-max")]
    lambda_max: Option<String>,
    #[arg(long = "lambda_step", alias = "lambda-step")]
    lambda_step: Option<String>,
}

impl Opts {
    fn flags(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("g", &self.g),
            ("gamma", &self.gamma),
            ("k0", &self.k0),
            ("B0", &self.b0),
            ("A0", &self.a0),
            ("lambda_pert", &self.lambda_pert),
            ("n_nodes", &self.n_nodes),
            ("dt", &self.dt),
            ("t_end", &self.t_end),
            ("dno_order", &self.dno_order),
            ("snapshot_times", &self.snapshot_times),
            ("variant", &self.variant),
            ("output_interval", &self.output_interval),
            ("reconstruction", &self.reconstruction),
            ("ds", &self.ds),
            ("crest_factor", &self.crest_factor),
            ("gammas", &self.gammas),
            ("lambda_max", &self.lambda_max),
            ("lambda_step", &self.lambda_step),
        ]
    }

    fn config(&self, kind: RunKind) -> Result<ScenarioConfig> {
        let mut pairs: Vec<(String, String)> = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                ScenarioConfig::pairs_from_text(&text)?
            }
            None => Vec::new(),
        };
        let mut set = |k: &str, v: String| {
            pairs.retain(|(key, _)| key != k);
            pairs.push((k.to_string(), v));
        };
        for (k, v) in self.flags() {
            if let Some(v) = v {
                set(k, v.clone());
            }
        }
        if let Some(out) = &self.out {
            set("output_dir", out.display().to_string());
        }
        set("kind", kind.to_string());
        // A single amplitude flag replaces whichever amplitude the file gave.
        match (&self.b0, &self.a0) {
            (Some(_), None) => pairs.retain(|(k, _)| k != "A0"),
            (None, Some(_)) => pairs.retain(|(k, _)| k != "B0"),
            _ => {}
        }
        if kind == RunKind::StabilityMap && !pairs.iter().any(|(k, _)| k == "gamma") {
            pairs.push(("gamma".into(), "0".into()));
        }
        Ok(ScenarioConfig::from_pairs(
            pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())),
        )?)
    }
}

fn print_written(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn print_run(cfg: &ScenarioConfig, out: &harness::RunOutput) -> Result<()> {
    print_written(&harness::write_outputs(cfg, out)?);
    if let Some(last) = out.records.last() {
        println!(
            "t = {:.3}: l2_rel_err = {:.6e}, max_eta = {:.6e}",
            last.t, last.l2_rel_err, last.max_eta
        );
    }
    let fit = harness::measure_growth(&harness::growth_samples(&out.records));
    if fit.found {
        println!(
            "sideband growth rate {:.6e} fitted on t in [{:.1}, {:.1}] ({} points)",
            fit.rate, fit.window.0, fit.window.1, fit.points
        );
    } else {
        println!("no linear sideband growth window found");
    }
    Ok(())
}

fn coeffs(cfg: &ScenarioConfig) -> Result<()> {
    let p: PhysicalParams = cfg.params()?;
    let c = compute_coefficients(&p)?;
    let (b0, a0) = (cfg.b0(&p), cfg.a0(&p));
    println!("{:<8} {}", "g", io::fmt_f64(p.g));
    println!("{:<8} {}", "gamma", io::fmt_f64(p.gamma));
    println!("{:<8} {}", "k0", io::fmt_f64(p.k0));
    println!("{:<8} {}", "B0", io::fmt_f64(b0));
    println!("{:<8} {}", "A0", io::fmt_f64(a0));
    println!("{:<8} {}", "epsilon", io::fmt_f64(p.epsilon));
    for (name, v) in c.table() {
        println!("{name:<8} {}", io::fmt_f64(v));
    }
    Ok(())
}

fn stability(cfg: &ScenarioConfig) -> Result<()> {
    let rows = harness::run_stability_map(cfg)?;
    let path = cfg.output_dir.join("stability.csv");
    harness::write_stability(&path, &rows)?;
    println!("wrote {}", path.display());
    for &gamma in &cfg.gammas {
        let unstable: Vec<_> = rows.iter().filter(|r| r.gamma == gamma && r.sigma > 0.0).collect();
        match unstable.iter().max_by(|a, b| a.sigma.total_cmp(&b.sigma)) {
            Some(best) => println!(
                "gamma = {gamma}: unstable for lambda in [{}, {}], max sigma/omega0 = {:.6e} at lambda = {}",
                unstable[0].lambda,
                unstable[unstable.len() - 1].lambda,
                best.sigma_over_omega0,
                best.lambda
            ),
            None => println!("gamma = {gamma}: stable for all scanned lambda"),
        }
    }
    Ok(())
}

fn write_report(cfg: &ScenarioConfig, name: &str, text: &str) -> Result<()> {
    std::fs::create_dir_all(&cfg.output_dir).with_context(|| format!("creating {}", cfg.output_dir.display()))?;
    let path = cfg.output_dir.join(name);
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    print!("{text}");
    println!("wrote {}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::SimulateFull(o) => {
            let cfg = o.config(RunKind::Full)?;
            print_run(&cfg, &harness::run_full(&cfg)?)
        }
        Command::SimulateDysthe(o) => {
            let cfg = o.config(RunKind::Dysthe)?;
            print_run(&cfg, &harness::run_dysthe(&cfg)?)
        }
        Command::Compare(o) => {
            let cfg = o.config(RunKind::Compare)?;
            print_run(&cfg, &harness::run_compare(&cfg)?)
        }
        Command::StabilityMap(o) => stability(&o.config(RunKind::StabilityMap)?),
        Command::ReconstructCheck(o) => {
            let cfg = o.config(RunKind::ReconstructCheck)?;
            write_report(
                &cfg,
                "reconstruct_check.txt",
                &harness::reconstruct_check(&cfg)?.to_text(),
            )
        }
        Command::EnergyCheck(o) => {
            let cfg = o.config(RunKind::EnergyCheck)?;
            let report = harness::energy_check(&cfg)?;
            let series = cfg.output_dir.join("series.csv");
            io::write_series(&series, &report.records)?;
            println!("wrote {}", series.display());
            write_report(&cfg, "energy_check.txt", &report.to_text())
        }
        Command::Coeffs(o) => coeffs(&o.config(RunKind::Compare)?),
    }
}
