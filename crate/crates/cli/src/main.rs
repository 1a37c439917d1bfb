use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod svg;

use config::{Defaults, ExperimentConfig, Layer, Source, UsageError};

/// Particle simulations of the porous medium equation `ρ_t = (ρ^m)_xx`.
#[derive(Parser)]
#[command(name = "pme-particles", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configuration; write trajectory and diagnostics CSVs.
    Simulate(Common),
    /// Integrate and check every discrete estimate; exit status 1 on a violation.
    Verify(Common),
    /// Sweep N against the Barenblatt solution and tabulate the errors.
    Convergence(Common),
    /// Residual of the weak-form identity for bump test functions under grid refinement.
    Consistency(Common),
    /// Emit the barrier configuration used in the support estimate.
    Barrier(Common),
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// "uniform a b", "barenblatt m t0 mass", "barrier N m beta alpha" or "gaussian-truncated a b sigma".
    #[arg(long)]
    density: Option<String>,
    /// Number of intervals; a comma-separated list for `convergence`.
    #[arg(long = "N")]
    n: Option<String>,
    /// Exponent m > 1.
    #[arg(long)]
    m: Option<String>,
    /// Time horizon.
    #[arg(long = "T")]
    horizon: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    rtol: Option<String>,
    #[arg(long)]
    atol: Option<String>,
    /// Number of uniform output times on (0, T], or a comma-separated list of times.
    #[arg(long)]
    times: Option<String>,
    /// Also write SVG plots.
    #[arg(long)]
    plot: bool,
    #[arg(long)]
    seed: Option<String>,
    /// `verify` only: scale stored gaps by random factors in [1 - p, 1 + p].
    #[arg(long)]
    perturb: Option<String>,
    /// Barrier scale β.
    #[arg(long)]
    beta: Option<String>,
    /// Barrier left end α.
    #[arg(long)]
    alpha: Option<String>,
}

impl Common {
    fn layer(&self) -> Layer {
        let mut layer = Layer::default();
        let pairs = [
            ("density", &self.density),
            ("N", &self.n),
            ("m", &self.m),
            ("T", &self.horizon),
            ("out", &self.out),
            ("rtol", &self.rtol),
            ("atol", &self.atol),
            ("times", &self.times),
            ("seed", &self.seed),
            ("perturb", &self.perturb),
            ("beta", &self.beta),
            ("alpha", &self.alpha),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                layer.set(key, v.clone(), Source::Flag);
            }
        }
        if self.plot {
            layer.set("plot", "true", Source::Flag);
        }
        layer
    }

    fn resolve(&self, defaults: Defaults) -> Result<ExperimentConfig> {
        let file = match &self.config {
            Some(path) => Layer::parse_file(path)?,
            None => Layer::default(),
        };
        ExperimentConfig::resolve(&self.layer(), &file, defaults)
    }
}

fn run(cli: Cli) -> Result<bool> {
    let single = Defaults { n: "100", horizon: "1", times: "20" };
    match cli.command {
        Command::Simulate(c) => commands::simulate(&c.resolve(single)?).map(|_| true),
        Command::Verify(c) => commands::verify(&c.resolve(single)?),
        Command::Convergence(c) => {
            let d = Defaults { n: "25,50,100,200", horizon: "2", times: "0.5,1,2" };
            commands::convergence(&c.resolve(d)?).map(|_| true)
        }
        Command::Consistency(c) => {
            let mut cfg = c.resolve(Defaults { n: "60", horizon: "2", times: "50" })?;
            if cfg.density.is_none() {
                cfg.density = Some(format!("barenblatt {} 1 1", cfg.m));
            }
            commands::consistency(&cfg).map(|_| true)
        }
        Command::Barrier(c) => commands::barrier(&c.resolve(Defaults { n: "16", horizon: "1", times: "1" })?).map(|_| true),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.downcast_ref::<UsageError>().is_some() => {
            eprintln!("usage error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
