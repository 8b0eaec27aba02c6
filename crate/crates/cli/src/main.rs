mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use commands::Failure;
use config::Sources;

/// Simulate, analyse and fit Lévy-driven growth models of star-shaped objects.
#[derive(Parser)]
#[command(
    name = "levy-growth",
    version,
    after_help = "Exit codes: 0 success, 2 configuration error, 3 model error, 4 verification failure."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate radial profiles and write profile and polyline CSVs
    Simulate(Common),
    /// Tabulate the full-angle covariance series (t1, t2, dphi, cov)
    Cov(Common),
    /// Compare analytic moments with Monte Carlo; exits 4 if any |z| exceeds the limit
    McVerify(Common),
    /// Fit a model to profile data and write a JSON report
    Fit(WithData),
    /// Empirical moments of profile data or of simulated replicates
    Moments(WithData),
}

#[derive(Args)]
struct Common {
    /// Built-in preset: ex3, ex4, ex4-wide, ex5, ex5-ig, ex6, tumour
    #[arg(long)]
    preset: Option<String>,
    /// TOML configuration, merged over the preset
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Number of independent replicates
    #[arg(long)]
    replicates: Option<usize>,
    /// Output directory
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Sub-lattice size per axis for partial grid cells
    #[arg(long)]
    fine: Option<usize>,
    /// Override one field, e.g. --set grid.n_angles=512 (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Args)]
struct WithData {
    #[command(flatten)]
    common: Common,
    /// Profile CSV with columns t, phi, r and optional replicate
    #[arg(long)]
    data: Option<PathBuf>,
}

fn flags(c: &Common) -> Vec<(&'static str, Value)> {
    let mut f = Vec::new();
    if let Some(s) = c.seed {
        f.push(("seed", Value::from(s)));
    }
    if let Some(r) = c.replicates {
        f.push(("replicates", Value::from(r)));
    }
    if let Some(d) = &c.out_dir {
        f.push(("out_dir", Value::from(d.to_string_lossy().into_owned())));
    }
    if let Some(t) = c.threads {
        f.push(("threads", Value::from(t)));
    }
    if let Some(r) = c.fine {
        f.push(("fine", Value::from(r)));
    }
    f
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, Failure> {
    let (common, data, section) = match &cli.command {
        Command::Simulate(c) | Command::Cov(c) | Command::McVerify(c) => (c, None, ""),
        Command::Fit(w) => (&w.common, w.data.as_ref(), "fit.data"),
        Command::Moments(w) => (&w.common, w.data.as_ref(), "moments.data"),
    };
    let mut flag_values = flags(common);
    if let Some(d) = data {
        flag_values.push((section, Value::from(d.to_string_lossy().into_owned())));
    }
    let cfg = config::load(&Sources {
        preset: common.preset.as_deref(),
        file: common.config.as_deref(),
        sets: &common.sets,
        flags: flag_values,
    })
    .map_err(|e| Failure::Config(e.0))?;
    if cfg.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build_global()
            .map_err(|e| Failure::Config(format!("field `threads`: {e}")))?;
    }
    match cli.command {
        Command::Simulate(_) => commands::simulate(&cfg),
        Command::Cov(_) => commands::cov(&cfg),
        Command::McVerify(_) => commands::mc_verify_cmd(&cfg),
        Command::Fit(_) => commands::fit(&cfg),
        Command::Moments(_) => commands::moments(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
