use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

mod appendix_cmd;
mod config;
mod output;
mod run;
mod validate;

use config::{load, resolve, Overrides};
use run::Experiment;

const OUTPUT_HELP: &str = "\
Output files (written to --out, or output_dir from the config):
  events.csv        trial,molecule,x,y,z,omega_n,omega_in,tau_det
  histogram.csv     bin_lo,bin_hi,count,psi_sq_bin_mean,psi_abs_bin_mean
  rarified.csv      delta_over_omega,density,trials,no_resonance_fraction,mean_multiplicity,predicted_fraction
  transverse_scale.csv  width,molecules,mean_multiplicity,predicted_multiplicity
  summary.json      resolved configuration plus results or verdict
  appendix.json     full neutron-estimate report
Floating-point values use shortest round-trip formatting.";

#[derive(Debug, Parser)]
#[command(name = "quasidetect", version, about = "Quasi-continuum detection simulator", after_help = OUTPUT_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Master seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
    /// Number of trials (overrides the config).
    #[arg(long)]
    trials: Option<u64>,
}

impl RunArgs {
    fn resolved(&self) -> Result<config::Resolved> {
        let overrides = Overrides {
            seed: self.seed,
            trials: self.trials,
            out: self.out.clone(),
        };
        resolve(load(&self.config, &overrides)?)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the trial ensemble and fit the detection histogram.
    Simulate(RunArgs),
    /// Run a named experiment: dissipation_free, spectral_bias, rarified,
    /// transverse_scale or repeatability.
    Experiment {
        name: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Print the slow-neutron order-of-magnitude report.
    Appendix {
        #[command(flatten)]
        inputs: appendix_cmd::AppendixArgs,
        /// Output directory for appendix.json.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Check a configuration and print regime diagnostics.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(args) => run::simulate(&args.resolved()?, args.threads),
        Command::Experiment { name, run: args } => {
            let which: Experiment = name.parse()?;
            run::experiment(which, &args.resolved()?, args.threads)
        }
        Command::Appendix { inputs, out } => appendix_cmd::run(&inputs, &out).map(|_| ()),
        Command::Validate { config } => validate::run(&resolve(load(&config, &Overrides::default())?)?),
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
