//! Command-line front end: `evolve`, `validate`, `interpret` and `gen-data`.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{cmd_evolve, cmd_gen_data, cmd_interpret, cmd_validate, prepare, Prepared};
pub use config::{ConfigBuilder, DatasetSource, RunConfig};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "qfm",
    version,
    about = "Evolve quantum feature maps for kernel SVM classification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Default)]
pub struct CommonArgs {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master seed; overrides the file.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory; overrides the file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; overrides the file.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Extra `key=value` overrides, applied after the file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the genetic search and write history, front and best circuit.
    Evolve(CommonArgs),
    /// Refit on the training split and score a validation set.
    Validate {
        #[command(flatten)]
        common: CommonArgs,
        /// Circuit JSON; defaults to <out>/best_circuit.json.
        #[arg(long)]
        circuit: Option<PathBuf>,
    },
    /// Split a circuit into independent qubit clusters and score each.
    Interpret {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        circuit: Option<PathBuf>,
    },
    /// Write the configured synthetic dataset to CSV.
    GenData {
        #[command(flatten)]
        common: CommonArgs,
        /// Output CSV; defaults to <out>/data.csv.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

impl CommonArgs {
    pub fn load(&self) -> Result<RunConfig> {
        let mut b = ConfigBuilder::new();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Error::config(format!("cannot read config {}: {e}", path.display()))
            })?;
            b.apply_text(&text)?;
        }
        for kv in &self.overrides {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::config(format!("--set expects KEY=VALUE, got '{kv}'")))?;
            b.set(k.trim(), v.trim())?;
        }
        if let Some(seed) = self.seed {
            b.set("seed", &seed.to_string())?;
        }
        if let Some(out) = &self.out {
            b.set("out", &out.display().to_string())?;
        }
        if let Some(t) = self.threads {
            b.set("threads", &t.to_string())?;
        }
        b.build()
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Evolve(common) => {
            let config = common.load()?;
            let outcome = cmd_evolve(&config)?;
            let o = outcome.best.objectives.expect("evaluated");
            println!(
                "best accuracy {} size metric {} -> {}",
                o.accuracy,
                o.size_metric,
                outcome.out.display()
            );
        }
        Command::Validate { common, circuit } => {
            let config = common.load()?;
            let circuit = circuit.unwrap_or_else(|| config.out.join(commands::BEST_CIRCUIT_FILE));
            let outcome = cmd_validate(&config, &circuit)?;
            println!(
                "validation accuracy {} ({} of {})",
                outcome.accuracy,
                outcome.confusion.trace(),
                outcome.confusion.total()
            );
        }
        Command::Interpret { common, circuit } => {
            let config = common.load()?;
            let circuit = circuit.unwrap_or_else(|| config.out.join(commands::BEST_CIRCUIT_FILE));
            let report = cmd_interpret(&config, &circuit)?;
            println!("full circuit accuracy {}", report.full.accuracy);
            for c in &report.clusters {
                println!("cluster {:?} accuracy {}", c.qubits, c.accuracy);
            }
        }
        Command::GenData { common, output } => {
            let config = common.load()?;
            let output = output.unwrap_or_else(|| config.out.join("data.csv"));
            let data = cmd_gen_data(&config, &output)?;
            println!("wrote {} rows to {}", data.len(), output.display());
        }
    }
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
