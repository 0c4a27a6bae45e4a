// SPDX-License-Identifier: MIT OR Apache-2.0

//! Command line and config file handling. A config file supplies a TOML
//! table; flags overwrite its keys before the table is checked against the
//! subcommand's config type.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

pub const THREADS_ENV: &str = "SARGMAX_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "sargmax-lab", version, about = "Smallest and largest argmax of jump processes")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML config; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for replications (0: all cores). Falls back to SARGMAX_LAB_THREADS.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Master seed, below 2^63.
    #[arg(long, global = true, value_parser = clap::value_parser!(i64).range(0..))]
    pub seed: Option<i64>,
    /// Directory for result files.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Smallest and largest argmax of a process read from JSON.
    Sargmax {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        tie_tol: Option<f64>,
    },
    /// Skorohod distance of two step functions, or the matching bound for two processes.
    Distance {
        #[arg(long)]
        f: Option<PathBuf>,
        #[arg(long)]
        g: Option<PathBuf>,
    },
    /// One path of a two-sided compound Poisson process and its extreme argmaxes.
    SimulateCpp {
        #[arg(long)]
        horizon: Option<f64>,
    },
    /// Least squares change-point fit of a `y,z` CSV.
    FitChangepoint {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        c1: Option<f64>,
        #[arg(long)]
        c2: Option<f64>,
    },
    /// Replicated change-point fits against the limit law.
    McChangepoint {
        #[arg(long)]
        reps: Option<usize>,
    },
    /// Replicated Cox threshold fits.
    McCox {
        #[arg(long)]
        reps: Option<usize>,
    },
    /// Paths whose processes converge while their maximizers do not.
    Counterexample {
        #[arg(long)]
        rate: Option<f64>,
        /// Comma separated sample sizes.
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
        #[arg(long)]
        reps: Option<usize>,
    },
    /// Deterministic convergence suite with a negative control.
    Theorem1 {
        /// Comma separated sample sizes.
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sargmax { .. } => "sargmax",
            Command::Distance { .. } => "distance",
            Command::SimulateCpp { .. } => "simulate-cpp",
            Command::FitChangepoint { .. } => "fit-changepoint",
            Command::McChangepoint { .. } => "mc-changepoint",
            Command::McCox { .. } => "mc-cox",
            Command::Counterexample { .. } => "counterexample",
            Command::Theorem1 { .. } => "theorem1",
        }
    }
}

/// Key/value pairs set from flags.
#[derive(Default)]
pub struct Overrides(Vec<(&'static str, toml::Value)>);

impl Overrides {
    pub fn set(&mut self, key: &'static str, value: Option<impl Into<toml::Value>>) {
        if let Some(v) = value {
            self.0.push((key, v.into()));
        }
    }

    pub fn set_path(&mut self, key: &'static str, value: Option<&Path>) {
        self.set(key, value.map(|p| p.display().to_string()));
    }

    pub fn set_list(&mut self, key: &'static str, value: Option<&[usize]>) {
        if let Some(v) = value {
            let items = v.iter().map(|&n| toml::Value::Integer(n as i64)).collect::<Vec<_>>();
            self.0.push((key, toml::Value::Array(items)));
        }
    }
}

/// `--threads`, then the environment.
pub fn threads(flag: Option<usize>) -> Result<Option<usize>, String> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(THREADS_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| format!("{THREADS_ENV} must be a nonnegative integer, got '{s}'")),
        Err(_) => Ok(None),
    }
}

/// Reads the config table, applies the overrides and deserializes it.
pub fn effective<T: DeserializeOwned>(path: Option<&Path>, overrides: Overrides) -> Result<T, String> {
    let mut table = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            text.parse::<toml::Table>().map_err(|e| format!("{}: {e}", p.display()))?
        }
        None => toml::Table::new(),
    };
    for (k, v) in overrides.0 {
        table.insert(k.to_string(), v);
    }
    let source = path.map_or_else(|| "flags".to_string(), |p| p.display().to_string());
    serde_path_to_error::deserialize(toml::Value::Table(table))
        .map_err(|e: serde_path_to_error::Error<toml::de::Error>| format!("{source}: {}: {}", e.path(), e.inner().message()))
}
