use std::path::PathBuf;

use atomsched::ObjectiveKind;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "atomsched", version, about = "Atomic appliance energy-consumption scheduling")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bounds and a Boolean schedule by successive convex relaxation.
    Solve {
        instance: PathBuf,
        #[arg(long, default_value = "cost")]
        objective: ObjectiveKind,
        #[arg(long, default_value_t = 0.1)]
        theta_d: f64,
        #[arg(long, default_value_t = 1)]
        n_d: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Global optimum by direct enumeration.
    Enumerate {
        instance: PathBuf,
        #[arg(long, default_value = "cost")]
        objective: ObjectiveKind,
        /// Refuse instances with more schedules than this.
        #[arg(long, default_value_t = atomsched::oracle::DEFAULT_LIMIT)]
        limit: u64,
    },
    /// Writes a random instance drawn from the residential catalog.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweeps sizes, drop budgets and seeds, writing one row per run.
    Bench {
        /// Appliance counts, e.g. `2-8` or `2,4,10`.
        #[arg(long, value_parser = parse_list::<usize>)]
        n_range: List<usize>,
        #[arg(long, value_parser = parse_list::<usize>, default_value = "1")]
        n_d_list: List<usize>,
        #[arg(long, value_parser = parse_list::<u64>, default_value = "1-20")]
        seeds: List<u64>,
        #[arg(long, default_value = "cost")]
        objective: ObjectiveKind,
        #[arg(long, default_value_t = 0.1)]
        theta_d: f64,
        /// `.json` files get JSON, anything else CSV; standard output (CSV)
        /// when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write `wall_ms` as 0 so repeated runs are byte-identical.
        #[arg(long)]
        no_timing: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct List<T>(pub Vec<T>);

/// Parses comma-separated items, each a value or an inclusive range written
/// `a-b` or `a..b`.
pub fn parse_list<T: TryFrom<u64>>(text: &str) -> Result<List<T>, String> {
    let parse = |s: &str| {
        let s = s.trim();
        s.parse::<u64>().map_err(|_| format!("`{s}` is not a non-negative integer"))
    };
    let mut values = Vec::new();
    for item in text.split(',').filter(|s| !s.trim().is_empty()) {
        let (lo, hi) = match item.split_once("..").or_else(|| item.split_once('-')) {
            Some((lo, hi)) => (parse(lo)?, parse(hi.trim_start_matches('='))?),
            None => (parse(item)?, parse(item)?),
        };
        if lo > hi {
            return Err(format!("empty range `{item}`"));
        }
        for v in lo..=hi {
            values.push(T::try_from(v).map_err(|_| format!("`{v}` is out of range"))?);
        }
    }
    if values.is_empty() {
        return Err("expected at least one value".into());
    }
    Ok(List(values))
}
