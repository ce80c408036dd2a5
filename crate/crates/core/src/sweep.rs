//! Bound, gap and iteration sweeps over seeded random instances.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{generate_instance, ApplianceCatalog};
use crate::error::{Error, Result};
use crate::objective::ObjectiveKind;
use crate::parallel::{thread_pool, worker_count};
use crate::scr::{successive_convex_relaxation, ScrConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsRow {
    pub n: usize,
    pub n_d: usize,
    pub seed: u64,
    pub objective: ObjectiveKind,
    pub lb: f64,
    pub ub: f64,
    pub gap: f64,
    pub iterations: usize,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultsTable {
    pub rows: Vec<ResultsRow>,
}

impl ResultsTable {
    pub fn to_csv(&self) -> Result<String> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            writer.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
        }
        if self.rows.is_empty() {
            writer
                .write_record(["n", "n_d", "seed", "objective", "lb", "ub", "gap", "iterations", "wall_ms"])
                .map_err(|e| Error::Io(e.to_string()))?;
        }
        let bytes = writer.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.rows).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let rows = csv::Reader::from_reader(text.as_bytes())
            .deserialize()
            .collect::<std::result::Result<Vec<ResultsRow>, _>>()
            .map_err(|e| Error::Io(e.to_string()))?;
        Ok(ResultsTable { rows })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rows = serde_json::from_str(text).map_err(|e| Error::Io(e.to_string()))?;
        Ok(ResultsTable { rows })
    }
}

/// Instances of each size drawn from a catalog.
#[derive(Debug, Clone)]
pub struct InstanceFamily {
    pub sizes: Vec<usize>,
    pub catalog: ApplianceCatalog,
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    /// Base configuration; `n_d` is overridden per row.
    pub config: ScrConfig,
    /// When false, `wall_ms` is written as 0 so outputs are reproducible.
    pub record_timing: bool,
    pub workers: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            config: ScrConfig::default(),
            record_timing: true,
            workers: worker_count(),
        }
    }
}

/// Runs SCR for every `(n, n_d, seed)` combination. Rows come out in that
/// nesting order regardless of which worker finishes first.
pub fn scr_sweep(
    family: &InstanceFamily,
    objective: ObjectiveKind,
    n_d_list: &[usize],
    seeds: &[u64],
    options: &SweepOptions,
) -> Result<ResultsTable> {
    let jobs: Vec<(usize, usize, u64)> = family
        .sizes
        .iter()
        .flat_map(|&n| n_d_list.iter().flat_map(move |&n_d| seeds.iter().map(move |&seed| (n, n_d, seed))))
        .collect();

    let run = |&(n, n_d, seed): &(usize, usize, u64)| -> Result<ResultsRow> {
        let instance = generate_instance(n, seed, &family.catalog)?;
        let started = Instant::now();
        let result = successive_convex_relaxation(&instance, objective, &options.config.with_n_d(n_d))?;
        let wall_ms = if options.record_timing {
            started.elapsed().as_micros() as f64 / 1000.0
        } else {
            0.0
        };
        Ok(ResultsRow {
            n,
            n_d,
            seed,
            objective,
            lb: result.lower_bound,
            ub: result.upper_bound,
            gap: result.gap(),
            iterations: result.iterations,
            wall_ms,
        })
    };

    let rows: Vec<Result<ResultsRow>> = if options.workers <= 1 {
        jobs.iter().map(run).collect()
    } else {
        thread_pool(options.workers)?.install(|| jobs.par_iter().map(run).collect())
    };
    Ok(ResultsTable {
        rows: rows.into_iter().collect::<Result<_>>()?,
    })
}
