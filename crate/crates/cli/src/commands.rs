use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use atomsched::oracle::brute_force;
use atomsched::{
    generate_instance, parse_instance, scr_sweep, serialize_instance, successive_convex_relaxation,
    ApplianceCatalog, InstanceFamily, ObjectiveKind, ProblemInstance, ScrConfig, Schedule, SweepOptions,
};
use serde::Serialize;

use crate::args::Format;
use crate::output::write_atomic;
use crate::CliError;

#[derive(Debug, Serialize)]
struct Placement {
    appliance: usize,
    name: String,
    start: usize,
    start_time: String,
    end_time: String,
}

#[derive(Debug, Serialize)]
struct SolveReport {
    objective: ObjectiveKind,
    lb: f64,
    ub: f64,
    gap: f64,
    iterations: usize,
    schedule: Vec<Placement>,
}

/// One CSV row per appliance, with the run summary repeated.
#[derive(Debug, Serialize)]
struct SolveRow<'a> {
    objective: ObjectiveKind,
    lb: f64,
    ub: f64,
    gap: f64,
    iterations: usize,
    appliance: usize,
    name: &'a str,
    start: usize,
    start_time: &'a str,
    end_time: &'a str,
}

fn load(path: &Path) -> Result<ProblemInstance, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_instance(&text).map_err(|source| CliError::Instance {
        path: path.display().to_string(),
        source,
    })
}

fn placements(instance: &ProblemInstance, schedule: &Schedule) -> Vec<Placement> {
    let horizon = instance.horizon();
    instance
        .appliances()
        .iter()
        .zip(schedule.starts())
        .enumerate()
        .map(|(appliance, (a, &start))| Placement {
            appliance,
            name: a.name().to_owned(),
            start,
            start_time: horizon.clock_time(start),
            end_time: horizon.clock_time(start + a.delta()),
        })
        .collect()
}

fn render_schedule(out: &mut String, schedule: &[Placement]) {
    let width = schedule.iter().map(|p| p.name.len()).max().unwrap_or(0);
    for p in schedule {
        let _ = writeln!(
            out,
            "  {:>3}  {:<width$}  slot {:>2}  {}-{}",
            p.appliance, p.name, p.start, p.start_time, p.end_time
        );
    }
}

pub fn solve(path: &Path, objective: ObjectiveKind, theta_d: f64, n_d: usize, format: Format) -> Result<String, CliError> {
    let instance = load(path)?;
    let config = ScrConfig {
        theta_d,
        n_d,
        ..ScrConfig::default()
    };
    let result = successive_convex_relaxation(&instance, objective, &config)?;
    let report = SolveReport {
        objective,
        lb: result.lower_bound,
        ub: result.upper_bound,
        gap: result.gap(),
        iterations: result.iterations,
        schedule: placements(&instance, &result.schedule),
    };
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(&report)? + "\n"),
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            for p in &report.schedule {
                writer.serialize(SolveRow {
                    objective,
                    lb: report.lb,
                    ub: report.ub,
                    gap: report.gap,
                    iterations: report.iterations,
                    appliance: p.appliance,
                    name: &p.name,
                    start: p.start,
                    start_time: &p.start_time,
                    end_time: &p.end_time,
                })?;
            }
            let bytes = writer.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
        }
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "objective   {objective}");
            let _ = writeln!(out, "lower bound {}", report.lb);
            let _ = writeln!(out, "upper bound {}", report.ub);
            let _ = writeln!(out, "gap         {}", report.gap);
            let _ = writeln!(out, "iterations  {}", report.iterations);
            let _ = writeln!(out, "schedule");
            render_schedule(&mut out, &report.schedule);
            Ok(out)
        }
    }
}

pub fn enumerate(path: &Path, objective: ObjectiveKind, limit: u64) -> Result<String, CliError> {
    let instance = load(path)?;
    let result = brute_force(&instance, objective, limit)?;
    let mut out = String::new();
    let _ = writeln!(out, "objective      {objective}");
    let _ = writeln!(out, "global optimum {}", result.objective_value);
    let _ = writeln!(out, "evaluations    {}", result.evaluations);
    let _ = writeln!(out, "schedule");
    render_schedule(&mut out, &placements(&instance, &result.schedule));
    Ok(out)
}

pub fn generate(n: usize, seed: u64, out: Option<&Path>) -> Result<String, CliError> {
    let instance = generate_instance(n, seed, &ApplianceCatalog::residential())?;
    let text = serialize_instance(&instance)?;
    match out {
        Some(path) => {
            write_atomic(path, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

pub struct BenchRequest<'a> {
    pub sizes: &'a [usize],
    pub n_d_list: &'a [usize],
    pub seeds: &'a [u64],
    pub objective: ObjectiveKind,
    pub theta_d: f64,
    pub out: Option<&'a Path>,
    pub timing: bool,
}

pub fn bench(req: BenchRequest<'_>) -> Result<String, CliError> {
    let family = InstanceFamily {
        sizes: req.sizes.to_vec(),
        catalog: ApplianceCatalog::residential(),
    };
    let options = SweepOptions {
        config: ScrConfig {
            theta_d: req.theta_d,
            ..ScrConfig::default()
        },
        record_timing: req.timing,
        ..SweepOptions::default()
    };
    let table = scr_sweep(&family, req.objective, req.n_d_list, req.seeds, &options)?;
    match req.out {
        Some(path) => {
            let json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
            let text = if json { table.to_json()? + "\n" } else { table.to_csv()? };
            write_atomic(path, &text)?;
            Ok(format!("wrote {} rows to {}\n", table.rows.len(), path.display()))
        }
        None => Ok(table.to_csv()?),
    }
}
