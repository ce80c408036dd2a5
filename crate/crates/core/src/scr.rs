//! Successive convex relaxation.
//!
//! Solve the relaxation, stop if every flow row is integral, otherwise pin
//! the smallest fractional entries to zero and solve again. One maximal
//! entry per row is protected each round, so every row keeps a start and
//! the loop ends after at most `sum_n (|S_n| - 1) + 1` solves.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{flows_to_schedule, row_argmax, DropSet, FlowConfiguration, Schedule};
use crate::ipm::SolverSettings;
use crate::model::ProblemInstance;
use crate::objective::ObjectiveKind;
use crate::oracle::evaluate_schedule;
use crate::relaxed::solve_relaxed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScrConfig {
    /// Entries below this value may be dropped after the first one.
    pub theta_d: f64,
    /// Maximum number of entries dropped per iteration.
    pub n_d: usize,
    pub eps_int: f64,
    pub eps_zero: f64,
    /// Safety cap; `None` means `sum_n |S_n|`.
    pub max_iterations: Option<usize>,
    pub solver: SolverSettings,
}

impl Default for ScrConfig {
    fn default() -> Self {
        ScrConfig {
            theta_d: 0.1,
            n_d: 1,
            eps_int: 1e-6,
            eps_zero: 1e-6,
            max_iterations: None,
            solver: SolverSettings::default(),
        }
    }
}

impl ScrConfig {
    pub fn with_n_d(self, n_d: usize) -> Self {
        ScrConfig { n_d, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta_d > 0.0 && self.theta_d < 1.0) {
            return Err(Error::InvalidConfig(format!("theta_d must lie in (0, 1), got {}", self.theta_d)));
        }
        if self.n_d == 0 {
            return Err(Error::InvalidConfig("n_d must be at least 1".into()));
        }
        if !(self.eps_int > 0.0 && self.eps_int < 0.5) || !(self.eps_zero > 0.0 && self.eps_zero < 0.5) {
            return Err(Error::InvalidConfig("integrality tolerances must lie in (0, 0.5)".into()));
        }
        self.solver.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    /// Relaxed optimum: cents for cost, peak load in kWh for PAR.
    pub relaxed_objective: f64,
    /// `(user, start)` pairs dropped after this solve, in drop order.
    pub dropped: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScrResult {
    pub schedule: Schedule,
    /// Objective of the final Boolean schedule (cents, or PAR ratio).
    pub upper_bound: f64,
    /// First relaxed optimum in the same unit as `upper_bound`.
    pub lower_bound: f64,
    pub iterations: usize,
    pub trace: Vec<IterationRecord>,
    /// Every dropped pair in the order it was dropped.
    pub drop_history: Vec<(usize, usize)>,
}

impl ScrResult {
    pub fn gap(&self) -> f64 {
        self.upper_bound - self.lower_bound
    }
}

pub fn successive_convex_relaxation(
    instance: &ProblemInstance,
    kind: ObjectiveKind,
    config: &ScrConfig,
) -> Result<ScrResult> {
    config.validate()?;
    let max_iterations = config.max_iterations.unwrap_or_else(|| instance.flow_variable_count());
    let mut dropset = DropSet::new();
    let mut trace = Vec::new();
    let mut drop_history = Vec::new();

    for _ in 0..max_iterations {
        let relaxed = solve_relaxed(instance, kind, &dropset, &config.solver)?;
        let mut record = IterationRecord {
            relaxed_objective: relaxed.objective_value,
            dropped: Vec::new(),
        };

        if is_integral(instance, &relaxed.flows, config) {
            trace.push(record);
            let eps = config.eps_int.max(config.eps_zero);
            let schedule = flows_to_schedule(instance, &relaxed.flows, eps)?;
            let upper_bound = evaluate_schedule(instance, kind, &schedule)?;
            let lower_bound = to_objective_units(instance, kind, trace[0].relaxed_objective);
            return Ok(ScrResult {
                schedule,
                upper_bound,
                lower_bound,
                iterations: trace.len(),
                trace,
                drop_history,
            });
        }

        for (n, s) in select_drops(instance, &relaxed.flows, &dropset, config) {
            dropset.insert(n, s);
            record.dropped.push((n, s));
            drop_history.push((n, s));
        }
        trace.push(record);
    }
    Err(Error::IterationLimitExceeded(max_iterations))
}

/// Peak load `Gamma` becomes the PAR ratio; cost is already in cents.
fn to_objective_units(instance: &ProblemInstance, kind: ObjectiveKind, relaxed: f64) -> f64 {
    match kind {
        ObjectiveKind::Cost => relaxed,
        ObjectiveKind::Par => instance.slots() as f64 * relaxed / instance.total_energy(),
    }
}

fn is_integral(instance: &ProblemInstance, flows: &FlowConfiguration, config: &ScrConfig) -> bool {
    instance.start_sets().iter().enumerate().all(|(n, set)| {
        let (best, max) = row_argmax(flows, n, set.as_slice());
        max >= 1.0 - config.eps_int && set.iter().all(|s| s == best || flows.get(n, s) <= config.eps_zero)
    })
}

/// Entries to drop after a non-integral solve, in drop order.
fn select_drops(
    instance: &ProblemInstance,
    flows: &FlowConfiguration,
    dropset: &DropSet,
    config: &ScrConfig,
) -> Vec<(usize, usize)> {
    // (value, user, position in start set, start slot)
    let mut candidates: Vec<(f64, usize, usize, usize)> = Vec::new();
    for (n, set) in instance.start_sets().iter().enumerate() {
        let (protected, _) = row_argmax(flows, n, set.as_slice());
        for (pos, s) in set.iter().enumerate() {
            if s == protected || dropset.contains(n, s) {
                continue;
            }
            let v = flows.get(n, s);
            if v < 1.0 - config.eps_int {
                candidates.push((v, n, pos, s));
            }
        }
    }
    candidates.sort_by(|a, b| match a.0.total_cmp(&b.0) {
        Ordering::Equal => (a.1, a.2).cmp(&(b.1, b.2)),
        other => other,
    });

    let mut drops = Vec::new();
    for (i, &(v, n, _, s)) in candidates.iter().enumerate() {
        if i > 0 && (drops.len() >= config.n_d || v >= config.theta_d) {
            break;
        }
        drops.push((n, s));
    }
    drops
}
