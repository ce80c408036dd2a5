//! Flow-configuration variables and load profiles.
//!
//! Entry `(n, s)` of a flow configuration is the fraction of user `n`'s
//! operation that starts at slot `s`. A Boolean configuration has a single
//! one per row and encodes a schedule; fractional rows only appear inside the
//! convex relaxation.

use std::collections::BTreeSet;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::ProblemInstance;

/// Absolute tolerance on row sums, bounds and zero entries.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfiguration {
    values: DMatrix<f64>,
}

impl FlowConfiguration {
    /// Wraps an `N x H` matrix after checking relaxed feasibility.
    pub fn new(instance: &ProblemInstance, values: DMatrix<f64>) -> Result<Self> {
        check_relaxed(instance, &values, FEASIBILITY_TOL)?;
        Ok(FlowConfiguration { values })
    }

    /// Equal split over every feasible start of each user.
    pub fn uniform(instance: &ProblemInstance) -> Self {
        let mut values = DMatrix::zeros(instance.len(), instance.slots());
        for (n, set) in instance.start_sets().iter().enumerate() {
            let share = 1.0 / set.len() as f64;
            for s in set.iter() {
                values[(n, s)] = share;
            }
        }
        FlowConfiguration { values }
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, user: usize, start: usize) -> f64 {
        self.values[(user, start)]
    }

    /// Convex combination `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, other: &FlowConfiguration, lambda: f64) -> FlowConfiguration {
        FlowConfiguration {
            values: &self.values * lambda + &other.values * (1.0 - lambda),
        }
    }
}

fn check_relaxed(instance: &ProblemInstance, values: &DMatrix<f64>, tol: f64) -> Result<()> {
    let (rows, cols) = values.shape();
    if rows != instance.len() {
        return Err(Error::LengthMismatch {
            expected: instance.len(),
            found: rows,
        });
    }
    if cols != instance.slots() {
        return Err(Error::LengthMismatch {
            expected: instance.slots(),
            found: cols,
        });
    }
    for (n, set) in instance.start_sets().iter().enumerate() {
        let mut sum = 0.0;
        for s in 0..cols {
            let v = values[(n, s)];
            if !v.is_finite() {
                return Err(Error::InfeasibleFlows(format!("entry ({n}, {s}) is not finite")));
            }
            if set.contains(s) {
                if v < -tol || v > 1.0 + tol {
                    return Err(Error::InfeasibleFlows(format!("entry ({n}, {s}) = {v} outside [0, 1]")));
                }
                sum += v;
            } else if v.abs() > tol {
                return Err(Error::InfeasibleFlows(format!(
                    "entry ({n}, {s}) = {v} lies outside the feasible start set"
                )));
            }
        }
        if (sum - 1.0).abs() > tol {
            return Err(Error::InfeasibleFlows(format!("row {n} sums to {sum}")));
        }
    }
    Ok(())
}

/// One start slot per user.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Schedule {
    starts: Vec<usize>,
}

impl Schedule {
    pub fn new(instance: &ProblemInstance, starts: Vec<usize>) -> Result<Self> {
        if starts.len() != instance.len() {
            return Err(Error::LengthMismatch {
                expected: instance.len(),
                found: starts.len(),
            });
        }
        for (n, &s) in starts.iter().enumerate() {
            if !instance.start_set(n).contains(s) {
                return Err(Error::InfeasibleStart { appliance: n, start: s });
            }
        }
        Ok(Schedule { starts })
    }

    pub fn starts(&self) -> &[usize] {
        &self.starts
    }

    pub fn len(&self) -> usize {
        self.starts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.starts.is_empty()
    }
}

/// Aggregate energy drawn in each slot.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadProfile {
    loads: Vec<f64>,
}

impl LoadProfile {
    pub fn new(loads: Vec<f64>) -> Self {
        LoadProfile { loads }
    }

    pub fn zeros(slots: usize) -> Self {
        LoadProfile { loads: vec![0.0; slots] }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.loads
    }

    pub fn len(&self) -> usize {
        self.loads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loads.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.loads.iter().sum()
    }

    pub fn peak(&self) -> f64 {
        self.loads.iter().copied().fold(0.0, f64::max)
    }
}

impl std::ops::Index<usize> for LoadProfile {
    type Output = f64;

    fn index(&self, slot: usize) -> &f64 {
        &self.loads[slot]
    }
}

/// Flow entries pinned to zero, as `(user, start slot)` pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DropSet {
    dropped: BTreeSet<(usize, usize)>,
}

impl DropSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, user: usize, start: usize) -> bool {
        self.dropped.insert((user, start))
    }

    pub fn contains(&self, user: usize, start: usize) -> bool {
        self.dropped.contains(&(user, start))
    }

    pub fn len(&self) -> usize {
        self.dropped.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dropped.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.dropped.iter().copied()
    }

    /// Every pair names a feasible start and no user loses all starts.
    pub fn validate(&self, instance: &ProblemInstance) -> Result<()> {
        for (n, s) in self.iter() {
            if n >= instance.len() || !instance.start_set(n).contains(s) {
                return Err(Error::InvalidConfig(format!("dropped pair ({n}, {s}) is not a feasible start")));
            }
        }
        for (n, set) in instance.start_sets().iter().enumerate() {
            if set.iter().all(|s| self.contains(n, s)) {
                return Err(Error::InvalidConfig(format!("every start of user {n} is dropped")));
            }
        }
        Ok(())
    }
}

impl FromIterator<(usize, usize)> for DropSet {
    fn from_iter<I: IntoIterator<Item = (usize, usize)>>(iter: I) -> Self {
        DropSet {
            dropped: iter.into_iter().collect(),
        }
    }
}

/// Per-slot load produced by a (possibly fractional) flow configuration.
pub fn load_profile(instance: &ProblemInstance, flows: &FlowConfiguration) -> Result<LoadProfile> {
    check_relaxed(instance, &flows.values, FEASIBILITY_TOL)?;
    let horizon = instance.horizon();
    let mut loads = vec![0.0; instance.slots()];
    for (n, appliance) in instance.appliances().iter().enumerate() {
        for s in instance.start_set(n).iter() {
            let f = flows.values[(n, s)];
            if f == 0.0 {
                continue;
            }
            for (k, level) in appliance.pattern().iter().enumerate() {
                loads[horizon.wrap(s + k)] += level * f;
            }
        }
    }
    Ok(LoadProfile { loads })
}

/// Per-slot load of a Boolean schedule.
pub fn load_profile_from_schedule(instance: &ProblemInstance, schedule: &Schedule) -> Result<LoadProfile> {
    let schedule = Schedule::new(instance, schedule.starts.clone())?;
    let horizon = instance.horizon();
    let mut loads = vec![0.0; instance.slots()];
    for (appliance, &s) in instance.appliances().iter().zip(&schedule.starts) {
        for (k, level) in appliance.pattern().iter().enumerate() {
            loads[horizon.wrap(s + k)] += level;
        }
    }
    Ok(LoadProfile { loads })
}

/// One-hot encoding of a schedule.
pub fn schedule_to_flows(instance: &ProblemInstance, schedule: &Schedule) -> Result<FlowConfiguration> {
    let schedule = Schedule::new(instance, schedule.starts.clone())?;
    let mut values = DMatrix::zeros(instance.len(), instance.slots());
    for (n, &s) in schedule.starts.iter().enumerate() {
        values[(n, s)] = 1.0;
    }
    Ok(FlowConfiguration { values })
}

/// Decodes an integral flow configuration; each row must have one entry at
/// least `1 - eps_int` and all others at most `eps_int`.
pub fn flows_to_schedule(instance: &ProblemInstance, flows: &FlowConfiguration, eps_int: f64) -> Result<Schedule> {
    check_relaxed(instance, &flows.values, FEASIBILITY_TOL)?;
    let mut starts = Vec::with_capacity(instance.len());
    for (n, set) in instance.start_sets().iter().enumerate() {
        let (best, max) = row_argmax(flows, n, set.as_slice());
        let integral = max >= 1.0 - eps_int
            && set.iter().all(|s| s == best || flows.values[(n, s)] <= eps_int);
        if !integral {
            return Err(Error::NotIntegral { row: n });
        }
        starts.push(best);
    }
    Ok(Schedule { starts })
}

/// Largest entry of a row over `starts`; the first occurrence wins ties.
pub(crate) fn row_argmax(flows: &FlowConfiguration, user: usize, starts: &[usize]) -> (usize, f64) {
    let mut best = (starts[0], flows.values[(user, starts[0])]);
    for &s in &starts[1..] {
        let v = flows.values[(user, s)];
        if v > best.1 {
            best = (s, v);
        }
    }
    best
}
