//! Time slots, appliances and problem instances.
//!
//! A day is divided into `H` slots numbered from 0. Scheduling windows may
//! cross the day boundary: a window is given by `alpha` (first slot) and an
//! extended end index `beta` that may exceed `H - 1`, and every slot index is
//! reduced modulo `H`.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::objective::CostModel;

/// Number of time slots in a day.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Horizon(usize);

impl Horizon {
    pub const HOURLY: Horizon = Horizon(24);

    pub fn new(slots: usize) -> Result<Self> {
        if slots < 2 {
            return Err(Error::InvalidHorizon(slots));
        }
        Ok(Horizon(slots))
    }

    #[inline]
    pub fn slots(self) -> usize {
        self.0
    }

    /// Reduces an extended slot index modulo the horizon.
    #[inline]
    pub fn wrap(self, index: usize) -> usize {
        index % self.0
    }

    /// Renders a slot as wall-clock time, slot 0 being midnight.
    pub fn clock_time(self, slot: usize) -> String {
        let minutes = (self.wrap(slot) * 24 * 60) / self.0;
        format!("{:02}:{:02}", minutes / 60, minutes % 60)
    }
}

impl Default for Horizon {
    fn default() -> Self {
        Horizon::HOURLY
    }
}

/// An appliance whose operation occupies `delta` contiguous slots inside the
/// window `[alpha, beta]` with a fixed per-slot energy pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct Appliance {
    name: String,
    alpha: usize,
    beta: usize,
    pattern: Vec<f64>,
}

impl Appliance {
    /// Builds an appliance from its operating energy pattern (kWh per slot).
    /// The duration is the pattern length.
    pub fn new(name: impl Into<String>, alpha: usize, beta: usize, pattern: Vec<f64>) -> Result<Self> {
        let name = name.into();
        let invalid = |reason: String| Error::InvalidAppliance {
            name: name.clone(),
            reason,
        };
        if pattern.is_empty() {
            return Err(invalid("operating pattern must cover at least one slot".into()));
        }
        if let Some(level) = pattern.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(invalid(format!("operating energy levels must be positive, got {level}")));
        }
        if beta <= alpha {
            return Err(invalid(format!("beta ({beta}) must exceed alpha ({alpha})")));
        }
        let delta = pattern.len();
        if beta + 1 < alpha + delta {
            return Err(invalid(format!(
                "beta ({beta}) must be >= alpha + delta - 1 ({})",
                alpha + delta - 1
            )));
        }
        Ok(Appliance {
            name,
            alpha,
            beta,
            pattern,
        })
    }

    /// Appliance drawing the same energy in each of its `delta` slots.
    pub fn constant(name: impl Into<String>, alpha: usize, beta: usize, level: f64, delta: usize) -> Result<Self> {
        Appliance::new(name, alpha, beta, vec![level; delta])
    }

    /// Checks the window against a horizon.
    pub fn validate(&self, horizon: Horizon) -> Result<()> {
        let h = horizon.slots();
        let invalid = |reason: String| Error::InvalidAppliance {
            name: self.name.clone(),
            reason,
        };
        if self.alpha > h - 1 {
            return Err(invalid(format!("alpha ({}) must be in [0, {}]", self.alpha, h - 1)));
        }
        if self.beta > 2 * h - 2 {
            return Err(invalid(format!("beta ({}) must be in [1, {}]", self.beta, 2 * h - 2)));
        }
        if self.beta - self.alpha > h - 1 {
            return Err(invalid(format!(
                "window length beta - alpha ({}) must not exceed {}",
                self.beta - self.alpha,
                h - 1
            )));
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn beta(&self) -> usize {
        self.beta
    }

    pub fn delta(&self) -> usize {
        self.pattern.len()
    }

    pub fn pattern(&self) -> &[f64] {
        &self.pattern
    }

    /// Operating level at `offset` slots after the start; zero past the end
    /// of the operation.
    #[inline]
    pub fn level_at(&self, offset: usize) -> f64 {
        self.pattern.get(offset).copied().unwrap_or(0.0)
    }

    /// The level is constant over the whole operation.
    pub fn constant_level(&self) -> Option<f64> {
        let first = self.pattern[0];
        self.pattern.iter().all(|v| *v == first).then_some(first)
    }
}

/// Feasible start slots of one appliance, in ascending order of the
/// extended (pre-modulo) index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StartSet {
    starts: Vec<usize>,
}

impl StartSet {
    pub fn len(&self) -> usize {
        self.starts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.starts.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.starts
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.starts.iter().copied()
    }

    pub fn contains(&self, slot: usize) -> bool {
        self.starts.contains(&slot)
    }

    /// Rank of `slot` in the extended-index ordering.
    pub fn position(&self, slot: usize) -> Option<usize> {
        self.starts.iter().position(|&s| s == slot)
    }
}

/// Total daily energy of an appliance, the sum of its operating pattern.
pub fn total_daily_energy(appliance: &Appliance) -> f64 {
    appliance.pattern.iter().sum()
}

/// All start slots for which the operation fits inside the window.
pub fn feasible_starts(appliance: &Appliance, horizon: Horizon) -> StartSet {
    let last = appliance.beta + 1 - appliance.delta();
    StartSet {
        starts: (appliance.alpha..=last).map(|i| horizon.wrap(i)).collect(),
    }
}

/// Slots occupied by an operation of `delta` slots starting at `start`.
pub fn operation_range(start: usize, delta: usize, horizon: Horizon) -> Result<Vec<usize>> {
    let h = horizon.slots();
    if delta == 0 || delta > h {
        return Err(Error::InvalidConfig(format!("duration {delta} must be in [1, {h}]")));
    }
    if start >= h {
        return Err(Error::InvalidConfig(format!("start slot {start} must be below {h}")));
    }
    Ok((start..start + delta).map(|i| horizon.wrap(i)).collect())
}

/// A scheduling problem: horizon, appliances (one per user) and hourly
/// quadratic cost coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    horizon: Horizon,
    appliances: Vec<Appliance>,
    cost: CostModel,
    starts: Vec<StartSet>,
}

impl ProblemInstance {
    pub fn new(horizon: Horizon, appliances: Vec<Appliance>, cost: CostModel) -> Result<Self> {
        if appliances.is_empty() {
            return Err(Error::InvalidInstance("at least one appliance is required".into()));
        }
        if cost.len() != horizon.slots() {
            return Err(Error::LengthMismatch {
                expected: horizon.slots(),
                found: cost.len(),
            });
        }
        for appliance in &appliances {
            appliance.validate(horizon)?;
        }
        let starts = appliances.iter().map(|a| feasible_starts(a, horizon)).collect();
        Ok(ProblemInstance {
            horizon,
            appliances,
            cost,
            starts,
        })
    }

    pub fn horizon(&self) -> Horizon {
        self.horizon
    }

    pub fn slots(&self) -> usize {
        self.horizon.slots()
    }

    pub fn appliances(&self) -> &[Appliance] {
        &self.appliances
    }

    pub fn len(&self) -> usize {
        self.appliances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.appliances.is_empty()
    }

    pub fn cost_model(&self) -> &CostModel {
        &self.cost
    }

    pub fn start_set(&self, user: usize) -> &StartSet {
        &self.starts[user]
    }

    pub fn start_sets(&self) -> &[StartSet] {
        &self.starts
    }

    /// Sum of the daily energy of every appliance.
    pub fn total_energy(&self) -> f64 {
        self.appliances.iter().map(total_daily_energy).sum()
    }

    /// Number of flow variables that are not fixed to zero by the windows.
    pub fn flow_variable_count(&self) -> usize {
        self.starts.iter().map(StartSet::len).sum()
    }
}

/// Number of distinct Boolean schedules, the product of start-set sizes.
pub fn enumeration_size(instance: &ProblemInstance) -> BigUint {
    instance
        .start_sets()
        .iter()
        .fold(BigUint::from(1u32), |acc, set| acc * BigUint::from(set.len()))
}
