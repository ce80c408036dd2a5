//! Global optimization by direct enumeration of every Boolean schedule.
//!
//! Schedules are visited in mixed-radix order: digit `n` is the position of
//! user `n`'s start in its start set, user 0 most significant. The product
//! space is cut into contiguous rank ranges that are scanned in parallel and
//! merged with the same strict tie-break as a sequential scan, so the result
//! does not depend on the number of workers.
//!
//! Loads are kept as prefix sums `prefix[k] = prefix[k - 1] + placement(k)`,
//! recomputed only from the lowest digit that changed. The objective is then
//! a fixed function of the digit vector, never of the visiting order.

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flow::{load_profile_from_schedule, Schedule};
use crate::model::{enumeration_size, ProblemInstance};
use crate::objective::{evaluate, ObjectiveKind};
use crate::parallel::{thread_pool, worker_count};

/// Default cap on the number of evaluated schedules.
pub const DEFAULT_LIMIT: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub schedule: Schedule,
    /// Cents for cost, the PAR ratio for PAR.
    pub objective_value: f64,
    pub evaluations: u64,
}

/// Exhaustive minimum using the worker count from the environment.
pub fn brute_force(instance: &ProblemInstance, kind: ObjectiveKind, limit: u64) -> Result<OracleResult> {
    brute_force_with_workers(instance, kind, limit, worker_count())
}

pub fn brute_force_with_workers(
    instance: &ProblemInstance,
    kind: ObjectiveKind,
    limit: u64,
    workers: usize,
) -> Result<OracleResult> {
    let size = enumeration_size(instance);
    let total = u64::try_from(&size)
        .ok()
        .filter(|t| *t <= limit)
        .ok_or_else(|| Error::TooLarge { size: size.clone(), limit })?;
    let workers = workers.max(1);
    let chunks = (workers as u64 * 4).min(total);
    let bounds: Vec<(u64, u64)> = (0..chunks)
        .map(|c| (total * c / chunks, total * (c + 1) / chunks))
        .collect();

    let scan = || -> Vec<(Candidate, u64)> {
        bounds
            .par_iter()
            .map(|&(from, to)| scan_range(instance, kind, from, to))
            .collect()
    };
    let partials = if workers == 1 {
        bounds.iter().map(|&(from, to)| scan_range(instance, kind, from, to)).collect()
    } else {
        thread_pool(workers)?.install(scan)
    };

    let mut best: Option<Candidate> = None;
    let mut evaluations = 0u64;
    for (candidate, count) in partials {
        evaluations += count;
        if best.as_ref().is_none_or(|b| candidate.beats(b)) {
            best = Some(candidate);
        }
    }
    let best = best.expect("start sets are never empty");
    debug_assert_eq!(BigUint::from(evaluations), size);

    let digits = decode(instance, best.rank);
    let starts = digits
        .iter()
        .enumerate()
        .map(|(n, &d)| instance.start_set(n).as_slice()[d])
        .collect();
    let schedule = Schedule::new(instance, starts)?;
    let objective_value = evaluate_schedule(instance, kind, &schedule)?;
    Ok(OracleResult {
        schedule,
        objective_value,
        evaluations,
    })
}

/// Objective of a single schedule through the plain load evaluation.
pub fn evaluate_schedule(instance: &ProblemInstance, kind: ObjectiveKind, schedule: &Schedule) -> Result<f64> {
    evaluate(instance, kind, &load_profile_from_schedule(instance, schedule)?)
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    value: f64,
    rank: u64,
}

impl Candidate {
    fn beats(&self, other: &Candidate) -> bool {
        self.value < other.value || (self.value == other.value && self.rank < other.rank)
    }
}

fn decode(instance: &ProblemInstance, mut rank: u64) -> Vec<usize> {
    let mut digits = vec![0; instance.len()];
    for (n, set) in instance.start_sets().iter().enumerate().rev() {
        let radix = set.len() as u64;
        digits[n] = (rank % radix) as usize;
        rank /= radix;
    }
    digits
}

struct Scanner<'a> {
    instance: &'a ProblemInstance,
    kind: ObjectiveKind,
    digits: Vec<usize>,
    /// `prefix[k]` holds the loads of users `0..k`; `prefix[0]` is zero.
    prefix: Vec<Vec<f64>>,
    /// Cost of `prefix[N - 1]`, the loads of every user but the last.
    base_cost: f64,
    inv_energy: f64,
}

impl<'a> Scanner<'a> {
    fn new(instance: &'a ProblemInstance, kind: ObjectiveKind, rank: u64) -> Self {
        let users = instance.len();
        let mut scanner = Scanner {
            instance,
            kind,
            digits: decode(instance, rank),
            prefix: vec![vec![0.0; instance.slots()]; users],
            base_cost: 0.0,
            inv_energy: instance.slots() as f64 / instance.total_energy(),
        };
        scanner.rebuild_from(0);
        scanner
    }

    /// Recomputes `prefix[k + 1..]` after digit `k` changed.
    fn rebuild_from(&mut self, changed: usize) {
        let horizon = self.instance.horizon();
        let users = self.instance.len();
        for k in changed..users.saturating_sub(1) {
            let (head, tail) = self.prefix.split_at_mut(k + 1);
            let next = &mut tail[0];
            next.copy_from_slice(&head[k]);
            let appliance = &self.instance.appliances()[k];
            let start = self.instance.start_set(k).as_slice()[self.digits[k]];
            for (offset, level) in appliance.pattern().iter().enumerate() {
                next[horizon.wrap(start + offset)] += level;
            }
        }
        let a = self.instance.cost_model().coefficients();
        self.base_cost = self.prefix[users - 1].iter().zip(a).map(|(l, a)| a * l * l).sum();
    }

    fn value(&self) -> f64 {
        let horizon = self.instance.horizon();
        let last = self.instance.len() - 1;
        let appliance = &self.instance.appliances()[last];
        let start = self.instance.start_set(last).as_slice()[self.digits[last]];
        let base = &self.prefix[last];
        match self.kind {
            ObjectiveKind::Cost => {
                let a = self.instance.cost_model().coefficients();
                let mut cost = self.base_cost;
                for (offset, level) in appliance.pattern().iter().enumerate() {
                    let h = horizon.wrap(start + offset);
                    let before = base[h];
                    let after = before + level;
                    cost += a[h] * (after * after - before * before);
                }
                cost
            }
            ObjectiveKind::Par => {
                let delta = appliance.delta();
                let slots = horizon.slots();
                let mut peak = 0.0f64;
                for (h, load) in base.iter().enumerate() {
                    let offset = (h + slots - start) % slots;
                    let value = if offset < delta { load + appliance.pattern()[offset] } else { *load };
                    peak = peak.max(value);
                }
                peak * self.inv_energy
            }
        }
    }

    /// Advances to the next rank; returns false past the last schedule.
    fn advance(&mut self) -> bool {
        for k in (0..self.digits.len()).rev() {
            self.digits[k] += 1;
            if self.digits[k] < self.instance.start_set(k).len() {
                if k + 1 < self.digits.len() {
                    self.rebuild_from(k);
                }
                return true;
            }
            self.digits[k] = 0;
        }
        false
    }
}

fn scan_range(instance: &ProblemInstance, kind: ObjectiveKind, from: u64, to: u64) -> (Candidate, u64) {
    let mut scanner = Scanner::new(instance, kind, from);
    let mut best = Candidate {
        value: scanner.value(),
        rank: from,
    };
    for rank in from + 1..to {
        scanner.advance();
        let candidate = Candidate {
            value: scanner.value(),
            rank,
        };
        if candidate.beats(&best) {
            best = candidate;
        }
    }
    (best, to - from)
}
