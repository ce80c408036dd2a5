//! Convex relaxation of the Boolean scheduling problem.
//!
//! Flow entries are relaxed to `[0, 1]` on each user's simplex. Entries
//! outside a user's start set, and entries in the drop set, are removed from
//! the program rather than constrained to zero. The cost relaxation is a QP
//! with the slot loads lifted into free variables so the objective becomes
//! separable; the PAR relaxation is an LP with one peak variable and one
//! slack per slot.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::flow::{load_profile, DropSet, FlowConfiguration};
use crate::ipm::{Column, ConvexBackend, InteriorPoint, SeparableQp, SolverSettings};
use crate::model::ProblemInstance;
use crate::objective::{energy_cost, ObjectiveKind};

/// Entries this close to a bound are snapped onto it.
const CLAMP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverStatus {
    Optimal,
    Infeasible,
    NumericalFailure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedSolution {
    pub flows: FlowConfiguration,
    /// Cents for the cost relaxation, peak load `Gamma` in kWh for PAR.
    pub objective_value: f64,
    pub solver_status: SolverStatus,
    pub iterations: usize,
}

/// Minimizes the energy cost over the relaxed flow polytope.
pub fn solve_relaxed_cost(
    instance: &ProblemInstance,
    dropset: &DropSet,
    settings: &SolverSettings,
) -> Result<RelaxedSolution> {
    solve_relaxed_with(&InteriorPoint, instance, ObjectiveKind::Cost, dropset, settings)
}

/// Minimizes the peak load `Gamma` over the relaxed flow polytope.
pub fn solve_relaxed_par(
    instance: &ProblemInstance,
    dropset: &DropSet,
    settings: &SolverSettings,
) -> Result<RelaxedSolution> {
    solve_relaxed_with(&InteriorPoint, instance, ObjectiveKind::Par, dropset, settings)
}

pub fn solve_relaxed(
    instance: &ProblemInstance,
    kind: ObjectiveKind,
    dropset: &DropSet,
    settings: &SolverSettings,
) -> Result<RelaxedSolution> {
    solve_relaxed_with(&InteriorPoint, instance, kind, dropset, settings)
}

/// Same as [`solve_relaxed`] with an explicit backend.
pub fn solve_relaxed_with<B: ConvexBackend>(
    backend: &B,
    instance: &ProblemInstance,
    kind: ObjectiveKind,
    dropset: &DropSet,
    settings: &SolverSettings,
) -> Result<RelaxedSolution> {
    dropset.validate(instance)?;
    let layout = FlowLayout::new(instance, dropset);
    let program = match kind {
        ObjectiveKind::Cost => cost_program(instance, &layout),
        ObjectiveKind::Par => par_program(instance, &layout),
    };
    let solution = backend.solve(&program, settings)?;
    let flows = layout.extract_flows(instance, &solution.x)?;
    let objective_value = match kind {
        ObjectiveKind::Cost => energy_cost(&load_profile(instance, &flows)?, instance.cost_model())?,
        ObjectiveKind::Par => solution.x[layout.len()],
    };
    Ok(RelaxedSolution {
        flows,
        objective_value,
        solver_status: SolverStatus::Optimal,
        iterations: solution.iterations,
    })
}

/// Flow variables that take part in the program, in `(user, start-set
/// order)` order.
struct FlowLayout {
    entries: Vec<(usize, usize)>,
}

impl FlowLayout {
    fn new(instance: &ProblemInstance, dropset: &DropSet) -> Self {
        let entries = instance
            .start_sets()
            .iter()
            .enumerate()
            .flat_map(|(n, set)| set.iter().map(move |s| (n, s)))
            .filter(|&(n, s)| !dropset.contains(n, s))
            .collect();
        FlowLayout { entries }
    }

    fn len(&self) -> usize {
        self.entries.len()
    }

    /// Simplex row plus the load rows each flow variable contributes to.
    fn columns(&self, instance: &ProblemInstance, load_row: impl Fn(usize) -> Option<usize>) -> Vec<Column> {
        let horizon = instance.horizon();
        self.entries
            .iter()
            .map(|&(n, s)| {
                let mut col = vec![(n, 1.0)];
                for (k, level) in instance.appliances()[n].pattern().iter().enumerate() {
                    if let Some(row) = load_row(horizon.wrap(s + k)) {
                        col.push((row, *level));
                    }
                }
                col
            })
            .collect()
    }

    fn extract_flows(&self, instance: &ProblemInstance, x: &[f64]) -> Result<FlowConfiguration> {
        let mut values = DMatrix::zeros(instance.len(), instance.slots());
        for (&(n, s), &v) in self.entries.iter().zip(x) {
            if !(-CLAMP_TOL..=1.0 + CLAMP_TOL).contains(&v) {
                return Err(Error::NumericalFailure(format!("flow ({n}, {s}) = {v} left [0, 1]")));
            }
            values[(n, s)] = v.clamp(0.0, 1.0);
        }
        // Interior-point iterates satisfy the simplex rows only to solver
        // tolerance; rescale so they hold to rounding error.
        for n in 0..instance.len() {
            let sum: f64 = values.row(n).sum();
            if (sum - 1.0).abs() > 1e-6 {
                return Err(Error::NumericalFailure(format!("flow row {n} sums to {sum}")));
            }
            for s in 0..instance.slots() {
                values[(n, s)] /= sum;
            }
        }
        FlowConfiguration::new(instance, values)
    }
}

/// Variables: flows, then one free load variable per slot with positive
/// cost. Rows: one simplex row per user, then `sum flows - L_h = 0`.
fn cost_program(instance: &ProblemInstance, layout: &FlowLayout) -> SeparableQp {
    let users = instance.len();
    let coefficients = instance.cost_model().coefficients();
    let priced: Vec<usize> = (0..instance.slots()).filter(|&h| coefficients[h] > 0.0).collect();
    let mut row_of = vec![None; instance.slots()];
    for (i, &h) in priced.iter().enumerate() {
        row_of[h] = Some(users + i);
    }

    let mut columns = layout.columns(instance, |h| row_of[h]);
    let mut quadratic = vec![0.0; layout.len()];
    let mut bounded = vec![true; layout.len()];
    for (i, &h) in priced.iter().enumerate() {
        columns.push(vec![(users + i, -1.0)]);
        quadratic.push(2.0 * coefficients[h]);
        bounded.push(false);
    }
    let mut rhs = vec![1.0; users];
    rhs.resize(users + priced.len(), 0.0);
    SeparableQp {
        linear: vec![0.0; columns.len()],
        quadratic,
        bounded,
        columns,
        rhs,
    }
}

/// Variables: flows, the peak `Gamma`, and slacks `t_h`. Rows: one simplex
/// row per user, then `sum flows - Gamma + t_h = 0`.
fn par_program(instance: &ProblemInstance, layout: &FlowLayout) -> SeparableQp {
    let users = instance.len();
    let slots = instance.slots();
    let mut columns = layout.columns(instance, |h| Some(users + h));
    columns.push((0..slots).map(|h| (users + h, -1.0)).collect());
    columns.extend((0..slots).map(|h| vec![(users + h, 1.0)]));
    let mut linear = vec![0.0; columns.len()];
    linear[layout.len()] = 1.0;
    let mut rhs = vec![1.0; users];
    rhs.resize(users + slots, 0.0);
    SeparableQp {
        quadratic: vec![0.0; columns.len()],
        linear,
        bounded: vec![true; columns.len()],
        columns,
        rhs,
    }
}
