//! Atomic scheduling of appliance energy consumption.
//!
//! Each appliance runs for a fixed number of contiguous slots with a fixed
//! energy pattern. Schedules are encoded as Boolean flow configurations
//! whose convex relaxation gives lower bounds; successive convex relaxation
//! turns it into Boolean schedules. A direct-enumeration oracle gives the
//! global optimum on small instances.

pub mod catalog;
pub mod error;
pub mod flow;
pub mod instance_file;
pub mod ipm;
pub mod model;
pub mod objective;
pub mod oracle;
pub mod parallel;
pub mod relaxed;
pub mod scr;
pub mod sweep;

pub use catalog::{generate_instance, ApplianceCatalog, ApplianceTemplate};
pub use error::{Error, Result};
pub use flow::{
    flows_to_schedule, load_profile, load_profile_from_schedule, schedule_to_flows, DropSet, FlowConfiguration,
    LoadProfile, Schedule,
};
pub use ipm::{ConvexBackend, InteriorPoint, SolverSettings};
pub use model::{enumeration_size, feasible_starts, operation_range, total_daily_energy, Appliance, Horizon, ProblemInstance, StartSet};
pub use objective::{cost_gradient, cost_hessian, energy_cost, par, CostModel, ObjectiveKind};
pub use relaxed::{solve_relaxed, solve_relaxed_cost, solve_relaxed_par, RelaxedSolution, SolverStatus};
pub use oracle::{brute_force, OracleResult};
pub use scr::{successive_convex_relaxation, ScrConfig, ScrResult};
pub use instance_file::{parse_instance, serialize_instance};
pub use sweep::{scr_sweep, InstanceFamily, ResultsRow, ResultsTable, SweepOptions};
