#![forbid(unsafe_code)]
// Pairwise matrix code reads better with explicit (i, j) indexing.
#![allow(clippy::needless_range_loop)]
//! Team formation over a social graph of workers.
//!
//! A project posts a set of required skills; a candidate solution picks a
//! leader and assigns each required skill to a distinct worker on the
//! leader's team. Candidates are scored by a four-term efficiency metric —
//! perceived skill, leader uncertainty, cost, and pairwise social
//! relationship — and two solvers search the candidate space:
//!
//! * [`solvers::exhaustive_solver`] scores every configuration and returns
//!   the optimum (the benchmark reference), and
//! * [`solvers::secretary_solver`] scores a random stream of configurations
//!   under optimal-stopping rules, trading a bounded chance of missing the
//!   best pick for far fewer evaluations.
//!
//! The [`experiment`] module wraps both in a reproducible Monte Carlo
//! harness; [`solvers::odds_stopping_index`] provides the underlying
//! optimal-stopping machinery in its general form.

pub mod efficiency;
pub mod experiment;
pub mod model;
pub mod solvers;

pub use efficiency::{
    team_efficiency, EfficiencyBreakdown, PerceptionModel, ProjectSpec, TeamConfig,
};
pub use experiment::{AggregateSummary, ExperimentParams, RankStats, TrialMetrics};
pub use model::{GenParams, Instance};
pub use solvers::{
    configuration_count, exhaustive_solver, odds_stopping_index, secretary_select,
    secretary_solver, CountMode, Fallback, SolverReport,
};
