//! Core engine for evolving scheduling heuristics for the dynamic multi-mode
//! resource-constrained project scheduling problem (DMRCPSP).
//!
//! The crate is organised around the data flow of a training run:
//!
//! - [`project`] defines instances (activities, modes, precedence, renewable
//!   resources), a seeded instance generator with controlled order strength,
//!   stochastic durations and the critical-path lower bound.
//! - [`rules`] represents the two heuristic rules of an individual (activity
//!   ordering and activity-group selection) as expression trees over
//!   scheduling attributes.
//! - [`sim`] executes a project under a rule pair: rank eligible
//!   activity-mode pairs, cut the ranking at its knee, enumerate feasible
//!   activity groups and pick one, until the project completes.
//! - [`phenotype`] freezes decision situations from a reference simulation
//!   and maps any rule pair to its rank-based characterisation vector.
//! - [`surrogate`] estimates fitness of unevaluated individuals by
//!   1-nearest-neighbour lookup over characterisation vectors.
//! - [`gp`] runs the evolutionary loop, with or without surrogate-based
//!   offspring preselection.

pub mod gp;
pub mod phenotype;
pub mod project;
pub mod rules;
pub mod seeds;
pub mod sim;
pub mod surrogate;
