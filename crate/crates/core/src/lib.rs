//! Island-model genetic algorithm for the asymmetric TSP, run as iterated
//! map/reduce jobs on a local execution engine.
//!
//! * [`tsplib`] loads instances; [`registry`] holds reference optima.
//! * [`ga`] has the genetic operators and the sequential GA.
//! * [`engine`] is the map/shuffle/reduce runner and record store.
//! * [`island`] drives the parallel GA as jobs on the engine.
//! * [`oracle`] solves small instances exactly.

pub mod codec;
pub mod convergence;
pub mod engine;
pub mod ga;
pub mod island;
pub mod oracle;
pub mod registry;
pub mod report;
pub mod tsplib;

pub use convergence::{ConvergencePolicy, Decision, StopReason};
pub use ga::{Chromosome, GaParams, Population, SgaConfig};
pub use island::{IslandParams, RoundSummary};
pub use oracle::ExactResult;
pub use registry::OptimaRegistry;
pub use report::{Algorithm, RunReport};
pub use tsplib::{Cost, Instance};
