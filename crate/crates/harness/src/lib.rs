//! Corpus, experiment runner and structural checks for the reductions in `s2d-core`.

pub mod corpus;
pub mod error;
pub mod experiment;
pub mod instance;
pub mod validate;

pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, run_instance, run_once, ExperimentReport, ExperimentSummary, ReductionKind, RunConfig};
pub use instance::{generate_instance, Instance, InstanceKind};
