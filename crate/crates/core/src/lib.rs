//! Multi-drug chemotherapy scheduling as a black-box bit-string problem,
//! together with the evolutionary optimizers (GA, UMDA, PBIL, hBOA), a
//! pairwise linkage probe, and the experiment harness used to compare them.

pub mod eda;
pub mod error;
pub mod harness;
mod kv;
pub mod linkage;
pub mod model;
pub mod objective;

pub use eda::{run_optimizer, OptimizerConfig, OptimizerKind, RunRecord, Selection};
pub use error::{Error, Result};
pub use model::{
    decode, encode, fitness, Chromosome, DoseSchedule, FitnessReport, ProblemInstance,
};
pub use objective::{ChemoObjective, Evaluation, Objective};

/// Crate version, stamped into every output file header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
