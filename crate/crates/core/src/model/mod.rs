//! The chemotherapy scheduling problem: encoding, tumour dynamics,
//! constraints and penalised fitness. Everything here is pure.

mod dynamics;
mod encoding;
mod fitness;
mod instance;
mod instance_file;

pub use dynamics::{ode_oracle, tumour_trajectory, Trajectory};
pub use encoding::{decode, encode, Chromosome, DoseSchedule};
pub use fitness::{constraint_distances, efficacy, fitness, schedule_fitness, FitnessReport};
pub use instance::{ProblemInstance, DEFAULT_ORGANS, ERADICATION_THRESHOLD};
pub use instance_file::DEFAULT_INSTANCE_FILE;
