//! Benchmark protocols, statistics and result files.

pub mod bisection;
pub mod experiment;
pub mod results;
pub mod stats;

pub use bisection::{bisection_population, BisectionSettings};
pub use experiment::{
    run_efficiency, run_experiment, run_quality, ExperimentSpec, ExperimentSummary, Protocol,
    RunOutcome,
};
pub use results::{
    compare_all, comparison_to_string, plotdata_to_string, read_results, results_from_str,
    results_to_string, sidecar_path, write_results, Comparison, Metadata,
};
pub use stats::{summarize, welch_t_test, Moments, TTestResult};
