//! Evolutionary optimizers over bit strings: a generational GA, UMDA, PBIL
//! and hBOA, sharing selection operators and a budgeted evaluator.

mod bayes_net;
mod config;
mod evaluator;
mod ga;
mod hboa;
mod population;
mod runner;
mod selection;
mod univariate;

pub use bayes_net::{
    build_model, sample_model, BayesianNetworkModel, DecisionTree, ModelSettings, Node,
};
pub use config::{Crossover, Keep, OptimizerConfig, OptimizerKind, Selection, StopConditions};
pub use evaluator::{BestSeen, Evaluator};
pub use ga::{ga_step, mutate, one_point_crossover, uniform_crossover};
pub use hboa::{hboa_step, rtr_replace};
pub use population::{random_chromosome, Individual, Population};
pub use runner::{run_optimizer, GenerationStats, RunRecord, StopReason};
pub use selection::{
    select, tournament_indices, tournament_select, truncation_indices, truncation_select,
};
pub use univariate::{marginals, pbil_update, sample_independent, umda_step, Pbil};
