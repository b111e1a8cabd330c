use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eda::{run_optimizer, OptimizerConfig, OptimizerKind};
use crate::error::{Error, Result};
use crate::kv;
use crate::objective::Objective;

use super::stats::{summarize, Moments};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    /// Evaluations until the first feasible solution.
    Efficiency,
    /// Best fitness within a fixed number of evaluations.
    Quality,
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Protocol::Efficiency => "efficiency",
            Protocol::Quality => "quality",
        })
    }
}

impl FromStr for Protocol {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "efficiency" => Ok(Protocol::Efficiency),
            "quality" => Ok(Protocol::Quality),
            _ => Err(Error::Config(format!("unknown protocol `{s}`"))),
        }
    }
}

/// One multi-run benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub label: String,
    /// `default` or a path to an instance file.
    pub instance: String,
    pub optimizer: OptimizerKind,
    pub config: OptimizerConfig,
    pub protocol: Protocol,
    pub runs: usize,
    /// Evaluation cap per run. Efficiency runs that hit it are censored.
    pub cap: u64,
    /// Run `i` uses seed `base_seed + i`.
    pub base_seed: u64,
}

impl ExperimentSpec {
    pub fn new(optimizer: OptimizerKind, config: OptimizerConfig, protocol: Protocol) -> Self {
        ExperimentSpec {
            label: optimizer.to_string(),
            instance: "default".into(),
            optimizer,
            config,
            protocol,
            runs: 30,
            cap: 200_000,
            base_seed: 1,
        }
    }

    pub fn with_runs(mut self, runs: usize) -> Self {
        self.runs = runs;
        self
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    pub fn with_seed(mut self, base_seed: u64) -> Self {
        self.base_seed = base_seed;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Optimizer settings actually used for every run of this experiment.
    pub fn run_config(&self) -> OptimizerConfig {
        let mut cfg = self.config.clone();
        cfg.budget = self.cap;
        cfg.stop.on_feasible = self.protocol == Protocol::Efficiency;
        if self.protocol == Protocol::Quality {
            cfg.stop.target = None;
        }
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs < 2 {
            return Err(Error::Config(format!(
                "an experiment needs at least 2 runs, got {}",
                self.runs
            )));
        }
        if self.cap < self.config.population as u64 {
            return Err(Error::Config(format!(
                "evaluation cap {} is below the population size {}",
                self.cap, self.config.population
            )));
        }
        self.run_config().validate()
    }

    pub fn seed(&self, run: usize) -> u64 {
        self.base_seed + run as u64
    }

    /// Applies a `key = value` setting; experiment keys first, then
    /// optimizer keys.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let int = |v: &str| -> Result<u64> {
            v.parse()
                .map_err(|_| Error::Config(format!("`{key}`: `{v}` is not an integer")))
        };
        match key {
            "label" => self.label = value.to_string(),
            "instance" => self.instance = value.to_string(),
            "optimizer" => self.optimizer = value.parse()?,
            "protocol" => self.protocol = value.parse()?,
            "runs" => self.runs = int(value)? as usize,
            "cap" => self.cap = int(value)?,
            "base_seed" | "seed" => self.base_seed = int(value)?,
            _ => {
                if !self.config.set(key, value)? {
                    return Err(Error::Config(format!("unknown setting `{key}`")));
                }
            }
        }
        Ok(())
    }

    pub fn from_file_str(text: &str) -> Result<Self> {
        let mut spec = ExperimentSpec::new(
            OptimizerKind::Umda,
            OptimizerConfig::default(),
            Protocol::Efficiency,
        );
        let mut labelled = false;
        for entry in kv::parse(text)? {
            let value = kv::scalar(&entry)?;
            labelled |= entry.key == "label";
            spec.set(&entry.key, value).map_err(|e| match e {
                Error::Config(m) => Error::parse(entry.line, m),
                other => other,
            })?;
        }
        if !labelled {
            spec.label = spec.optimizer.to_string();
        }
        Ok(spec)
    }

    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.pairs() {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    /// One-line `key=value; ...` echo for file headers.
    pub fn echo(&self) -> String {
        self.pairs()
            .into_iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join("; ")
    }

    fn pairs(&self) -> Vec<(&'static str, String)> {
        let mut out = vec![
            ("label", self.label.clone()),
            ("instance", self.instance.clone()),
            ("optimizer", self.optimizer.to_string()),
            ("protocol", self.protocol.to_string()),
            ("runs", self.runs.to_string()),
            ("cap", self.cap.to_string()),
            ("base_seed", self.base_seed.to_string()),
        ];
        out.extend(
            self.config
                .to_pairs()
                .into_iter()
                .filter(|(k, _)| !matches!(*k, "budget" | "stop_on_feasible")),
        );
        out
    }
}

/// Outcome of one run in an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub run_index: usize,
    pub seed: u64,
    /// First-feasible evaluation count or best fitness, by protocol; `None`
    /// when censored.
    pub metric: Option<f64>,
    pub censored: bool,
    pub total_evaluations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub label: String,
    pub protocol: Protocol,
    pub runs: Vec<RunOutcome>,
    /// Statistics over the uncensored runs.
    pub moments: Moments,
    pub spec: Option<ExperimentSpec>,
}

impl ExperimentSummary {
    pub fn from_runs(
        label: impl Into<String>,
        protocol: Protocol,
        runs: Vec<RunOutcome>,
        spec: Option<ExperimentSpec>,
    ) -> Result<Self> {
        let label = label.into();
        let values: Vec<f64> = runs.iter().filter_map(|r| r.metric).collect();
        let censored = runs.len() - values.len();
        if values.is_empty() {
            return Err(Error::Experiment(format!(
                "`{label}`: all {} runs censored; no run found a feasible solution",
                runs.len()
            )));
        }
        if censored > 0 {
            log::warn!(
                "`{label}`: {censored} of {} runs censored and excluded",
                runs.len()
            );
        }
        let (mean, std) = summarize(&values).map_err(|_| {
            Error::Experiment(format!(
                "`{label}`: only {} uncensored run(s); statistics need 2",
                values.len()
            ))
        })?;
        Ok(ExperimentSummary {
            label,
            protocol,
            runs,
            moments: Moments {
                mean,
                std,
                n: values.len(),
            },
            spec,
        })
    }

    /// Summary known only by its statistics.
    pub fn from_moments(label: impl Into<String>, protocol: Protocol, moments: Moments) -> Self {
        ExperimentSummary {
            label: label.into(),
            protocol,
            runs: Vec::new(),
            moments,
            spec: None,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        self.runs.iter().filter_map(|r| r.metric).collect()
    }

    pub fn censored(&self) -> usize {
        self.runs.iter().filter(|r| r.censored).count()
    }
}

fn run_all<O: Objective + ?Sized>(
    spec: &ExperimentSpec,
    objective: &O,
    expected: Protocol,
) -> Result<ExperimentSummary> {
    if spec.protocol != expected {
        return Err(Error::Config(format!(
            "spec protocol is {}, expected {expected}",
            spec.protocol
        )));
    }
    spec.validate()?;
    let cfg = spec.run_config();
    let runs: Vec<RunOutcome> = (0..spec.runs)
        .into_par_iter()
        .map(|i| {
            let seed = spec.seed(i);
            let rec = run_optimizer(spec.optimizer, objective, &cfg, seed)?;
            let metric = match expected {
                Protocol::Efficiency => rec.first_feasible.map(|e| e as f64),
                Protocol::Quality => Some(rec.best_fitness),
            };
            Ok(RunOutcome {
                run_index: i,
                seed,
                metric,
                censored: metric.is_none(),
                total_evaluations: rec.evaluations,
            })
        })
        .collect::<Result<_>>()?;
    ExperimentSummary::from_runs(spec.label.clone(), expected, runs, Some(spec.clone()))
}

/// Evaluations to first feasible solution over `spec.runs` seeded runs.
pub fn run_efficiency<O: Objective + ?Sized>(
    spec: &ExperimentSpec,
    objective: &O,
) -> Result<ExperimentSummary> {
    run_all(spec, objective, Protocol::Efficiency)
}

/// Best fitness after exactly `spec.cap` evaluations per run.
pub fn run_quality<O: Objective + ?Sized>(
    spec: &ExperimentSpec,
    objective: &O,
) -> Result<ExperimentSummary> {
    run_all(spec, objective, Protocol::Quality)
}

pub fn run_experiment<O: Objective + ?Sized>(
    spec: &ExperimentSpec,
    objective: &O,
) -> Result<ExperimentSummary> {
    run_all(spec, objective, spec.protocol)
}
