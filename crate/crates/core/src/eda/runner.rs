use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{Chromosome, FitnessReport};
use crate::objective::Objective;

use super::config::{OptimizerConfig, OptimizerKind};
use super::evaluator::Evaluator;
use super::ga::ga_step;
use super::hboa::hboa_step;
use super::population::{random_chromosome, Population};
use super::univariate::{umda_step, Pbil};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    /// Evaluations consumed once this generation was complete.
    pub evaluations: u64,
    pub best: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    BudgetExhausted,
    FeasibleFound,
    TargetReached,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub kind: OptimizerKind,
    pub seed: u64,
    pub config: OptimizerConfig,
    pub trace: Vec<GenerationStats>,
    /// 1-based index of the first evaluation that was feasible.
    pub first_feasible: Option<u64>,
    pub best_chromosome: Chromosome,
    pub best_fitness: f64,
    pub best_feasible: bool,
    pub best_report: Option<FitnessReport>,
    pub evaluations: u64,
    pub stop_reason: StopReason,
}

enum State {
    Ga,
    Umda,
    Pbil(Pbil),
    Hboa,
}

/// Runs one optimizer to a stop condition. Fully determined by
/// `(kind, objective, cfg, seed)`.
pub fn run_optimizer<O: Objective + ?Sized>(
    kind: OptimizerKind,
    objective: &O,
    cfg: &OptimizerConfig,
    seed: u64,
) -> Result<RunRecord> {
    cfg.validate()?;
    let len = objective.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ev = Evaluator::new(objective, cfg.budget);

    let initial: Vec<Chromosome> = (0..cfg.population)
        .map(|_| random_chromosome(len, &mut rng))
        .collect();
    let mut pop = Population::new(ev.evaluate_all(initial)?);
    let mut trace = vec![stats(&pop, &ev)];
    let mut state = match kind {
        OptimizerKind::Ga => State::Ga,
        OptimizerKind::Umda => State::Umda,
        OptimizerKind::Pbil => State::Pbil(Pbil::new(len)),
        OptimizerKind::Hboa => State::Hboa,
    };

    let stop_reason = loop {
        if cfg.stop.on_feasible && ev.first_feasible().is_some() {
            break StopReason::FeasibleFound;
        }
        if let (Some(target), Some(best)) = (cfg.stop.target, ev.best()) {
            if best.fitness >= target {
                break StopReason::TargetReached;
            }
        }
        if ev.exhausted() {
            break StopReason::BudgetExhausted;
        }
        pop = match &mut state {
            State::Ga => ga_step(&pop, cfg, &mut ev, &mut rng)?,
            State::Umda => umda_step(&pop, cfg, &mut ev, &mut rng)?,
            State::Pbil(p) => p.step(&pop, cfg, &mut ev, &mut rng)?,
            State::Hboa => hboa_step(&pop, cfg, &mut ev, &mut rng)?,
        };
        trace.push(stats(&pop, &ev));
    };

    let best = ev.best().expect("initial population was evaluated").clone();
    Ok(RunRecord {
        kind,
        seed,
        config: cfg.clone(),
        trace,
        first_feasible: ev.first_feasible(),
        best_chromosome: best.chromosome,
        best_fitness: best.fitness,
        best_feasible: best.feasible,
        best_report: best.report,
        evaluations: ev.used(),
        stop_reason,
    })
}

fn stats<O: Objective + ?Sized>(pop: &Population, ev: &Evaluator<'_, O>) -> GenerationStats {
    GenerationStats {
        generation: pop.generation,
        evaluations: ev.used(),
        best: pop.best().map_or(f64::NAN, |b| b.fitness),
        mean: pop.mean_fitness(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eda::config::{Keep, Selection};
    use crate::model::ProblemInstance;
    use crate::objective::{ChemoObjective, Evaluation, OneMax};
    use std::sync::atomic::{AtomicU64, Ordering};

    /// Counts every call that reaches the objective.
    struct Counting<O> {
        inner: O,
        calls: AtomicU64,
    }

    impl<O: Objective> Objective for Counting<O> {
        fn len(&self) -> usize {
            self.inner.len()
        }
        fn evaluate(&self, x: &Chromosome) -> Result<Evaluation> {
            self.calls.fetch_add(1, Ordering::Relaxed);
            self.inner.evaluate(x)
        }
    }

    fn configs() -> Vec<(OptimizerKind, OptimizerConfig)> {
        let base = OptimizerConfig::default()
            .with_population(40)
            .with_budget(2_000);
        vec![
            (OptimizerKind::Ga, base.clone()),
            (
                OptimizerKind::Umda,
                base.clone()
                    .with_selection(Selection::Tournament { pool: 4 }),
            ),
            (OptimizerKind::Pbil, base.clone()),
            (
                OptimizerKind::Hboa,
                base.with_selection(Selection::Truncation(Keep::Fraction(0.5))),
            ),
        ]
    }

    #[test]
    fn evaluations_are_counted_exactly_once() {
        for (kind, cfg) in configs() {
            let obj = Counting {
                inner: OneMax(60),
                calls: AtomicU64::new(0),
            };
            let rec = run_optimizer(kind, &obj, &cfg, 3).unwrap();
            assert_eq!(rec.evaluations, obj.calls.load(Ordering::Relaxed), "{kind}");
            assert_eq!(rec.evaluations, 2_000, "{kind}");
            assert_eq!(rec.stop_reason, StopReason::BudgetExhausted);
        }
    }

    #[test]
    fn best_fitness_is_nondecreasing_and_counts_monotone() {
        for (kind, cfg) in configs() {
            let rec = run_optimizer(kind, &OneMax(60), &cfg, 4).unwrap();
            for w in rec.trace.windows(2) {
                assert!(w[1].best >= w[0].best, "{kind}");
                assert!(w[1].evaluations >= w[0].evaluations, "{kind}");
            }
        }
    }

    #[test]
    fn same_seed_same_record() {
        for (kind, cfg) in configs() {
            let a = run_optimizer(kind, &OneMax(60), &cfg, 5).unwrap();
            let b = run_optimizer(kind, &OneMax(60), &cfg, 5).unwrap();
            assert_eq!(a, b);
            assert_eq!(
                serde_json::to_string(&a).unwrap(),
                serde_json::to_string(&b).unwrap()
            );
        }
    }

    #[test]
    fn feasible_initial_population_stops_immediately() {
        let mut inst = ProblemInstance::default();
        inst.n_max = inst.theta;
        inst.c_max = vec![100.0; inst.d];
        inst.c_cum = vec![1e4; inst.d];
        inst.c_seff = vec![1e4; inst.organs()];
        let obj = ChemoObjective::new(inst).unwrap();
        let cfg = OptimizerConfig::default()
            .with_population(30)
            .with_budget(10_000)
            .stop_on_feasible();
        for kind in OptimizerKind::ALL {
            let rec = run_optimizer(kind, &obj, &cfg, 1).unwrap();
            assert_eq!(rec.stop_reason, StopReason::FeasibleFound);
            assert!(rec.first_feasible.unwrap() <= 30);
            assert_eq!(rec.evaluations, 30);
            assert!(rec.best_report.is_some());
        }
    }

    #[test]
    fn target_stop() {
        let cfg = OptimizerConfig::default()
            .with_population(50)
            .with_budget(50_000)
            .stop_at(30.0);
        let rec = run_optimizer(OptimizerKind::Umda, &OneMax(30), &cfg, 2).unwrap();
        assert_eq!(rec.stop_reason, StopReason::TargetReached);
        assert_eq!(rec.best_fitness, 30.0);
    }

    #[test]
    fn budget_below_population_is_rejected() {
        let cfg = OptimizerConfig::default()
            .with_population(50)
            .with_budget(49);
        assert!(run_optimizer(OptimizerKind::Ga, &OneMax(10), &cfg, 0).is_err());
    }

    #[test]
    fn first_feasible_never_exceeds_total() {
        let obj = ChemoObjective::new(ProblemInstance::default()).unwrap();
        let cfg = OptimizerConfig::default()
            .with_population(50)
            .with_budget(3_000)
            .with_selection(Selection::Tournament { pool: 6 })
            .stop_on_feasible();
        let rec = run_optimizer(OptimizerKind::Umda, &obj, &cfg, 8).unwrap();
        if let Some(f) = rec.first_feasible {
            assert!(f <= rec.evaluations);
        }
    }
}
