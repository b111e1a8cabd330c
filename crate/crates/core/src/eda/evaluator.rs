use crate::error::Result;
use crate::model::{Chromosome, FitnessReport};
use crate::objective::{Evaluation, Objective};

use super::population::Individual;

/// Best solution seen so far by an [`Evaluator`].
#[derive(Debug, Clone, PartialEq)]
pub struct BestSeen {
    pub chromosome: Chromosome,
    pub fitness: f64,
    pub feasible: bool,
    pub report: Option<FitnessReport>,
    /// 1-based evaluation index at which it was found.
    pub at: u64,
}

/// Budgeted, counting gate in front of an objective. Every call is one
/// evaluation; optimizers never evaluate a chromosome any other way.
pub struct Evaluator<'a, O: Objective + ?Sized> {
    objective: &'a O,
    budget: u64,
    used: u64,
    first_feasible: Option<u64>,
    best: Option<BestSeen>,
}

impl<'a, O: Objective + ?Sized> Evaluator<'a, O> {
    pub fn new(objective: &'a O, budget: u64) -> Self {
        Evaluator {
            objective,
            budget,
            used: 0,
            first_feasible: None,
            best: None,
        }
    }

    pub fn objective(&self) -> &O {
        self.objective
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn remaining(&self) -> u64 {
        self.budget.saturating_sub(self.used)
    }

    pub fn exhausted(&self) -> bool {
        self.remaining() == 0
    }

    /// 1-based index of the first feasible evaluation.
    pub fn first_feasible(&self) -> Option<u64> {
        self.first_feasible
    }

    pub fn best(&self) -> Option<&BestSeen> {
        self.best.as_ref()
    }

    /// Evaluates `x`, or returns `None` once the budget is spent.
    pub fn evaluate(&mut self, x: Chromosome) -> Result<Option<Individual>> {
        if self.exhausted() {
            return Ok(None);
        }
        let Evaluation {
            fitness,
            feasible,
            report,
        } = self.objective.evaluate(&x)?;
        self.used += 1;
        if feasible && self.first_feasible.is_none() {
            self.first_feasible = Some(self.used);
        }
        if self.best.as_ref().is_none_or(|b| fitness > b.fitness) {
            self.best = Some(BestSeen {
                chromosome: x.clone(),
                fitness,
                feasible,
                report,
                at: self.used,
            });
        }
        Ok(Some(Individual {
            chromosome: x,
            fitness,
        }))
    }

    /// Evaluates chromosomes in order until the budget runs out.
    pub fn evaluate_all(
        &mut self,
        xs: impl IntoIterator<Item = Chromosome>,
    ) -> Result<Vec<Individual>> {
        let mut out = Vec::new();
        for x in xs {
            match self.evaluate(x)? {
                Some(ind) => out.push(ind),
                None => break,
            }
        }
        Ok(out)
    }
}
