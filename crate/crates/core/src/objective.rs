//! Black-box objectives over bit strings: the chemotherapy problem plus the
//! classic test functions used to sanity-check the optimizers.

use crate::error::Result;
use crate::model::{fitness, Chromosome, FitnessReport, ProblemInstance};

/// Result of one fitness evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub fitness: f64,
    pub feasible: bool,
    pub report: Option<FitnessReport>,
}

impl Evaluation {
    pub fn unconstrained(fitness: f64) -> Self {
        Evaluation {
            fitness,
            feasible: true,
            report: None,
        }
    }
}

/// A maximisation problem over fixed-length bit strings. Implementations
/// must be pure.
pub trait Objective: Sync {
    fn len(&self) -> usize;

    fn evaluate(&self, x: &Chromosome) -> Result<Evaluation>;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Fitness of a global optimum, when known.
    fn optimum(&self) -> Option<f64> {
        None
    }
}

impl<O: Objective + ?Sized> Objective for &O {
    fn len(&self) -> usize {
        (**self).len()
    }
    fn evaluate(&self, x: &Chromosome) -> Result<Evaluation> {
        (**self).evaluate(x)
    }
    fn optimum(&self) -> Option<f64> {
        (**self).optimum()
    }
}

/// Penalised chemotherapy fitness; feasible means every constraint holds.
#[derive(Debug, Clone)]
pub struct ChemoObjective {
    instance: ProblemInstance,
}

impl ChemoObjective {
    pub fn new(instance: ProblemInstance) -> Result<Self> {
        instance.validate()?;
        Ok(ChemoObjective { instance })
    }

    pub fn instance(&self) -> &ProblemInstance {
        &self.instance
    }
}

impl Objective for ChemoObjective {
    fn len(&self) -> usize {
        self.instance.chromosome_len()
    }

    fn evaluate(&self, x: &Chromosome) -> Result<Evaluation> {
        let report = fitness(x, &self.instance)?;
        Ok(Evaluation {
            fitness: report.fitness,
            feasible: report.feasible,
            report: Some(report),
        })
    }
}

/// Number of ones.
#[derive(Debug, Clone, Copy)]
pub struct OneMax(pub usize);

impl Objective for OneMax {
    fn len(&self) -> usize {
        self.0
    }
    fn evaluate(&self, x: &Chromosome) -> Result<Evaluation> {
        Ok(Evaluation::unconstrained(x.ones() as f64))
    }
    fn optimum(&self) -> Option<f64> {
        Some(self.0 as f64)
    }
}

/// `sum_i w_i x_i`.
#[derive(Debug, Clone)]
pub struct WeightedLinear(pub Vec<f64>);

impl Objective for WeightedLinear {
    fn len(&self) -> usize {
        self.0.len()
    }
    fn evaluate(&self, x: &Chromosome) -> Result<Evaluation> {
        let f = x
            .bits()
            .iter()
            .zip(&self.0)
            .filter(|(b, _)| **b)
            .map(|(_, w)| w)
            .sum();
        Ok(Evaluation::unconstrained(f))
    }
}

/// Concatenated deceptive traps of order `k`: each block scores `k` when all
/// ones and `k - 1 - u` otherwise, where `u` counts the ones in the block.
#[derive(Debug, Clone, Copy)]
pub struct Trap {
    pub blocks: usize,
    pub order: usize,
}

impl Objective for Trap {
    fn len(&self) -> usize {
        self.blocks * self.order
    }
    fn evaluate(&self, x: &Chromosome) -> Result<Evaluation> {
        let k = self.order;
        let f: usize = x
            .bits()
            .chunks(k)
            .map(|block| {
                let u = block.iter().filter(|b| **b).count();
                if u == k {
                    k
                } else {
                    k - 1 - u
                }
            })
            .sum();
        Ok(Evaluation::unconstrained(f as f64))
    }
    fn optimum(&self) -> Option<f64> {
        Some((self.blocks * self.order) as f64)
    }
}

/// Concatenated 2-bit XOR blocks: each block scores `x_a XOR x_b`.
#[derive(Debug, Clone, Copy)]
pub struct XorPairs(pub usize);

impl Objective for XorPairs {
    fn len(&self) -> usize {
        2 * self.0
    }
    fn evaluate(&self, x: &Chromosome) -> Result<Evaluation> {
        let f = x.bits().chunks(2).filter(|p| p[0] != p[1]).count();
        Ok(Evaluation::unconstrained(f as f64))
    }
    fn optimum(&self) -> Option<f64> {
        Some(self.0 as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(s: &str) -> Chromosome {
        s.parse().unwrap()
    }

    #[test]
    fn trap_is_deceptive() {
        let t = Trap {
            blocks: 2,
            order: 5,
        };
        assert_eq!(t.evaluate(&x("1111111111")).unwrap().fitness, 10.0);
        assert_eq!(t.evaluate(&x("0000000000")).unwrap().fitness, 8.0);
        assert_eq!(t.evaluate(&x("1111000000")).unwrap().fitness, 4.0);
    }

    #[test]
    fn xor_pairs_scores_disagreeing_blocks() {
        assert_eq!(XorPairs(3).evaluate(&x("011011")).unwrap().fitness, 2.0);
    }

    #[test]
    fn chemo_objective_rejects_invalid_instance() {
        let mut inst = ProblemInstance::default();
        inst.n0 = inst.theta * 2.0;
        assert!(ChemoObjective::new(inst).is_err());
    }
}
