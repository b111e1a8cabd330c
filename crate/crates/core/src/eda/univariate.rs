//! Univariate EDAs: UMDA and PBIL.

use rand::Rng;

use crate::error::Result;
use crate::model::Chromosome;
use crate::objective::Objective;

use super::config::OptimizerConfig;
use super::evaluator::Evaluator;
use super::ga::assemble;
use super::population::Population;
use super::selection::select;

/// Frequency of ones per position. With `laplace` each count gets one
/// pseudo-observation of either value.
pub fn marginals(selected: &[Chromosome], laplace: bool) -> Vec<f64> {
    let len = selected.first().map_or(0, Chromosome::len);
    let mut ones = vec![0usize; len];
    for x in selected {
        for (c, b) in ones.iter_mut().zip(x.bits()) {
            *c += usize::from(*b);
        }
    }
    let n = selected.len() as f64;
    ones.into_iter()
        .map(|c| {
            if laplace {
                (c as f64 + 1.0) / (n + 2.0)
            } else {
                c as f64 / n
            }
        })
        .collect()
}

/// Draws each bit independently with its probability of being one.
pub fn sample_independent<R: Rng + ?Sized>(
    probabilities: &[f64],
    count: usize,
    rng: &mut R,
) -> Vec<Chromosome> {
    (0..count)
        .map(|_| {
            Chromosome::new(
                probabilities
                    .iter()
                    .map(|p| rng.random::<f64>() < *p)
                    .collect(),
            )
        })
        .collect()
}

/// `p <- (1 - rate) p + rate * marginals(selected)`. A rate of one
/// reproduces the UMDA model exactly; zero leaves `p` unchanged.
pub fn pbil_update(prob: &[f64], selected: &[Chromosome], learning_rate: f64) -> Vec<f64> {
    pbil_blend(prob, &marginals(selected, false), learning_rate)
}

fn pbil_blend(prob: &[f64], target: &[f64], rate: f64) -> Vec<f64> {
    prob.iter()
        .zip(target)
        .map(|(p, m)| (1.0 - rate) * p + rate * m)
        .collect()
}

fn sample_generation<O, R>(
    pop: &Population,
    probabilities: &[f64],
    ev: &mut Evaluator<'_, O>,
    rng: &mut R,
) -> Result<Population>
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    let n = ((pop.len() - 1) as u64).min(ev.remaining()) as usize;
    let offspring = ev.evaluate_all(sample_independent(probabilities, n, rng))?;
    Ok(assemble(pop, pop.best_index(), offspring))
}

/// One UMDA generation: select, estimate marginals, resample everything
/// except the single best member.
pub fn umda_step<O, R>(
    pop: &Population,
    cfg: &OptimizerConfig,
    ev: &mut Evaluator<'_, O>,
    rng: &mut R,
) -> Result<Population>
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    let selected = select(pop, cfg.selection, cfg.selection_count(), rng)?;
    let p = marginals(&selected, cfg.laplace.unwrap_or(false));
    sample_generation(pop, &p, ev, rng)
}

/// PBIL keeps its probability vector across generations.
#[derive(Debug, Clone, PartialEq)]
pub struct Pbil {
    pub prob: Vec<f64>,
}

impl Pbil {
    pub fn new(len: usize) -> Self {
        Pbil {
            prob: vec![0.5; len],
        }
    }

    pub fn step<O, R>(
        &mut self,
        pop: &Population,
        cfg: &OptimizerConfig,
        ev: &mut Evaluator<'_, O>,
        rng: &mut R,
    ) -> Result<Population>
    where
        O: Objective + ?Sized,
        R: Rng + ?Sized,
    {
        let selected = select(pop, cfg.selection, cfg.selection_count(), rng)?;
        let target = marginals(&selected, cfg.laplace.unwrap_or(false));
        self.prob = pbil_blend(&self.prob, &target, cfg.learning_rate);
        sample_generation(pop, &self.prob, ev, rng)
    }
}
