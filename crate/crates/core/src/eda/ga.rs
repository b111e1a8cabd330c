use rand::Rng;

use crate::error::Result;
use crate::model::Chromosome;
use crate::objective::Objective;

use super::config::{Crossover, OptimizerConfig};
use super::evaluator::Evaluator;
use super::population::{Individual, Population};
use super::selection::select;

/// Swaps tails after a cut point drawn uniformly from `1..len`.
pub fn one_point_crossover<R: Rng + ?Sized>(a: &mut Chromosome, b: &mut Chromosome, rng: &mut R) {
    let len = a.len();
    if len < 2 {
        return;
    }
    let cut = rng.random_range(1..len);
    a.bits_mut()[cut..].swap_with_slice(&mut b.bits_mut()[cut..]);
}

pub fn uniform_crossover<R: Rng + ?Sized>(a: &mut Chromosome, b: &mut Chromosome, rng: &mut R) {
    for (x, y) in a.bits_mut().iter_mut().zip(b.bits_mut()) {
        if rng.random::<bool>() {
            std::mem::swap(x, y);
        }
    }
}

pub fn mutate<R: Rng + ?Sized>(x: &mut Chromosome, rate: f64, rng: &mut R) {
    if rate <= 0.0 {
        return;
    }
    for b in x.bits_mut() {
        if rate >= 1.0 || rng.random::<f64>() < rate {
            *b = !*b;
        }
    }
}

/// Carries `elite` over and fills the rest of the generation with
/// `offspring`. A generation cut short by the budget is topped up with the
/// previous population's best remaining members, which cost no evaluations.
pub(crate) fn assemble(
    prev: &Population,
    elite: Option<usize>,
    offspring: Vec<Individual>,
) -> Population {
    let size = prev.len();
    let mut members = Vec::with_capacity(size);
    if let Some(e) = elite {
        members.push(prev.members[e].clone());
    }
    members.extend(offspring);
    if members.len() < size {
        let fill = prev
            .ranking()
            .into_iter()
            .filter(|i| Some(*i) != elite)
            .take(size - members.len());
        members.extend(fill.map(|i| prev.members[i].clone()).collect::<Vec<_>>());
    }
    members.truncate(size);
    Population {
        members,
        generation: prev.generation + 1,
    }
}

/// One generation of a simple generational GA with single-member elitism.
pub fn ga_step<O, R>(
    pop: &Population,
    cfg: &OptimizerConfig,
    ev: &mut Evaluator<'_, O>,
    rng: &mut R,
) -> Result<Population>
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    let len = pop.members[0].chromosome.len();
    let wanted = pop.len() - 1;
    let n_children = (wanted as u64).min(ev.remaining()) as usize;
    let n_parents = n_children + n_children % 2;
    let parents = select(pop, cfg.selection, n_parents.max(2), rng)?;
    let pm = cfg.mutation_rate_for(len);

    let mut children = Vec::with_capacity(n_parents);
    for pair in parents.chunks(2).take(n_parents / 2) {
        let (mut a, mut b) = (pair[0].clone(), pair[1].clone());
        if rng.random::<f64>() < cfg.crossover_rate {
            match cfg.crossover {
                Crossover::OnePoint => one_point_crossover(&mut a, &mut b, rng),
                Crossover::Uniform => uniform_crossover(&mut a, &mut b, rng),
            }
        }
        mutate(&mut a, pm, rng);
        mutate(&mut b, pm, rng);
        children.push(a);
        children.push(b);
    }
    children.truncate(n_children);
    let offspring = ev.evaluate_all(children)?;
    Ok(assemble(pop, pop.best_index(), offspring))
}
