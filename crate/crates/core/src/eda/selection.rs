use rand::Rng;

use crate::error::{Error, Result};
use crate::model::Chromosome;

use super::config::Selection;
use super::population::Population;

/// Indices of `out` tournament winners. Each tournament draws `pool`
/// members uniformly with replacement; the fittest wins and ties go to the
/// earliest draw, so equal fitness selects uniformly.
pub fn tournament_indices<R: Rng + ?Sized>(
    pop: &Population,
    pool: usize,
    out: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if pop.is_empty() {
        return Err(Error::Selection("empty population".into()));
    }
    if pool == 0 || out == 0 {
        return Err(Error::Selection("pool and output size must be >= 1".into()));
    }
    let n = pop.len();
    Ok((0..out)
        .map(|_| {
            let mut winner = rng.random_range(0..n);
            for _ in 1..pool {
                let c = rng.random_range(0..n);
                if pop.members[c].fitness > pop.members[winner].fitness {
                    winner = c;
                }
            }
            winner
        })
        .collect())
}

pub fn tournament_select<R: Rng + ?Sized>(
    pop: &Population,
    pool: usize,
    out: usize,
    rng: &mut R,
) -> Result<Vec<Chromosome>> {
    Ok(tournament_indices(pop, pool, out, rng)?
        .into_iter()
        .map(|i| pop.members[i].chromosome.clone())
        .collect())
}

/// Indices of the `keep` fittest members, fittest first.
pub fn truncation_indices(pop: &Population, keep: usize) -> Result<Vec<usize>> {
    if keep == 0 || keep > pop.len() {
        return Err(Error::Selection(format!(
            "truncation keep {keep} outside 1..={}",
            pop.len()
        )));
    }
    let mut ranked = pop.ranking();
    ranked.truncate(keep);
    Ok(ranked)
}

pub fn truncation_select(pop: &Population, keep: usize) -> Result<Vec<Chromosome>> {
    Ok(truncation_indices(pop, keep)?
        .into_iter()
        .map(|i| pop.members[i].chromosome.clone())
        .collect())
}

/// Applies the configured selection operator.
pub fn select<R: Rng + ?Sized>(
    pop: &Population,
    selection: Selection,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Chromosome>> {
    match selection {
        Selection::Tournament { pool } => tournament_select(pop, pool, count, rng),
        Selection::Truncation(_) => truncation_select(pop, count),
    }
}
