use rand::seq::index;
use rand::Rng;

use crate::error::Result;
use crate::objective::Objective;

use super::bayes_net::{build_model, sample_model, ModelSettings};
use super::config::OptimizerConfig;
use super::evaluator::Evaluator;
use super::population::{Individual, Population};
use super::selection::select;

/// Restricted tournament replacement. Each offspring is compared with
/// `window` distinct members drawn uniformly; it replaces the one nearest in
/// Hamming distance (ties to the earliest drawn) iff it is strictly fitter.
pub fn rtr_replace<R: Rng + ?Sized>(
    pop: &mut Population,
    offspring: Vec<Individual>,
    window: usize,
    rng: &mut R,
) {
    let n = pop.len();
    let window = window.clamp(1, n.max(1));
    if n == 0 {
        return;
    }
    for child in offspring {
        let mut nearest = None::<(usize, usize)>;
        for i in index::sample(rng, n, window) {
            let dist = pop.members[i].chromosome.hamming(&child.chromosome);
            if nearest.is_none_or(|(_, d)| dist < d) {
                nearest = Some((i, dist));
            }
        }
        if let Some((i, _)) = nearest {
            if child.fitness > pop.members[i].fitness {
                pop.members[i] = child;
            }
        }
    }
}

/// One hBOA generation: select, learn a decision-tree Bayesian network,
/// sample offspring, merge them by restricted tournament replacement.
pub fn hboa_step<O, R>(
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
    let selected = select(pop, cfg.selection, cfg.selection_count(), rng)?;
    let model = build_model(
        &selected,
        ModelSettings {
            complexity_exponent: cfg.complexity_exponent,
            posterior_leaves: cfg.laplace.unwrap_or(true),
        },
    )?;
    let n = (cfg.offspring_count() as u64).min(ev.remaining()) as usize;
    let offspring = ev.evaluate_all(sample_model(&model, n, rng)?)?;
    let mut next = Population {
        members: pop.members.clone(),
        generation: pop.generation + 1,
    };
    rtr_replace(&mut next, offspring, cfg.rtr_window_for(len), rng);
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Chromosome;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ind(bits: &str, fitness: f64) -> Individual {
        Individual {
            chromosome: bits.parse().unwrap(),
            fitness,
        }
    }

    #[test]
    fn worse_offspring_change_nothing() {
        let mut pop = Population::new(vec![ind("0000", 5.0), ind("1111", 6.0), ind("0101", 7.0)]);
        let before = pop.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        rtr_replace(
            &mut pop,
            vec![ind("0011", 1.0), ind("1111", 6.0)],
            3,
            &mut rng,
        );
        assert_eq!(pop, before);
    }

    #[test]
    fn offspring_replaces_its_nearest_neighbour() {
        let mut pop = Population::new(vec![ind("0000", 5.0), ind("1111", 6.0), ind("0101", 7.0)]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        rtr_replace(&mut pop, vec![ind("1111", 9.0)], 3, &mut rng);
        assert_eq!(pop.members[1], ind("1111", 9.0));
        rtr_replace(&mut pop, vec![ind("0001", 5.5)], 3, &mut rng);
        assert_eq!(pop.members[0], ind("0001", 5.5));
    }

    fn two_peaks(x: &Chromosome) -> f64 {
        let ones = x.ones();
        ones.max(x.len() - ones) as f64
    }

    /// Distinct chromosomes after evolving with either RTR or replacing the
    /// worst members.
    fn diversity_after(rtr: bool, seed: u64) -> usize {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = 20;
        let mk = |x: Chromosome| Individual {
            fitness: two_peaks(&x),
            chromosome: x,
        };
        let mut pop = Population::new(
            (0..60)
                .map(|_| mk(crate::eda::population::random_chromosome(len, &mut rng)))
                .collect(),
        );
        for _ in 0..30 {
            let offspring: Vec<Individual> = (0..60)
                .map(|_| {
                    let parent = &pop.members[rng.random_range(0..60)].chromosome;
                    let mut child = parent.clone();
                    child.flip(rng.random_range(0..len));
                    mk(child)
                })
                .collect();
            if rtr {
                rtr_replace(&mut pop, offspring, len, &mut rng);
            } else {
                let mut all = pop.members.clone();
                all.extend(offspring);
                all.sort_by(|a, b| b.fitness.total_cmp(&a.fitness));
                all.truncate(60);
                pop.members = all;
            }
        }
        pop.diversity()
    }

    #[test]
    fn rtr_preserves_more_diversity_than_full_replacement() {
        let mut wins = 0;
        for seed in 0..30 {
            if diversity_after(true, seed) >= diversity_after(false, seed) {
                wins += 1;
            }
        }
        assert!(wins >= 27, "rtr at least as diverse in {wins}/30 runs");
    }
}
