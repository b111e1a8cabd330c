use rand::Rng;

use crate::model::Chromosome;

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub chromosome: Chromosome,
    pub fitness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub members: Vec<Individual>,
    pub generation: usize,
}

impl Population {
    pub fn new(members: Vec<Individual>) -> Self {
        Population {
            members,
            generation: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Index of the fittest member; ties go to the lowest index.
    pub fn best_index(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, m) in self.members.iter().enumerate() {
            if best.is_none_or(|b| m.fitness > self.members[b].fitness) {
                best = Some(i);
            }
        }
        best
    }

    pub fn best(&self) -> Option<&Individual> {
        self.best_index().map(|i| &self.members[i])
    }

    pub fn mean_fitness(&self) -> f64 {
        self.members.iter().map(|m| m.fitness).sum::<f64>() / self.members.len() as f64
    }

    /// Member indices ordered fittest first, ties by index.
    pub fn ranking(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.members.len()).collect();
        idx.sort_by(|a, b| {
            self.members[*b]
                .fitness
                .total_cmp(&self.members[*a].fitness)
                .then(a.cmp(b))
        });
        idx
    }

    /// Number of distinct chromosomes.
    pub fn diversity(&self) -> usize {
        let mut seen: Vec<&Chromosome> = self.members.iter().map(|m| &m.chromosome).collect();
        seen.sort();
        seen.dedup();
        seen.len()
    }
}

pub fn random_chromosome<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Chromosome {
    Chromosome::new((0..len).map(|_| rng.random::<bool>()).collect())
}
