//! Bayesian network with decision-tree conditional distributions, as used by
//! hBOA: greedy structure search under a penalised Bayesian-Dirichlet score,
//! and ancestral sampling.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Chromosome;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    /// Probability that the variable is one in this context, with the number
    /// of selected samples that reached the leaf.
    Leaf {
        p_one: f64,
        count: usize,
    },
    Split {
        var: usize,
        zero: usize,
        one: usize,
    },
}

/// Conditional distribution of one variable. Node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
}

impl DecisionTree {
    fn leaf(p_one: f64, count: usize) -> Self {
        DecisionTree {
            nodes: vec![Node::Leaf { p_one, count }],
        }
    }

    /// Probability of a one given values of the split variables.
    pub fn probability(&self, bits: &[bool]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { p_one, .. } => return p_one,
                Node::Split { var, zero, one } => at = if bits[var] { one } else { zero },
            }
        }
    }

    pub fn leaves(&self) -> impl Iterator<Item = (f64, usize)> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            Node::Leaf { p_one, count } => Some((*p_one, *count)),
            Node::Split { .. } => None,
        })
    }

    /// Distinct variables split on anywhere in the tree, ascending.
    pub fn parents(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self
            .nodes
            .iter()
            .filter_map(|n| match n {
                Node::Split { var, .. } => Some(*var),
                Node::Leaf { .. } => None,
            })
            .collect();
        p.sort_unstable();
        p.dedup();
        p
    }

    pub fn splits(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Split { .. }))
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BayesianNetworkModel {
    pub trees: Vec<DecisionTree>,
}

impl BayesianNetworkModel {
    /// Network with no edges and the given marginals.
    pub fn independent(probabilities: &[f64]) -> Self {
        BayesianNetworkModel {
            trees: probabilities
                .iter()
                .map(|p| DecisionTree::leaf(*p, 0))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn parents(&self, var: usize) -> Vec<usize> {
        self.trees[var].parents()
    }

    pub fn split_count(&self) -> usize {
        self.trees.iter().map(DecisionTree::splits).sum()
    }

    /// Directed edges `(parent, child)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|child| self.parents(child).into_iter().map(move |p| (p, child)))
            .collect()
    }

    /// Kahn's algorithm, smallest ready variable first.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        let n = self.len();
        let mut indegree = vec![0usize; n];
        let mut children = vec![Vec::new(); n];
        for (p, c) in self.edges() {
            if p >= n {
                return Err(Error::Structure(format!("parent {p} out of range")));
            }
            indegree[c] += 1;
            children[p].push(c);
        }
        let mut ready: std::collections::BTreeSet<usize> =
            (0..n).filter(|v| indegree[*v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &c in &children[v] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        if order.len() == n {
            Ok(order)
        } else {
            Err(Error::Structure("model graph contains a cycle".into()))
        }
    }
}

/// Structure-search settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSettings {
    /// Each added leaf costs a factor `N^-exponent` in the score.
    pub complexity_exponent: f64,
    /// Leaf probabilities are the posterior mean `(n1 + 1) / (n + 2)` under
    /// the scoring prior instead of the raw frequency `n1 / n`.
    pub posterior_leaves: bool,
}

impl Default for ModelSettings {
    fn default() -> Self {
        ModelSettings {
            complexity_exponent: 0.5,
            posterior_leaves: false,
        }
    }
}

/// `ln(n!)` for `0..=n`.
fn ln_factorials(n: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(n + 2);
    t.push(0.0);
    for k in 1..=n + 1 {
        t.push(t[k - 1] + (k as f64).ln());
    }
    t
}

/// Log marginal likelihood of a binary leaf under a uniform Dirichlet prior:
/// `ln( n0! n1! / (n0 + n1 + 1)! )`.
fn leaf_score(lf: &[f64], n0: usize, n1: usize) -> f64 {
    lf[n0] + lf[n1] - lf[n0 + n1 + 1]
}

struct OpenLeaf {
    var: usize,
    node: usize,
    /// Bitmask over the selected rows that reach this leaf.
    rows: Vec<u64>,
    /// Variables already split on between the root and this leaf.
    path: Vec<usize>,
    /// Cached best split `(gain, variable)`; gains never change, but a
    /// candidate can become invalid as edges are added.
    best: Option<(f64, usize)>,
}

fn popcount_and(a: &[u64], b: &[u64]) -> usize {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x & y).count_ones() as usize)
        .sum()
}

fn popcount(a: &[u64]) -> usize {
    a.iter().map(|x| x.count_ones() as usize).sum()
}

struct Builder {
    len: usize,
    words: usize,
    /// Column bitsets: bit `r` of column `v` is sample `r`'s value of `v`.
    columns: Vec<u64>,
    lf: Vec<f64>,
    penalty: f64,
    /// `reach[a * len + b]`: a directed path `a -> ... -> b` exists.
    reach: Vec<bool>,
    parent: Vec<bool>,
}

impl Builder {
    fn new(data: &[Chromosome], penalty: f64) -> Self {
        let len = data[0].len();
        let n = data.len();
        let words = n.div_ceil(64);
        let mut columns = vec![0u64; len * words];
        for (r, x) in data.iter().enumerate() {
            for (v, bit) in x.bits().iter().enumerate() {
                if *bit {
                    columns[v * words + r / 64] |= 1 << (r % 64);
                }
            }
        }
        Builder {
            len,
            words,
            columns,
            lf: ln_factorials(n),
            penalty,
            reach: vec![false; len * len],
            parent: vec![false; len * len],
        }
    }

    fn column(&self, v: usize) -> &[u64] {
        &self.columns[v * self.words..(v + 1) * self.words]
    }

    fn reaches(&self, a: usize, b: usize) -> bool {
        self.reach[a * self.len + b]
    }

    /// A split of `var` on `cand` adds edge `cand -> var`; it is legal unless
    /// `var` already reaches `cand`.
    fn allowed(&self, leaf: &OpenLeaf, cand: usize) -> bool {
        cand != leaf.var && !leaf.path.contains(&cand) && !self.reaches(leaf.var, cand)
    }

    fn best_split(&self, leaf: &OpenLeaf) -> Option<(f64, usize)> {
        let ones: Vec<u64> = leaf
            .rows
            .iter()
            .zip(self.column(leaf.var))
            .map(|(m, c)| m & c)
            .collect();
        let n = popcount(&leaf.rows);
        let n1 = popcount(&ones);
        let base = leaf_score(&self.lf, n - n1, n1);
        let mut best: Option<(f64, usize)> = None;
        for cand in 0..self.len {
            if !self.allowed(leaf, cand) {
                continue;
            }
            let col = self.column(cand);
            // Rows with cand = 1, and of those the rows with var = 1.
            let c1 = popcount_and(&leaf.rows, col);
            let c1v1 = popcount_and(&ones, col);
            let c0v1 = n1 - c1v1;
            let c0 = n - c1;
            let gain = leaf_score(&self.lf, c0 - c0v1, c0v1)
                + leaf_score(&self.lf, c1 - c1v1, c1v1)
                - base
                - self.penalty;
            if gain > 0.0 && best.is_none_or(|(g, _)| gain > g) {
                best = Some((gain, cand));
            }
        }
        best
    }

    fn counts(&self, rows: &[u64], var: usize) -> (usize, usize) {
        let n1 = popcount_and(rows, self.column(var));
        (popcount(rows) - n1, n1)
    }

    fn add_edge(&mut self, from: usize, to: usize) {
        if self.parent[from * self.len + to] {
            return;
        }
        self.parent[from * self.len + to] = true;
        let n = self.len;
        let sources: Vec<usize> = (0..n)
            .filter(|a| *a == from || self.reaches(*a, from))
            .collect();
        let sinks: Vec<usize> = (0..n)
            .filter(|b| *b == to || self.reaches(to, *b))
            .collect();
        for &a in &sources {
            for &b in &sinks {
                self.reach[a * n + b] = true;
            }
        }
    }
}

/// Greedily grows decision trees for every variable. Each step applies the
/// single best-scoring leaf split over all variables; splits that would
/// close a cycle are never considered. Stops when no split improves the
/// penalised score.
pub fn build_model(
    selected: &[Chromosome],
    settings: ModelSettings,
) -> Result<BayesianNetworkModel> {
    let Some(first) = selected.first() else {
        return Err(Error::Structure(
            "cannot build a model from no samples".into(),
        ));
    };
    let len = first.len();
    if selected.iter().any(|x| x.len() != len) {
        return Err(Error::Dimension {
            expected: len,
            actual: selected
                .iter()
                .map(Chromosome::len)
                .find(|l| *l != len)
                .unwrap_or(len),
        });
    }
    let n = selected.len();
    let mut b = Builder::new(selected, settings.complexity_exponent * (n as f64).ln());
    let leaf_p = |n0: usize, n1: usize| {
        if settings.posterior_leaves {
            (n1 + 1) as f64 / (n0 + n1 + 2) as f64
        } else {
            n1 as f64 / (n0 + n1) as f64
        }
    };

    let mut all_rows = vec![u64::MAX; b.words];
    if !n.is_multiple_of(64) {
        all_rows[b.words - 1] = (1u64 << (n % 64)) - 1;
    }
    let mut trees: Vec<DecisionTree> = Vec::with_capacity(len);
    let mut open: Vec<OpenLeaf> = Vec::new();
    for var in 0..len {
        let mut leaf = OpenLeaf {
            var,
            node: 0,
            rows: all_rows.clone(),
            path: Vec::new(),
            best: None,
        };
        let (n0, n1) = b.counts(&leaf.rows, var);
        trees.push(DecisionTree::leaf(leaf_p(n0, n1), n0 + n1));
        leaf.best = b.best_split(&leaf);
        open.push(leaf);
    }

    while let Some(pick) = open
        .iter()
        .enumerate()
        .filter_map(|(i, l)| l.best.map(|(g, _)| (i, g)))
        .fold(None, |acc: Option<(usize, f64)>, (i, g)| match acc {
            Some((_, bg)) if bg >= g => acc,
            _ => Some((i, g)),
        })
        .map(|(i, _)| i)
    {
        let (_, cand) = open[pick].best.expect("picked leaf has a candidate");
        if !b.allowed(&open[pick], cand) {
            open[pick].best = b.best_split(&open[pick]);
            continue;
        }

        let leaf = open.swap_remove(pick);
        let col = b.column(cand);
        let rows_one: Vec<u64> = leaf.rows.iter().zip(col).map(|(m, c)| m & c).collect();
        let rows_zero: Vec<u64> = leaf.rows.iter().zip(col).map(|(m, c)| m & !c).collect();
        let tree = &mut trees[leaf.var];
        let zero_id = tree.nodes.len();
        let one_id = zero_id + 1;
        let mut children = Vec::with_capacity(2);
        for (id, rows) in [(zero_id, rows_zero), (one_id, rows_one)] {
            let (n0, n1) = b.counts(&rows, leaf.var);
            tree.nodes.push(Node::Leaf {
                p_one: leaf_p(n0, n1),
                count: n0 + n1,
            });
            let mut path = leaf.path.clone();
            path.push(cand);
            children.push(OpenLeaf {
                var: leaf.var,
                node: id,
                rows,
                path,
                best: None,
            });
        }
        tree.nodes[leaf.node] = Node::Split {
            var: cand,
            zero: zero_id,
            one: one_id,
        };
        b.add_edge(cand, leaf.var);
        for mut child in children {
            child.best = b.best_split(&child);
            open.push(child);
        }
    }

    let model = BayesianNetworkModel { trees };
    debug_assert!(model.topological_order().is_ok());
    Ok(model)
}

/// Ancestral sampling in topological order.
pub fn sample_model<R: Rng + ?Sized>(
    model: &BayesianNetworkModel,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Chromosome>> {
    let order = model.topological_order()?;
    Ok((0..count)
        .map(|_| {
            let mut bits = vec![false; model.len()];
            for &v in &order {
                let p = model.trees[v].probability(&bits);
                bits[v] = rng.random::<f64>() < p;
            }
            Chromosome::new(bits)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eda::population::random_chromosome;
    use crate::eda::univariate::marginals;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn leaf_score_matches_gamma_form() {
        let lf = ln_factorials(20);
        // Beta(1,1) marginal likelihood of 3 zeros, 2 ones: 3! 2! / 6! = 1/60
        assert!((leaf_score(&lf, 3, 2) - (1.0f64 / 60.0).ln()).abs() < 1e-12);
        assert_eq!(leaf_score(&lf, 0, 0), 0.0);
    }

    #[test]
    fn independent_bits_give_empty_network() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let data: Vec<_> = (0..10_000)
            .map(|_| random_chromosome(10, &mut rng))
            .collect();
        let model = build_model(&data, ModelSettings::default()).unwrap();
        assert_eq!(model.split_count(), 0);
    }

    #[test]
    fn copied_bit_is_linked() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let data: Vec<_> = (0..500)
            .map(|_| {
                let mut x = random_chromosome(8, &mut rng);
                x.bits_mut()[2] = x.bits()[1];
                x
            })
            .collect();
        let model = build_model(&data, ModelSettings::default()).unwrap();
        let linked = model.parents(2).contains(&1) || model.parents(1).contains(&2);
        assert!(linked, "{:?}", model.edges());

        let samples = sample_model(&model, 10_000, &mut rng).unwrap();
        let agree = samples
            .iter()
            .filter(|x| x.bits()[1] == x.bits()[2])
            .count();
        assert!(agree as f64 / 1e4 >= 0.99);
    }

    #[test]
    fn repeated_chromosome_gives_deterministic_leaves() {
        let x: Chromosome = "1100101".parse().unwrap();
        let model = build_model(&vec![x.clone(); 50], ModelSettings::default()).unwrap();
        assert_eq!(model.split_count(), 0);
        for tree in &model.trees {
            for (p, _) in tree.leaves() {
                assert!(p == 0.0 || p == 1.0);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_model(&model, 20, &mut rng)
            .unwrap()
            .iter()
            .all(|y| *y == x));
    }

    #[test]
    fn leaves_partition_the_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        // chain of dependencies: x_{k+1} = x_k with 90% probability
        let data: Vec<_> = (0..2_000)
            .map(|_| {
                let mut bits = vec![rng.random::<bool>()];
                for k in 1..12 {
                    let prev = bits[k - 1];
                    bits.push(if rng.random::<f64>() < 0.9 {
                        prev
                    } else {
                        !prev
                    });
                }
                Chromosome::new(bits)
            })
            .collect();
        let model = build_model(&data, ModelSettings::default()).unwrap();
        assert!(model.split_count() >= 11);
        model.topological_order().unwrap();
        for tree in &model.trees {
            let covered: usize = tree.leaves().map(|(_, c)| c).sum();
            assert_eq!(covered, data.len());
            assert!(tree.leaves().all(|(p, _)| (0.0..=1.0).contains(&p)));
        }
    }

    #[test]
    fn cyclic_model_cannot_be_sampled() {
        let mut model = BayesianNetworkModel::independent(&[0.5, 0.5]);
        for (v, parent) in [(0, 1), (1, 0)] {
            model.trees[v] = DecisionTree {
                nodes: vec![
                    Node::Split {
                        var: parent,
                        zero: 1,
                        one: 2,
                    },
                    Node::Leaf {
                        p_one: 0.0,
                        count: 0,
                    },
                    Node::Leaf {
                        p_one: 1.0,
                        count: 0,
                    },
                ],
            };
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            sample_model(&model, 1, &mut rng),
            Err(Error::Structure(_))
        ));
    }

    #[test]
    fn empty_network_sampling_matches_marginals() {
        let probs: Vec<f64> = (0..16).map(|i| (i as f64 + 0.5) / 16.0).collect();
        let model = BayesianNetworkModel::independent(&probs);
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let xs = sample_model(&model, 10_000, &mut rng).unwrap();
        for (p, q) in marginals(&xs, false).iter().zip(&probs) {
            let sd = (q * (1.0 - q) / 1e4).sqrt();
            assert!((p - q).abs() < 5.0 * sd);
        }
    }

    #[test]
    fn empty_selection_is_an_error() {
        assert!(build_model(&[], ModelSettings::default()).is_err());
    }
}
