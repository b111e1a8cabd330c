//! Pairwise linkage detection by second-difference perturbation probes.
//!
//! Positions `i` and `j` interact at background `x` when flipping both
//! changes fitness by a different amount than the two single flips combined.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Chromosome;
use crate::objective::Objective;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionReport {
    pub len: usize,
    /// Interacting pairs `(i, j)` with `i < j`, sorted.
    pub pairs: Vec<(usize, usize)>,
    pub backgrounds: usize,
    pub tol: f64,
    pub seed: u64,
    /// Objective calls made by the census.
    pub evaluations: u64,
}

impl InteractionReport {
    pub fn possible_pairs(&self) -> usize {
        self.len * self.len.saturating_sub(1) / 2
    }

    pub fn density(&self) -> f64 {
        match self.possible_pairs() {
            0 => 0.0,
            n => self.pairs.len() as f64 / n as f64,
        }
    }

    /// Header lines (`# key = value`), then `i,j`, then one pair per line.
    pub fn to_file_string(&self, extra_header: &[(&str, String)]) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# chemoeda linkage report");
        let _ = writeln!(out, "# tool_version = {}", crate::VERSION);
        for (k, v) in extra_header {
            let _ = writeln!(out, "# {k} = {v}");
        }
        let _ = writeln!(out, "# L = {}", self.len);
        let _ = writeln!(out, "# backgrounds = {}", self.backgrounds);
        let _ = writeln!(out, "# tol = {:e}", self.tol);
        let _ = writeln!(out, "# seed = {}", self.seed);
        let _ = writeln!(out, "# evaluations = {}", self.evaluations);
        let _ = writeln!(out, "# pairs = {}", self.pairs.len());
        let _ = writeln!(out, "i,j");
        for (i, j) in &self.pairs {
            let _ = writeln!(out, "{i},{j}");
        }
        out
    }

    pub fn from_file_str(text: &str) -> Result<Self> {
        let mut header = std::collections::HashMap::new();
        let mut pairs = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.split_once('=') {
                    header.insert(k.trim().to_string(), v.trim().to_string());
                }
            } else if line.is_empty() || line == "i,j" {
                continue;
            } else {
                let (i, j) = line
                    .split_once(',')
                    .and_then(|(i, j)| Some((i.trim().parse().ok()?, j.trim().parse().ok()?)))
                    .ok_or_else(|| Error::parse(n + 1, format!("bad pair line `{line}`")))?;
                pairs.push((i, j));
            }
        }
        let field = |k: &str| {
            header
                .get(k)
                .ok_or_else(|| Error::parse(0, format!("missing header `{k}`")))
        };
        let num = |k: &str| -> Result<u64> {
            field(k)?
                .parse()
                .map_err(|_| Error::parse(0, format!("bad header `{k}`")))
        };
        Ok(InteractionReport {
            len: num("L")? as usize,
            backgrounds: num("backgrounds")? as usize,
            seed: num("seed")?,
            evaluations: num("evaluations")?,
            tol: field("tol")?
                .parse()
                .map_err(|_| Error::parse(0, "bad header `tol`"))?,
            pairs,
        })
    }
}

/// Second difference `f(x) + f(x^ij) - f(x^i) - f(x^j)`; four objective calls.
pub fn second_difference<O: Objective + ?Sized>(
    f: &O,
    x: &Chromosome,
    i: usize,
    j: usize,
) -> Result<(f64, f64)> {
    let base = f.evaluate(x)?.fitness;
    let xi = x.flipped(i);
    let xj = x.flipped(j);
    let xij = xi.flipped(j);
    let both = f.evaluate(&xij)?.fitness;
    let fi = f.evaluate(&xi)?.fitness;
    let fj = f.evaluate(&xj)?.fitness;
    Ok((base + both - fi - fj, base))
}

/// True when the second difference at `x` exceeds `tol * max(1, |f(x)|)`.
pub fn probe_pair<O: Objective + ?Sized>(
    f: &O,
    x: &Chromosome,
    i: usize,
    j: usize,
    tol: f64,
) -> Result<bool> {
    if i == j || i >= x.len() || j >= x.len() {
        return Err(Error::Config(format!(
            "probe positions ({i}, {j}) must be distinct and below {}",
            x.len()
        )));
    }
    let (delta, base) = second_difference(f, x, i, j)?;
    Ok(delta.abs() > tol * base.abs().max(1.0))
}

/// Position pair for a linear pair index in row-major upper-triangle order.
fn pair_at(len: usize, mut k: usize) -> (usize, usize) {
    let mut i = 0;
    loop {
        let row = len - 1 - i;
        if k < row {
            return (i, i + 1 + k);
        }
        k -= row;
        i += 1;
    }
}

/// Probes every unordered pair at up to `backgrounds` random backgrounds
/// and flags it on the first probe that fires. Pair `k` draws its
/// backgrounds from its own stream of the seeded generator, so results do
/// not depend on scheduling and more backgrounds can only add pairs.
pub fn detect_interactions<O: Objective + ?Sized>(
    f: &O,
    backgrounds: usize,
    tol: f64,
    seed: u64,
) -> Result<InteractionReport> {
    if backgrounds == 0 {
        return Err(Error::Config("backgrounds must be >= 1".into()));
    }
    let len = f.len();
    let total = len * len.saturating_sub(1) / 2;
    let results: Vec<(bool, u64)> = (0..total)
        .into_par_iter()
        .map(|k| {
            let (i, j) = pair_at(len, k);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let mut calls = 0;
            for _ in 0..backgrounds {
                let x = Chromosome::new((0..len).map(|_| rng.random::<bool>()).collect());
                calls += 4;
                if probe_pair(f, &x, i, j, tol)? {
                    return Ok((true, calls));
                }
            }
            Ok((false, calls))
        })
        .collect::<Result<_>>()?;
    let pairs = results
        .iter()
        .enumerate()
        .filter(|(_, (hit, _))| *hit)
        .map(|(k, _)| pair_at(len, k))
        .collect();
    Ok(InteractionReport {
        len,
        pairs,
        backgrounds,
        tol,
        seed,
        evaluations: results.iter().map(|(_, c)| c).sum(),
    })
}
