use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Ga,
    Umda,
    Pbil,
    Hboa,
}

impl OptimizerKind {
    pub const ALL: [OptimizerKind; 4] = [
        OptimizerKind::Ga,
        OptimizerKind::Umda,
        OptimizerKind::Pbil,
        OptimizerKind::Hboa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OptimizerKind::Ga => "ga",
            OptimizerKind::Umda => "umda",
            OptimizerKind::Pbil => "pbil",
            OptimizerKind::Hboa => "hboa",
        }
    }
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OptimizerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        OptimizerKind::ALL
            .into_iter()
            .find(|k| k.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Config(format!("unknown optimizer `{s}`")))
    }
}

/// How many members truncation selection keeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Keep {
    Count(usize),
    /// Fraction of the population, rounded to the nearest member.
    Fraction(f64),
}

impl Keep {
    pub fn resolve(self, population: usize) -> usize {
        match self {
            Keep::Count(n) => n,
            Keep::Fraction(f) => (f * population as f64).round() as usize,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Selection {
    Tournament { pool: usize },
    Truncation(Keep),
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Selection::Tournament { pool } => write!(f, "tournament:{pool}"),
            Selection::Truncation(Keep::Count(n)) => write!(f, "truncation:{n}"),
            Selection::Truncation(Keep::Fraction(x)) => write!(f, "truncation:{x}"),
        }
    }
}

/// `tournament:<pool>`, `truncation:<count>` or `truncation:<fraction>`
/// (a value containing a decimal point, strictly between 0 and 1).
impl FromStr for Selection {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad selection `{s}`"));
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "tournament" => Ok(Selection::Tournament {
                pool: arg.parse().map_err(|_| bad())?,
            }),
            "truncation" if arg.contains('.') => {
                let f: f64 = arg.parse().map_err(|_| bad())?;
                if f > 0.0 && f <= 1.0 {
                    Ok(Selection::Truncation(Keep::Fraction(f)))
                } else {
                    Err(bad())
                }
            }
            "truncation" => Ok(Selection::Truncation(Keep::Count(
                arg.parse().map_err(|_| bad())?,
            ))),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Crossover {
    OnePoint,
    Uniform,
}

impl FromStr for Crossover {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "onepoint" | "one-point" => Ok(Crossover::OnePoint),
            "uniform" => Ok(Crossover::Uniform),
            _ => Err(Error::Config(format!("unknown crossover `{s}`"))),
        }
    }
}

impl fmt::Display for Crossover {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Crossover::OnePoint => "onepoint",
            Crossover::Uniform => "uniform",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StopConditions {
    /// Stop after the generation in which the first feasible solution appears.
    pub on_feasible: bool,
    /// Stop once the best fitness reaches this value.
    pub target: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub population: usize,
    pub selection: Selection,
    /// Parents drawn per generation by tournament selection; defaults to the
    /// population size. Ignored by truncation.
    pub selected: Option<usize>,
    pub crossover: Crossover,
    pub crossover_rate: f64,
    /// Per-bit mutation probability; defaults to `1 / L`.
    pub mutation_rate: Option<f64>,
    /// PBIL learning rate.
    pub learning_rate: f64,
    /// Smoothed probabilities: Laplace-corrected marginals for UMDA and
    /// PBIL, posterior-mean leaves for hBOA. Off by default for UMDA and
    /// PBIL, on for hBOA.
    pub laplace: Option<bool>,
    /// hBOA replacement window; defaults to `min(L, population / 20)`.
    pub rtr_window: Option<usize>,
    /// hBOA offspring per generation; defaults to half the population.
    pub offspring: Option<usize>,
    /// Exponent `a` of the per-leaf complexity penalty `N^-a` in hBOA.
    pub complexity_exponent: f64,
    /// Total evaluation budget, initial population included.
    pub budget: u64,
    pub stop: StopConditions,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            population: 100,
            selection: Selection::Tournament { pool: 2 },
            selected: None,
            crossover: Crossover::OnePoint,
            crossover_rate: 0.9,
            mutation_rate: None,
            learning_rate: 0.1,
            laplace: None,
            rtr_window: None,
            offspring: None,
            complexity_exponent: 0.5,
            budget: 200_000,
            stop: StopConditions::default(),
        }
    }
}

impl OptimizerConfig {
    pub fn with_population(mut self, population: usize) -> Self {
        self.population = population;
        self
    }

    pub fn with_selection(mut self, selection: Selection) -> Self {
        self.selection = selection;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn stop_on_feasible(mut self) -> Self {
        self.stop.on_feasible = true;
        self
    }

    pub fn stop_at(mut self, target: f64) -> Self {
        self.stop.target = Some(target);
        self
    }

    /// Sets one field from its textual `key = value` form. Returns `false`
    /// for keys this config does not own.
    pub fn set(&mut self, key: &str, value: &str) -> Result<bool> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{value}`")))
        }
        let value = value.trim();
        match key {
            "pop" | "population" => self.population = num(key, value)?,
            "select" | "selection" => self.selection = value.parse()?,
            "selected" => self.selected = Some(num(key, value)?),
            "crossover" => self.crossover = value.parse()?,
            "crossover_rate" => self.crossover_rate = num(key, value)?,
            "mutation_rate" => self.mutation_rate = Some(num(key, value)?),
            "learning_rate" => self.learning_rate = num(key, value)?,
            "laplace" => self.laplace = Some(num(key, value)?),
            "rtr_window" => self.rtr_window = Some(num(key, value)?),
            "offspring" => self.offspring = Some(num(key, value)?),
            "complexity_exponent" => self.complexity_exponent = num(key, value)?,
            "budget" => self.budget = num(key, value)?,
            "target" => self.stop.target = Some(num(key, value)?),
            "stop_on_feasible" => self.stop.on_feasible = num(key, value)?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    /// Every field as `(key, value)` pairs accepted by [`OptimizerConfig::set`].
    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        let mut out = vec![
            ("pop", self.population.to_string()),
            ("select", self.selection.to_string()),
        ];
        if let Some(n) = self.selected {
            out.push(("selected", n.to_string()));
        }
        out.push(("crossover", self.crossover.to_string()));
        out.push(("crossover_rate", self.crossover_rate.to_string()));
        if let Some(p) = self.mutation_rate {
            out.push(("mutation_rate", p.to_string()));
        }
        out.push(("learning_rate", self.learning_rate.to_string()));
        if let Some(l) = self.laplace {
            out.push(("laplace", l.to_string()));
        }
        if let Some(w) = self.rtr_window {
            out.push(("rtr_window", w.to_string()));
        }
        if let Some(n) = self.offspring {
            out.push(("offspring", n.to_string()));
        }
        out.push(("complexity_exponent", self.complexity_exponent.to_string()));
        out.push(("budget", self.budget.to_string()));
        if let Some(t) = self.stop.target {
            out.push(("target", t.to_string()));
        }
        out.push(("stop_on_feasible", self.stop.on_feasible.to_string()));
        out
    }

    /// Number of parents a selection step yields.
    pub fn selection_count(&self) -> usize {
        match self.selection {
            Selection::Tournament { .. } => self.selected.unwrap_or(self.population),
            Selection::Truncation(keep) => keep.resolve(self.population),
        }
    }

    pub fn mutation_rate_for(&self, len: usize) -> f64 {
        self.mutation_rate.unwrap_or(1.0 / len.max(1) as f64)
    }

    pub fn rtr_window_for(&self, len: usize) -> usize {
        self.rtr_window
            .unwrap_or_else(|| len.min(self.population / 20))
            .clamp(1, self.population)
    }

    pub fn offspring_count(&self) -> usize {
        self.offspring.unwrap_or((self.population / 2).max(1))
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.population < 2 {
            return fail(format!("population must be >= 2, got {}", self.population));
        }
        if let Selection::Tournament { pool } = self.selection {
            if pool == 0 {
                return fail("tournament pool must be >= 1".into());
            }
        }
        let k = self.selection_count();
        if matches!(self.selection, Selection::Truncation(_)) && (k < 1 || k > self.population) {
            return fail(format!(
                "truncation must keep between 1 and {} members, got {k}",
                self.population
            ));
        }
        if k == 0 {
            return fail("selection must yield at least one parent".into());
        }
        for (name, p) in [
            ("crossover_rate", self.crossover_rate),
            ("learning_rate", self.learning_rate),
            ("mutation_rate", self.mutation_rate.unwrap_or(0.0)),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return fail(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        if self.offspring == Some(0) {
            return fail("offspring must be >= 1".into());
        }
        // also rejects NaN
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(self.complexity_exponent >= 0.0) {
            return fail("complexity_exponent must be >= 0".into());
        }
        if self.budget < self.population as u64 {
            return fail(format!(
                "budget {} is smaller than the initial population {}",
                self.budget, self.population
            ));
        }
        Ok(())
    }
}
