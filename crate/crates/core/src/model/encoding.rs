use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

use super::instance::ProblemInstance;

/// A fixed-length bit string.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chromosome(Vec<bool>);

impl Chromosome {
    pub fn new(bits: Vec<bool>) -> Self {
        Chromosome(bits)
    }

    pub fn zeros(len: usize) -> Self {
        Chromosome(vec![false; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn bits_mut(&mut self) -> &mut [bool] {
        &mut self.0
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.0
    }

    pub fn ones(&self) -> usize {
        self.0.iter().filter(|b| **b).count()
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = !self.0[i];
    }

    /// Copy with bit `i` flipped.
    pub fn flipped(&self, i: usize) -> Self {
        let mut c = self.clone();
        c.flip(i);
        c
    }

    pub fn hamming(&self, other: &Chromosome) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

impl From<Vec<bool>> for Chromosome {
    fn from(bits: Vec<bool>) -> Self {
        Chromosome(bits)
    }
}

impl fmt::Display for Chromosome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Chromosome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Encoding(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Chromosome)
    }
}

impl Serialize for Chromosome {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Chromosome {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Dose concentrations `C_ij`, stored row-major with one row per dose time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoseSchedule {
    s: usize,
    d: usize,
    c: Vec<f64>,
}

impl DoseSchedule {
    pub fn zeros(s: usize, d: usize) -> Self {
        DoseSchedule {
            s,
            d,
            c: vec![0.0; s * d],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let s = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::Encoding("ragged dose schedule rows".into()));
        }
        Ok(DoseSchedule {
            s,
            d,
            c: rows.into_iter().flatten().collect(),
        })
    }

    /// Schedule with `C_ij = levels[i][j] * delta_c[j]`.
    pub fn from_levels(levels: &[Vec<u64>], inst: &ProblemInstance) -> Result<Self> {
        let rows = levels
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&inst.delta_c)
                    .map(|(l, dc)| *l as f64 * dc)
                    .collect()
            })
            .collect();
        Self::from_rows(rows)
    }

    pub fn doses(&self) -> usize {
        self.s
    }

    pub fn drugs(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.c[i * self.d + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.c[i * self.d + j] = value;
    }

    /// Concentrations at dose time `i`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.c[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.c.chunks(self.d.max(1)).take(self.s)
    }

    /// Total concentration of drug `j` over the schedule.
    pub fn cumulative(&self, j: usize) -> f64 {
        (0..self.s).map(|i| self.get(i, j)).sum()
    }

    pub(crate) fn check_shape(&self, inst: &ProblemInstance) -> Result<()> {
        if self.s != inst.s || self.d != inst.d {
            return Err(Error::Encoding(format!(
                "schedule is {}x{}, instance expects {}x{}",
                self.s, self.d, inst.s, inst.d
            )));
        }
        Ok(())
    }
}

fn check_len(x: &Chromosome, inst: &ProblemInstance) -> Result<()> {
    let expected = inst.chromosome_len();
    if x.len() != expected {
        return Err(Error::Dimension {
            expected,
            actual: x.len(),
        });
    }
    Ok(())
}

/// Maps a chromosome to its dose schedule. Allele `(i, j)` occupies bits
/// `p*(d*i + j) .. p*(d*i + j + 1)`, most significant bit first.
pub fn decode(x: &Chromosome, inst: &ProblemInstance) -> Result<DoseSchedule> {
    check_len(x, inst)?;
    let p = inst.bits_per_dose;
    let mut schedule = DoseSchedule::zeros(inst.s, inst.d);
    for (allele, chunk) in x.bits().chunks(p).enumerate() {
        let level = chunk.iter().fold(0u64, |acc, b| (acc << 1) | u64::from(*b));
        let j = allele % inst.d;
        schedule.c[allele] = inst.delta_c[j] * level as f64;
    }
    Ok(schedule)
}

/// Inverse of [`decode`] for schedules whose entries are exact multiples of
/// the drug's concentration unit within the encodable range.
pub fn encode(c: &DoseSchedule, inst: &ProblemInstance) -> Result<Chromosome> {
    c.check_shape(inst)?;
    let p = inst.bits_per_dose;
    let max = inst.max_level();
    let mut bits = Vec::with_capacity(inst.chromosome_len());
    for i in 0..inst.s {
        for j in 0..inst.d {
            let value = c.get(i, j);
            let ratio = value / inst.delta_c[j];
            let level = ratio.round();
            if !ratio.is_finite()
                || (ratio - level).abs() > 1e-9 * ratio.abs().max(1.0)
                || level < 0.0
                || level > max as f64
            {
                return Err(Error::Encoding(format!(
                    "C[{i}][{j}] = {value} is not a multiple of {} in 0..={max} units",
                    inst.delta_c[j]
                )));
            }
            let level = level as u64;
            bits.extend((0..p).rev().map(|k| (level >> k) & 1 == 1));
        }
    }
    Ok(Chromosome(bits))
}
