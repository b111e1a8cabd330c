use serde::{Deserialize, Serialize};

use crate::error::Result;

use super::dynamics::{kill_rates, tumour_trajectory, Trajectory};
use super::encoding::{decode, Chromosome, DoseSchedule};
use super::instance::ProblemInstance;

/// Penalised fitness and its parts for one schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessReport {
    pub efficacy: f64,
    /// Violation measures for instantaneous dose, cumulative dose, tumour
    /// size and side effects, in that order.
    pub distances: [f64; 4],
    pub penalty: f64,
    pub fitness: f64,
    pub feasible: bool,
}

/// `(max(0, value - limit) / limit)^2`
fn violation(value: f64, limit: f64) -> f64 {
    let excess = (value - limit).max(0.0) / limit;
    excess * excess
}

/// Squared, limit-normalised constraint violations summed per family.
pub fn constraint_distances(
    c: &DoseSchedule,
    traj: &Trajectory,
    inst: &ProblemInstance,
) -> [f64; 4] {
    let mut d = [0.0; 4];
    for row in c.rows() {
        for (dose, limit) in row.iter().zip(&inst.c_max) {
            d[0] += violation(*dose, *limit);
        }
        for (eta_k, limit) in inst.eta.iter().zip(&inst.c_seff) {
            let load: f64 = eta_k.iter().zip(row).map(|(e, c)| e * c).sum();
            d[3] += violation(load, *limit);
        }
    }
    for (j, limit) in inst.c_cum.iter().enumerate() {
        d[1] += violation(c.cumulative(j), *limit);
    }
    for n in &traj.sizes {
        d[2] += violation(*n, inst.n_max);
    }
    d
}

/// Treatment efficacy: `sum_p sum_j kappa_j sum_{i<=p} C_ij exp(lambda (t_{i-1} - t_p))`
/// with `t_0 = 0`.
pub fn efficacy(c: &DoseSchedule, inst: &ProblemInstance) -> f64 {
    let rates = kill_rates(c, inst);
    let mut total = 0.0;
    for p in 0..inst.s {
        let tp = inst.dose_times[p];
        for (i, rate) in rates.iter().enumerate().take(p + 1) {
            let t_prev = if i == 0 { 0.0 } else { inst.dose_times[i - 1] };
            total += rate * (inst.lambda * (t_prev - tp)).exp();
        }
    }
    total
}

/// Evaluates an already decoded schedule.
pub fn schedule_fitness(c: &DoseSchedule, inst: &ProblemInstance) -> Result<FitnessReport> {
    let traj = tumour_trajectory(c, inst)?;
    let distances = constraint_distances(c, &traj, inst);
    let efficacy = efficacy(c, inst);
    let penalty: f64 = inst
        .penalties
        .iter()
        .zip(&distances)
        .map(|(p, d)| p * d)
        .sum();
    Ok(FitnessReport {
        efficacy,
        distances,
        penalty,
        fitness: efficacy - penalty,
        feasible: distances.iter().all(|d| *d == 0.0),
    })
}

pub fn fitness(x: &Chromosome, inst: &ProblemInstance) -> Result<FitnessReport> {
    schedule_fitness(&decode(x, inst)?, inst)
}
