use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, InvariantViolations, Result};

/// Tumour size below which a trajectory counts as eradicated (cells).
pub const ERADICATION_THRESHOLD: f64 = 1e3;

/// Number of organs in the generated default toxicity matrix.
pub const DEFAULT_ORGANS: usize = 4;

// Built-in defaults. These are modelling choices, not clinical values. The
// drugs differ widely in potency and the weak ones carry most of the
// toxicity, so a feasible schedule drops the weak drugs and raises the potent
// ones. A random schedule exceeds the side-effect limit almost surely and
// the tumour limit about 70% of the time.
const DEFAULT_LAMBDA: f64 = 1.3e-3;
const DEFAULT_THETA: f64 = 1e12;
const DEFAULT_N0: f64 = 1e9;
const DEFAULT_N_MAX: f64 = 1.02e9;
const DEFAULT_KAPPA: f64 = 1e-4;
/// Per-drug multipliers of `DEFAULT_KAPPA`, cycled over the drugs.
const KAPPA_FACTORS: [f64; 5] = [0.05, 0.525, 1.0, 1.475, 1.95];
const DEFAULT_C_MAX: f64 = 15.0;
const DEFAULT_C_CUM_PER_DOSE: f64 = 10.0;
const DEFAULT_C_SEFF: f64 = 4.5;
const DEFAULT_PENALTY: f64 = 100.0;

/// All parameters of one chemotherapy scheduling problem.
///
/// Concentrations (`c_max`, `c_cum`, `c_seff`, dose levels) share one unit:
/// a dose level `l` of drug `j` is the concentration `l * delta_c[j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    /// Number of dose times.
    pub s: usize,
    /// Number of drugs.
    pub d: usize,
    pub bits_per_dose: usize,
    /// Gompertz growth rate, per unit time.
    pub lambda: f64,
    /// Asymptotic tumour size, cells.
    pub theta: f64,
    /// Initial tumour size, cells.
    pub n0: f64,
    /// Drug efficacy per concentration unit, one entry per drug.
    pub kappa: Vec<f64>,
    /// Organ risk factors: `eta[k][j]` is the risk to organ `k` from drug `j`.
    pub eta: Vec<Vec<f64>>,
    pub delta_c: Vec<f64>,
    /// Strictly increasing dose times `t_1..t_s`; `t_0 = 0` is implicit.
    pub dose_times: Vec<f64>,
    pub c_max: Vec<f64>,
    pub c_cum: Vec<f64>,
    pub n_max: f64,
    /// Side-effect limit per organ.
    pub c_seff: Vec<f64>,
    /// Penalty coefficients for the four constraint families, in order
    /// instantaneous dose, cumulative dose, tumour size, side effects.
    pub penalties: [f64; 4],
}

impl Default for ProblemInstance {
    fn default() -> Self {
        Self::default_for(10, 10)
    }
}

impl ProblemInstance {
    /// Built-in defaults sized for `s` dose times and `d` drugs.
    pub fn default_for(s: usize, d: usize) -> Self {
        // Risk falls linearly with potency; every organ sees the same weights.
        let top = KAPPA_FACTORS.iter().cloned().fold(0.0, f64::max);
        let raw: Vec<f64> = (0..d)
            .map(|j| 1.0 - 0.9 * KAPPA_FACTORS[j % 5] / top)
            .collect();
        let total: f64 = raw.iter().sum();
        let row: Vec<f64> = raw.into_iter().map(|w| w / total).collect();
        let eta = vec![row; DEFAULT_ORGANS];
        ProblemInstance {
            s,
            d,
            bits_per_dose: 4,
            lambda: DEFAULT_LAMBDA,
            theta: DEFAULT_THETA,
            n0: DEFAULT_N0,
            kappa: (0..d)
                .map(|j| DEFAULT_KAPPA * KAPPA_FACTORS[j % 5])
                .collect(),
            eta,
            delta_c: vec![1.0; d],
            dose_times: (1..=s).map(|i| i as f64).collect(),
            c_max: vec![DEFAULT_C_MAX; d],
            c_cum: vec![DEFAULT_C_CUM_PER_DOSE * s as f64; d],
            n_max: DEFAULT_N_MAX,
            c_seff: vec![DEFAULT_C_SEFF; DEFAULT_ORGANS],
            penalties: [DEFAULT_PENALTY; 4],
        }
    }

    /// Number of organs constrained by the side-effect limits.
    pub fn organs(&self) -> usize {
        self.c_seff.len()
    }

    pub fn chromosome_len(&self) -> usize {
        self.bits_per_dose * self.s * self.d
    }

    /// Largest dose level an allele can encode.
    pub fn max_level(&self) -> u64 {
        (1u64 << self.bits_per_dose) - 1
    }

    /// Checks every structural and numeric invariant, reporting all failures.
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        let mut check = |ok: bool, name: &str| {
            if !ok {
                bad.push(name.to_string());
            }
        };
        check(self.s >= 1, "s >= 1");
        check(self.d >= 1, "d >= 1");
        check(
            self.bits_per_dose >= 1 && self.bits_per_dose <= 32,
            "1 <= bits_per_dose <= 32",
        );
        check(self.lambda.is_finite() && self.lambda > 0.0, "lambda > 0");
        check(self.theta.is_finite() && self.theta > 0.0, "theta > 0");
        check(self.n0.is_finite() && self.n0 > 0.0, "n0 > 0");
        check(self.n0 < self.theta, "n0 < theta");
        check(self.n_max.is_finite() && self.n_max > self.n0, "n_max > n0");
        check(self.kappa.len() == self.d, "len(kappa) = d");
        check(
            self.kappa.iter().all(|k| k.is_finite() && *k > 0.0),
            "kappa > 0",
        );
        check(self.delta_c.len() == self.d, "len(delta_c) = d");
        check(
            self.delta_c.iter().all(|c| c.is_finite() && *c > 0.0),
            "delta_c > 0",
        );
        check(self.c_max.len() == self.d, "len(c_max) = d");
        check(
            self.c_max.iter().all(|c| c.is_finite() && *c > 0.0),
            "c_max > 0",
        );
        check(self.c_cum.len() == self.d, "len(c_cum) = d");
        check(
            self.c_cum.iter().all(|c| c.is_finite() && *c > 0.0),
            "c_cum > 0",
        );
        check(!self.c_seff.is_empty(), "m >= 1");
        check(
            self.c_seff.iter().all(|c| c.is_finite() && *c > 0.0),
            "c_seff > 0",
        );
        check(
            self.eta.len() == self.c_seff.len(),
            "rows(eta) = len(c_seff)",
        );
        check(
            self.eta.iter().all(|row| row.len() == self.d),
            "cols(eta) = d",
        );
        check(
            self.eta
                .iter()
                .flatten()
                .all(|e| e.is_finite() && *e >= 0.0),
            "eta >= 0",
        );
        check(self.dose_times.len() == self.s, "len(dose_times) = s");
        check(
            self.dose_times
                .first()
                .is_none_or(|t| t.is_finite() && *t > 0.0),
            "dose_times > 0",
        );
        check(
            self.dose_times
                .windows(2)
                .all(|w| w[1].is_finite() && w[1] > w[0]),
            "dose_times strictly increasing",
        );
        check(
            self.penalties.iter().all(|p| p.is_finite() && *p > 0.0),
            "penalties > 0",
        );
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Invariant(InvariantViolations(bad)))
        }
    }

    /// Short content hash of the canonical instance-file rendering.
    pub fn content_hash(&self) -> String {
        let digest = Sha256::digest(self.to_file_string().as_bytes());
        hex::encode(&digest[..8])
    }
}
