//! Gompertz tumour growth with a piecewise-constant linear drug kill term.
//!
//! With `u = ln(theta / N)` the state equation becomes `u' = -lambda*u + D(t)`
//! where `D` is constant between consecutive dose times, so each interval has
//! a closed-form solution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::encoding::DoseSchedule;
use super::instance::{ProblemInstance, ERADICATION_THRESHOLD};

/// Tumour sizes sampled at the dose times `t_1..t_s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// `N(t_i)`, cells.
    pub sizes: Vec<f64>,
    /// `ln(theta / N(t_i))`.
    pub log_ratio: Vec<f64>,
    /// True when some sampled size falls below the eradication threshold.
    pub eradicated: bool,
}

impl Trajectory {
    pub fn max_size(&self) -> f64 {
        self.sizes.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Index of the first sample above `limit`, if any.
    pub fn first_exceeding(&self, limit: f64) -> Option<usize> {
        self.sizes.iter().position(|n| *n > limit)
    }
}

/// Drug kill rate `D_i = sum_j kappa_j C_ij` active on `[t_i, t_{i+1})`.
pub(crate) fn kill_rates(c: &DoseSchedule, inst: &ProblemInstance) -> Vec<f64> {
    c.rows()
        .map(|row| row.iter().zip(&inst.kappa).map(|(c, k)| k * c).sum())
        .collect()
}

fn interval_start(inst: &ProblemInstance, i: usize) -> f64 {
    if i == 0 {
        0.0
    } else {
        inst.dose_times[i - 1]
    }
}

/// Exact tumour sizes at every dose time.
pub fn tumour_trajectory(c: &DoseSchedule, inst: &ProblemInstance) -> Result<Trajectory> {
    c.check_shape(inst)?;
    let rates = kill_rates(c, inst);
    let mut u = (inst.theta / inst.n0).ln();
    let mut log_ratio = Vec::with_capacity(inst.s);
    // Interval 0 is [0, t_1) with no drug; interval i >= 1 carries dose i.
    for i in 0..inst.s {
        let dt = inst.dose_times[i] - interval_start(inst, i);
        let rate = if i == 0 { 0.0 } else { rates[i - 1] };
        let decay = (-inst.lambda * dt).exp();
        let gain = -(-inst.lambda * dt).exp_m1();
        u = u * decay + rate / inst.lambda * gain;
        log_ratio.push(u);
    }
    let sizes: Vec<f64> = log_ratio.iter().map(|u| inst.theta * (-u).exp()).collect();
    if let Some(bad) = log_ratio
        .iter()
        .zip(&sizes)
        .position(|(u, n)| !u.is_finite() || !n.is_finite())
    {
        return Err(Error::Numeric(format!(
            "non-finite tumour size at dose time {}",
            bad + 1
        )));
    }
    let eradicated = sizes.iter().any(|n| *n < ERADICATION_THRESHOLD);
    Ok(Trajectory {
        sizes,
        log_ratio,
        eradicated,
    })
}

/// Fixed-step RK4 integration of the state equation directly in `N`, for
/// cross-checking [`tumour_trajectory`]. Each dose interval is integrated in
/// `ceil(length / step)` equal substeps so that rate switches land on step
/// boundaries. Steps up to about `0.1 / lambda` are stable; `1e-3` time
/// units is plenty for the built-in instances.
pub fn ode_oracle(c: &DoseSchedule, inst: &ProblemInstance, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Config(format!(
            "integration step must be > 0, got {step}"
        )));
    }
    c.check_shape(inst)?;
    let rates = kill_rates(c, inst);
    let rhs = |n: f64, rate: f64| n * (inst.lambda * (inst.theta / n).ln() - rate);
    let mut n = inst.n0;
    let mut out = Vec::with_capacity(inst.s);
    for i in 0..inst.s {
        let length = inst.dose_times[i] - interval_start(inst, i);
        let rate = if i == 0 { 0.0 } else { rates[i - 1] };
        let substeps = (length / step).ceil().max(1.0) as usize;
        let h = length / substeps as f64;
        for _ in 0..substeps {
            let k1 = rhs(n, rate);
            let k2 = rhs(n + 0.5 * h * k1, rate);
            let k3 = rhs(n + 0.5 * h * k2, rate);
            let k4 = rhs(n + h * k3, rate);
            n += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        if !n.is_finite() || n <= 0.0 {
            return Err(Error::Numeric(format!(
                "integration diverged at dose time {}; reduce the step",
                i + 1
            )));
        }
        out.push(n);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn untreated_tumour_at_carrying_capacity_stays_put() {
        let mut inst = ProblemInstance::default();
        inst.n0 = inst.theta;
        let c = DoseSchedule::zeros(inst.s, inst.d);
        let traj = tumour_trajectory(&c, &inst).unwrap();
        assert!(traj.sizes.iter().all(|n| *n == inst.theta));
        let ode = ode_oracle(&c, &inst, 1e-2).unwrap();
        assert!(ode.iter().all(|n| *n == inst.theta));
    }

    #[test]
    fn untreated_tumour_grows_monotonically_below_theta() {
        let inst = ProblemInstance::default();
        let c = DoseSchedule::zeros(inst.s, inst.d);
        let traj = tumour_trajectory(&c, &inst).unwrap();
        assert!(traj.sizes[0] > inst.n0);
        assert!(traj.sizes.windows(2).all(|w| w[1] > w[0]));
        assert!(traj.sizes.iter().all(|n| *n < inst.theta));
    }

    #[test]
    fn first_interval_is_drug_free() {
        let inst = ProblemInstance::default();
        let zero = tumour_trajectory(&DoseSchedule::zeros(inst.s, inst.d), &inst).unwrap();
        let mut c = DoseSchedule::zeros(inst.s, inst.d);
        for j in 0..inst.d {
            c.set(0, j, 15.0);
        }
        let dosed = tumour_trajectory(&c, &inst).unwrap();
        assert_eq!(zero.sizes[0], dosed.sizes[0]);
        assert!(dosed.sizes[1] < zero.sizes[1]);
    }

    #[test]
    fn strong_dosing_flags_eradication() {
        let mut inst = ProblemInstance::default_for(3, 1);
        inst.kappa = vec![2.0];
        let c = DoseSchedule::from_rows(vec![vec![15.0], vec![15.0], vec![0.0]]).unwrap();
        let traj = tumour_trajectory(&c, &inst).unwrap();
        assert!(traj.eradicated);
    }

    #[test]
    fn overflow_is_reported_not_propagated() {
        let mut inst = ProblemInstance::default_for(2, 1);
        inst.kappa = vec![1e308];
        let c = DoseSchedule::from_rows(vec![vec![15.0], vec![15.0]]).unwrap();
        assert!(matches!(
            tumour_trajectory(&c, &inst),
            Err(Error::Numeric(_))
        ));
    }

    #[test]
    fn analytic_solution_matches_hand_computation() {
        // One drug, one interval of dosing: u(t2) = u(t1) e^{-lambda} + D/lambda (1 - e^{-lambda}).
        let mut inst = ProblemInstance::default_for(2, 1);
        inst.lambda = 0.2;
        inst.kappa = vec![0.1];
        let c = DoseSchedule::from_rows(vec![vec![3.0], vec![0.0]]).unwrap();
        let traj = tumour_trajectory(&c, &inst).unwrap();
        let u0 = (inst.theta / inst.n0).ln();
        let u1 = u0 * (-0.2f64).exp();
        let u2 = u1 * (-0.2f64).exp() + 0.3 / 0.2 * (1.0 - (-0.2f64).exp());
        assert!(rel_err(traj.log_ratio[0], u1) < 1e-14);
        assert!(rel_err(traj.log_ratio[1], u2) < 1e-14);
    }

    #[test]
    fn oracle_converges_with_step() {
        let mut inst = ProblemInstance::default_for(5, 2);
        inst.lambda = 0.5;
        inst.kappa = vec![0.3, 0.2];
        let c = DoseSchedule::from_rows(vec![
            vec![3.0, 1.0],
            vec![0.0, 7.0],
            vec![12.0, 2.0],
            vec![5.0, 5.0],
            vec![1.0, 0.0],
        ])
        .unwrap();
        let exact = tumour_trajectory(&c, &inst).unwrap().sizes;
        let err = |h: f64| {
            let approx = ode_oracle(&c, &inst, h).unwrap();
            approx
                .iter()
                .zip(&exact)
                .map(|(a, e)| rel_err(*a, *e))
                .fold(0.0, f64::max)
        };
        let steps = [0.5, 0.25, 0.125, 0.0625];
        let errors: Vec<f64> = steps.iter().map(|h| err(*h)).collect();
        for w in errors.windows(2) {
            assert!(w[1] <= w[0] / 2.0, "errors {errors:?}");
        }
        assert!(err(1e-3) < 1e-9);
    }

    #[test]
    fn oracle_rejects_bad_step() {
        let inst = ProblemInstance::default();
        let c = DoseSchedule::zeros(inst.s, inst.d);
        assert!(ode_oracle(&c, &inst, 0.0).is_err());
        assert!(ode_oracle(&c, &inst, f64::NAN).is_err());
    }
}
