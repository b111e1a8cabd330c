use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Mean and sample standard deviation (divisor `n - 1`).
pub fn summarize(values: &[f64]) -> Result<(f64, f64)> {
    let n = values.len();
    if n < 2 {
        return Err(Error::Experiment(format!(
            "need at least 2 values for a sample deviation, got {n}"
        )));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    Ok((mean, (ss / (n - 1) as f64).sqrt()))
}

/// Summary statistics of one sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    /// `mean_a - mean_b`.
    pub diff: f64,
    pub std_error: f64,
    /// `diff / std_error`, signed by argument order.
    pub t: f64,
    /// Two-sided.
    pub p: f64,
    /// Welch-Satterthwaite degrees of freedom.
    pub df: f64,
    /// Zero standard error; `t` and `p` are conventions, not test results.
    pub degenerate: bool,
}

/// Welch's unequal-variance t-test on two samples' moments.
pub fn welch_t_test(a: Moments, b: Moments) -> Result<TTestResult> {
    if a.n < 2 || b.n < 2 {
        return Err(Error::Experiment(format!(
            "t-test needs n >= 2 per sample, got {} and {}",
            a.n, b.n
        )));
    }
    let (va, vb) = (a.std * a.std / a.n as f64, b.std * b.std / b.n as f64);
    let se = (va + vb).sqrt();
    let diff = a.mean - b.mean;
    if se == 0.0 {
        let same = diff == 0.0;
        return Ok(TTestResult {
            diff,
            std_error: 0.0,
            t: if same {
                0.0
            } else {
                diff.signum() * f64::INFINITY
            },
            p: if same { 1.0 } else { 0.0 },
            df: (a.n + b.n - 2) as f64,
            degenerate: true,
        });
    }
    let df = (va + vb).powi(2) / (va * va / (a.n - 1) as f64 + vb * vb / (b.n - 1) as f64);
    let t = diff / se;
    let dist = StudentsT::new(0.0, 1.0, df)
        .map_err(|e| Error::Numeric(format!("t distribution with df = {df}: {e}")))?;
    let p = (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0);
    Ok(TTestResult {
        diff,
        std_error: se,
        t,
        p,
        df,
        degenerate: false,
    })
}
