use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisectionSettings {
    pub lo: usize,
    pub hi: usize,
    /// Required fraction of successful trials.
    pub target_rate: f64,
    pub trials: usize,
    /// Largest population tried before giving up.
    pub cap: usize,
    /// Trial `k` at every population size uses seed `base_seed + k`.
    pub base_seed: u64,
}

impl Default for BisectionSettings {
    fn default() -> Self {
        BisectionSettings {
            lo: 16,
            hi: 32,
            target_rate: 0.9,
            trials: 10,
            cap: 1_000_000,
            base_seed: 0,
        }
    }
}

/// Population sizing by bracketing then bisection.
///
/// If `lo` already succeeds it is returned. Otherwise `hi` doubles (moving
/// `lo` up behind it) until the success rate reaches `target_rate`, then
/// the bracket is halved until `hi / lo <= 1.25`, and `hi` is returned.
pub fn bisection_population<F>(mut success: F, settings: BisectionSettings) -> Result<usize>
where
    F: FnMut(usize, u64) -> Result<bool>,
{
    let BisectionSettings {
        mut lo,
        mut hi,
        target_rate,
        trials,
        cap,
        base_seed,
    } = settings;
    if lo == 0 || lo >= hi {
        return Err(Error::Config(format!("need 0 < lo < hi, got {lo}, {hi}")));
    }
    if trials == 0 {
        return Err(Error::Config("trials must be >= 1".into()));
    }
    let mut passes = |pop: usize| -> Result<bool> {
        let mut wins = 0;
        for k in 0..trials {
            if success(pop, base_seed + k as u64)? {
                wins += 1;
            }
        }
        Ok(wins as f64 / trials as f64 >= target_rate)
    };

    if passes(lo)? {
        return Ok(lo);
    }
    while !passes(hi)? {
        lo = hi;
        hi *= 2;
        if hi > cap {
            return Err(Error::Experiment(format!(
                "population sizing failed: no success up to the cap of {cap}"
            )));
        }
    }
    while hi as f64 / lo as f64 > 1.25 {
        let mid = lo + (hi - lo) / 2;
        if mid == lo {
            break;
        }
        if passes(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
