//! Binomial proportion estimates with Wilson score intervals.

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959963984540054;

/// Wilson score interval at 95% for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let mut lo = (center - half).max(0.0);
    let mut hi = (center + half).min(1.0);
    // the interval always contains p; rounding can push an endpoint past it
    if successes == 0 {
        lo = 0.0;
    }
    if successes == trials {
        hi = 1.0;
    }
    (lo.min(p), hi.max(p))
}

/// Error count over trials, with the point estimate and its interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    pub trials: u64,
    pub errors: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl RateEstimate {
    pub fn new(errors: u64, trials: u64) -> Self {
        assert!(errors <= trials, "more errors than trials");
        let p_hat = if trials == 0 {
            0.0
        } else {
            errors as f64 / trials as f64
        };
        let (ci_low, ci_high) = wilson_interval(errors, trials);
        Self {
            trials,
            errors,
            p_hat,
            ci_low,
            ci_high,
        }
    }
}
