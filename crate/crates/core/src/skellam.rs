//! Skellam law: the difference `D = N1 - N2` of independent Poisson counts
//! with means `mu1` and `mu2`.
//!
//! Everything is computed in log space. Tail sums start at the requested
//! threshold and walk away from the mode. The pmf is log-concave, so once
//! the ratio `r` of successive terms drops below one the rest of the walk is
//! bounded by the geometric series `t * r / (1 - r)`.

use crate::bessel::log_bessel_i_unchecked;
use crate::special::{ln_factorial, ln_one_minus_exp, LogSumAcc};
use thiserror::Error;

/// Stop a tail walk once the certified remainder falls below this fraction
/// of the accumulated mass.
const TAIL_REL_EPS: f64 = 1e-17;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SkellamError {
    #[error("Skellam means must be finite and nonnegative (got mu1={mu1}, mu2={mu2})")]
    InvalidMean { mu1: f64, mu2: f64 },
}

/// Means of the two Poisson counts whose difference is Skellam distributed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkellamParams {
    mu1: f64,
    mu2: f64,
}

impl SkellamParams {
    pub fn new(mu1: f64, mu2: f64) -> Result<Self, SkellamError> {
        if !(mu1.is_finite() && mu2.is_finite() && mu1 >= 0.0 && mu2 >= 0.0) {
            return Err(SkellamError::InvalidMean { mu1, mu2 });
        }
        Ok(Self { mu1, mu2 })
    }

    pub fn mu1(&self) -> f64 {
        self.mu1
    }

    pub fn mu2(&self) -> f64 {
        self.mu2
    }

    /// The same law seen from the other count: `N2 - N1`.
    pub fn swapped(&self) -> Self {
        Self {
            mu1: self.mu2,
            mu2: self.mu1,
        }
    }

    fn mode_hint(&self) -> i64 {
        (self.mu1 - self.mu2).round() as i64
    }
}

/// `ln Pr(N1 - N2 = alpha)`; `-inf` for impossible outcomes.
pub fn skellam_log_pmf(alpha: i64, params: SkellamParams) -> f64 {
    let SkellamParams { mu1, mu2 } = params;
    match (mu1 == 0.0, mu2 == 0.0) {
        (true, true) => {
            if alpha == 0 {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        }
        (true, false) => {
            if alpha > 0 {
                f64::NEG_INFINITY
            } else {
                let n = alpha.unsigned_abs();
                -mu2 + n as f64 * mu2.ln() - ln_factorial(n)
            }
        }
        (false, true) => {
            if alpha < 0 {
                f64::NEG_INFINITY
            } else {
                let n = alpha as u64;
                -mu1 + n as f64 * mu1.ln() - ln_factorial(n)
            }
        }
        (false, false) => {
            let x = 2.0 * (mu1 * mu2).sqrt();
            let skew = if alpha == 0 {
                0.0
            } else {
                0.5 * alpha as f64 * (mu1.ln() - mu2.ln())
            };
            -(mu1 + mu2) + skew + log_bessel_i_unchecked(alpha.unsigned_abs(), x)
        }
    }
}

/// `Pr(N1 - N2 >= alpha0)`.
pub fn skellam_tail_ge(alpha0: i64, params: SkellamParams) -> f64 {
    skellam_split(alpha0, params).upper()
}

/// Both sides of the split at `alpha0`: `Pr(D >= alpha0)` and `Pr(D < alpha0)`.
///
/// Whichever side lies away from the mode is summed directly and keeps full
/// relative accuracy, however small it is. The other side is its complement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkellamSplit {
    ln_upper: f64,
    ln_lower: f64,
}

impl SkellamSplit {
    pub fn upper(&self) -> f64 {
        self.ln_upper.exp()
    }

    pub fn lower(&self) -> f64 {
        self.ln_lower.exp()
    }

    /// `ln Pr(D >= alpha0)`.
    pub fn ln_upper(&self) -> f64 {
        self.ln_upper
    }

    /// `ln Pr(D < alpha0)`.
    pub fn ln_lower(&self) -> f64 {
        self.ln_lower
    }
}

pub fn skellam_split(alpha0: i64, params: SkellamParams) -> SkellamSplit {
    if params.mu1 == 0.0 && params.mu2 == 0.0 {
        return if alpha0 <= 0 {
            SkellamSplit {
                ln_upper: 0.0,
                ln_lower: f64::NEG_INFINITY,
            }
        } else {
            SkellamSplit {
                ln_upper: f64::NEG_INFINITY,
                ln_lower: 0.0,
            }
        };
    }
    if alpha0 > params.mode_hint() {
        let ln_upper = walk_outward(alpha0, 1, params).min(0.0);
        SkellamSplit {
            ln_upper,
            ln_lower: ln_one_minus_exp(ln_upper),
        }
    } else {
        let ln_lower = walk_outward(alpha0 - 1, -1, params).min(0.0);
        SkellamSplit {
            ln_upper: ln_one_minus_exp(ln_lower),
            ln_lower,
        }
    }
}

/// Log of the pmf mass from `start` onward in direction `step` (+1 or -1).
fn walk_outward(start: i64, step: i64, params: SkellamParams) -> f64 {
    let mut acc = LogSumAcc::new();
    let mut prev = skellam_log_pmf(start, params);
    if prev == f64::NEG_INFINITY {
        // the support is an interval around the mode; we are past its edge
        return f64::NEG_INFINITY;
    }
    acc.add(prev);
    let ln_eps = TAIL_REL_EPS.ln();
    let mut alpha = start;
    loop {
        alpha += step;
        let cur = skellam_log_pmf(alpha, params);
        if cur == f64::NEG_INFINITY || cur.is_nan() {
            break;
        }
        acc.add(cur);
        let ln_ratio = cur - prev;
        if ln_ratio < 0.0 {
            // remainder <= cur * r / (1 - r)
            let ln_remainder = cur + ln_ratio - (-ln_ratio.exp_m1()).ln();
            if ln_remainder <= acc.ln() + ln_eps {
                break;
            }
        }
        prev = cur;
    }
    acc.ln()
}
