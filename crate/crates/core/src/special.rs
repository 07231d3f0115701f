//! Small special-function helpers shared by the numeric modules.

use std::sync::OnceLock;

const TABLE_LEN: usize = 171;

fn factorial_table() -> &'static [f64; TABLE_LEN] {
    static TABLE: OnceLock<[f64; TABLE_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; TABLE_LEN];
        let mut f = 1.0f64;
        for (n, slot) in t.iter_mut().enumerate() {
            if n > 0 {
                f *= n as f64;
            }
            *slot = f.ln();
        }
        t
    })
}

/// `ln(n!)`. Exact products below 171, Stirling series above.
pub fn ln_factorial(n: u64) -> f64 {
    if (n as usize) < TABLE_LEN {
        return factorial_table()[n as usize];
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + series
}

/// Log of the Poisson mass `Pr(N = n)` for mean `mu`.
pub fn poisson_log_pmf(n: u64, mu: f64) -> f64 {
    if mu == 0.0 {
        return if n == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -mu + n as f64 * mu.ln() - ln_factorial(n)
}

/// Max-shifted accumulator for sums of values given by their logarithms.
#[derive(Debug, Clone, Copy)]
pub struct LogSumAcc {
    shift: f64,
    scaled: f64,
}

impl Default for LogSumAcc {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSumAcc {
    pub fn new() -> Self {
        Self {
            shift: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }

    pub fn add(&mut self, log_term: f64) {
        if log_term == f64::NEG_INFINITY {
            return;
        }
        if log_term > self.shift {
            self.scaled = self.scaled * (self.shift - log_term).exp() + 1.0;
            self.shift = log_term;
        } else {
            self.scaled += (log_term - self.shift).exp();
        }
    }

    /// Logarithm of the accumulated sum (`-inf` when empty).
    pub fn ln(&self) -> f64 {
        if self.scaled == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.shift + self.scaled.ln()
        }
    }
}

/// `ln(1 - e^x)` for `x <= 0`, accurate at both ends.
pub fn ln_one_minus_exp(x: f64) -> f64 {
    if x > -std::f64::consts::LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}
