//! Logarithm of the modified Bessel function of the first kind, `ln I_n(x)`,
//! for integer order `n >= 0` and real `x >= 0`.
//!
//! Below [`SERIES_LIMIT`] the ascending power series is summed relative to
//! its leading term, so nothing overflows and large orders stay cheap. At
//! and above it the Debye uniform expansion is used. Its `k`-th correction
//! scales like `(n^2 + x^2)^(-k/2)`, which keeps it accurate for every order
//! once `x` is large, including `n = 0`.

use crate::special::ln_factorial;
use std::sync::OnceLock;
use thiserror::Error;

/// Argument at which evaluation switches from the power series to the
/// uniform asymptotic expansion.
pub const SERIES_LIMIT: f64 = 50.0;

const DEBYE_TERMS: usize = 20;
const REL_EPS: f64 = 1e-17;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BesselError {
    #[error("Bessel argument must be a finite nonnegative number, got {0}")]
    NegativeArgument(f64),
}

/// `ln I_order(x)`. Returns `-inf` for `x = 0, order > 0`.
pub fn log_bessel_i(order: u64, x: f64) -> Result<f64, BesselError> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(BesselError::NegativeArgument(x));
    }
    Ok(log_bessel_i_unchecked(order, x))
}

pub(crate) fn log_bessel_i_unchecked(order: u64, x: f64) -> f64 {
    if x == 0.0 {
        return if order == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if x < SERIES_LIMIT {
        log_bessel_i_series(order, x)
    } else {
        log_bessel_i_debye(order, x)
    }
}

/// Power series `sum_m (x/2)^(2m+n) / (m! (m+n)!)`, summed relative to the
/// `m = 0` term.
pub fn log_bessel_i_series(order: u64, x: f64) -> f64 {
    let half = 0.5 * x;
    let quarter_sq = half * half;
    let n = order as f64;
    let lead = n * half.ln() - ln_factorial(order);

    let mut sum = 1.0f64;
    let mut term = 1.0f64;
    let mut m = 0.0f64;
    loop {
        let ratio = quarter_sq / ((m + 1.0) * (m + n + 1.0));
        term *= ratio;
        sum += term;
        m += 1.0;
        // ratios decrease in m, so the remainder is geometric once below 1
        if ratio < 1.0 && term * ratio / (1.0 - ratio) <= REL_EPS * sum {
            break;
        }
    }
    lead + sum.ln()
}

/// Coefficients of `P_k` in `u_k(p) = p^k P_k(p^2)`, where `u_k` are the
/// Debye polynomials of the uniform expansion.
fn debye_coefficients() -> &'static Vec<Vec<f64>> {
    static COEFFS: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        // u_{k+1}(p) = p^2 (1 - p^2) u_k'(p) / 2 + (1/8) int_0^p (1 - 5 t^2) u_k(t) dt
        let mut polys: Vec<Vec<f64>> = vec![vec![1.0]];
        for k in 0..DEBYE_TERMS {
            let u = &polys[k];
            let mut next = vec![0.0; u.len() + 3];
            for (j, &c) in u.iter().enumerate() {
                if c == 0.0 || j == 0 {
                    continue;
                }
                let d = c * j as f64 * 0.5;
                next[j + 1] += d;
                next[j + 3] -= d;
            }
            for (j, &c) in u.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                next[j + 1] += c / (8.0 * (j as f64 + 1.0));
                next[j + 3] -= 5.0 * c / (8.0 * (j as f64 + 3.0));
            }
            while next.last() == Some(&0.0) {
                next.pop();
            }
            polys.push(next);
        }
        polys
            .iter()
            .enumerate()
            .map(|(k, u)| u.iter().skip(k).step_by(2).copied().collect())
            .collect()
    })
}

/// Debye uniform asymptotic expansion written in terms of
/// `rho = sqrt(n^2 + x^2)` so that `n = 0` needs no special case.
pub fn log_bessel_i_debye(order: u64, x: f64) -> f64 {
    let n = order as f64;
    let rho = n.hypot(x);
    let p = n / rho;
    let p2 = p * p;
    let inv_rho = 1.0 / rho;

    let mut sum = 1.0f64;
    let mut scale = 1.0f64;
    let mut small_run = 0;
    for coeffs in debye_coefficients().iter().skip(1) {
        scale *= inv_rho;
        let poly = coeffs.iter().rev().fold(0.0, |acc, &c| acc * p2 + c);
        let term = poly * scale;
        sum += term;
        // a single tiny term can be a root of P_k; require two in a row
        if term.abs() <= REL_EPS * sum.abs() {
            small_run += 1;
            if small_run == 2 {
                break;
            }
        } else {
            small_run = 0;
        }
    }
    let exponent = if order == 0 {
        rho
    } else {
        rho + n * (x / (n + rho)).ln()
    };
    exponent - 0.5 * (2.0 * std::f64::consts::PI).ln() - 0.5 * rho.ln() + sum.ln()
}
