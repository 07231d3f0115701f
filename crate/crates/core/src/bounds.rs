//! Upper bounds on the MVF error rate and their decay slopes.
//!
//! * [`iid_upper_bound`]: Poissonized Skellam-sum bound for i.i.d. voters.
//! * [`pairwise_chernoff_bound`] / [`iid_chernoff_union_bound`]: Chernoff
//!   bound on one pairwise vote comparison and its union over classes.
//! * [`iid_slope`]: exponent of the dominant pair, `-(sqrt p_kk - sqrt p_lk)^2`.
//! * [`noniid_upper_bound`]: Skellam-sum bound for grouped voters, with the
//!   per-group thresholds `alpha0`.
//! * [`epsilon_star`] / [`noniid_slope_bound`]: the `2KT exp(-M eps*)` bound.
//!
//! All bounds keep the raw value (which may exceed one for small `M`) next
//! to the value clamped to `[0, 1]`.

use crate::model::{delta_with_weights, TransitionMatrix, VoterPopulation};
use crate::skellam::{skellam_split, SkellamParams};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("voter count must be at least 1")]
    NoVoters,
    #[error("probabilities must lie in [0, 1] (got {0}, {1})")]
    ProbabilityOutOfRange(f64, f64),
    #[error("pairwise bound needs p_a > p_b, got p_a = {p_a}, p_b = {p_b}")]
    PreconditionViolated { p_a: f64, p_b: f64 },
    #[error("diagonal dominance violated at (k, l) = {0:?}")]
    DominanceViolated(Vec<(usize, usize)>),
    #[error("δ-margin not positive at (k, l) = {0:?}")]
    DeltaNotPositive(Vec<(usize, usize)>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundMethod {
    Thm1,
    Thm2Pair,
    ChernoffUnion,
    Thm3Slope,
    Thm4,
    Thm6Slope,
}

impl BoundMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            BoundMethod::Thm1 => "thm1",
            BoundMethod::Thm2Pair => "thm2-pair",
            BoundMethod::ChernoffUnion => "chernoff-union",
            BoundMethod::Thm3Slope => "thm3-slope",
            BoundMethod::Thm4 => "thm4",
            BoundMethod::Thm6Slope => "thm6-slope",
        }
    }
}

impl fmt::Display for BoundMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Threshold of one `(k, l, t)` Skellam tail in the grouped bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alpha0Entry {
    pub k: usize,
    pub l: usize,
    pub group: usize,
    /// `r_t M (q_{l|k} - q_{k|k} + δ_{l|k})`.
    pub alpha0: f64,
    /// First summed integer, `ceil(alpha0)`.
    pub start: i64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoundMeta {
    pub k_star: Option<usize>,
    pub l_star: Option<usize>,
    pub slope: Option<f64>,
    pub epsilon_star: Option<f64>,
    /// `(k, l, t)` attaining `epsilon_star`.
    pub argmin: Option<(usize, usize, usize)>,
    pub alpha0_table: Vec<Alpha0Entry>,
    /// Pairs `(k, l)` that contributed only the trivial value.
    pub dominance_violations: Vec<(usize, usize)>,
    /// Realized group sizes the bound was evaluated on.
    pub group_sizes: Vec<u64>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub method: BoundMethod,
    pub m: u64,
    pub raw: f64,
    pub clamped: f64,
    /// Conditional terms, one per true class; `raw` is their mean.
    pub per_class: Vec<f64>,
    pub meta: BoundMeta,
}

impl BoundReport {
    fn from_per_class(method: BoundMethod, m: u64, per_class: Vec<f64>, meta: BoundMeta) -> Self {
        let raw = per_class.iter().sum::<f64>() / per_class.len() as f64;
        Self {
            method,
            m,
            raw,
            clamped: raw.min(1.0),
            per_class,
            meta,
        }
    }
}

/// `2 (1 - prod(1 - s))` from the logs `ln(1 - s)` of the factors.
fn twice_union_complement(ln_keep: f64) -> f64 {
    2.0 * -ln_keep.exp_m1()
}

/// Poissonized Skellam bound for `m` i.i.d. voters.
pub fn iid_upper_bound(p: &TransitionMatrix, m: u64) -> Result<BoundReport, BoundsError> {
    if m == 0 {
        return Err(BoundsError::NoVoters);
    }
    let k_count = p.classes();
    let mf = m as f64;
    let per_class = (0..k_count)
        .map(|k| {
            let ln_keep: f64 = (0..k_count)
                .filter(|&l| l != k)
                .map(|l| {
                    let params = SkellamParams::new(mf * p.get(k, l), mf * p.get(k, k))
                        .expect("matrix entries are finite and nonnegative");
                    // ln Pr(V_l < V_k) under the Poisson counts
                    skellam_split(0, params).ln_lower()
                })
                .sum();
            twice_union_complement(ln_keep)
        })
        .collect();
    Ok(BoundReport::from_per_class(
        BoundMethod::Thm1,
        m,
        per_class,
        BoundMeta::default(),
    ))
}

/// `2 exp(-m (sqrt p_a - sqrt p_b)^2)`, a bound on `Pr(V_a <= V_b)` when a
/// vote lands on `a` with probability `p_a > p_b`.
pub fn pairwise_chernoff_bound(p_a: f64, p_b: f64, m: u64) -> Result<f64, BoundsError> {
    if !(0.0..=1.0).contains(&p_a) || !(0.0..=1.0).contains(&p_b) {
        return Err(BoundsError::ProbabilityOutOfRange(p_a, p_b));
    }
    if !(p_a > p_b) {
        return Err(BoundsError::PreconditionViolated { p_a, p_b });
    }
    let gap = p_a.sqrt() - p_b.sqrt();
    Ok(2.0 * (-(m as f64) * gap * gap).exp())
}

/// Union of pairwise Chernoff bounds over the wrong classes of each row.
/// Non-dominated pairs contribute the trivial value 2 and are listed in
/// `meta.dominance_violations`.
pub fn iid_chernoff_union_bound(p: &TransitionMatrix, m: u64) -> Result<BoundReport, BoundsError> {
    if m == 0 {
        return Err(BoundsError::NoVoters);
    }
    let k_count = p.classes();
    let mut meta = BoundMeta::default();
    let mut per_class = Vec::with_capacity(k_count);
    for k in 0..k_count {
        let mut total = 0.0;
        for l in (0..k_count).filter(|&l| l != k) {
            match pairwise_chernoff_bound(p.get(k, k), p.get(k, l), m) {
                Ok(v) => total += v,
                Err(_) => {
                    total += 2.0;
                    meta.dominance_violations.push((k, l));
                }
            }
        }
        per_class.push(total);
    }
    Ok(BoundReport::from_per_class(
        BoundMethod::ChernoffUnion,
        m,
        per_class,
        meta,
    ))
}

/// Dominant pair of an i.i.d. voter and the asymptotic exponent it sets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IidSlope {
    pub k_star: usize,
    pub l_star: usize,
    /// `-(sqrt p_{k*|k*} - sqrt p_{l*|k*})^2`; an upper bound on `ln(P_e)/M`
    /// up to a correction that vanishes as `M` grows.
    pub slope: f64,
}

pub fn iid_slope(p: &TransitionMatrix) -> Result<IidSlope, BoundsError> {
    let violations = p.dominance_violations();
    if !violations.is_empty() {
        return Err(BoundsError::DominanceViolated(violations));
    }
    let k_count = p.classes();
    let mut best: Option<(usize, usize, f64)> = None;
    for k in 0..k_count {
        for l in (0..k_count).filter(|&l| l != k) {
            let gap = p.get(k, k).sqrt() - p.get(k, l).sqrt();
            if best.is_none_or(|(_, _, g)| gap < g) {
                best = Some((k, l, gap));
            }
        }
    }
    let (k_star, l_star, gap) = best.expect("K >= 2");
    Ok(IidSlope {
        k_star,
        l_star,
        slope: -gap * gap,
    })
}

/// The slope as a report, for sweeps that mix it with other methods.
pub fn iid_slope_report(p: &TransitionMatrix) -> Result<BoundReport, BoundsError> {
    let s = iid_slope(p)?;
    Ok(BoundReport {
        method: BoundMethod::Thm3Slope,
        m: 0,
        raw: s.slope,
        clamped: s.slope,
        per_class: Vec::new(),
        meta: BoundMeta {
            k_star: Some(s.k_star),
            l_star: Some(s.l_star),
            slope: Some(s.slope),
            note: Some("asymptotic; the O(ln(M^-3/4)/M) correction is not included".into()),
            ..BoundMeta::default()
        },
    })
}

/// Integer ceiling that treats values within rounding noise of an integer as
/// that integer.
fn ceil_tolerant(x: f64) -> i64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r as i64
    } else {
        x.ceil() as i64
    }
}

/// Skellam-sum bound for grouped voters.
///
/// The bound is evaluated on the realized partition of `m` voters
/// ([`VoterPopulation::group_sizes`]): `r_t = n_t / m`, and empty groups are
/// dropped. For proportions with integral `r_t m` this is the population
/// itself.
pub fn noniid_upper_bound(pop: &VoterPopulation, m: u64) -> Result<BoundReport, BoundsError> {
    if m == 0 {
        return Err(BoundsError::NoVoters);
    }
    let k_count = pop.classes();
    let sizes = pop.group_sizes(m);
    let active: Vec<(usize, f64, &TransitionMatrix)> = pop
        .groups()
        .iter()
        .zip(&sizes)
        .enumerate()
        .filter(|(_, (_, &n))| n > 0)
        .map(|(t, (g, &n))| (t, n as f64, &g.matrix))
        .collect();
    let mf = m as f64;

    let mut meta = BoundMeta {
        group_sizes: sizes.clone(),
        ..BoundMeta::default()
    };
    let mut per_class = Vec::with_capacity(k_count);
    for k in 0..k_count {
        let mut ln_keep = 0.0;
        for l in (0..k_count).filter(|&l| l != k) {
            let delta = delta_with_weights(active.iter().map(|&(_, n, q)| (n / mf, q)), l, k);
            for &(t, n, q) in &active {
                let alpha0 = (n / mf) * mf * (q.get(k, l) - q.get(k, k) + delta);
                let start = ceil_tolerant(alpha0);
                meta.alpha0_table.push(Alpha0Entry {
                    k,
                    l,
                    group: t,
                    alpha0,
                    start,
                });
                let params = SkellamParams::new(n * q.get(k, l), n * q.get(k, k))
                    .expect("matrix entries are finite and nonnegative");
                ln_keep += skellam_split(start, params).ln_lower();
            }
        }
        per_class.push(twice_union_complement(ln_keep));
    }
    Ok(BoundReport::from_per_class(
        BoundMethod::Thm4,
        m,
        per_class,
        meta,
    ))
}

/// `eps* = min_{k != l, t} r_t δ_{l|k}^2 / (8 (q^{(t)}_{l|k} + δ_{l|k} / 6))`
/// and the lexicographically first `(k, l, t)` attaining it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonStar {
    pub value: f64,
    pub k: usize,
    pub l: usize,
    pub group: usize,
}

pub fn epsilon_star(pop: &VoterPopulation) -> Result<EpsilonStar, BoundsError> {
    let deltas = pop.delta_table();
    let k_count = pop.classes();
    let bad: Vec<(usize, usize)> = (0..k_count)
        .flat_map(|k| (0..k_count).map(move |l| (k, l)))
        .filter(|&(k, l)| l != k && !(deltas[k][l] > 0.0))
        .collect();
    if !bad.is_empty() {
        return Err(BoundsError::DeltaNotPositive(bad));
    }
    let mut best: Option<EpsilonStar> = None;
    for k in 0..k_count {
        for l in (0..k_count).filter(|&l| l != k) {
            let d = deltas[k][l];
            for (t, g) in pop.groups().iter().enumerate() {
                let value = g.proportion * d * d / (8.0 * (g.matrix.get(k, l) + d / 6.0));
                if best.is_none_or(|b| value < b.value) {
                    best = Some(EpsilonStar {
                        value,
                        k,
                        l,
                        group: t,
                    });
                }
            }
        }
    }
    Ok(best.expect("K >= 2"))
}

/// `2 K T exp(-m eps*)`, with `meta.slope = -eps*`.
pub fn noniid_slope_bound(pop: &VoterPopulation, m: u64) -> Result<BoundReport, BoundsError> {
    let eps = epsilon_star(pop)?;
    let k_count = pop.classes();
    let scale = 2.0 * k_count as f64 * pop.group_count() as f64;
    let value = scale * (-(m as f64) * eps.value).exp();
    Ok(BoundReport::from_per_class(
        BoundMethod::Thm6Slope,
        m,
        vec![value; k_count],
        BoundMeta {
            slope: Some(-eps.value),
            epsilon_star: Some(eps.value),
            argmin: Some((eps.k, eps.l, eps.group)),
            ..BoundMeta::default()
        },
    ))
}
