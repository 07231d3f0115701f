//! Weighted-vote truth discovery and a head-to-head harness against the MVF.
//!
//! Each round the estimate is the weighted plurality `argmax_k sum_m w_m
//! 1(Y_m = k)`, which minimizes the weighted 0/1 disagreement cost for fixed
//! weights. Weights then follow the log-reciprocal-error step
//! `w_m = max(0, ln((t + 1) / (e_m + s)))`, where `e_m` counts the rounds in
//! which voter `m` disagreed with the estimate and `s` is a smoothing
//! constant.

use crate::model::VoterPopulation;
use crate::simulator::{
    checked_group_sizes, chunks, mvf_decide, pick_among, sample_vote, trial_rng, with_threads, SimError,
    TiePolicy,
};
use crate::stats::RateEstimate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

pub const DEFAULT_SMOOTHING: f64 = 0.5;

/// Scores within this fraction of the best score count as tied.
const TIE_REL_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TdError {
    #[error("initial weight must be positive, got {0}")]
    NonPositiveConstant(f64),
    #[error("voter count must be at least 1")]
    ZeroVoters,
    #[error("expected {expected} votes, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("vote {vote} is not a class index below {classes}")]
    VoteOutOfRange { vote: usize, classes: usize },
    #[error("round count must be at least 1")]
    NoRounds,
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruthDiscoveryState {
    /// One-based index of the next round.
    pub round: u64,
    pub weights: Vec<f64>,
    pub disagreements: Vec<u64>,
    pub smoothing: f64,
}

/// Round 1 with every weight equal to `c`.
pub fn td_init(m: usize, c: f64) -> Result<TruthDiscoveryState, TdError> {
    if m == 0 {
        return Err(TdError::ZeroVoters);
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(TdError::NonPositiveConstant(c));
    }
    Ok(TruthDiscoveryState {
        round: 1,
        weights: vec![c; m],
        disagreements: vec![0; m],
        smoothing: DEFAULT_SMOOTHING,
    })
}

/// Classes whose weighted score is within the tie tolerance of the best.
pub fn weighted_argmax_set(weights: &[f64], votes: &[usize], classes: usize) -> Vec<usize> {
    let mut scores = vec![0.0f64; classes];
    for (&w, &v) in weights.iter().zip(votes) {
        scores[v] += w;
    }
    let top = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let floor = top - TIE_REL_TOL * top.abs();
    (0..classes).filter(|&k| scores[k] >= floor).collect()
}

/// Weight after `t` rounds with `e` disagreements.
pub fn td_weight(t: u64, e: u64, smoothing: f64) -> f64 {
    ((t as f64 + 1.0) / (e as f64 + smoothing)).ln().max(0.0)
}

/// One round: estimate from the current weights, then update them.
///
/// `true_class` is consulted only by the worst and best tie policies.
pub fn td_round<R: Rng + ?Sized>(
    state: &TruthDiscoveryState,
    votes: &[usize],
    classes: usize,
    policy: TiePolicy,
    true_class: Option<usize>,
    rng: &mut R,
) -> Result<(usize, TruthDiscoveryState), TdError> {
    if votes.len() != state.weights.len() {
        return Err(TdError::SizeMismatch {
            expected: state.weights.len(),
            got: votes.len(),
        });
    }
    if let Some(&vote) = votes.iter().find(|&&v| v >= classes) {
        return Err(TdError::VoteOutOfRange { vote, classes });
    }
    let tied = weighted_argmax_set(&state.weights, votes, classes);
    let estimate = pick_among(&tied, policy, true_class, rng)?;
    let t = state.round;
    let disagreements: Vec<u64> = state
        .disagreements
        .iter()
        .zip(votes)
        .map(|(&e, &v)| e + u64::from(v != estimate))
        .collect();
    let weights = disagreements
        .iter()
        .map(|&e| td_weight(t, e, state.smoothing))
        .collect();
    Ok((
        estimate,
        TruthDiscoveryState {
            round: t + 1,
            weights,
            disagreements,
            smoothing: state.smoothing,
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TdOptions {
    pub policy: TiePolicy,
    pub initial_weight: f64,
    pub threads: Option<usize>,
}

impl Default for TdOptions {
    fn default() -> Self {
        Self {
            policy: TiePolicy::Random,
            initial_weight: 1.0,
            threads: None,
        }
    }
}

/// Error rates of both aggregation rules at one round.
#[derive(Debug, Clone, PartialEq)]
pub struct TdRoundEstimate {
    pub round: u64,
    pub td: RateEstimate,
    pub mvf: RateEstimate,
    pub td_per_class: Vec<RateEstimate>,
    pub mvf_per_class: Vec<RateEstimate>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TdTrajectory {
    pub m: u64,
    pub trials: u64,
    pub seed: u64,
    pub rounds: Vec<TdRoundEstimate>,
}

pub fn run_td_experiment(
    pop: &VoterPopulation,
    m: u64,
    rounds: u64,
    trials: u64,
    seed: u64,
) -> Result<TdTrajectory, TdError> {
    run_td_experiment_with(pop, m, rounds, trials, seed, &TdOptions::default())
}

/// Per-trial, per-round counters: `[round][class] = (draws, td errors, mvf errors)`.
type Counts = Vec<Vec<(u64, u64, u64)>>;

/// Feed the same vote stream to truth discovery and to the MVF.
///
/// Each round draws a fresh hidden class and one vote per voter. Both rules
/// resolve ties from identical copies of a per-round generator, so they
/// agree whenever their tied sets agree.
pub fn run_td_experiment_with(
    pop: &VoterPopulation,
    m: u64,
    rounds: u64,
    trials: u64,
    seed: u64,
    opts: &TdOptions,
) -> Result<TdTrajectory, TdError> {
    if m == 0 {
        return Err(TdError::ZeroVoters);
    }
    if rounds == 0 {
        return Err(TdError::NoRounds);
    }
    if trials == 0 {
        return Err(SimError::NoTrials.into());
    }
    let k = pop.classes();
    let sizes = checked_group_sizes(pop, m, false)?;
    let voter_group: Vec<usize> = sizes
        .iter()
        .enumerate()
        .flat_map(|(t, &n)| std::iter::repeat(t).take(n as usize))
        .collect();
    let init = td_init(m as usize, opts.initial_weight)?;
    let groups = pop.groups();

    let run_chunk = |(start, end): (u64, u64)| -> Result<Counts, TdError> {
        let mut counts: Counts = vec![vec![(0, 0, 0); k]; rounds as usize];
        let mut votes = vec![0usize; m as usize];
        let mut totals = vec![0u32; k];
        for trial in start..end {
            let mut rng = trial_rng(seed, trial);
            let mut state = init.clone();
            for r in 0..rounds as usize {
                let truth = rng.random_range(0..k);
                totals.iter_mut().for_each(|c| *c = 0);
                for (v, &g) in votes.iter_mut().zip(&voter_group) {
                    *v = sample_vote(&mut rng, groups[g].matrix.row(truth));
                    totals[*v] += 1;
                }
                let tie_rng = ChaCha8Rng::seed_from_u64(rng.random());
                let mvf = mvf_decide(&totals, opts.policy, Some(truth), &mut tie_rng.clone())?;
                let (td, next) = td_round(&state, &votes, k, opts.policy, Some(truth), &mut tie_rng.clone())?;
                state = next;
                let c = &mut counts[r][truth];
                c.0 += 1;
                c.1 += u64::from(td != truth);
                c.2 += u64::from(mvf != truth);
            }
        }
        Ok(counts)
    };

    let per_chunk: Vec<Result<Counts, TdError>> = with_threads(opts.threads, || {
        chunks(trials).into_par_iter().map(run_chunk).collect()
    })?;
    let mut counts: Counts = vec![vec![(0, 0, 0); k]; rounds as usize];
    for chunk in per_chunk {
        for (acc_r, r) in counts.iter_mut().zip(chunk?) {
            for (acc, c) in acc_r.iter_mut().zip(r) {
                acc.0 += c.0;
                acc.1 += c.1;
                acc.2 += c.2;
            }
        }
    }
    let rounds = counts
        .iter()
        .enumerate()
        .map(|(r, per)| {
            let td_err: u64 = per.iter().map(|c| c.1).sum();
            let mvf_err: u64 = per.iter().map(|c| c.2).sum();
            TdRoundEstimate {
                round: r as u64 + 1,
                td: RateEstimate::new(td_err, trials),
                mvf: RateEstimate::new(mvf_err, trials),
                td_per_class: per.iter().map(|c| RateEstimate::new(c.1, c.0)).collect(),
                mvf_per_class: per.iter().map(|c| RateEstimate::new(c.2, c.0)).collect(),
            }
        })
        .collect();
    Ok(TdTrajectory {
        m,
        trials,
        seed,
        rounds,
    })
}
