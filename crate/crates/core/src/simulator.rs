//! Ground truth for the MVF error rate: seeded Monte Carlo over the full
//! voting pipeline, and exact enumeration over the multinomial vote law for
//! small instances.
//!
//! Trial `i` draws from ChaCha8 seeded with `seed` on stream `i`, so results
//! do not depend on how trials are spread over threads.

use crate::model::VoterPopulation;
use crate::special::ln_factorial;
use crate::stats::RateEstimate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Largest number of per-group count compositions exact enumeration visits.
pub const MAX_STATE_SPACE: f64 = 1e7;

const CHUNK: u64 = 2048;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("tie policy `{0}` needs the true class")]
    MissingTrueClass(TiePolicy),
    #[error("group {group} has proportion {proportion} but gets no voters at M = {m}")]
    ApportionmentImpossible { group: usize, proportion: f64, m: u64 },
    #[error("state space of {size:.3e} compositions exceeds the limit of {limit:.0e}")]
    StateSpaceTooLarge { size: f64, limit: f64 },
    #[error("voter count must be at least 1")]
    NoVoters,
    #[error("trial count must be at least 1")]
    NoTrials,
    #[error("cannot build thread pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TiePolicy {
    /// Uniform over the tied classes.
    Random,
    /// A wrong class whenever one is tied for first.
    Worst,
    /// The true class whenever it is tied for first.
    Best,
}

impl TiePolicy {
    pub fn tag(&self) -> &'static str {
        match self {
            TiePolicy::Random => "random",
            TiePolicy::Worst => "worst",
            TiePolicy::Best => "best",
        }
    }
}

impl fmt::Display for TiePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for TiePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(TiePolicy::Random),
            "worst" => Ok(TiePolicy::Worst),
            "best" => Ok(TiePolicy::Best),
            other => Err(format!("unknown tie policy `{other}` (random, worst, best)")),
        }
    }
}

/// Vote counts per group and in total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TallyVector {
    per_group: Vec<Vec<u32>>,
    totals: Vec<u32>,
}

impl TallyVector {
    pub fn from_groups(per_group: Vec<Vec<u32>>) -> Self {
        let k = per_group.first().map_or(0, Vec::len);
        let mut totals = vec![0u32; k];
        for g in &per_group {
            for (t, &c) in totals.iter_mut().zip(g) {
                *t += c;
            }
        }
        Self { per_group, totals }
    }

    pub fn per_group(&self) -> &[Vec<u32>] {
        &self.per_group
    }

    pub fn totals(&self) -> &[u32] {
        &self.totals
    }

    pub fn voters(&self) -> u64 {
        self.totals.iter().map(|&c| c as u64).sum()
    }
}

fn argmax_set(totals: &[u32]) -> (u32, usize) {
    let top = totals.iter().copied().max().unwrap_or(0);
    (top, totals.iter().filter(|&&c| c == top).count())
}

/// Plurality decision on the tallies `totals`.
///
/// `rng` is consumed only when several classes tie under
/// [`TiePolicy::Random`].
pub fn mvf_decide<R: Rng + ?Sized>(
    totals: &[u32],
    policy: TiePolicy,
    true_class: Option<usize>,
    rng: &mut R,
) -> Result<usize, SimError> {
    let (top, count) = argmax_set(totals);
    if count == 1 {
        return Ok(totals.iter().position(|&c| c == top).expect("nonempty"));
    }
    let tied: Vec<usize> = (0..totals.len()).filter(|&i| totals[i] == top).collect();
    pick_among(&tied, policy, true_class, rng)
}

/// Resolve a tie among the classes in `tied` (ascending, nonempty).
pub(crate) fn pick_among<R: Rng + ?Sized>(
    tied: &[usize],
    policy: TiePolicy,
    true_class: Option<usize>,
    rng: &mut R,
) -> Result<usize, SimError> {
    if tied.len() == 1 {
        return Ok(tied[0]);
    }
    match policy {
        TiePolicy::Random => Ok(tied[rng.random_range(0..tied.len())]),
        TiePolicy::Worst => {
            let truth = true_class.ok_or(SimError::MissingTrueClass(policy))?;
            Ok(tied.iter().copied().find(|&i| i != truth).unwrap_or(truth))
        }
        TiePolicy::Best => {
            let truth = true_class.ok_or(SimError::MissingTrueClass(policy))?;
            Ok(if tied.contains(&truth) { truth } else { tied[0] })
        }
    }
}

/// Monte Carlo estimate of the error rate at one voter count.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationEstimate {
    pub m: u64,
    pub trials: u64,
    pub errors: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Conditional on each true class; `trials` counts that class's draws.
    pub per_class: Vec<RateEstimate>,
    pub tie_policy: TiePolicy,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    pub trials: u64,
    pub policy: TiePolicy,
    pub seed: u64,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Reject voter counts at which a group with positive proportion is empty.
    pub strict_groups: bool,
}

impl SimOptions {
    pub fn new(trials: u64, policy: TiePolicy, seed: u64) -> Self {
        Self {
            trials,
            policy,
            seed,
            threads: None,
            strict_groups: false,
        }
    }
}

/// The generator for trial `trial` under `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Add a multinomial draw of `n` votes from `row` to `out`. The row is
/// normalized by its own sum.
pub fn add_multinomial<R: Rng + ?Sized>(rng: &mut R, row: &[f64], n: u64, out: &mut [u32]) {
    let mut left = n;
    let mut mass: f64 = row.iter().sum();
    let last = row.iter().rposition(|&p| p > 0.0).unwrap_or(row.len() - 1);
    for (l, &p) in row.iter().enumerate() {
        if left == 0 {
            break;
        }
        if l == last {
            out[l] += left as u32;
            break;
        }
        let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
        let c = if q >= 1.0 {
            left
        } else if q <= 0.0 {
            0
        } else {
            Binomial::new(left, q).expect("q in (0, 1)").sample(rng)
        };
        out[l] += c as u32;
        left -= c;
        mass -= p;
    }
}

/// One voter's class drawn from `row` (normalized by its sum).
pub fn sample_vote<R: Rng + ?Sized>(rng: &mut R, row: &[f64]) -> usize {
    let total: f64 = row.iter().sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (l, &p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return l;
        }
    }
    row.iter().rposition(|&p| p > 0.0).unwrap_or(row.len() - 1)
}

/// Group sizes for `m` voters, checking empty groups per `strict`.
pub fn checked_group_sizes(pop: &VoterPopulation, m: u64, strict: bool) -> Result<Vec<u64>, SimError> {
    if m == 0 {
        return Err(SimError::NoVoters);
    }
    let sizes = pop.group_sizes(m);
    for (t, (&n, g)) in sizes.iter().zip(pop.groups()).enumerate() {
        if n == 0 && g.proportion > 0.0 {
            if strict {
                return Err(SimError::ApportionmentImpossible {
                    group: t,
                    proportion: g.proportion,
                    m,
                });
            }
            log::warn!("group {t} (proportion {}) gets no voters at M = {m}", g.proportion);
        }
    }
    Ok(sizes)
}

/// Run `f` on a pool with `threads` workers, or on the global pool.
pub(crate) fn with_threads<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, SimError> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| SimError::ThreadPool(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Chunk boundaries covering `0..trials`.
pub(crate) fn chunks(trials: u64) -> Vec<(u64, u64)> {
    (0..trials.div_ceil(CHUNK))
        .map(|c| (c * CHUNK, ((c + 1) * CHUNK).min(trials)))
        .collect()
}

pub fn simulate_error_rate(
    pop: &VoterPopulation,
    m: u64,
    trials: u64,
    policy: TiePolicy,
    seed: u64,
) -> Result<SimulationEstimate, SimError> {
    simulate_error_rate_with(pop, m, &SimOptions::new(trials, policy, seed))
}

pub fn simulate_error_rate_with(
    pop: &VoterPopulation,
    m: u64,
    opts: &SimOptions,
) -> Result<SimulationEstimate, SimError> {
    if opts.trials == 0 {
        return Err(SimError::NoTrials);
    }
    let sizes = checked_group_sizes(pop, m, opts.strict_groups)?;
    let k = pop.classes();
    let groups = pop.groups();

    let run_chunk = |(start, end): (u64, u64)| -> Vec<(u64, u64)> {
        // (draws, errors) per class
        let mut counts = vec![(0u64, 0u64); k];
        let mut totals = vec![0u32; k];
        for trial in start..end {
            let mut rng = trial_rng(opts.seed, trial);
            let truth = rng.random_range(0..k);
            totals.iter_mut().for_each(|c| *c = 0);
            for (g, &n) in groups.iter().zip(&sizes) {
                if n > 0 {
                    add_multinomial(&mut rng, g.matrix.row(truth), n, &mut totals);
                }
            }
            let decided = mvf_decide(&totals, opts.policy, Some(truth), &mut rng)
                .expect("true class supplied");
            counts[truth].0 += 1;
            if decided != truth {
                counts[truth].1 += 1;
            }
        }
        counts
    };

    let per_chunk: Vec<Vec<(u64, u64)>> = with_threads(opts.threads, || {
        chunks(opts.trials).into_par_iter().map(run_chunk).collect()
    })?;
    let mut counts = vec![(0u64, 0u64); k];
    for chunk in per_chunk {
        for (acc, (d, e)) in counts.iter_mut().zip(chunk) {
            acc.0 += d;
            acc.1 += e;
        }
    }
    let errors: u64 = counts.iter().map(|c| c.1).sum();
    let overall = RateEstimate::new(errors, opts.trials);
    Ok(SimulationEstimate {
        m,
        trials: opts.trials,
        errors,
        p_hat: overall.p_hat,
        ci_low: overall.ci_low,
        ci_high: overall.ci_high,
        per_class: counts.iter().map(|&(d, e)| RateEstimate::new(e, d)).collect(),
        tie_policy: opts.policy,
        seed: opts.seed,
    })
}

fn binomial_f64(n: u64, r: u64) -> f64 {
    (ln_factorial(n) - ln_factorial(r) - ln_factorial(n - r)).exp().round()
}

/// `prod_t C(n_t + K - 1, K - 1)`, the number of per-group compositions.
pub fn state_space_size(pop: &VoterPopulation, m: u64) -> f64 {
    let k = pop.classes() as u64;
    pop.group_sizes(m)
        .iter()
        .map(|&n| binomial_f64(n + k - 1, k - 1))
        .product()
}

/// Every composition of `n` into `k` ordered nonnegative parts.
fn compositions(n: u32, k: usize) -> Vec<Vec<u32>> {
    fn rec(left: u32, slot: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slot + 1 == cur.len() {
            cur[slot] = left;
            out.push(cur.clone());
            return;
        }
        for c in (0..=left).rev() {
            cur[slot] = c;
            rec(left - c, slot + 1, cur, out);
        }
    }
    let mut out = Vec::new();
    rec(n, 0, &mut vec![0; k], &mut out);
    out
}

fn multinomial_prob(counts: &[u32], row: &[f64], row_sum: f64) -> f64 {
    let n: u64 = counts.iter().map(|&c| c as u64).sum();
    let mut ln_p = ln_factorial(n);
    for (&c, &p) in counts.iter().zip(row) {
        if c == 0 {
            continue;
        }
        if p <= 0.0 {
            return 0.0;
        }
        ln_p += c as f64 * (p / row_sum).ln() - ln_factorial(c as u64);
    }
    ln_p.exp()
}

fn check_state_space(pop: &VoterPopulation, m: u64) -> Result<(), SimError> {
    if m == 0 {
        return Err(SimError::NoVoters);
    }
    let size = state_space_size(pop, m);
    if size > MAX_STATE_SPACE {
        return Err(SimError::StateSpaceTooLarge {
            size,
            limit: MAX_STATE_SPACE,
        });
    }
    Ok(())
}

/// Exact law of the total tallies given true class `truth`, as
/// `(totals, probability)` pairs in a fixed order.
pub fn exact_tally_distribution(
    pop: &VoterPopulation,
    m: u64,
    truth: usize,
) -> Result<Vec<(Vec<u32>, f64)>, SimError> {
    check_state_space(pop, m)?;
    let k = pop.classes();
    let mut dist: Vec<(Vec<u32>, f64)> = vec![(vec![0; k], 1.0)];
    for (g, n) in pop.groups().iter().zip(pop.group_sizes(m)) {
        if n == 0 {
            continue;
        }
        let row = g.matrix.row(truth);
        let row_sum: f64 = row.iter().sum();
        let local: Vec<(Vec<u32>, f64)> = compositions(n as u32, k)
            .into_iter()
            .map(|c| {
                let p = multinomial_prob(&c, row, row_sum);
                (c, p)
            })
            .filter(|(_, p)| *p > 0.0)
            .collect();
        let mut next: HashMap<Vec<u32>, f64> = HashMap::new();
        let mut order: Vec<Vec<u32>> = Vec::new();
        for (base, pb) in &dist {
            for (c, pc) in &local {
                let sum: Vec<u32> = base.iter().zip(c).map(|(a, b)| a + b).collect();
                match next.get_mut(&sum) {
                    Some(v) => *v += pb * pc,
                    None => {
                        order.push(sum.clone());
                        next.insert(sum, pb * pc);
                    }
                }
            }
        }
        dist = order
            .into_iter()
            .map(|t| {
                let p = next[&t];
                (t, p)
            })
            .collect();
    }
    Ok(dist)
}

/// Probability that the decision on `totals` is wrong, with random ties
/// counted fractionally.
pub fn error_mass(totals: &[u32], truth: usize, policy: TiePolicy) -> f64 {
    let (top, count) = argmax_set(totals);
    let truth_tied = totals[truth] == top;
    match (truth_tied, count, policy) {
        (false, _, _) => 1.0,
        (true, 1, _) => 0.0,
        (true, _, TiePolicy::Random) => (count - 1) as f64 / count as f64,
        (true, _, TiePolicy::Worst) => 1.0,
        (true, _, TiePolicy::Best) => 0.0,
    }
}

/// Exact `P(wrong | X = x_k)` for every class `k`.
pub fn exact_conditional_error_rates(
    pop: &VoterPopulation,
    m: u64,
    policy: TiePolicy,
) -> Result<Vec<f64>, SimError> {
    (0..pop.classes())
        .map(|truth| {
            let dist = exact_tally_distribution(pop, m, truth)?;
            Ok(dist
                .iter()
                .map(|(t, p)| p * error_mass(t, truth, policy))
                .sum::<f64>()
                .min(1.0))
        })
        .collect()
}

/// Exact error rate under a uniform prior on the true class.
pub fn exact_error_rate(pop: &VoterPopulation, m: u64, policy: TiePolicy) -> Result<f64, SimError> {
    let per_class = exact_conditional_error_rates(pop, m, policy)?;
    Ok(per_class.iter().sum::<f64>() / per_class.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TransitionMatrix;

    fn sym2(p: f64) -> VoterPopulation {
        VoterPopulation::iid(TransitionMatrix::new(&[vec![p, 1.0 - p], vec![1.0 - p, p]]).unwrap())
    }

    #[test]
    fn unique_maximum_wins() {
        let mut rng = trial_rng(0, 0);
        for policy in [TiePolicy::Random, TiePolicy::Worst, TiePolicy::Best] {
            assert_eq!(mvf_decide(&[5, 2, 3], policy, Some(0), &mut rng).unwrap(), 0);
        }
    }

    #[test]
    fn tie_policies() {
        let mut rng = trial_rng(0, 0);
        assert_eq!(mvf_decide(&[3, 3, 0], TiePolicy::Worst, Some(0), &mut rng).unwrap(), 1);
        assert_eq!(mvf_decide(&[3, 3, 0], TiePolicy::Best, Some(1), &mut rng).unwrap(), 1);
        assert_eq!(mvf_decide(&[3, 3, 0], TiePolicy::Best, Some(2), &mut rng).unwrap(), 0);
        assert_eq!(
            mvf_decide(&[3, 3, 0], TiePolicy::Worst, None, &mut rng),
            Err(SimError::MissingTrueClass(TiePolicy::Worst))
        );
    }

    #[test]
    fn random_ties_are_fair() {
        let mut rng = trial_rng(11, 0);
        let n = 100_000;
        let first = (0..n)
            .filter(|_| mvf_decide(&[3, 3, 0], TiePolicy::Random, None, &mut rng).unwrap() == 0)
            .count();
        assert!((first as f64 / n as f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn exact_small_cases() {
        let pop = sym2(0.8);
        let e = exact_error_rate(&pop, 3, TiePolicy::Random).unwrap();
        assert!((e - 0.104).abs() < 1e-12);
        let e = exact_error_rate(&pop, 2, TiePolicy::Random).unwrap();
        assert!((e - 0.20).abs() < 1e-12);
        let id = VoterPopulation::iid(TransitionMatrix::identity(3).unwrap());
        assert_eq!(exact_error_rate(&id, 4, TiePolicy::Worst).unwrap(), 0.0);
    }

    #[test]
    fn tally_distribution_sums_to_one() {
        let pop = VoterPopulation::new(vec![
            (0.5, TransitionMatrix::dawid_skene(3, 0.4).unwrap()),
            (0.5, TransitionMatrix::dawid_skene(3, 0.1).unwrap()),
        ])
        .unwrap();
        let d = exact_tally_distribution(&pop, 6, 1).unwrap();
        let total: f64 = d.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(d.len(), 28);
    }

    #[test]
    fn state_space_guard() {
        let pop = VoterPopulation::iid(TransitionMatrix::dawid_skene(10, 0.3).unwrap());
        assert!(matches!(
            exact_error_rate(&pop, 60, TiePolicy::Random),
            Err(SimError::StateSpaceTooLarge { .. })
        ));
        assert_eq!(state_space_size(&pop, 2), 55.0);
    }

    #[test]
    fn identity_never_errs() {
        let pop = VoterPopulation::iid(TransitionMatrix::identity(4).unwrap());
        let est = simulate_error_rate(&pop, 7, 10_000, TiePolicy::Random, 3).unwrap();
        assert_eq!(est.errors, 0);
        assert_eq!(est.p_hat, 0.0);
    }

    #[test]
    fn simulation_matches_binomial_formula() {
        let est = simulate_error_rate(&sym2(0.8), 3, 200_000, TiePolicy::Random, 5).unwrap();
        let sd = (0.104f64 * 0.896 / 200_000.0).sqrt();
        assert!((est.p_hat - 0.104).abs() < 4.0 * sd, "{}", est.p_hat);
        assert!(est.ci_low <= est.p_hat && est.p_hat <= est.ci_high);
        let draws: u64 = est.per_class.iter().map(|r| r.trials).sum();
        assert_eq!(draws, 200_000);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let pop = VoterPopulation::iid(TransitionMatrix::dawid_skene(4, 0.3).unwrap());
        let mut opts = SimOptions::new(9_000, TiePolicy::Random, 42);
        opts.threads = Some(1);
        let a = simulate_error_rate_with(&pop, 9, &opts).unwrap();
        opts.threads = Some(3);
        let b = simulate_error_rate_with(&pop, 9, &opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn strict_groups_reject_empty_group() {
        let pop = VoterPopulation::new(vec![
            (0.9, TransitionMatrix::identity(2).unwrap()),
            (0.1, TransitionMatrix::identity(2).unwrap()),
        ])
        .unwrap();
        let mut opts = SimOptions::new(10, TiePolicy::Random, 0);
        assert!(simulate_error_rate_with(&pop, 3, &opts).is_ok());
        opts.strict_groups = true;
        assert!(matches!(
            simulate_error_rate_with(&pop, 3, &opts),
            Err(SimError::ApportionmentImpossible { group: 1, .. })
        ));
    }

    #[test]
    fn multinomial_respects_zero_entries() {
        let mut rng = trial_rng(1, 1);
        let mut out = vec![0u32; 3];
        add_multinomial(&mut rng, &[0.5, 0.0, 0.5], 50, &mut out);
        assert_eq!(out[1], 0);
        assert_eq!(out.iter().sum::<u32>(), 50);
    }
}
