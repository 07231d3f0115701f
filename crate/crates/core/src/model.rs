//! Voter transition matrices, voter populations and δ-margins.
//!
//! A [`TransitionMatrix`] is stored row-stochastic with the row indexed by
//! the true class: `get(k, l) = Pr(vote = l | truth = k)`, i.e. the
//! conditional `p_{l|k}`. This is the confusion-matrix layout; the
//! transposed (column-stochastic) layout is not accepted.

use thiserror::Error;

/// Row-sum tolerance used when no explicit tolerance is requested.
pub const DEFAULT_ROW_TOLERANCE: f64 = 1e-9;
/// Row-sum tolerance accepted when renormalizing rounded published matrices.
pub const RENORMALIZE_TOLERANCE: f64 = 0.02;
/// Tolerance on the sum of group proportions.
pub const PROPORTION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("a transition matrix needs at least 2 classes, got {0}")]
    TooFewClasses(usize),
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NonSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("entry ({row}, {col}) is negative or not finite: {value}")]
    NegativeEntry { row: usize, col: usize, value: f64 },
    #[error("row {row} sums to {sum} (allowed deviation from 1 is {tolerance})")]
    RowSumOutOfTolerance {
        row: usize,
        sum: f64,
        tolerance: f64,
    },
    #[error("gamma must lie in [0, 1], got {0}")]
    GammaOutOfRange(f64),
    #[error("population has no groups")]
    Empty,
    #[error("group proportions must be positive, group {group} has {value}")]
    NonPositiveProportion { group: usize, value: f64 },
    #[error("group proportions sum to {sum}, expected 1")]
    ProportionSumInvalid { sum: f64 },
    #[error("group {group} has {found} classes, expected {expected}")]
    MixedClassCounts {
        group: usize,
        found: usize,
        expected: usize,
    },
    #[error("class index {index} out of range for K = {classes}")]
    ClassOutOfRange { index: usize, classes: usize },
}

/// Validation settings for [`TransitionMatrix::from_rows`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixOptions {
    /// Divide every row by its own sum after validation.
    pub renormalize: bool,
    /// Allowed `|row sum - 1|` when not renormalizing.
    pub tolerance: f64,
}

impl Default for MatrixOptions {
    fn default() -> Self {
        Self {
            renormalize: false,
            tolerance: DEFAULT_ROW_TOLERANCE,
        }
    }
}

impl MatrixOptions {
    pub fn renormalizing() -> Self {
        Self {
            renormalize: true,
            tolerance: RENORMALIZE_TOLERANCE,
        }
    }
}

/// `K x K` conditional vote distribution of one voter type.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    classes: usize,
    entries: Vec<f64>,
}

impl TransitionMatrix {
    /// Strict construction: rows must sum to 1 within [`DEFAULT_ROW_TOLERANCE`].
    pub fn new(rows: &[Vec<f64>]) -> Result<Self, ModelError> {
        Self::from_rows(rows, &MatrixOptions::default())
    }

    pub fn from_rows(rows: &[Vec<f64>], opts: &MatrixOptions) -> Result<Self, ModelError> {
        let classes = rows.len();
        if classes < 2 {
            return Err(ModelError::TooFewClasses(classes));
        }
        let mut entries = Vec::with_capacity(classes * classes);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != classes {
                return Err(ModelError::NonSquare {
                    row: r,
                    len: row.len(),
                    expected: classes,
                });
            }
            for (c, &v) in row.iter().enumerate() {
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(ModelError::NegativeEntry {
                        row: r,
                        col: c,
                        value: v,
                    });
                }
            }
            entries.extend_from_slice(row);
        }

        let tolerance = if opts.renormalize {
            opts.tolerance.max(RENORMALIZE_TOLERANCE)
        } else {
            opts.tolerance
        };
        let worst = rows
            .iter()
            .enumerate()
            .map(|(r, row)| (r, row.iter().sum::<f64>()))
            .max_by(|a, b| (a.1 - 1.0).abs().total_cmp(&(b.1 - 1.0).abs()))
            .expect("at least two rows");
        // a little slack so sums printed at the tolerance edge are accepted
        if !((worst.1 - 1.0).abs() <= tolerance + 1e-12) {
            return Err(ModelError::RowSumOutOfTolerance {
                row: worst.0,
                sum: worst.1,
                tolerance,
            });
        }

        if opts.renormalize {
            for row in entries.chunks_mut(classes) {
                let sum: f64 = row.iter().sum();
                if sum != 1.0 {
                    row.iter_mut().for_each(|v| *v /= sum);
                }
            }
        }
        Ok(Self { classes, entries })
    }

    /// Homogeneous Dawid-Skene voter: correct with probability
    /// `gamma + (1 - gamma) / K`, every wrong class `(1 - gamma) / K`.
    pub fn dawid_skene(classes: usize, gamma: f64) -> Result<Self, ModelError> {
        if classes < 2 {
            return Err(ModelError::TooFewClasses(classes));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(ModelError::GammaOutOfRange(gamma));
        }
        let off = (1.0 - gamma) / classes as f64;
        let diag = gamma + off;
        let mut entries = vec![off; classes * classes];
        for k in 0..classes {
            entries[k * classes + k] = diag;
        }
        Ok(Self { classes, entries })
    }

    pub fn identity(classes: usize) -> Result<Self, ModelError> {
        Self::dawid_skene(classes, 1.0)
    }

    /// Number of classes `K`.
    pub fn classes(&self) -> usize {
        self.classes
    }

    /// `Pr(vote = voted | truth = truth)`.
    #[inline]
    pub fn get(&self, truth: usize, voted: usize) -> f64 {
        self.entries[truth * self.classes + voted]
    }

    /// Distribution of a vote given the true class.
    pub fn row(&self, truth: usize) -> &[f64] {
        &self.entries[truth * self.classes..(truth + 1) * self.classes]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.classes)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(|r| r.to_vec()).collect()
    }

    /// Ordered pairs `(k, l)`, `l != k`, where `p_{k|k} <= p_{l|k}`.
    pub fn dominance_violations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for k in 0..self.classes {
            for l in 0..self.classes {
                if l != k && self.get(k, k) <= self.get(k, l) {
                    out.push((k, l));
                }
            }
        }
        out
    }
}

/// One voter type inside a population.
#[derive(Debug, Clone, PartialEq)]
pub struct VoterGroup {
    pub proportion: f64,
    pub matrix: TransitionMatrix,
}

/// Independent voters partitioned into `T` groups of identical voters.
#[derive(Debug, Clone, PartialEq)]
pub struct VoterPopulation {
    groups: Vec<VoterGroup>,
    classes: usize,
}

impl VoterPopulation {
    pub fn new(specs: Vec<(f64, TransitionMatrix)>) -> Result<Self, ModelError> {
        let Some(first) = specs.first() else {
            return Err(ModelError::Empty);
        };
        let classes = first.1.classes();
        for (g, (r, m)) in specs.iter().enumerate() {
            if !(*r > 0.0) || !r.is_finite() {
                return Err(ModelError::NonPositiveProportion { group: g, value: *r });
            }
            if m.classes() != classes {
                return Err(ModelError::MixedClassCounts {
                    group: g,
                    found: m.classes(),
                    expected: classes,
                });
            }
        }
        let sum: f64 = specs.iter().map(|(r, _)| r).sum();
        if !((sum - 1.0).abs() <= PROPORTION_TOLERANCE) {
            return Err(ModelError::ProportionSumInvalid { sum });
        }
        let groups = specs
            .into_iter()
            .map(|(proportion, matrix)| VoterGroup { proportion, matrix })
            .collect();
        Ok(Self { groups, classes })
    }

    /// Single-group population: the i.i.d. case.
    pub fn iid(matrix: TransitionMatrix) -> Self {
        let classes = matrix.classes();
        Self {
            groups: vec![VoterGroup {
                proportion: 1.0,
                matrix,
            }],
            classes,
        }
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn groups(&self) -> &[VoterGroup] {
        &self.groups
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    pub fn is_iid(&self) -> bool {
        self.groups.len() == 1
    }

    pub fn proportions(&self) -> Vec<f64> {
        self.groups.iter().map(|g| g.proportion).collect()
    }

    /// Integer group sizes for `m` voters by largest remainder on `r_t * m`.
    /// Remainder ties go to the lower group index. Sizes always sum to `m`.
    pub fn group_sizes(&self, m: u64) -> Vec<u64> {
        let quotas: Vec<f64> = self.groups.iter().map(|g| g.proportion * m as f64).collect();
        let mut sizes: Vec<u64> = quotas.iter().map(|q| q.floor() as u64).collect();
        let assigned: u64 = sizes.iter().sum();
        let mut left = m.saturating_sub(assigned);
        let mut order: Vec<usize> = (0..quotas.len()).collect();
        order.sort_by(|&a, &b| {
            let ra = quotas[a] - quotas[a].floor();
            let rb = quotas[b] - quotas[b].floor();
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        for &g in order.iter().cycle() {
            if left == 0 {
                break;
            }
            sizes[g] += 1;
            left -= 1;
        }
        sizes
    }

    fn check_class(&self, index: usize) -> Result<(), ModelError> {
        if index >= self.classes {
            Err(ModelError::ClassOutOfRange {
                index,
                classes: self.classes,
            })
        } else {
            Ok(())
        }
    }

    /// `δ_{l|k} = Σ_t r_t (q_{k|k} - q_{l|k})`; zero when `l == k`.
    pub fn delta_margin(&self, l: usize, k: usize) -> Result<f64, ModelError> {
        self.check_class(l)?;
        self.check_class(k)?;
        Ok(delta_with_weights(
            self.groups.iter().map(|g| (g.proportion, &g.matrix)),
            l,
            k,
        ))
    }

    /// `table[k][l] = δ_{l|k}`.
    pub fn delta_table(&self) -> Vec<Vec<f64>> {
        let k_count = self.classes;
        (0..k_count)
            .map(|k| {
                (0..k_count)
                    .map(|l| {
                        delta_with_weights(
                            self.groups.iter().map(|g| (g.proportion, &g.matrix)),
                            l,
                            k,
                        )
                    })
                    .collect()
            })
            .collect()
    }

    /// Population-averaged transition matrix `Σ_t r_t q^{(t)}`, as raw rows.
    pub fn mean_rows(&self) -> Vec<Vec<f64>> {
        let k_count = self.classes;
        let mut out = vec![vec![0.0; k_count]; k_count];
        for g in &self.groups {
            for (k, row) in out.iter_mut().enumerate() {
                for (l, v) in row.iter_mut().enumerate() {
                    *v += g.proportion * g.matrix.get(k, l);
                }
            }
        }
        out
    }

    pub fn reliability_report(&self) -> ReliabilityReport {
        ReliabilityReport::from_delta_table(self.delta_table())
    }
}

pub(crate) fn delta_with_weights<'a>(
    groups: impl Iterator<Item = (f64, &'a TransitionMatrix)>,
    l: usize,
    k: usize,
) -> f64 {
    if l == k {
        return 0.0;
    }
    groups
        .map(|(r, q)| r * (q.get(k, k) - q.get(k, l)))
        .sum()
}

/// Asymptotic verdict on which classes the MVF eventually recovers.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityReport {
    /// `delta_table[k][l] = δ_{l|k}`, diagonal zero.
    pub delta_table: Vec<Vec<f64>>,
    /// Classes with `δ_{l|k} > 0` for every `l != k`.
    pub reliable: Vec<usize>,
    /// Classes whose smallest margin is exactly zero.
    pub marginal: Vec<usize>,
    /// Classes with some strictly negative margin.
    pub unreliable: Vec<usize>,
    /// Limiting error rate `1 - |reliable| / K`.
    pub limit: f64,
}

impl ReliabilityReport {
    fn from_delta_table(delta_table: Vec<Vec<f64>>) -> Self {
        let k_count = delta_table.len();
        let mut reliable = Vec::new();
        let mut marginal = Vec::new();
        let mut unreliable = Vec::new();
        for (k, row) in delta_table.iter().enumerate() {
            let min = row
                .iter()
                .enumerate()
                .filter(|(l, _)| *l != k)
                .map(|(_, &d)| d)
                .fold(f64::INFINITY, f64::min);
            if min > 0.0 {
                reliable.push(k);
            } else if min == 0.0 {
                marginal.push(k);
            } else {
                unreliable.push(k);
            }
        }
        let limit = 1.0 - reliable.len() as f64 / k_count as f64;
        Self {
            delta_table,
            reliable,
            marginal,
            unreliable,
            limit,
        }
    }

    pub fn all_reliable(&self) -> bool {
        self.reliable.len() == self.delta_table.len()
    }

    /// Smallest off-diagonal margin and where it occurs, as `(k, l, δ)`.
    /// Ties go to the lexicographically smallest `(k, l)`.
    pub fn min_margin(&self) -> (usize, usize, f64) {
        let mut best = (0, 0, f64::INFINITY);
        for (k, row) in self.delta_table.iter().enumerate() {
            for (l, &d) in row.iter().enumerate() {
                if l != k && d < best.2 {
                    best = (k, l, d);
                }
            }
        }
        best
    }
}
