//! Smallest voter count meeting a target error rate, certified by a bound or
//! estimated by simulation.
//!
//! Both planners scan `M` upward rather than bisecting, since none of the
//! bounds is known to be monotone in `M`.

use crate::bounds::{iid_chernoff_union_bound, iid_upper_bound, noniid_upper_bound, BoundReport, BoundsError};
use crate::model::{ReliabilityReport, VoterPopulation};
use crate::simulator::{simulate_error_rate_with, SimError, SimOptions, SimulationEstimate};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("target must lie strictly between 0 and 1, got {0}")]
    TargetOutOfRange(f64),
    #[error("{trials} trials cannot certify a target of {target}; need at least {needed}")]
    TrialsInsufficient { trials: u64, target: f64, needed: u64 },
    #[error("scan ceiling and step must be at least 1")]
    EmptyScan,
    #[error("method {0} needs a single-group population")]
    NotIid(PlanMethod),
    #[error("method {0} is not a bound")]
    NotABound(PlanMethod),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlanMethod {
    Thm1,
    Thm4,
    ChernoffUnion,
    Simulation,
}

impl PlanMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            PlanMethod::Thm1 => "thm1",
            PlanMethod::Thm4 => "thm4",
            PlanMethod::ChernoffUnion => "chernoff-union",
            PlanMethod::Simulation => "simulation",
        }
    }
}

impl fmt::Display for PlanMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Evidence {
    Bound(BoundReport),
    Simulation(SimulationEstimate),
}

impl Evidence {
    /// The value compared against the target: the clamped bound or the
    /// upper confidence limit.
    pub fn certified_value(&self) -> f64 {
        match self {
            Evidence::Bound(r) => r.clamped,
            Evidence::Simulation(s) => s.ci_high,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlanOutcome {
    Found { m_min: u64, evidence: Evidence },
    /// Some class has a nonpositive margin, so the error rate does not vanish.
    Unreliable(ReliabilityReport),
    /// No scanned `M` up to the ceiling met the target.
    CeilingReached,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub target: f64,
    pub method: PlanMethod,
    pub outcome: PlanOutcome,
    pub scan_ceiling: u64,
}

impl PlanResult {
    pub fn m_min(&self) -> Option<u64> {
        match self.outcome {
            PlanOutcome::Found { m_min, .. } => Some(m_min),
            _ => None,
        }
    }
}

fn check_target(target: f64) -> Result<(), PlanError> {
    if target > 0.0 && target < 1.0 {
        Ok(())
    } else {
        Err(PlanError::TargetOutOfRange(target))
    }
}

/// Evaluate the bound `method` on `pop` at `m`.
pub fn plan_bound(pop: &VoterPopulation, m: u64, method: PlanMethod) -> Result<BoundReport, PlanError> {
    let single = || {
        if pop.is_iid() {
            Ok(&pop.groups()[0].matrix)
        } else {
            Err(PlanError::NotIid(method))
        }
    };
    Ok(match method {
        PlanMethod::Thm1 => iid_upper_bound(single()?, m)?,
        PlanMethod::ChernoffUnion => iid_chernoff_union_bound(single()?, m)?,
        PlanMethod::Thm4 => noniid_upper_bound(pop, m)?,
        PlanMethod::Simulation => return Err(PlanError::NotABound(method)),
    })
}

pub fn min_voters_bound(
    pop: &VoterPopulation,
    target: f64,
    m_max: u64,
    method: PlanMethod,
) -> Result<PlanResult, PlanError> {
    check_target(target)?;
    if m_max == 0 {
        return Err(PlanError::EmptyScan);
    }
    if method == PlanMethod::Simulation {
        return Err(PlanError::NotABound(method));
    }
    let result = |outcome| PlanResult {
        target,
        method,
        outcome,
        scan_ceiling: m_max,
    };
    let report = pop.reliability_report();
    if !report.all_reliable() {
        return Ok(result(PlanOutcome::Unreliable(report)));
    }
    for m in 1..=m_max {
        let bound = plan_bound(pop, m, method)?;
        if bound.clamped <= target {
            log::debug!("{method}: M = {m} gives {}", bound.clamped);
            return Ok(result(PlanOutcome::Found {
                m_min: m,
                evidence: Evidence::Bound(bound),
            }));
        }
    }
    Ok(result(PlanOutcome::CeilingReached))
}

/// Scan `M = 1, 1 + step, ...` and stop at the first Wilson upper limit at
/// or below `target`.
pub fn min_voters_simulated(
    pop: &VoterPopulation,
    target: f64,
    m_max: u64,
    step: u64,
    sim: &SimOptions,
) -> Result<PlanResult, PlanError> {
    check_target(target)?;
    if m_max == 0 || step == 0 {
        return Err(PlanError::EmptyScan);
    }
    let needed = (10.0 / target).ceil() as u64;
    if sim.trials < needed {
        return Err(PlanError::TrialsInsufficient {
            trials: sim.trials,
            target,
            needed,
        });
    }
    let mut outcome = PlanOutcome::CeilingReached;
    for m in (1..=m_max).step_by(step as usize) {
        let est = simulate_error_rate_with(pop, m, sim)?;
        log::debug!("simulation: M = {m}, upper limit {}", est.ci_high);
        if est.ci_high <= target {
            outcome = PlanOutcome::Found {
                m_min: m,
                evidence: Evidence::Simulation(est),
            };
            break;
        }
    }
    Ok(PlanResult {
        target,
        method: PlanMethod::Simulation,
        outcome,
        scan_ceiling: m_max,
    })
}
