use mvf_core::bounds::{iid_chernoff_union_bound, iid_upper_bound};
use mvf_core::model::{TransitionMatrix, VoterPopulation};
use mvf_core::planner::{min_voters_bound, min_voters_simulated, PlanMethod, PlanOutcome};
use mvf_core::simulator::{SimOptions, TiePolicy};

fn dawid_skene(gamma: f64) -> VoterPopulation {
    VoterPopulation::iid(TransitionMatrix::dawid_skene(10, gamma).unwrap())
}

#[test]
fn thm1_plan_is_certified() {
    let pop = dawid_skene(0.3);
    let plan = min_voters_bound(&pop, 1e-2, 2000, PlanMethod::Thm1).unwrap();
    let m = plan.m_min().expect("reachable");
    assert!(m >= 31, "{m}");
    let p = &pop.groups()[0].matrix;
    assert!(iid_upper_bound(p, m).unwrap().clamped <= 1e-2);
    assert!(iid_upper_bound(p, m - 1).unwrap().clamped > 1e-2);
}

#[test]
fn chernoff_union_plan() {
    let pop = dawid_skene(0.5);
    let plan = min_voters_bound(&pop, 1e-2, 2000, PlanMethod::ChernoffUnion).unwrap();
    let m = plan.m_min().unwrap();
    let p = &pop.groups()[0].matrix;
    assert!(iid_chernoff_union_bound(p, m).unwrap().clamped <= 1e-2);
}

#[test]
fn simulated_plans_bracket_reported_counts() {
    let sim = SimOptions::new(1_000_000, TiePolicy::Random, 17);
    let low = min_voters_simulated(&dawid_skene(0.3), 1e-2, 61, 2, &sim).unwrap();
    let m_low = low.m_min().expect("reachable");
    assert!((25..=37).contains(&m_low), "{m_low}");

    let high = min_voters_simulated(&dawid_skene(0.5), 1e-2, 61, 2, &sim).unwrap();
    let m_high = high.m_min().expect("reachable");
    assert!((11..=19).contains(&m_high), "{m_high}");

    for (pop, m_sim) in [(dawid_skene(0.3), m_low), (dawid_skene(0.5), m_high)] {
        let bound = min_voters_bound(&pop, 1e-2, 2000, PlanMethod::Thm1).unwrap();
        assert!(bound.m_min().unwrap() >= m_sim);
    }
}

#[test]
fn unreliable_population_not_achievable() {
    let p = TransitionMatrix::new(&[vec![0.4, 0.6], vec![0.2, 0.8]]).unwrap();
    for target in [0.01, 0.2, 0.49] {
        let plan = min_voters_bound(&VoterPopulation::iid(p.clone()), target, 100, PlanMethod::Thm1).unwrap();
        match plan.outcome {
            PlanOutcome::Unreliable(r) => assert_eq!(r.unreliable, vec![0]),
            other => panic!("{other:?}"),
        }
    }
}
