//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use mvf_core::bessel::{log_bessel_i, log_bessel_i_debye, log_bessel_i_series, SERIES_LIMIT};
use mvf_core::bounds::{epsilon_star, iid_slope, iid_upper_bound, noniid_upper_bound};
use mvf_core::cli::random_dominant_matrix;
use mvf_core::fixtures::{four_groups_raw, worst_classifier_renormalized, WORST_CLASSIFIER};
use mvf_core::model::{TransitionMatrix, VoterPopulation};
use mvf_core::simulator::{
    exact_error_rate, mvf_decide, simulate_error_rate, simulate_error_rate_with, SimOptions, TiePolicy,
};
use mvf_core::skellam::{skellam_log_pmf, skellam_tail_ge, SkellamParams};
use mvf_core::truth_discovery::{run_td_experiment, td_init, td_round};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::process::Command;
use std::time::{Duration, Instant};

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn criterion(id: u32, name: &str, budget_secs: u64, f: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let verdict = f();
    let elapsed = start.elapsed();
    let in_time = elapsed <= Duration::from_secs(budget_secs);
    let pass = verdict.pass && in_time;
    let timing = if in_time {
        format!("{:.2}s", elapsed.as_secs_f64())
    } else {
        format!("{:.2}s, over the {budget_secs}s budget", elapsed.as_secs_f64())
    };
    println!(
        "criterion {id:>2} {name}: {} ({}; {timing})",
        if pass { "PASS" } else { "FAIL" },
        verdict.detail
    );
    pass
}

/// Poisson pmf table by the forward recurrence.
fn poisson_table(mu: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut p = (-mu).exp();
    for n in 0..len {
        out.push(p);
        p *= mu / (n as f64 + 1.0);
    }
    out
}

fn convolution_pmf(alpha: i64, mu1: f64, mu2: f64) -> f64 {
    let a = poisson_table(mu1, 260);
    let b = poisson_table(mu2, 260);
    (0..200i64)
        .filter(|m| m + alpha >= 0)
        .map(|m| b[m as usize] * a[(m + alpha) as usize])
        .sum()
}

fn delta_fixture() -> Verdict {
    let report = four_groups_raw().reliability_report();
    let (k, l, d) = report.min_margin();
    let pass = (k, l) == (0, 4) && (d - 0.135).abs() <= 1e-9;
    Verdict::new(pass, format!("min δ = {d:.12} at k={}, l={}", k + 1, l + 1))
}

fn epsilon_cross_check() -> Verdict {
    match epsilon_star(&four_groups_raw()) {
        Ok(e) => {
            let scaled = 0.25 * e.value;
            let pass = (e.k, e.l, e.group) == (0, 4, 0) && (5.50e-4..=5.75e-4).contains(&scaled);
            Verdict::new(
                pass,
                format!(
                    "eps* = {:.9e} at (k={}, l={}, t={}); 0.25 eps* = {scaled:.6e}",
                    e.value,
                    e.k + 1,
                    e.l + 1,
                    e.group + 1
                ),
            )
        }
        Err(e) => Verdict::new(false, e.to_string()),
    }
}

fn domination_suite() -> Verdict {
    let mut checks = 0u64;
    let mut violations = Vec::new();
    for i in 0..240u64 {
        let k = 2 + (i % 3) as usize;
        let p = random_dominant_matrix(k, i).expect("valid matrix");
        let pop = VoterPopulation::iid(p.clone());
        for m in 1..=8 {
            let bound = iid_upper_bound(&p, m).expect("bound").raw;
            let exact = exact_error_rate(&pop, m, TiePolicy::Worst).expect("small state space");
            checks += 1;
            if bound < exact {
                violations.push(format!("iid seed {i} M={m}: {bound} < {exact}"));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..60u64 {
        let k = 2 + (i % 3) as usize;
        let r: f64 = rng.random_range(0.2..0.8);
        let pop = VoterPopulation::new(vec![
            (r, random_dominant_matrix(k, 10_000 + 2 * i).expect("valid")),
            (1.0 - r, random_dominant_matrix(k, 10_001 + 2 * i).expect("valid")),
        ])
        .expect("valid population");
        for m in 1..=8 {
            let bound = noniid_upper_bound(&pop, m).expect("bound").raw;
            let exact = exact_error_rate(&pop, m, TiePolicy::Worst).expect("small state space");
            checks += 1;
            if bound < exact {
                violations.push(format!("two-group {i} M={m}: {bound} < {exact}"));
            }
        }
    }
    let detail = format!(
        "{checks} checks over 240 single-group and 60 two-group inputs, {} violations{}",
        violations.len(),
        violations.first().map(|v| format!("; first: {v}")).unwrap_or_default()
    );
    Verdict::new(violations.is_empty(), detail)
}

fn skellam_kernel() -> Verdict {
    let means = [0.0, 0.1, 1.0, 5.0];
    let mut worst_norm = 0.0f64;
    let mut worst_rel = 0.0f64;
    let mut worst_diff = 0.0f64;
    for &mu1 in &means {
        for &mu2 in &means {
            let p = SkellamParams::new(mu1, mu2).expect("valid means");
            let total: f64 = (-120..=120).map(|a| skellam_log_pmf(a, p).exp()).sum();
            worst_norm = worst_norm.max((total - 1.0).abs());
            for a in -15..=15i64 {
                let oracle = convolution_pmf(a, mu1, mu2);
                let got = skellam_log_pmf(a, p).exp();
                if oracle > 0.0 {
                    worst_rel = worst_rel.max((got / oracle - 1.0).abs());
                } else if got != 0.0 {
                    worst_rel = f64::INFINITY;
                }
                let diff = skellam_tail_ge(a, p) - skellam_tail_ge(a + 1, p);
                worst_diff = worst_diff.max((diff - got).abs());
            }
        }
    }
    let mut worst_switch = 0.0f64;
    for n in 0..=80u64 {
        let s = log_bessel_i_series(n, SERIES_LIMIT);
        let d = log_bessel_i_debye(n, SERIES_LIMIT);
        worst_switch = worst_switch.max((s - d).exp_m1().abs());
        let below = log_bessel_i(n, SERIES_LIMIT * (1.0 - 1e-15)).expect("valid");
        let at = log_bessel_i(n, SERIES_LIMIT).expect("valid");
        worst_switch = worst_switch.max((below - at).exp_m1().abs() - 1e-13);
    }
    let pass = worst_norm <= 1e-9 && worst_rel <= 1e-12 && worst_diff <= 1e-12 && worst_switch <= 1e-12;
    Verdict::new(
        pass,
        format!(
            "normalization {worst_norm:.1e}, convolution rel {worst_rel:.1e}, \
             tail difference {worst_diff:.1e}, Bessel switch rel {worst_switch:.1e}"
        ),
    )
}

fn binomial_coefficient(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn poissonization() -> Verdict {
    let mut checks = 0;
    let mut violations = Vec::new();
    let mut min_ratio = f64::INFINITY;
    for i in 0..50u64 {
        let p = random_dominant_matrix(3, 500 + i).expect("valid");
        let row = p.row(0);
        for m in 2..=10u64 {
            // exact trinomial probability of V_1 >= V_2 given class 1
            let mut exact = 0.0;
            for a in 0..=m {
                for b in 0..=(m - a) {
                    if a >= b {
                        let c = m - a - b;
                        let coef = binomial_coefficient(m, a) * binomial_coefficient(m - a, b);
                        exact += coef * row[0].powi(a as i32) * row[1].powi(b as i32) * row[2].powi(c as i32);
                    }
                }
            }
            // independent Poisson counts, truncated where both tails are below 1e-12
            let mf = m as f64;
            let n1 = poisson_table(mf * row[0], 80);
            let n2 = poisson_table(mf * row[1], 80);
            let mut poisson = 0.0;
            for (a, &pa) in n1.iter().enumerate() {
                poisson += pa * n2[..=a].iter().sum::<f64>();
            }
            checks += 1;
            min_ratio = min_ratio.min(2.0 * poisson / exact);
            if exact > 2.0 * poisson {
                violations.push(format!("seed {} M={m}: {exact} > 2 x {poisson}", 500 + i));
            }
        }
    }
    Verdict::new(
        violations.is_empty(),
        format!(
            "{checks} checks, {} violations, smallest 2·Poisson/exact = {min_ratio:.4}",
            violations.len()
        ),
    )
}

fn voter_counts() -> Verdict {
    let run = |gamma: f64, m: u64| {
        let pop = VoterPopulation::iid(TransitionMatrix::dawid_skene(10, gamma).expect("valid"));
        simulate_error_rate(&pop, m, 1_000_000, TiePolicy::Random, 6).expect("simulation")
    };
    let a = run(0.3, 31);
    let b = run(0.5, 15);
    let pass_a = a.ci_high < 1.2e-2;
    let pass_b = b.ci_high < 1.2e-2;
    Verdict::new(
        pass_a && pass_b,
        format!(
            "γ=0.3, M=31: p̂ = {:.5}, upper {:.5} [{}]; γ=0.5, M=15: p̂ = {:.5}, upper {:.5} [{}]",
            a.p_hat,
            a.ci_high,
            if pass_a { "ok" } else { "above 1.2e-2" },
            b.p_hat,
            b.ci_high,
            if pass_b { "ok" } else { "above 1.2e-2" },
        ),
    )
}

fn bound_vs_simulation() -> Verdict {
    let p = worst_classifier_renormalized();
    let pop = VoterPopulation::iid(p.clone());
    let mut failures = Vec::new();
    let mut last = None;
    for m in (1..=201).step_by(10) {
        let bound = iid_upper_bound(&p, m).expect("bound");
        let est = simulate_error_rate(&pop, m, 100_000, TiePolicy::Random, 7).expect("simulation");
        if bound.clamped < est.ci_high {
            failures.push(format!("M={m}: bound {} < upper {}", bound.clamped, est.ci_high));
        }
        last = Some((bound.clamped, est.p_hat, est.ci_high));
    }
    let (b201, p201, u201) = last.expect("nonempty sweep");
    let small_enough = b201 < 1e-2;
    Verdict::new(
        failures.is_empty() && small_enough,
        format!(
            "domination at 21 points: {} failures; M=201: bound {b201:.5} (needs < 1e-2: {}), \
             simulated p̂ {p201:.5}, upper {u201:.5}",
            failures.len(),
            if small_enough { "ok" } else { "no" }
        ),
    )
}

fn slope_check() -> Verdict {
    let p = worst_classifier_renormalized();
    let s = iid_slope(&p).expect("dominant matrix");
    let row_sum: f64 = WORST_CLASSIFIER[0].iter().sum();
    let expect = -((0.33 / row_sum).sqrt() - (0.30 / row_sum).sqrt()).powi(2);
    let raw = iid_upper_bound(&p, 5000).expect("bound").raw;
    let rate = raw.ln() / 5000.0;
    let pass = (s.k_star, s.l_star) == (0, 3) && (s.slope - expect).abs() <= 1e-6 && rate <= s.slope + 1e-4;
    Verdict::new(
        pass,
        format!(
            "(k*, l*) = ({}, {}), slope {:.6e} vs {expect:.6e}; ln(bound)/M at M=5000 = {rate:.6e}",
            s.k_star + 1,
            s.l_star + 1,
            s.slope
        ),
    )
}

fn asymptotic_limits() -> Verdict {
    let half = TransitionMatrix::new(&[
        vec![0.7, 0.1, 0.1, 0.1],
        vec![0.1, 0.7, 0.1, 0.1],
        vec![0.1, 0.1, 0.3, 0.5],
        vec![0.1, 0.1, 0.5, 0.3],
    ])
    .expect("valid");
    let cyclic: Vec<Vec<f64>> = (0..4)
        .map(|k| {
            let mut row = vec![0.15; 4];
            row[k] = 0.2;
            row[(k + 1) % 4] = 0.5;
            row
        })
        .collect();
    let cyclic = TransitionMatrix::new(&cyclic).expect("valid");
    let half_pop = VoterPopulation::iid(half);
    let limit = half_pop.reliability_report().limit;
    let a = simulate_error_rate(&half_pop, 501, 100_000, TiePolicy::Random, 9).expect("simulation");
    let b = simulate_error_rate(&VoterPopulation::iid(cyclic), 501, 100_000, TiePolicy::Random, 10)
        .expect("simulation");
    let worst_class = b
        .per_class
        .iter()
        .map(|r| (r.p_hat - 1.0).abs())
        .fold(0.0, f64::max);
    let pass = limit == 0.5 && (a.p_hat - 0.5).abs() <= 0.02 && worst_class <= 0.02;
    Verdict::new(
        pass,
        format!(
            "two violating rows: p̂ = {:.4} (limit {limit}); all rows violating: largest |p̂_k - 1| = {worst_class:.4}",
            a.p_hat
        ),
    )
}

fn td_harness() -> Verdict {
    let mut patterns = 0u64;
    let mut mismatches = 0u64;
    for k in 2..=3usize {
        for m in 1..=5u32 {
            for code in 0..(k as u64).pow(m) {
                let mut c = code;
                let votes: Vec<usize> = (0..m)
                    .map(|_| {
                        let v = (c % k as u64) as usize;
                        c /= k as u64;
                        v
                    })
                    .collect();
                let mut totals = vec![0u32; k];
                votes.iter().for_each(|&v| totals[v] += 1);
                let state = td_init(m as usize, 1.0).expect("valid");
                for seed in 0..6u64 {
                    for (policy, truth) in [
                        (TiePolicy::Random, None),
                        (TiePolicy::Worst, Some(seed as usize % k)),
                        (TiePolicy::Best, Some(seed as usize % k)),
                    ] {
                        let rng = ChaCha8Rng::seed_from_u64(seed);
                        let a = mvf_decide(&totals, policy, truth, &mut rng.clone()).expect("decision");
                        let (b, _) =
                            td_round(&state, &votes, k, policy, truth, &mut rng.clone()).expect("round");
                        patterns += 1;
                        mismatches += u64::from(a != b);
                    }
                }
            }
        }
    }
    let reliable = run_td_experiment(&four_groups_raw(), 40, 50, 10_000, 12).expect("experiment");
    let r_last = reliable.rounds.last().expect("rounds");
    let reliable_ok = r_last.td.p_hat <= r_last.mvf.p_hat + 0.05;
    let adversarial = VoterPopulation::iid(
        TransitionMatrix::new(&[
            vec![0.3, 0.5, 0.2],
            vec![0.1, 0.8, 0.1],
            vec![0.1, 0.1, 0.8],
        ])
        .expect("valid"),
    );
    let adv = run_td_experiment(&adversarial, 40, 50, 10_000, 13).expect("experiment");
    let a_last = adv.rounds.last().expect("rounds");
    let (td0, mvf0) = (a_last.td_per_class[0].p_hat, a_last.mvf_per_class[0].p_hat);
    let adversarial_ok = td0 >= mvf0 - 0.02;
    Verdict::new(
        mismatches == 0 && reliable_ok && adversarial_ok,
        format!(
            "round-1 mismatches {mismatches}/{patterns}; four groups round 50: TD {:.4} vs MVF {:.4}; \
             adversarial class 1 round 50: TD {td0:.4} vs MVF {mvf0:.4}",
            r_last.td.p_hat, r_last.mvf.p_hat
        ),
    )
}

fn csv_body(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_mvf"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(String::from_utf8_lossy(&out.stderr).into_owned());
    }
    Ok(String::from_utf8_lossy(&out.stdout)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect())
}

fn determinism() -> Verdict {
    let runs: [&[&str]; 4] = [
        &["simulate", "--dawid-skene", "6,0.3", "--m", "3:43:10", "--trials", "40000", "--seed", "7"],
        &["bound-iid", "--dawid-skene", "4,0.4", "--m", "1:31:5", "--methods", "thm1,mc", "--trials", "20000", "--seed", "3"],
        &["td-compare", "--dawid-skene", "3,0.3", "--m", "9", "--rounds", "8", "--trials", "5000", "--seed", "5"],
        &["plan", "--dawid-skene", "5,0.5", "--target", "0.05", "--methods", "simulation,thm1", "--trials", "20000", "--m-max", "60", "--seed", "2"],
    ];
    let mut compared = 0;
    let mut problems = Vec::new();
    for args in runs {
        let mut bodies = Vec::new();
        for threads in ["1", "1", "3"] {
            let mut full: Vec<&str> = args.to_vec();
            full.extend(["--threads", threads]);
            match csv_body(&full) {
                Ok(b) => bodies.push(b),
                Err(e) => problems.push(format!("{}: {e}", args[0])),
            }
        }
        compared += 1;
        if bodies.len() == 3 && !(bodies[0] == bodies[1] && bodies[1] == bodies[2]) {
            problems.push(format!("{} bodies differ", args[0]));
        }
    }
    let gen = ["gen-matrix", "--kind", "random-dominant", "--classes", "10", "--seed", "1"];
    match (csv_body(&gen), csv_body(&gen)) {
        (Ok(a), Ok(b)) if a == b => {}
        _ => problems.push("gen-matrix output differs".into()),
    }
    let pop = VoterPopulation::iid(TransitionMatrix::dawid_skene(10, 0.5).expect("valid"));
    let mut opts = SimOptions::new(50_000, TiePolicy::Random, 99);
    opts.threads = Some(1);
    let serial = simulate_error_rate_with(&pop, 15, &opts).expect("simulation");
    opts.threads = Some(4);
    let parallel = simulate_error_rate_with(&pop, 15, &opts).expect("simulation");
    if serial != parallel {
        problems.push("library estimate depends on thread count".into());
    }
    Verdict::new(
        problems.is_empty(),
        format!(
            "{compared} CLI sweeps x 3 runs, gen-matrix x 2, library serial/parallel; {}",
            if problems.is_empty() {
                "all identical".to_string()
            } else {
                problems.join("; ")
            }
        ),
    )
}

fn main() {
    let results = [
        criterion(1, "δ-margin fixture", 1, delta_fixture),
        criterion(2, "ε* cross-check", 1, epsilon_cross_check),
        criterion(3, "bound domination", 300, domination_suite),
        criterion(4, "Skellam kernel", 30, skellam_kernel),
        criterion(5, "Poissonization factor", 120, poissonization),
        criterion(6, "voter counts by simulation", 300, voter_counts),
        criterion(7, "bound vs simulation curve", 600, bound_vs_simulation),
        criterion(8, "decay slope", 30, slope_check),
        criterion(9, "asymptotic limits", 180, asymptotic_limits),
        criterion(10, "truth discovery harness", 600, td_harness),
        criterion(11, "determinism", 600, determinism),
    ];
    let failed: Vec<usize> = results
        .iter()
        .enumerate()
        .filter(|(_, &ok)| !ok)
        .map(|(i, _)| i + 1)
        .collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", results.len());
    } else {
        println!("acceptance: criteria {failed:?} failed");
        std::process::exit(1);
    }
}
