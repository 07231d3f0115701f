//! Command-line front end.
//!
//! Every sweep writes one CSV with the columns
//! `method,M,raw_bound,bound,mc_estimate,ci_low,ci_high,trials,seed`,
//! preceded by a `#` comment recording the invocation. `delta` and
//! `td-compare` write their own tables. Exit status is 0 on success, 2 for
//! usage or input errors and 1 for failures during computation.

use crate::bounds::{
    epsilon_star, iid_chernoff_union_bound, iid_slope, iid_upper_bound, noniid_slope_bound,
    noniid_upper_bound, BoundReport,
};
use crate::io::{format_matrix, read_matrix, read_population, IoError};
use crate::model::{MatrixOptions, ModelError, TransitionMatrix, VoterPopulation, DEFAULT_ROW_TOLERANCE};
use crate::planner::{min_voters_bound, min_voters_simulated, Evidence, PlanError, PlanMethod, PlanOutcome};
use crate::simulator::{exact_error_rate, simulate_error_rate_with, SimError, SimOptions, TiePolicy};
use crate::truth_discovery::{run_td_experiment_with, TdError, TdOptions};
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use std::fmt::Write as _;
use std::path::PathBuf;

pub const CSV_HEADER: &str = "method,M,raw_bound,bound,mc_estimate,ci_low,ci_high,trials,seed";

#[derive(Debug)]
enum CliError {
    /// Bad arguments or input files.
    Usage(String),
    /// The computation itself failed.
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::ApportionmentImpossible { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<crate::bounds::BoundsError> for CliError {
    fn from(e: crate::bounds::BoundsError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<PlanError> for CliError {
    fn from(e: PlanError) -> Self {
        match e {
            PlanError::Sim(s) => s.into(),
            PlanError::Bounds(b) => b.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<TdError> for CliError {
    fn from(e: TdError) -> Self {
        match e {
            TdError::Sim(s) => s.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "mvf", version, about = "Error-rate bounds and simulations for plurality voting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bounds for i.i.d. voters over an M sweep.
    BoundIid(SweepArgs),
    /// Bounds for grouped voters over an M sweep.
    BoundNoniid(SweepArgs),
    /// Monte Carlo error rate over an M sweep.
    Simulate(SweepArgs),
    /// Exact error rate by enumeration over an M sweep.
    Exact(SweepArgs),
    /// Asymptotic decay slope of the bound.
    Slope(SlopeArgs),
    /// δ-margin table and reliable classes.
    Delta(DeltaArgs),
    /// Minimum voter count for a target error rate.
    Plan(PlanArgs),
    /// Truth discovery against the MVF on shared vote streams.
    TdCompare(TdArgs),
    /// Write a transition matrix file.
    GenMatrix(GenArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Transition matrix file.
    #[arg(long, conflicts_with_all = ["population", "dawid_skene"])]
    matrix: Option<PathBuf>,
    /// Population file.
    #[arg(long, conflicts_with = "dawid_skene")]
    population: Option<PathBuf>,
    /// Homogeneous Dawid-Skene matrix, given as `K,gamma`.
    #[arg(long, value_name = "K,GAMMA")]
    dawid_skene: Option<String>,
    /// Rescale rows whose sums are within 0.02 of one.
    #[arg(long)]
    renormalize: bool,
    /// Accepted deviation of row sums from one.
    #[arg(long, value_name = "TOL")]
    row_tolerance: Option<f64>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "random")]
    ties: TiePolicy,
    /// Worker threads for simulations.
    #[arg(long)]
    threads: Option<usize>,
    /// Output CSV; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Voter counts: `start:stop:step`, a comma list, or a single value.
    #[arg(long = "m", value_name = "RANGE")]
    m: String,
    /// Comma list of thm1, thm4, chernoff-union, thm6-slope, mc, exact.
    #[arg(long)]
    methods: Option<String>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Args)]
struct SlopeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DeltaArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PlanArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    target: f64,
    #[arg(long, default_value_t = 1000)]
    m_max: u64,
    /// Scan step for the simulation planner.
    #[arg(long, default_value_t = 2)]
    step: u64,
    /// Comma list of thm1, thm4, chernoff-union, simulation.
    #[arg(long)]
    methods: Option<String>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Args)]
struct TdArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long = "m", value_name = "RANGE")]
    m: String,
    #[arg(long, default_value_t = 50)]
    rounds: u64,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum MatrixKind {
    DawidSkene,
    RandomDominant,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: MatrixKind,
    #[arg(long)]
    classes: usize,
    /// Dawid-Skene accuracy parameter.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parse `start:stop:step` (inclusive), a comma list, or one value.
pub fn parse_m_values(spec: &str) -> Result<Vec<u64>, String> {
    let parse = |s: &str| {
        s.trim()
            .parse::<u64>()
            .map_err(|_| format!("`{s}` is not a nonnegative integer"))
    };
    let values: Vec<u64> = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let (start, stop, step) = match parts.as_slice() {
            [a, b] => (parse(a)?, parse(b)?, 1),
            [a, b, c] => (parse(a)?, parse(b)?, parse(c)?),
            _ => return Err(format!("bad range `{spec}`; expected start:stop:step")),
        };
        if step == 0 {
            return Err("range step must be positive".into());
        }
        (start..=stop).step_by(step as usize).collect()
    } else {
        spec.split(',').map(parse).collect::<Result<_, _>>()?
    };
    if values.is_empty() {
        return Err(format!("`{spec}` selects no voter counts"));
    }
    if values[0] == 0 {
        return Err("voter counts must be at least 1".into());
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(format!("voter counts in `{spec}` must be strictly increasing"));
    }
    Ok(values)
}

/// `%.12g`-style formatting.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-4..12).contains(&exp) {
        let s = format!("{:.11e}", x);
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        let mantissa = trim_zeros(mantissa);
        let e: i32 = e.parse().expect("integer exponent");
        let sign = if e < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", e.abs())
    } else {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Default)]
struct Row {
    method: String,
    m: Option<u64>,
    raw: Option<f64>,
    bound: Option<f64>,
    estimate: Option<f64>,
    ci: Option<(f64, f64)>,
    trials: Option<u64>,
    seed: Option<u64>,
}

impl Row {
    fn bound(report: &BoundReport) -> Self {
        Row {
            method: report.method.tag().into(),
            m: Some(report.m),
            raw: Some(report.raw),
            bound: Some(report.clamped),
            ..Row::default()
        }
    }

    fn render(&self) -> String {
        let num = |v: Option<f64>| v.map(fmt_num).unwrap_or_default();
        let int = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.method,
            int(self.m),
            num(self.raw),
            num(self.bound),
            num(self.estimate),
            num(self.ci.map(|c| c.0)),
            num(self.ci.map(|c| c.1)),
            int(self.trials),
            int(self.seed),
        )
    }
}

struct Output {
    text: String,
}

impl Output {
    fn new(argv: &[String], seed: Option<u64>, header: &str) -> Self {
        let mut text = String::new();
        let invocation = argv.join(" ");
        match seed {
            Some(s) => {
                let _ = writeln!(text, "# {invocation} (seed {s})");
            }
            None => {
                let _ = writeln!(text, "# {invocation}");
            }
        }
        let _ = writeln!(text, "{header}");
        Self { text }
    }

    fn comment(&mut self, line: &str) {
        let _ = writeln!(self.text, "# {line}");
    }

    fn line(&mut self, line: &str) {
        let _ = writeln!(self.text, "{line}");
    }

    fn finish(self, out: &Option<PathBuf>) -> Result<(), CliError> {
        match out {
            Some(path) => std::fs::write(path, self.text)
                .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display()))),
            None => {
                print!("{}", self.text);
                Ok(())
            }
        }
    }
}

fn matrix_options(input: &InputArgs) -> Result<MatrixOptions, CliError> {
    let mut opts = if input.renormalize {
        MatrixOptions::renormalizing()
    } else {
        MatrixOptions::default()
    };
    if let Some(tol) = input.row_tolerance {
        if !(0.0..1.0).contains(&tol) {
            return Err(CliError::Usage(format!("row tolerance {tol} must lie in [0, 1)")));
        }
        opts.tolerance = tol;
    } else if !input.renormalize {
        opts.tolerance = DEFAULT_ROW_TOLERANCE;
    }
    Ok(opts)
}

fn parse_dawid_skene(spec: &str) -> Result<TransitionMatrix, CliError> {
    let bad = || CliError::Usage(format!("--dawid-skene expects `K,gamma`, got `{spec}`"));
    let (k, g) = spec.split_once(',').ok_or_else(bad)?;
    let k: usize = k.trim().parse().map_err(|_| bad())?;
    let g: f64 = g.trim().parse().map_err(|_| bad())?;
    Ok(TransitionMatrix::dawid_skene(k, g)?)
}

fn load_population(input: &InputArgs) -> Result<VoterPopulation, CliError> {
    let opts = matrix_options(input)?;
    if let Some(path) = &input.matrix {
        return Ok(VoterPopulation::iid(read_matrix(path, &opts)?));
    }
    if let Some(path) = &input.population {
        return Ok(read_population(path, &opts)?);
    }
    if let Some(spec) = &input.dawid_skene {
        return Ok(VoterPopulation::iid(parse_dawid_skene(spec)?));
    }
    Err(CliError::Usage(
        "one of --matrix, --population or --dawid-skene is required".into(),
    ))
}

fn single_matrix(pop: &VoterPopulation, what: &str) -> Result<TransitionMatrix, CliError> {
    if pop.is_iid() {
        Ok(pop.groups()[0].matrix.clone())
    } else {
        Err(CliError::Usage(format!("{what} needs a single voter group")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SweepMethod {
    Thm1,
    Thm4,
    ChernoffUnion,
    Thm6Slope,
    Mc,
    Exact,
}

fn parse_methods(spec: &str) -> Result<Vec<SweepMethod>, CliError> {
    spec.split(',')
        .map(|s| match s.trim() {
            "thm1" => Ok(SweepMethod::Thm1),
            "thm4" => Ok(SweepMethod::Thm4),
            "chernoff-union" => Ok(SweepMethod::ChernoffUnion),
            "thm6-slope" => Ok(SweepMethod::Thm6Slope),
            "mc" => Ok(SweepMethod::Mc),
            "exact" => Ok(SweepMethod::Exact),
            other => Err(CliError::Usage(format!(
                "unknown method `{other}` (thm1, thm4, chernoff-union, thm6-slope, mc, exact)"
            ))),
        })
        .collect()
}

fn sim_options(run: &RunArgs) -> SimOptions {
    let mut opts = SimOptions::new(run.trials, run.ties, run.seed);
    opts.threads = run.threads;
    opts
}

fn run_sweep(argv: &[String], args: &SweepArgs, default: &str) -> Result<(), CliError> {
    let pop = load_population(&args.input)?;
    let ms = parse_m_values(&args.m).map_err(CliError::Usage)?;
    let methods = parse_methods(args.methods.as_deref().unwrap_or(default))?;
    let iid_matrix = if methods.iter().any(|m| matches!(m, SweepMethod::Thm1 | SweepMethod::ChernoffUnion)) {
        Some(single_matrix(&pop, "thm1 and chernoff-union")?)
    } else {
        None
    };
    let randomized = methods.contains(&SweepMethod::Mc);
    let mut out = Output::new(argv, randomized.then_some(args.run.seed), CSV_HEADER);
    let sim = sim_options(&args.run);
    for &m in &ms {
        for &method in &methods {
            let row = match method {
                SweepMethod::Thm1 => Row::bound(&iid_upper_bound(iid_matrix.as_ref().expect("checked"), m)?),
                SweepMethod::ChernoffUnion => {
                    Row::bound(&iid_chernoff_union_bound(iid_matrix.as_ref().expect("checked"), m)?)
                }
                SweepMethod::Thm4 => Row::bound(&noniid_upper_bound(&pop, m)?),
                SweepMethod::Thm6Slope => Row::bound(&noniid_slope_bound(&pop, m)?),
                SweepMethod::Mc => {
                    let est = simulate_error_rate_with(&pop, m, &sim)?;
                    Row {
                        method: "mc".into(),
                        m: Some(m),
                        estimate: Some(est.p_hat),
                        ci: Some((est.ci_low, est.ci_high)),
                        trials: Some(est.trials),
                        seed: Some(est.seed),
                        ..Row::default()
                    }
                }
                SweepMethod::Exact => Row {
                    method: "exact".into(),
                    m: Some(m),
                    estimate: Some(exact_error_rate(&pop, m, args.run.ties)?),
                    ..Row::default()
                },
            };
            out.line(&row.render());
        }
    }
    out.finish(&args.run.out)
}

fn run_slope(argv: &[String], args: &SlopeArgs) -> Result<(), CliError> {
    let pop = load_population(&args.input)?;
    let mut out = Output::new(argv, None, CSV_HEADER);
    if pop.is_iid() {
        let s = iid_slope(&pop.groups()[0].matrix)?;
        out.comment(&format!("k_star={},l_star={}", s.k_star + 1, s.l_star + 1));
        out.comment("asymptotic; the vanishing correction term is not included");
        out.line(
            &Row {
                method: "thm3-slope".into(),
                raw: Some(s.slope),
                bound: Some(s.slope),
                ..Row::default()
            }
            .render(),
        );
    }
    match epsilon_star(&pop) {
        Ok(e) => {
            out.comment(&format!(
                "epsilon_star={},k={},l={},t={}",
                fmt_num(e.value),
                e.k + 1,
                e.l + 1,
                e.group + 1
            ));
            out.line(
                &Row {
                    method: "thm6-slope".into(),
                    raw: Some(-e.value),
                    bound: Some(-e.value),
                    ..Row::default()
                }
                .render(),
            );
        }
        Err(e) if pop.is_iid() => out.comment(&format!("thm6-slope unavailable: {e}")),
        Err(e) => return Err(e.into()),
    }
    out.finish(&args.out)
}

fn run_delta(argv: &[String], args: &DeltaArgs) -> Result<(), CliError> {
    let pop = load_population(&args.input)?;
    let report = pop.reliability_report();
    let mut out = Output::new(argv, None, "k,l,delta");
    let one_based = |v: &[usize]| v.iter().map(|k| (k + 1).to_string()).collect::<Vec<_>>().join(" ");
    out.comment(&format!("reliable: {}", one_based(&report.reliable)));
    out.comment(&format!("marginal: {}", one_based(&report.marginal)));
    out.comment(&format!("unreliable: {}", one_based(&report.unreliable)));
    out.comment(&format!("limit={}", fmt_num(report.limit)));
    let (k, l, d) = report.min_margin();
    out.comment(&format!("min_delta={} at k={},l={}", fmt_num(d), k + 1, l + 1));
    for (k, row) in report.delta_table.iter().enumerate() {
        for (l, &d) in row.iter().enumerate() {
            if k != l {
                out.line(&format!("{},{},{}", k + 1, l + 1, fmt_num(d)));
            }
        }
    }
    out.finish(&args.out)
}

fn run_plan(argv: &[String], args: &PlanArgs) -> Result<(), CliError> {
    let pop = load_population(&args.input)?;
    let default = if pop.is_iid() { "thm1" } else { "thm4" };
    let methods: Vec<PlanMethod> = args
        .methods
        .as_deref()
        .unwrap_or(default)
        .split(',')
        .map(|s| match s.trim() {
            "thm1" => Ok(PlanMethod::Thm1),
            "thm4" => Ok(PlanMethod::Thm4),
            "chernoff-union" => Ok(PlanMethod::ChernoffUnion),
            "simulation" | "mc" => Ok(PlanMethod::Simulation),
            other => Err(CliError::Usage(format!(
                "unknown plan method `{other}` (thm1, thm4, chernoff-union, simulation)"
            ))),
        })
        .collect::<Result<_, _>>()?;
    let randomized = methods.contains(&PlanMethod::Simulation);
    let mut out = Output::new(argv, randomized.then_some(args.run.seed), CSV_HEADER);
    out.comment(&format!("target={}", fmt_num(args.target)));
    for method in methods {
        let plan = match method {
            PlanMethod::Simulation => {
                min_voters_simulated(&pop, args.target, args.m_max, args.step, &sim_options(&args.run))?
            }
            _ => min_voters_bound(&pop, args.target, args.m_max, method)?,
        };
        match plan.outcome {
            PlanOutcome::Found { m_min, evidence } => {
                let row = match evidence {
                    Evidence::Bound(r) => Row::bound(&r),
                    Evidence::Simulation(s) => Row {
                        method: "mc".into(),
                        m: Some(m_min),
                        estimate: Some(s.p_hat),
                        ci: Some((s.ci_low, s.ci_high)),
                        trials: Some(s.trials),
                        seed: Some(s.seed),
                        ..Row::default()
                    },
                };
                out.line(&row.render());
            }
            PlanOutcome::Unreliable(report) => {
                let msg = format!(
                    "{}: not achievable; unreliable classes {:?}, limiting error rate {}",
                    method,
                    report.unreliable.iter().chain(&report.marginal).map(|k| k + 1).collect::<Vec<_>>(),
                    fmt_num(report.limit)
                );
                eprintln!("{msg}");
                out.comment(&msg);
            }
            PlanOutcome::CeilingReached => {
                let msg = format!("{method}: target not met for M <= {}", plan.scan_ceiling);
                eprintln!("{msg}");
                out.comment(&msg);
            }
        }
    }
    out.finish(&args.run.out)
}

fn run_td(argv: &[String], args: &TdArgs) -> Result<(), CliError> {
    let pop = load_population(&args.input)?;
    let ms = parse_m_values(&args.m).map_err(CliError::Usage)?;
    let opts = TdOptions {
        policy: args.run.ties,
        threads: args.run.threads,
        ..TdOptions::default()
    };
    let mut out = Output::new(
        argv,
        Some(args.run.seed),
        "round,M,td_error,td_ci_low,td_ci_high,mvf_error,mvf_ci_low,mvf_ci_high,trials,seed",
    );
    for m in ms {
        let traj = run_td_experiment_with(&pop, m, args.rounds, args.run.trials, args.run.seed, &opts)?;
        for r in &traj.rounds {
            out.line(&format!(
                "{},{},{},{},{},{},{},{},{},{}",
                r.round,
                m,
                fmt_num(r.td.p_hat),
                fmt_num(r.td.ci_low),
                fmt_num(r.td.ci_high),
                fmt_num(r.mvf.p_hat),
                fmt_num(r.mvf.ci_low),
                fmt_num(r.mvf.ci_high),
                traj.trials,
                traj.seed
            ));
        }
    }
    out.finish(&args.run.out)
}

/// Rows drawn uniformly from the simplex, each with its largest entry
/// swapped onto the diagonal.
pub fn random_dominant_matrix(classes: usize, seed: u64) -> Result<TransitionMatrix, ModelError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(classes);
    for k in 0..classes {
        let row = loop {
            let draws: Vec<f64> = (0..classes).map(|_| rng.sample::<f64, _>(Exp1)).collect();
            let total: f64 = draws.iter().sum();
            let mut row: Vec<f64> = draws.iter().map(|d| d / total).collect();
            let top = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if row.iter().filter(|&&v| v == top).count() != 1 {
                continue;
            }
            let j = row.iter().position(|&v| v == top).expect("max exists");
            row.swap(j, k);
            break row;
        };
        rows.push(row);
    }
    TransitionMatrix::new(&rows)
}

fn run_gen(args: &GenArgs) -> Result<(), CliError> {
    let matrix = match args.kind {
        MatrixKind::DawidSkene => {
            let gamma = args
                .gamma
                .ok_or_else(|| CliError::Usage("--gamma is required for dawid-skene".into()))?;
            TransitionMatrix::dawid_skene(args.classes, gamma)?
        }
        MatrixKind::RandomDominant => random_dominant_matrix(args.classes, args.seed)?,
    };
    let text = format_matrix(&matrix);
    match &args.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Run the CLI on `argv` (program name first) and return the exit status.
pub fn run_cli(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match &cli.command {
        Command::BoundIid(a) => run_sweep(argv, a, "thm1"),
        Command::BoundNoniid(a) => run_sweep(argv, a, "thm4"),
        Command::Simulate(a) => run_sweep(argv, a, "mc"),
        Command::Exact(a) => run_sweep(argv, a, "exact"),
        Command::Slope(a) => run_slope(argv, a),
        Command::Delta(a) => run_delta(argv, a),
        Command::Plan(a) => run_plan(argv, a),
        Command::TdCompare(a) => run_td(argv, a),
        Command::GenMatrix(a) => run_gen(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
