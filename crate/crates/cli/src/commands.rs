use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use modelgate_core::dsl::{parse_expr, parse_model_bytes, render_errors, serialize_expr};
use modelgate_core::encoder::{encode, EncodingConfig, PfsMode, Property, SmtScript, DEFAULT_DEPTH};
use modelgate_core::model::{Expr, Model, SymbolKind};
use modelgate_core::oracle::{
    bfs_with_cap, default_param_domain, enumerate_vfs, initial_states, is_final, is_valid, replay_plan, Instance, OracleError,
    Plan, Reachability, DEFAULT_NODE_CAP,
};
use modelgate_core::solver::{
    cross_check, parse_witness, probe_solver, run_solver, Outcome, SolverConfig, SolverError, Verdict, Witness,
};
use thiserror::Error;

use crate::report::{bench_table, ReportOutcome, RunReport};
use crate::{Command, Format, InstanceArgs, OutputArgs, SolverArgs};

pub const EXIT_SAT: u8 = 0;
pub const EXIT_UNSAT: u8 = 1;
pub const EXIT_UNKNOWN: u8 = 2;
/// Bad arguments, unreadable or invalid model files.
pub const EXIT_USAGE: u8 = 3;
/// The solver could not be run or answered outside the protocol.
pub const EXIT_SOLVER: u8 = 4;
/// A witness failed its check, or two sources of truth disagree.
pub const EXIT_MISMATCH: u8 = 5;
/// The oracle's search budget was exhausted.
pub const EXIT_BUDGET: u8 = 6;

/// Instance values used by `bench` for path queries.
const BENCH_PINS: [(&str, i64); 3] = [("nm", 3), ("nc", 3), ("bcap", 3)];
/// Constraints `bench` places on every query, when the model has the symbol.
const BENCH_LOWER_BOUNDS: [&str; 3] = ["nm", "nc", "bcap"];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Solver(#[from] SolverError),
    #[error("{0}")]
    Mismatch(String),
    #[error("{0}")]
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Solver(_) => EXIT_SOLVER,
            CliError::Mismatch(_) => EXIT_MISMATCH,
            CliError::Budget(_) => EXIT_BUDGET,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn exit_for(outcome: ReportOutcome) -> u8 {
    match outcome {
        ReportOutcome::Sat => EXIT_SAT,
        ReportOutcome::Unsat => EXIT_UNSAT,
        ReportOutcome::Unknown => EXIT_UNKNOWN,
        ReportOutcome::Error => EXIT_SOLVER,
    }
}

pub fn run(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Check { model, property, mode, depth, oracle, instance, solver, output } => {
            let property = Property::from(property);
            if property == Property::Vfs && (mode.is_some() || depth.is_some()) {
                return Err(usage("--mode and --depth only apply to --property pfs"));
            }
            let config = match property {
                Property::Vfs => EncodingConfig::vfs(),
                Property::Pfs => EncodingConfig::pfs(mode.map_or(PfsMode::Unrolled, Into::into), depth.unwrap_or(DEFAULT_DEPTH)),
            };
            cmd_check(&model, config, &instance, &solver, oracle, output)
        }
        Command::Plan { model, max_depth, instance, solver, output } => cmd_plan(&model, max_depth, &instance, &solver, output),
        Command::Oracle { model, depth, state_max, param_max, node_cap, compare, instance, output } => {
            let opts = OracleOpts { depth, state_max, param_max, node_cap: node_cap.unwrap_or(DEFAULT_NODE_CAP) };
            cmd_oracle(&model, &opts, compare.as_deref(), &instance, output)
        }
        Command::Bench { dir, depth, mode, jobs, unpinned, solver, output } => {
            cmd_bench(&dir, depth, mode.into(), jobs, !unpinned, &solver, output)
        }
        Command::Emit { model, property, mode, depth, instance } => {
            let property = Property::from(property);
            let config = match property {
                Property::Vfs if mode.is_some() || depth.is_some() => {
                    return Err(usage("--mode and --depth only apply to --property pfs"))
                }
                Property::Vfs => EncodingConfig::vfs(),
                Property::Pfs => EncodingConfig::pfs(mode.map_or(PfsMode::Unrolled, Into::into), depth.unwrap_or(DEFAULT_DEPTH)),
            };
            let m = load_model(&model)?;
            let (config, _) = configure(&m, config, &instance)?;
            let script = encode(&m, &config).map_err(|e| usage(e.to_string()))?;
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(script.text.as_bytes());
            Ok(EXIT_SAT)
        }
        Command::Doctor { solver, cross_solver } => cmd_doctor(solver.as_deref(), cross_solver.as_deref()),
    }
}

pub fn load_model(path: &Path) -> Result<Model, CliError> {
    let bytes = std::fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => usage(format!("file not found: {}", path.display())),
        _ => usage(format!("cannot read {}: {e}", path.display())),
    })?;
    parse_model_bytes(&bytes).map_err(|errs| usage(render_errors(&path.display().to_string(), &errs).trim_end().to_string()))
}

/// Collects `--nm/--nc/--bcap/--fix` into one map.
fn pins(model: &Model, args: &InstanceArgs) -> Result<BTreeMap<String, i64>, CliError> {
    let mut out = BTreeMap::new();
    for (name, v) in [("nm", args.nm), ("nc", args.nc), ("bcap", args.bcap)] {
        if let Some(v) = v {
            if model.symbol_kind(name).is_none() {
                return Err(usage(format!("--{name} given but model `{}` has no `{name}`", model.name)));
            }
            out.insert(name.to_string(), v);
        }
    }
    for fix in &args.fix {
        let (name, value) = fix.split_once('=').ok_or_else(|| usage(format!("--fix expects NAME=VALUE, got `{fix}`")))?;
        let value: i64 = value.trim().parse().map_err(|_| usage(format!("--fix {fix}: `{value}` is not an integer")))?;
        out.insert(name.trim().to_string(), value);
    }
    Ok(out)
}

fn constraints(args: &InstanceArgs) -> Result<Vec<Expr>, CliError> {
    args.constrain
        .iter()
        .map(|src| {
            parse_expr(src).map_err(|errs| usage(render_errors("--constrain", &errs).trim_end().to_string()))
        })
        .collect()
}

/// Applies pins and constraints to `config`; returns the pins too.
fn configure(
    model: &Model,
    config: EncodingConfig,
    args: &InstanceArgs,
) -> Result<(EncodingConfig, BTreeMap<String, i64>), CliError> {
    let pins = pins(model, args)?;
    let mut config = config.pin_all(model, &pins).map_err(|e| usage(e.to_string()))?;
    config.extra_constraints.extend(constraints(args)?);
    Ok((config, pins))
}

fn solver_config(args: &SolverArgs) -> Result<SolverConfig, CliError> {
    if !(args.timeout.is_finite() && args.timeout > 0.0) {
        return Err(usage("--timeout must be a positive number of seconds"));
    }
    let mut config = SolverConfig::locate(args.solver.as_deref()).with_timeout(Duration::from_secs_f64(args.timeout));
    config.keep_scripts = args.keep_scripts;
    Ok(config)
}

fn base_report(model: &Model, path: &Path, config: &EncodingConfig, pins: &BTreeMap<String, i64>) -> RunReport {
    let mut r = RunReport::new(&model.name, config.property.to_string());
    r.source = Some(path.display().to_string());
    r.mode = config.pfs_mode;
    r.depth = config.depth_bound;
    r.instance = pins.clone();
    r.constraints = config.extra_constraints.iter().map(serialize_expr).collect();
    // equality pins on state fields already show up under `instance`
    r.constraints.retain(|c| !pins.iter().any(|(k, v)| *c == format!("(= {k} {v})")));
    r
}

fn fill_verdict(r: &mut RunReport, v: &Verdict) {
    r.outcome = v.outcome.into();
    r.wall_time_ms = v.wall_time.as_secs_f64() * 1000.0;
    r.solver = Some(v.solver_identity.clone());
    r.stats = v.stats.clone();
    r.script = v.script_path.as_ref().map(|p| p.display().to_string());
    if v.outcome == Outcome::Unknown {
        r.note = v.reason.clone().or_else(|| Some("solver gave no reason".into()));
    }
}

/// Decodes and independently checks a sat answer. VFS witnesses must be
/// valid and final; PFS witnesses must replay to a final state.
fn check_witness(model: &Model, script: &SmtScript, v: &Verdict, r: &mut RunReport) -> Result<Option<Plan>, CliError> {
    let w: Witness = parse_witness(v, script).map_err(|e| CliError::Mismatch(format!("cannot decode witness: {e}")))?;
    let inst_values = w.instance(model);
    let inst = Instance { bindings: inst_values.clone(), pins: BTreeMap::new() };
    if inst_values.iter().any(|(k, _)| !r.instance.contains_key(k)) {
        r.witness_instance = Some(inst_values.0.clone());
    }
    match script.config.property {
        Property::Vfs => {
            let s = w.state_at(model, 0).ok_or_else(|| CliError::Mismatch("witness lacks a state".into()))?;
            r.witness_state = Some(s.to_map(model));
            let ok = is_valid(model, &inst, &s).and_then(|a| Ok(a && is_final(model, &inst, &s)?));
            match ok {
                Ok(true) => Ok(None),
                Ok(false) => Err(CliError::Mismatch(format!("witness state {s} is not valid and final"))),
                Err(e) => Err(CliError::Mismatch(format!("witness state {s} cannot be evaluated: {e}"))),
            }
        }
        Property::Pfs => {
            let plan = w.plan(model).ok_or_else(|| CliError::Mismatch("witness lacks a complete plan".into()))?;
            r.witness_state = Some(plan.initial.to_map(model));
            let end = replay_plan(model, &inst, &plan.initial, &plan)
                .map_err(|e| CliError::Mismatch(format!("witness plan does not replay: {e}")))?;
            if !is_final(model, &inst, &end).unwrap_or(false) {
                return Err(CliError::Mismatch(format!("witness plan ends in non-final state {end}")));
            }
            r.set_plan(&plan);
            Ok(Some(plan))
        }
    }
}

fn cmd_check(
    path: &Path,
    config: EncodingConfig,
    inst_args: &InstanceArgs,
    solver_args: &SolverArgs,
    with_oracle: bool,
    output: OutputArgs,
) -> Result<u8, CliError> {
    let model = load_model(path)?;
    let (config, pins) = configure(&model, config, inst_args)?;
    let script = encode(&model, &config).map_err(|e| usage(e.to_string()))?;
    let solver = solver_config(solver_args)?;
    let verdict = run_solver(&script, &solver)?;
    let mut report = base_report(&model, path, &config, &pins);
    fill_verdict(&mut report, &verdict);

    let mut failure = None;
    if verdict.outcome == Outcome::Sat {
        if let Err(e) = check_witness(&model, &script, &verdict, &mut report) {
            failure = Some(e);
        }
    }
    if let Some(other) = &solver_args.cross_solver {
        let second = run_solver(&script, &SolverConfig { executable: other.clone(), ..SolverConfig::locate(Some(other)) })?;
        match cross_check(&verdict, &second) {
            Ok(()) => {
                report.note = Some(format!("{} answers {}", second.solver_identity, second.outcome));
            }
            Err(e) => failure = failure.or(Some(CliError::Mismatch(e.to_string()))),
        }
    }
    if with_oracle && failure.is_none() {
        if let Some(e) = oracle_cross_check(&model, &config, &pins, &mut report) {
            failure = Some(e);
        }
    }
    emit(&[report.clone()], output);
    match failure {
        Some(e) => Err(e),
        None => Ok(exit_for(report.outcome)),
    }
}

/// Compares a solver verdict with brute force. Returns an error only on a
/// definite contradiction.
fn oracle_cross_check(model: &Model, config: &EncodingConfig, pins: &BTreeMap<String, i64>, r: &mut RunReport) -> Option<CliError> {
    let inst = match Instance::new(model, pins) {
        Ok(i) => i,
        Err(e) => {
            r.oracle = Some(format!("skipped: {e}"));
            return None;
        }
    };
    if !config.extra_constraints.iter().all(|c| pins_imply(c, pins)) {
        r.oracle = Some("skipped: extra constraints are not plain pins".into());
        return None;
    }
    match config.property {
        Property::Vfs => {
            let top = pins.values().copied().max().unwrap_or(0).max(2);
            match enumerate_vfs(model, &inst, &vec![0..=top; model.state_fields.len()]) {
                Ok(Some(s)) if r.outcome == ReportOutcome::Unsat => {
                    r.oracle = Some(format!("disagrees: state {s} is valid and final"));
                    Some(CliError::Mismatch(format!("oracle found valid final state {s} but the solver says unsat")))
                }
                Ok(Some(s)) => {
                    r.oracle = Some(format!("agrees: state {s} is valid and final"));
                    None
                }
                Ok(None) => {
                    r.oracle = Some(format!("no valid final state with fields in 0..={top}"));
                    None
                }
                Err(e) => {
                    r.oracle = Some(format!("failed: {e}"));
                    None
                }
            }
        }
        Property::Pfs => {
            let depth = config.depth_bound.unwrap_or(DEFAULT_DEPTH);
            let found = initial_states(model, &inst, None).and_then(|starts| {
                let domain = default_param_domain(model, &inst, &starts);
                bfs_with_cap(model, &inst, &domain, depth, DEFAULT_NODE_CAP)
            });
            let (text, oracle_sat) = match found {
                Ok(Reachability::Found(p)) => (format!("shortest plan has {} steps", p.len()), true),
                Ok(Reachability::Exhausted { depth, explored }) => {
                    (format!("no plan within {depth} steps ({explored} states explored)"), false)
                }
                Err(e) => {
                    r.oracle = Some(format!("failed: {e}"));
                    return None;
                }
            };
            let solver_sat = match r.outcome {
                ReportOutcome::Sat => true,
                ReportOutcome::Unsat => false,
                _ => {
                    r.oracle = Some(text);
                    return None;
                }
            };
            if solver_sat == oracle_sat {
                r.oracle = Some(format!("agrees: {text}"));
                None
            } else {
                r.oracle = Some(format!("disagrees: {text}"));
                Some(CliError::Mismatch(format!("oracle disagrees with the solver: {text}")))
            }
        }
    }
}

/// Whether `c` is one of the equality constraints produced by pinning.
fn pins_imply(c: &Expr, pins: &BTreeMap<String, i64>) -> bool {
    match c {
        Expr::Eq(a, b) => match (a.as_ref(), b.as_ref()) {
            (Expr::Sym(s), Expr::Int(v)) | (Expr::Int(v), Expr::Sym(s)) => pins.get(s) == Some(v),
            _ => false,
        },
        _ => false,
    }
}

fn cmd_plan(path: &Path, max_depth: u32, inst_args: &InstanceArgs, solver_args: &SolverArgs, output: OutputArgs) -> Result<u8, CliError> {
    let model = load_model(path)?;
    let pins = pins(&model, inst_args)?;
    // the replay check needs concrete instance values
    Instance::new(&model, &pins).map_err(|e| usage(format!("plan needs a fully pinned instance: {e}")))?;
    let solver = solver_config(solver_args)?;
    let started = Instant::now();
    let mut stats_total = 0.0;
    for depth in 0..=max_depth {
        let (config, _) = configure(&model, EncodingConfig::pfs(PfsMode::Unrolled, depth), inst_args)?;
        let script = encode(&model, &config).map_err(|e| usage(e.to_string()))?;
        let verdict = run_solver(&script, &solver)?;
        stats_total += verdict.stats.get("rlimit-count").copied().unwrap_or(0.0);
        let mut report = base_report(&model, path, &config, &pins);
        fill_verdict(&mut report, &verdict);
        report.wall_time_ms = started.elapsed().as_secs_f64() * 1000.0;
        match verdict.outcome {
            Outcome::Unsat => continue,
            Outcome::Unknown => {
                report.note = Some(format!("undecided at depth {depth}: {}", report.note.clone().unwrap_or_default()));
                emit(&[report], output);
                return Ok(EXIT_UNKNOWN);
            }
            Outcome::Sat => {
                let plan = check_witness(&model, &script, &verdict, &mut report)?;
                let len = plan.map_or(0, |p| p.len());
                report.note = Some(format!("shortest plan: {len} steps, replay-verified"));
                emit(&[report], output);
                return Ok(EXIT_SAT);
            }
        }
    }
    let (config, _) = configure(&model, EncodingConfig::pfs(PfsMode::Unrolled, max_depth), inst_args)?;
    let mut report = base_report(&model, path, &config, &pins);
    report.outcome = ReportOutcome::Unsat;
    report.wall_time_ms = started.elapsed().as_secs_f64() * 1000.0;
    report.solver = Some(solver.executable.display().to_string());
    if stats_total > 0.0 {
        report.stats.insert("rlimit-count".into(), stats_total);
    }
    report.note = Some(format!("unsat within bound: no plan of at most {max_depth} steps"));
    emit(&[report], output);
    Ok(EXIT_UNSAT)
}

struct OracleOpts {
    depth: u32,
    state_max: Option<i64>,
    param_max: Option<i64>,
    node_cap: usize,
}

fn cmd_oracle(path: &Path, opts: &OracleOpts, compare: Option<&Path>, inst_args: &InstanceArgs, output: OutputArgs) -> Result<u8, CliError> {
    let model = load_model(path)?;
    if !inst_args.constrain.is_empty() {
        return Err(usage("the oracle takes pins (--fix, --nm, ...), not --constrain"));
    }
    let pins = pins(&model, inst_args)?;
    let inst = Instance::new(&model, &pins).map_err(|e| usage(e.to_string()))?;
    let budget = |e: OracleError| match e {
        OracleError::BudgetExceeded(_) | OracleError::DomainTooLarge(_) => CliError::Budget(e.to_string()),
        other => usage(other.to_string()),
    };
    let started = Instant::now();

    let top = opts.state_max.unwrap_or_else(|| pins.values().copied().max().unwrap_or(0).max(2));
    let vfs = enumerate_vfs(&model, &inst, &vec![0..=top; model.state_fields.len()]).map_err(budget)?;
    let starts = initial_states(&model, &inst, None).map_err(budget)?;
    let domain = match opts.param_max {
        Some(m) => vec![0..=m; model.param_fields.len()],
        None => default_param_domain(&model, &inst, &starts),
    };
    let reach = bfs_with_cap(&model, &inst, &domain, opts.depth, opts.node_cap).map_err(budget)?;

    let mut vfs_report = RunReport::new(&model.name, "vfs");
    vfs_report.source = Some(path.display().to_string());
    vfs_report.instance = pins.clone();
    vfs_report.solver = Some("oracle".into());
    match &vfs {
        Some(s) => {
            vfs_report.outcome = ReportOutcome::Sat;
            vfs_report.witness_state = Some(s.to_map(&model));
        }
        None => {
            vfs_report.outcome = ReportOutcome::Unsat;
            vfs_report.note = Some(format!("no valid final state with fields in 0..={top}"));
        }
    }
    let mut pfs_report = RunReport::new(&model.name, "pfs");
    pfs_report.source = Some(path.display().to_string());
    pfs_report.instance = pins.clone();
    pfs_report.depth = Some(opts.depth);
    pfs_report.solver = Some("oracle".into());
    match &reach {
        Reachability::Found(plan) => {
            pfs_report.outcome = ReportOutcome::Sat;
            pfs_report.set_plan(plan);
            pfs_report.witness_state = Some(plan.initial.to_map(&model));
            pfs_report.note = Some(format!("shortest plan: {} steps", plan.len()));
        }
        Reachability::Exhausted { depth, explored } => {
            pfs_report.outcome = ReportOutcome::Unsat;
            pfs_report.note = Some(format!("exhausted: no plan within {depth} steps, {explored} states explored"));
        }
    }
    let elapsed = started.elapsed().as_secs_f64() * 1000.0;
    vfs_report.wall_time_ms = elapsed;
    pfs_report.wall_time_ms = elapsed;

    let mut disagreements = Vec::new();
    if let Some(file) = compare {
        let text = std::fs::read_to_string(file).map_err(|e| usage(format!("cannot read {}: {e}", file.display())))?;
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let prior: RunReport =
                serde_json::from_str(line).map_err(|e| usage(format!("{}:{}: not a report record: {e}", file.display(), i + 1)))?;
            if prior.model != model.name || prior.instance != pins {
                continue;
            }
            let truth = match (prior.property.as_str(), prior.outcome) {
                (_, ReportOutcome::Unknown | ReportOutcome::Error) => continue,
                // an empty VFS box proves nothing about unbounded states
                ("vfs", _) if vfs.is_none() => continue,
                ("vfs", _) => ReportOutcome::Sat,
                ("pfs", _) => {
                    let bound = prior.depth.unwrap_or(DEFAULT_DEPTH);
                    if bound > opts.depth && reach.plan().is_none() {
                        continue; // the oracle searched less deeply than the solver
                    }
                    if reach.plan().is_some_and(|p| p.len() as u32 <= bound) {
                        ReportOutcome::Sat
                    } else {
                        ReportOutcome::Unsat
                    }
                }
                _ => continue,
            };
            if truth != prior.outcome {
                disagreements.push(format!("line {}: {} says {}, oracle says {}", i + 1, prior.property, prior.outcome.as_str(), truth.as_str()));
            }
        }
        let summary = if disagreements.is_empty() { "prior reports agree".to_string() } else { disagreements.join("; ") };
        pfs_report.oracle = Some(summary);
    }
    emit(&[vfs_report, pfs_report.clone()], output);
    if !disagreements.is_empty() {
        return Err(CliError::Mismatch(format!("{} disagreement(s) with {}", disagreements.len(), compare.unwrap().display())));
    }
    Ok(exit_for(pfs_report.outcome))
}

struct BenchJob {
    path: PathBuf,
    model: Result<Model, String>,
    property: Property,
}

fn cmd_bench(
    dir: &Path,
    depth: u32,
    mode: PfsMode,
    jobs: Option<usize>,
    pin: bool,
    solver_args: &SolverArgs,
    output: OutputArgs,
) -> Result<u8, CliError> {
    let entries = std::fs::read_dir(dir).map_err(|e| usage(format!("cannot read directory {}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "tsm"))
        .collect();
    files.sort();
    let solver = solver_config(solver_args)?;

    let mut queue = Vec::new();
    for path in files {
        let model = load_model(&path).map_err(|e| e.to_string());
        for property in [Property::Vfs, Property::Pfs] {
            queue.push(BenchJob { path: path.clone(), model: model.clone(), property });
        }
    }
    let results: Mutex<Vec<Option<RunReport>>> = Mutex::new(vec![None; queue.len()]);
    let next = AtomicUsize::new(0);
    let workers = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers.min(queue.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(job) = queue.get(i) else { break };
                let report = bench_row(job, depth, mode, pin, &solver);
                results.lock().unwrap()[i] = Some(report);
            });
        }
    });
    let reports: Vec<RunReport> = results.into_inner().unwrap().into_iter().map(|r| r.expect("every job ran")).collect();
    match output.format {
        Format::Text => print!("{}", bench_table(&reports)),
        Format::Records => emit(&reports, output),
    }
    let errored = reports.iter().any(|r| r.outcome == ReportOutcome::Error);
    Ok(if errored { EXIT_USAGE } else { EXIT_SAT })
}

fn bench_row(job: &BenchJob, depth: u32, mode: PfsMode, pin: bool, solver: &SolverConfig) -> RunReport {
    let name = job.path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let model = match &job.model {
        Ok(m) => m,
        Err(e) => {
            let mut r = RunReport::new(name, job.property.to_string());
            r.source = Some(job.path.display().to_string());
            r.outcome = ReportOutcome::Error;
            r.error = Some(e.lines().next().unwrap_or_default().to_string());
            return r;
        }
    };
    let mut config = match job.property {
        Property::Vfs => EncodingConfig::vfs(),
        Property::Pfs => EncodingConfig::pfs(mode, depth),
    };
    for sym in BENCH_LOWER_BOUNDS {
        if matches!(model.symbol_kind(sym), Some(SymbolKind::Instance | SymbolKind::State)) {
            config.extra_constraints.push(Expr::lt(Expr::Int(2), Expr::sym(sym)));
        }
    }
    let mut pins = BTreeMap::new();
    if pin && job.property == Property::Pfs {
        for (sym, v) in BENCH_PINS {
            if model.symbol_kind(sym).is_some() {
                pins.insert(sym.to_string(), v);
            }
        }
    }
    let mut report = RunReport::new(&model.name, job.property.to_string());
    report.source = Some(job.path.display().to_string());
    let config = match config.pin_all(model, &pins) {
        Ok(c) => c,
        Err(e) => {
            report.outcome = ReportOutcome::Error;
            report.error = Some(e.to_string());
            return report;
        }
    };
    report = base_report(model, &job.path, &config, &pins);
    let script = match encode(model, &config) {
        Ok(s) => s,
        Err(e) => {
            report.outcome = ReportOutcome::Error;
            report.error = Some(e.to_string());
            return report;
        }
    };
    match run_solver(&script, solver) {
        Ok(v) => {
            fill_verdict(&mut report, &v);
            if v.outcome == Outcome::Sat {
                if let Err(e) = check_witness(model, &script, &v, &mut report) {
                    report.outcome = ReportOutcome::Error;
                    report.error = Some(e.to_string());
                }
            }
        }
        Err(e) => {
            report.outcome = ReportOutcome::Error;
            report.error = Some(e.to_string());
        }
    }
    report
}

fn cmd_doctor(solver: Option<&Path>, cross: Option<&Path>) -> Result<u8, CliError> {
    let mut failed = false;
    for (label, path) in std::iter::once(("solver", solver)).chain(cross.map(|c| ("cross-solver", Some(c)))) {
        let config = SolverConfig::locate(path);
        match probe_solver(&config) {
            Ok(version) => println!("{label}: {} ({version})", config.executable.display()),
            Err(e) => {
                println!("{label}: {} unusable: {e}", config.executable.display());
                failed = true;
            }
        }
    }
    if failed {
        return Err(CliError::Solver(SolverError::Protocol { excerpt: "solver probe failed".into(), script: None }));
    }
    Ok(EXIT_SAT)
}

fn emit(reports: &[RunReport], output: OutputArgs) {
    let mut stdout = std::io::stdout().lock();
    for r in reports {
        let text = match output.format {
            Format::Text => r.to_text(),
            Format::Records => r.to_record() + "\n",
        };
        let _ = stdout.write_all(text.as_bytes());
    }
}
