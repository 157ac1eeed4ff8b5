//! External solver process management.
//!
//! Every query runs in its own child process: the script is written to a
//! temporary file, passed as the last argument, and the solver's standard
//! output is scanned for a status token, a model and statistics.

pub mod sexp;
mod witness;

use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use wait_timeout::ChildExt;

use crate::encoder::SmtScript;
use sexp::{read_items, Node};

pub use witness::{parse_witness, Witness, WitnessError};

/// Environment variable naming the solver executable.
pub const SOLVER_ENV: &str = "MODELGATE_SOLVER";
pub const DEFAULT_SOLVER: &str = "z3";
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(300);

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub executable: PathBuf,
    pub extra_args: Vec<String>,
    pub timeout: Duration,
    /// Advisory soft memory limit in MB; recorded, not enforced.
    pub memory_note: Option<u64>,
    /// Keep script files after successful runs too.
    pub keep_scripts: bool,
}

impl SolverConfig {
    pub fn new(executable: impl Into<PathBuf>) -> Self {
        SolverConfig {
            executable: executable.into(),
            extra_args: Vec::new(),
            timeout: DEFAULT_TIMEOUT,
            memory_note: None,
            keep_scripts: false,
        }
    }

    /// Solver chosen by an explicit path, then `MODELGATE_SOLVER`, then `z3`
    /// on the search path. Z3 additionally gets `-st` so statistics are printed.
    pub fn locate(explicit: Option<&Path>) -> Self {
        let exe = match explicit {
            Some(p) => p.to_path_buf(),
            None => std::env::var_os(SOLVER_ENV)
                .filter(|v| !v.is_empty())
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_SOLVER)),
        };
        let mut config = SolverConfig::new(exe);
        if config.is_z3() {
            config.extra_args.push("-st".into());
        }
        config
    }

    fn is_z3(&self) -> bool {
        self.executable.file_stem().is_some_and(|s| s == "z3")
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Sat,
    Unsat,
    Unknown,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Outcome::Sat => "sat",
            Outcome::Unsat => "unsat",
            Outcome::Unknown => "unknown",
        })
    }
}

/// Stats key set to 1 when the run was cut off by the timeout.
pub const TIMEOUT_STAT: &str = "timeout";

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub outcome: Outcome,
    /// `get-model` output, present only for sat answers to scripts that ask for it.
    pub raw_model: Option<String>,
    pub stats: BTreeMap<String, f64>,
    pub wall_time: Duration,
    pub solver_identity: String,
    /// Solver-provided explanation for unknown answers, or error lines.
    pub reason: Option<String>,
    /// Where the script was kept, if it was.
    pub script_path: Option<PathBuf>,
}

impl Verdict {
    pub fn timed_out(&self) -> bool {
        self.stats.get(TIMEOUT_STAT).is_some_and(|v| *v > 0.0)
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("cannot launch solver `{path}`: {source}")]
    Launch { path: PathBuf, source: std::io::Error },
    #[error("solver output has no sat/unsat/unknown status: {excerpt}")]
    Protocol { excerpt: String, script: Option<PathBuf> },
    #[error("solver exited with status {code}: {diagnostics}")]
    NonzeroExit { code: i32, diagnostics: String, script: Option<PathBuf> },
    #[error("i/o error while running solver: {0}")]
    Io(#[from] std::io::Error),
    #[error("solvers disagree: {first} says {first_outcome}, {second} says {second_outcome}")]
    Disagreement { first: String, first_outcome: Outcome, second: String, second_outcome: Outcome },
}

struct RawRun {
    stdout: String,
    stderr: String,
    exit: Option<i32>,
    timed_out: bool,
    elapsed: Duration,
}

fn run_process(exe: &Path, args: &[String], timeout: Duration) -> Result<RawRun, SolverError> {
    if exe.as_os_str().is_empty() {
        return Err(SolverError::Launch {
            path: exe.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "empty solver path"),
        });
    }
    let start = Instant::now();
    let mut child = Command::new(exe)
        .args(args)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|source| SolverError::Launch { path: exe.to_path_buf(), source })?;

    let mut out_pipe = child.stdout.take().expect("piped stdout");
    let mut err_pipe = child.stderr.take().expect("piped stderr");
    let out_reader = std::thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = out_pipe.read_to_end(&mut buf);
        buf
    });
    let err_reader = std::thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = err_pipe.read_to_end(&mut buf);
        buf
    });

    let (status, timed_out) = match child.wait_timeout(timeout)? {
        Some(status) => (Some(status), false),
        None => {
            let _ = child.kill();
            (child.wait().ok(), true)
        }
    };
    let elapsed = start.elapsed();
    let stdout = String::from_utf8_lossy(&out_reader.join().unwrap_or_default()).into_owned();
    let stderr = String::from_utf8_lossy(&err_reader.join().unwrap_or_default()).into_owned();
    Ok(RawRun { stdout, stderr, exit: status.and_then(|s| s.code()), timed_out, elapsed })
}

/// Runs the solver on `script` and interprets its answer.
pub fn run_solver(script: &SmtScript, config: &SolverConfig) -> Result<Verdict, SolverError> {
    let dir = tempfile::Builder::new().prefix("modelgate-").tempdir()?;
    let path = dir.path().join("query.smt2");
    std::fs::write(&path, &script.text)?;
    let mut args = config.extra_args.clone();
    args.push(path.to_string_lossy().into_owned());

    let identity = config.executable.display().to_string();
    let result = run_process(&config.executable, &args, config.timeout).and_then(|run| {
        if run.timed_out {
            let mut stats = BTreeMap::new();
            stats.insert(TIMEOUT_STAT.to_string(), 1.0);
            return Ok(Verdict {
                outcome: Outcome::Unknown,
                raw_model: None,
                stats,
                wall_time: run.elapsed,
                solver_identity: identity,
                reason: Some(format!("timeout after {:.3}s", config.timeout.as_secs_f64())),
                script_path: None,
            });
        }
        interpret(&run, script, identity)
    });

    // scripts stay on disk when anything went wrong, or when asked to
    let failed = !matches!(&result, Ok(v) if !v.timed_out());
    if !(config.keep_scripts || failed) {
        return result;
    }
    let kept = dir.keep().join("query.smt2");
    match result {
        Ok(v) => Ok(Verdict { script_path: Some(kept), ..v }),
        Err(SolverError::Protocol { excerpt, .. }) => Err(SolverError::Protocol { excerpt, script: Some(kept) }),
        Err(SolverError::NonzeroExit { code, diagnostics, .. }) => {
            Err(SolverError::NonzeroExit { code, diagnostics, script: Some(kept) })
        }
        Err(e) => Err(e),
    }
}

fn interpret(run: &RawRun, script: &SmtScript, identity: String) -> Result<Verdict, SolverError> {
    let excerpt = |s: &str| s.chars().take(400).collect::<String>();
    let items = match read_items(&run.stdout) {
        Ok(items) => items,
        Err(_) if run.exit != Some(0) => {
            return Err(SolverError::NonzeroExit {
                code: run.exit.unwrap_or(-1),
                diagnostics: excerpt(&format!("{}{}", run.stderr, run.stdout)),
                script: None,
            })
        }
        Err(e) => return Err(SolverError::Protocol { excerpt: format!("{} ({})", excerpt(&run.stdout), e.message), script: None }),
    };

    let status = items.iter().position(|it| matches!(it.node.atom(), Some("sat" | "unsat" | "unknown")));
    let Some(status) = status else {
        return Err(match run.exit {
            Some(0) => SolverError::Protocol { excerpt: excerpt(&format!("{}{}", run.stdout, run.stderr)), script: None },
            code => SolverError::NonzeroExit {
                code: code.unwrap_or(-1),
                diagnostics: excerpt(&format!("{}{}", run.stderr, run.stdout)),
                script: None,
            },
        });
    };
    let outcome = match items[status].node.atom() {
        Some("sat") => Outcome::Sat,
        Some("unsat") => Outcome::Unsat,
        _ => Outcome::Unknown,
    };

    let mut raw_model = None;
    let mut stats = BTreeMap::new();
    let mut errors = Vec::new();
    for item in &items[status + 1..] {
        match item.node.head() {
            Some("error") => {
                if let Some(Node::Str(msg)) = item.node.list().and_then(|xs| xs.get(1)) {
                    errors.push(msg.clone());
                }
            }
            Some(k) if k.starts_with(':') => parse_stats(&item.node, &mut stats),
            _ if raw_model.is_none() && is_model(&item.node) => {
                raw_model = Some(run.stdout[item.start..item.end].to_string());
            }
            _ => {}
        }
    }
    if outcome != Outcome::Sat || !script.config.produce_model {
        raw_model = None;
    }
    let mut reason = (!errors.is_empty()).then(|| errors.join("; "));
    if outcome == Outcome::Unknown && reason.is_none() && !run.stderr.trim().is_empty() {
        reason = Some(excerpt(run.stderr.trim()));
    }
    Ok(Verdict {
        outcome,
        raw_model,
        stats,
        wall_time: run.elapsed,
        solver_identity: identity,
        reason,
        script_path: None,
    })
}

/// `(model ...)`, `()` or a list of `define-fun`s.
fn is_model(node: &Node) -> bool {
    match node.list() {
        Some([]) => true,
        Some([Node::Atom(m), ..]) => m == "model",
        Some(xs) => xs.iter().all(|x| matches!(x.head(), Some("define-fun" | "define-fun-rec" | "declare-fun"))),
        None => false,
    }
}

fn parse_stats(node: &Node, stats: &mut BTreeMap<String, f64>) {
    let Some(xs) = node.list() else { return };
    for pair in xs.chunks(2) {
        if let [Node::Atom(k), Node::Atom(v)] = pair {
            if let (Some(key), Ok(value)) = (k.strip_prefix(':'), v.parse::<f64>()) {
                stats.insert(key.to_string(), value);
            }
        }
    }
}

/// Asks the solver for its version string.
pub fn probe_solver(config: &SolverConfig) -> Result<String, SolverError> {
    let run = run_process(&config.executable, &["--version".to_string()], Duration::from_secs(10))?;
    let text = format!("{}{}", run.stdout, run.stderr).trim().to_string();
    match run.exit {
        _ if run.timed_out => Err(SolverError::Protocol { excerpt: "no answer to --version".into(), script: None }),
        Some(0) if !text.is_empty() => Ok(text.lines().next().unwrap_or_default().to_string()),
        Some(0) => Err(SolverError::Protocol { excerpt: "empty version output".into(), script: None }),
        code => Err(SolverError::NonzeroExit { code: code.unwrap_or(-1), diagnostics: text, script: None }),
    }
}

/// Sound solvers cannot disagree on sat/unsat; unknown is exempt.
pub fn cross_check(first: &Verdict, second: &Verdict) -> Result<(), SolverError> {
    match (first.outcome, second.outcome) {
        (Outcome::Sat, Outcome::Unsat) | (Outcome::Unsat, Outcome::Sat) => Err(SolverError::Disagreement {
            first: first.solver_identity.clone(),
            first_outcome: first.outcome,
            second: second.solver_identity.clone(),
            second_outcome: second.outcome,
        }),
        _ => Ok(()),
    }
}
