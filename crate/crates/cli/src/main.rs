//! `modelgate`: check planning models for a valid final state and for a
//! bounded path to one, using an external SMT solver.
//!
//! Exit status: 0 sat, 1 unsat, 2 unknown; anything above 2 is a tool error.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use modelgate_core::encoder::{PfsMode, Property, DEFAULT_DEPTH};

#[derive(Parser)]
#[command(name = "modelgate", version, about = "Validate transition-system planning models with an SMT solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide VFS or PFS for a model and report the verdict.
    Check {
        model: PathBuf,
        #[arg(long, value_enum)]
        property: PropertyArg,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Transition bound for PFS [default: 100].
        #[arg(long)]
        depth: Option<u32>,
        /// Also run the brute-force oracle (needs a fully pinned instance for PFS).
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Find a shortest plan by deepening the unrolled PFS query.
    Plan {
        model: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        max_depth: u32,
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Ground truth by breadth-first search and state enumeration.
    Oracle {
        model: PathBuf,
        #[arg(long, default_value_t = 30)]
        depth: u32,
        /// Upper end of each field's range when enumerating VFS candidates.
        #[arg(long)]
        state_max: Option<i64>,
        /// Upper end of each parameter's range [default: largest instance value].
        #[arg(long)]
        param_max: Option<i64>,
        #[arg(long)]
        node_cap: Option<usize>,
        /// Records file from `check --format records` to compare against.
        #[arg(long)]
        compare: Option<PathBuf>,
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the VFS/PFS matrix over every `.tsm` file in a directory.
    Bench {
        dir: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: u32,
        #[arg(long, value_enum, default_value = "unrolled")]
        mode: ModeArg,
        /// Concurrent solver processes [default: available cores].
        #[arg(long)]
        jobs: Option<usize>,
        /// Do not pin PFS rows to nm = nc = bcap = 3.
        #[arg(long)]
        unpinned: bool,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print the generated SMT-LIB script.
    Emit {
        model: PathBuf,
        #[arg(long, value_enum)]
        property: PropertyArg,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        depth: Option<u32>,
        #[command(flatten)]
        instance: InstanceArgs,
    },
    /// Check that the solver can be launched.
    Doctor {
        #[arg(long)]
        solver: Option<PathBuf>,
        #[arg(long)]
        cross_solver: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Default)]
struct InstanceArgs {
    /// Shorthand for --fix nm=N.
    #[arg(long)]
    nm: Option<i64>,
    /// Shorthand for --fix nc=N.
    #[arg(long)]
    nc: Option<i64>,
    /// Shorthand for --fix bcap=N.
    #[arg(long)]
    bcap: Option<i64>,
    /// Pin an instance symbol or initial state field.
    #[arg(long = "fix", value_name = "NAME=VALUE")]
    fix: Vec<String>,
    /// Extra constraint over instance symbols and the first state, e.g. "(< 2 nm)".
    #[arg(long = "constrain", value_name = "EXPR")]
    constrain: Vec<String>,
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// Solver executable [default: $MODELGATE_SOLVER, then z3].
    #[arg(long)]
    solver: Option<PathBuf>,
    /// Per-query timeout in seconds.
    #[arg(long, default_value_t = 300.0)]
    timeout: f64,
    /// Keep generated scripts on disk.
    #[arg(long)]
    keep_scripts: bool,
    /// Second solver whose sat/unsat answer must agree.
    #[arg(long)]
    cross_solver: Option<PathBuf>,
}

#[derive(Args, Clone, Copy)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Format {
    Text,
    /// One JSON object per line.
    Records,
}

#[derive(ValueEnum, Clone, Copy)]
enum PropertyArg {
    Vfs,
    Pfs,
}

impl From<PropertyArg> for Property {
    fn from(p: PropertyArg) -> Self {
        match p {
            PropertyArg::Vfs => Property::Vfs,
            PropertyArg::Pfs => Property::Pfs,
        }
    }
}

#[derive(ValueEnum, Clone, Copy)]
enum ModeArg {
    Recursive,
    Unrolled,
}

impl From<ModeArg> for PfsMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Recursive => PfsMode::Recursive,
            ModeArg::Unrolled => PfsMode::Unrolled,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(commands::EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
