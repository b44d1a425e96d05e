//! Command-line front end: one JSON problem file in, one report out.

mod commands;
pub mod problem;
pub mod report;

use clap::{Args, Parser, Subcommand};
use report::{error_value, exit_code_of, render_text, EXIT_INPUT};
use serde_json::Value;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Debug, Parser)]
#[command(name = "linf-deform", version, about = "Derived L∞ brackets and Maurer-Cartan checks for deformation problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum CommandKind {
    Validate,
    Residual,
    Solve,
    Brackets,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the axioms of the structures and of the V-data built from them.
    Validate { file: PathBuf },
    /// Maurer-Cartan residual of the candidate, with the direct oracle alongside.
    Residual { file: PathBuf },
    /// Newton search for a Maurer-Cartan element, verified exactly.
    Solve { file: PathBuf },
    /// Bracket tables on the abelian part.
    Brackets { file: PathBuf },
}

impl Command {
    fn split(&self) -> (CommandKind, &PathBuf) {
        match self {
            Command::Validate { file } => (CommandKind::Validate, file),
            Command::Residual { file } => (CommandKind::Residual, file),
            Command::Solve { file } => (CommandKind::Solve, file),
            Command::Brackets { file } => (CommandKind::Brackets, file),
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// Word-length cutoff for coderivation models.
    #[arg(long, global = true)]
    pub cutoff: Option<usize>,
    /// Largest bracket arity to tabulate or check.
    #[arg(long, global = true)]
    pub arity: Option<usize>,
    /// Newton residual tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
    /// Seed for Newton restarts.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub restarts: Option<usize>,
    /// Compact JSON output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Indented JSON output.
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Elapsed time on stderr; stdout is unaffected.
    #[arg(long, global = true)]
    pub timing: bool,
}

/// A finished run: report value and exit code.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Value,
    pub code: i32,
}

fn name(c: CommandKind) -> &'static str {
    match c {
        CommandKind::Validate => "validate",
        CommandKind::Residual => "residual",
        CommandKind::Solve => "solve",
        CommandKind::Brackets => "brackets",
    }
}

/// Runs one command on the text of a problem file.
pub fn run(command: CommandKind, text: &str, opts: &Options) -> Outcome {
    let (p, raw) = match problem::parse(text) {
        Ok(x) => x,
        Err(e) => return Outcome { report: error_value(name(command), None, &e), code: EXIT_INPUT },
    };
    let result = match command {
        CommandKind::Validate => commands::validate(&p, opts),
        CommandKind::Residual => commands::residual(&p, opts),
        CommandKind::Solve => commands::solve(&p, &raw, opts),
        CommandKind::Brackets => commands::brackets(&p, opts),
    };
    match result {
        Ok(r) => {
            let code = r.code();
            Outcome { report: r.into_value(), code }
        }
        Err(e) => Outcome { report: error_value(name(command), Some(p.kind()), &e), code: exit_code_of(&e) },
    }
}

pub fn render(v: &Value, opts: &Options) -> String {
    if opts.pretty {
        serde_json::to_string_pretty(v).expect("serializable") + "\n"
    } else if opts.json {
        serde_json::to_string(v).expect("serializable") + "\n"
    } else {
        render_text(v)
    }
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { 0 };
        }
    };
    let (kind, path) = cli.command.split();
    let start = Instant::now();
    let out = match std::fs::read_to_string(path) {
        Ok(text) => run(kind, &text, &cli.options),
        Err(e) => {
            let err = crate::Error::Input(format!("{}: {e}", path.display()));
            Outcome { report: error_value(name(kind), None, &err), code: EXIT_INPUT }
        }
    };
    print!("{}", render(&out.report, &cli.options));
    if cli.options.timing {
        eprintln!("elapsed: {:.3} s", start.elapsed().as_secs_f64());
    }
    out.code
}
