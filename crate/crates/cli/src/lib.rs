//! Batch front end for `vbs-core`: load a model file, test and cover its
//! hypergraph, propagate, persist a set-chain and answer queries.
//!
//! Exit codes: 0 success, 2 bad input, 3 operation unsupported by the
//! instance, 4 broken invariant (including failed verification).

pub mod commands;
pub mod error;
pub mod format;
pub mod number;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use commands::{cmd_chain, cmd_chain_verify, cmd_check, cmd_marginal, cmd_query, Options, DEFAULT_TOLERANCE};
pub use error::{CliError, CliResult, FormatError};
pub use format::{parse_chain, parse_model, write_chain, write_model, ChainFile, ModelFile};
pub use number::fmt_num;

#[derive(Debug, Parser)]
#[command(name = "vbs", version, about = "Local computation in valuation-based systems")]
pub struct Cli {
    /// Tree node used as root for propagation and the chain numbering.
    #[arg(long, global = true, value_name = "NODE")]
    pub root: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run Graham's test and print the reduction trace.
    Check { file: PathBuf },
    /// Print the marginal of a node or of variables inside one node.
    Marginal {
        model: PathBuf,
        vars: Vec<String>,
        #[arg(long)]
        node: Option<usize>,
    },
    /// Evaluate a query such as `(a=1 & b=0) | !c=1`.
    Query {
        model: PathBuf,
        query: String,
        /// Show the plan and operation counts.
        #[arg(long)]
        stats: bool,
    },
    /// Build the set-chain and write it to a file.
    Chain {
        model: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Check a chain (rebuilt, or loaded with --chain) against the joint.
    ChainVerify {
        model: PathBuf,
        #[arg(long, value_name = "FILE")]
        chain: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
    },
}

/// What a run printed and how it ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let (stdout, stderr) = if code == 0 { (text, String::new()) } else { (String::new(), text) };
            return Outcome { code, stdout, stderr };
        }
    };
    match execute(&cli) {
        Ok(stdout) => Outcome {
            code: 0,
            stdout,
            stderr: String::new(),
        },
        Err(e) => {
            let stdout = match &e {
                CliError::Deviation { report, .. } => report.clone(),
                _ => String::new(),
            };
            Outcome {
                code: e.exit_code(),
                stdout,
                stderr: format!("error: {e}\n"),
            }
        }
    }
}

pub fn execute(cli: &Cli) -> CliResult<String> {
    let opts = Options { root: cli.root };
    match &cli.command {
        Command::Check { file } => within(file, cmd_check(&read(file)?)),
        Command::Marginal { model, vars, node } => within(model, cmd_marginal(&read(model)?, vars, *node, opts)),
        Command::Query { model, query, stats } => within(model, cmd_query(&read(model)?, query, *stats, opts)),
        Command::Chain { model, out } => {
            let (text, summary) = within(model, cmd_chain(&read(model)?, opts))?;
            std::fs::write(out, text).map_err(|source| CliError::Io {
                path: out.clone(),
                source,
            })?;
            Ok(format!("{summary}wrote {}\n", out.display()))
        }
        Command::ChainVerify {
            model,
            chain,
            tolerance,
        } => {
            let chain_text = chain.as_deref().map(read).transpose()?;
            let result = cmd_chain_verify(&read(model)?, chain_text.as_deref(), *tolerance, opts);
            match (chain, result) {
                (Some(c), Err(CliError::Format(f))) => Err(CliError::Usage(format!("{}: {f}", c.display()))),
                (_, r) => within(model, r),
            }
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Prefixes format errors with the file they came from.
fn within<T>(path: &Path, r: CliResult<T>) -> CliResult<T> {
    r.map_err(|e| match e {
        CliError::Format(f) => CliError::Usage(format!("{}: {f}", path.display())),
        other => other,
    })
}
