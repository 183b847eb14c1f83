//! Experiment-running layer: instance loading, seeded batch execution and
//! machine-readable reporting around the `orsched-core` solvers.

pub mod report;

use orsched_core::instance::{parse_tsplib, ParseError, ParsedInstance};
use std::fmt;
use std::path::Path;

/// Everything that can go wrong between the command line and a result table.
#[derive(Debug)]
pub enum CliError {
    /// Reading an input file failed.
    Io(std::io::Error),
    /// The instance file is not valid TSPLIB full-matrix input.
    Parse(ParseError),
    /// The requested run configuration is inconsistent.
    Config(String),
    /// A solver refused the request (caps, contract violations).
    Solver(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Io(e) => write!(f, "io: {e}"),
            Self::Parse(e) => write!(f, "parse: {e}"),
            Self::Config(msg) => write!(f, "config: {msg}"),
            Self::Solver(msg) => write!(f, "solver: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        Self::Parse(e)
    }
}

/// Exit code for a failure category, for scripting against the binary.
pub fn exit_code(err: &CliError) -> i32 {
    match err {
        CliError::Io(_) => 3,
        CliError::Parse(_) => 3,
        CliError::Config(_) => 2,
        CliError::Solver(_) => 4,
    }
}

/// Loads and parses a TSPLIB instance file.
pub fn load_instance(path: &Path) -> Result<ParsedInstance, CliError> {
    let text = std::fs::read_to_string(path)?;
    Ok(parse_tsplib(&text)?)
}

/// Parses a whitespace-separated list of `k` 1-based job numbers.
pub fn parse_permutation_1based(tokens: &[&str], k: usize) -> Result<Vec<usize>, CliError> {
    let mut order = Vec::with_capacity(k);
    for tok in tokens {
        let v: usize = tok
            .parse()
            .map_err(|_| CliError::Config(format!("not a job number: {tok:?}")))?;
        if v == 0 || v > k {
            return Err(CliError::Config(format!("job number {v} out of 1..={k}")));
        }
        order.push(v - 1);
    }
    if order.len() != k {
        return Err(CliError::Config(format!(
            "expected {k} job numbers, found {}",
            order.len()
        )));
    }
    let mut seen = vec![false; k];
    for &v in &order {
        if seen[v] {
            return Err(CliError::Config(format!("job {} repeats", v + 1)));
        }
        seen[v] = true;
    }
    Ok(order)
}

/// Formats a 0-based order as the 1-based job list used in all console output.
pub fn format_order_1based(order: &[usize]) -> String {
    let mut out = String::new();
    for (i, &v) in order.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&(v + 1).to_string());
    }
    out
}
