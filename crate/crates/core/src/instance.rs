//! Problem instances, schedules and TSPLIB `FULL_MATRIX` ingestion.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::Weight;

/// A single-machine scheduling instance with sequence-dependent setup times.
///
/// Holds the number of jobs `k`, the `k x k` setup-time matrix (diagonal
/// entries are stored but never read) and optional per-job processing times.
/// Only the setup cost of a schedule is optimized: the makespan differs from
/// it by the constant sum of all processing times.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance<W: Weight> {
    name: String,
    k: usize,
    setup: Vec<W>,
    durations: Option<Vec<W>>,
}

impl<W: Weight> Instance<W> {
    /// Builds an instance from a flat row-major setup matrix.
    pub fn new(
        name: &str,
        k: usize,
        setup: Vec<W>,
        durations: Option<Vec<W>>,
    ) -> Result<Self, InstanceError> {
        if k < 2 {
            return Err(InstanceError::TooFewJobs { k });
        }
        if setup.len() != k * k {
            return Err(InstanceError::BadMatrixShape {
                expected: k * k,
                found: setup.len(),
            });
        }
        for v in 0..k {
            for u in 0..k {
                if v == u {
                    continue;
                }
                let w = setup[v * k + u];
                if !(w.is_finite_value() && w >= W::ZERO) {
                    return Err(InstanceError::InvalidWeight { row: v, col: u });
                }
            }
        }
        if let Some(p) = &durations {
            if p.len() != k {
                return Err(InstanceError::BadMatrixShape {
                    expected: k,
                    found: p.len(),
                });
            }
            for (i, &d) in p.iter().enumerate() {
                if !(d.is_finite_value() && d > W::ZERO) {
                    return Err(InstanceError::InvalidDuration { index: i });
                }
            }
        }
        Ok(Self {
            name: name.to_string(),
            k,
            setup,
            durations,
        })
    }

    /// Builds an instance from nested rows; convenient in tests.
    pub fn from_rows(name: &str, rows: Vec<Vec<W>>) -> Result<Self, InstanceError> {
        let k = rows.len();
        let mut flat = Vec::with_capacity(k * k);
        for row in &rows {
            if row.len() != k {
                return Err(InstanceError::BadMatrixShape {
                    expected: k * k,
                    found: row.len() * k,
                });
            }
            flat.extend_from_slice(row);
        }
        Self::new(name, k, flat, None)
    }

    /// Instance identifier.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of jobs.
    pub fn jobs(&self) -> usize {
        self.k
    }

    /// Setup time incurred when job `u` directly follows job `v`.
    #[inline]
    pub fn setup(&self, v: usize, u: usize) -> W {
        self.setup[v * self.k + u]
    }

    /// Per-job processing times, if the instance defines any.
    pub fn durations(&self) -> Option<&[W]> {
        self.durations.as_deref()
    }

    /// Sum of consecutive setup times along `order`, without validating that
    /// `order` is a permutation. Callers that construct orders themselves use
    /// this fast path; external input goes through [`evaluate_cost`].
    #[inline]
    pub fn path_cost(&self, order: &[usize]) -> W {
        debug_assert_eq!(order.len(), self.k);
        let mut total = W::ZERO;
        for pair in order.windows(2) {
            total += self.setup(pair[0], pair[1]);
        }
        total
    }
}

/// A permutation of the job set together with its cached setup cost.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule<W: Weight> {
    order: Vec<usize>,
    cost: W,
}

impl<W: Weight> Schedule<W> {
    /// Validates `order` as a permutation of `0..k` and caches its cost.
    pub fn new(inst: &Instance<W>, order: Vec<usize>) -> Result<Self, InstanceError> {
        let cost = evaluate_cost(inst, &order)?;
        Ok(Self { order, cost })
    }

    /// Wraps an order whose validity and cost the caller already knows.
    pub(crate) fn from_parts(order: Vec<usize>, cost: W) -> Self {
        Self { order, cost }
    }

    /// Job visiting order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Cached setup cost.
    pub fn cost(&self) -> W {
        self.cost
    }
}

/// Total setup time of `order`, rejecting anything that is not a permutation
/// of the instance's job set.
pub fn evaluate_cost<W: Weight>(inst: &Instance<W>, order: &[usize]) -> Result<W, InstanceError> {
    if !is_permutation(inst.jobs(), order) {
        return Err(InstanceError::NotAPermutation);
    }
    Ok(inst.path_cost(order))
}

pub(crate) fn is_permutation(k: usize, order: &[usize]) -> bool {
    if order.len() != k {
        return false;
    }
    let mut seen = alloc::vec![false; k];
    for &v in order {
        if v >= k || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

/// Construction-time validation failures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InstanceError {
    /// Fewer than two jobs.
    TooFewJobs {
        /// Requested job count.
        k: usize,
    },
    /// The matrix (or duration list) has the wrong number of entries.
    BadMatrixShape {
        /// Entries required.
        expected: usize,
        /// Entries supplied.
        found: usize,
    },
    /// An off-diagonal setup time is negative or not finite.
    InvalidWeight {
        /// Matrix row.
        row: usize,
        /// Matrix column.
        col: usize,
    },
    /// A processing time is not strictly positive.
    InvalidDuration {
        /// Index of the offending job.
        index: usize,
    },
    /// An order is not a permutation of the job set.
    NotAPermutation,
}

impl fmt::Display for InstanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TooFewJobs { k } => write!(f, "instance needs at least 2 jobs, got {k}"),
            Self::BadMatrixShape { expected, found } => {
                write!(f, "expected {expected} matrix entries, found {found}")
            }
            Self::InvalidWeight { row, col } => {
                write!(
                    f,
                    "setup time at row {row}, column {col} must be finite and nonnegative"
                )
            }
            Self::InvalidDuration { index } => {
                write!(f, "processing time of job {index} must be positive")
            }
            Self::NotAPermutation => write!(f, "order is not a permutation of the job set"),
        }
    }
}

impl core::error::Error for InstanceError {}

/// TSPLIB parsing failures; variants carry the offending field or line.
#[derive(Clone, Debug, PartialEq)]
pub enum ParseError {
    /// A required header field never appeared.
    MissingField(&'static str),
    /// `TYPE` is neither `ATSP` nor `TSP`.
    UnsupportedType(String),
    /// `EDGE_WEIGHT_TYPE` is not `EXPLICIT`.
    UnsupportedWeightType(String),
    /// `EDGE_WEIGHT_FORMAT` is not `FULL_MATRIX`.
    UnsupportedWeightFormat(String),
    /// A header field holds an unusable value.
    InvalidField {
        /// Field name.
        field: &'static str,
        /// 1-based line number.
        line: usize,
    },
    /// A matrix token is not numeric.
    BadToken {
        /// 1-based line number.
        line: usize,
        /// The token as written.
        token: String,
    },
    /// The weight section does not hold exactly `DIMENSION^2` tokens.
    WrongTokenCount {
        /// Tokens required.
        expected: usize,
        /// Tokens found.
        found: usize,
    },
    /// An off-diagonal weight is negative or not finite.
    BadWeight {
        /// Matrix row (0-based).
        row: usize,
        /// Matrix column (0-based).
        col: usize,
        /// 1-based line number the token came from.
        line: usize,
    },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MissingField(name) => write!(f, "missing header field {name}"),
            Self::UnsupportedType(t) => write!(f, "unsupported TYPE {t:?} (expected ATSP or TSP)"),
            Self::UnsupportedWeightType(t) => {
                write!(f, "unsupported EDGE_WEIGHT_TYPE {t:?} (expected EXPLICIT)")
            }
            Self::UnsupportedWeightFormat(t) => {
                write!(
                    f,
                    "unsupported EDGE_WEIGHT_FORMAT {t:?} (expected FULL_MATRIX)"
                )
            }
            Self::InvalidField { field, line } => {
                write!(f, "invalid value for {field} on line {line}")
            }
            Self::BadToken { line, token } => {
                write!(f, "non-numeric weight token {token:?} on line {line}")
            }
            Self::WrongTokenCount { expected, found } => {
                write!(
                    f,
                    "EDGE_WEIGHT_SECTION holds {found} tokens, expected {expected}"
                )
            }
            Self::BadWeight { row, col, line } => write!(
                f,
                "weight at row {row}, column {col} (line {line}) must be finite and nonnegative"
            ),
        }
    }
}

impl core::error::Error for ParseError {}

/// A parsed instance, in integer mode when every token is integral.
#[derive(Clone, Debug, PartialEq)]
pub enum ParsedInstance {
    /// All weights integral; arithmetic is exact.
    Int(Instance<i64>),
    /// At least one fractional weight.
    Float(Instance<f64>),
}

impl ParsedInstance {
    /// Number of jobs regardless of weight mode.
    pub fn jobs(&self) -> usize {
        match self {
            Self::Int(i) => i.jobs(),
            Self::Float(i) => i.jobs(),
        }
    }

    /// Instance identifier regardless of weight mode.
    pub fn name(&self) -> &str {
        match self {
            Self::Int(i) => i.name(),
            Self::Float(i) => i.name(),
        }
    }
}

/// Parses a TSPLIB file with `EDGE_WEIGHT_TYPE: EXPLICIT` and
/// `EDGE_WEIGHT_FORMAT: FULL_MATRIX`.
///
/// Weight tokens may be split across lines arbitrarily. Header keys that play
/// no role here (`COMMENT`, display hints, ...) are ignored. Diagonal entries
/// are kept verbatim — several TSPLIB files use huge placeholders there — and
/// never influence any cost.
pub fn parse_tsplib(text: &str) -> Result<ParsedInstance, ParseError> {
    let mut name = String::new();
    let mut dimension: Option<(usize, usize)> = None; // (k, line)
    let mut saw_type = false;
    let mut saw_weight_type = false;
    let mut saw_format = false;
    let mut tokens: Vec<(&str, usize)> = Vec::new();
    let mut in_weights = false;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "EOF" {
            break;
        }
        if in_weights {
            for tok in line.split_whitespace() {
                tokens.push((tok, lineno));
            }
            continue;
        }
        if line == "EDGE_WEIGHT_SECTION" {
            in_weights = true;
            continue;
        }
        let (key, value) = match line.split_once(':') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => (line, ""),
        };
        match key {
            "NAME" => name = value.to_string(),
            "TYPE" => {
                if value != "ATSP" && value != "TSP" {
                    return Err(ParseError::UnsupportedType(value.to_string()));
                }
                saw_type = true;
            }
            "DIMENSION" => {
                let k: usize = value.parse().map_err(|_| ParseError::InvalidField {
                    field: "DIMENSION",
                    line: lineno,
                })?;
                if k < 2 {
                    return Err(ParseError::InvalidField {
                        field: "DIMENSION",
                        line: lineno,
                    });
                }
                dimension = Some((k, lineno));
            }
            "EDGE_WEIGHT_TYPE" => {
                if value != "EXPLICIT" {
                    return Err(ParseError::UnsupportedWeightType(value.to_string()));
                }
                saw_weight_type = true;
            }
            "EDGE_WEIGHT_FORMAT" => {
                if value != "FULL_MATRIX" {
                    return Err(ParseError::UnsupportedWeightFormat(value.to_string()));
                }
                saw_format = true;
            }
            _ => {} // COMMENT and friends
        }
    }

    if !saw_type {
        return Err(ParseError::MissingField("TYPE"));
    }
    if !saw_weight_type {
        return Err(ParseError::MissingField("EDGE_WEIGHT_TYPE"));
    }
    if !saw_format {
        return Err(ParseError::MissingField("EDGE_WEIGHT_FORMAT"));
    }
    let (k, _) = dimension.ok_or(ParseError::MissingField("DIMENSION"))?;
    if !in_weights {
        return Err(ParseError::MissingField("EDGE_WEIGHT_SECTION"));
    }
    if tokens.len() != k * k {
        return Err(ParseError::WrongTokenCount {
            expected: k * k,
            found: tokens.len(),
        });
    }

    let all_int = tokens.iter().all(|(tok, _)| tok.parse::<i64>().is_ok());
    if all_int {
        let weights: Vec<i64> = tokens.iter().map(|(tok, _)| tok.parse().unwrap()).collect();
        check_offdiagonal(k, &weights, &tokens)?;
        let inst = Instance::new(&name, k, weights, None).expect("validated above");
        Ok(ParsedInstance::Int(inst))
    } else {
        let mut weights = Vec::with_capacity(k * k);
        for &(tok, line) in &tokens {
            let w: f64 = tok.parse().map_err(|_| ParseError::BadToken {
                line,
                token: tok.to_string(),
            })?;
            weights.push(w);
        }
        check_offdiagonal(k, &weights, &tokens)?;
        let inst = Instance::new(&name, k, weights, None).expect("validated above");
        Ok(ParsedInstance::Float(inst))
    }
}

fn check_offdiagonal<W: Weight>(
    k: usize,
    weights: &[W],
    tokens: &[(&str, usize)],
) -> Result<(), ParseError> {
    for (i, &w) in weights.iter().enumerate() {
        let (row, col) = (i / k, i % k);
        if row != col && !(w.is_finite_value() && w >= W::ZERO) {
            return Err(ParseError::BadWeight {
                row,
                col,
                line: tokens[i].1,
            });
        }
    }
    Ok(())
}

/// Renders an instance back to TSPLIB `FULL_MATRIX` text.
///
/// Re-parsing the output reproduces the setup matrix exactly.
pub fn to_tsplib_string<W: Weight>(inst: &Instance<W>) -> String {
    use core::fmt::Write;

    let k = inst.jobs();
    let mut out = String::new();
    let _ = writeln!(out, "NAME: {}", inst.name());
    let _ = writeln!(out, "TYPE: ATSP");
    let _ = writeln!(out, "DIMENSION: {k}");
    let _ = writeln!(out, "EDGE_WEIGHT_TYPE: EXPLICIT");
    let _ = writeln!(out, "EDGE_WEIGHT_FORMAT: FULL_MATRIX");
    let _ = writeln!(out, "EDGE_WEIGHT_SECTION");
    for v in 0..k {
        for u in 0..k {
            let sep = if u == 0 { "" } else { " " };
            let _ = write!(out, "{sep}{}", inst.setup(v, u));
        }
        out.push('\n');
    }
    out.push_str("EOF\n");
    out
}
