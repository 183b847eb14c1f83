use core::fmt::{Debug, Display};
use core::ops::{Add, AddAssign, Sub, SubAssign};

/// Arc-weight scalar used throughout the solvers.
///
/// Implemented for `i64` and `f64`. Integer weights keep every incremental
/// objective update exact, which the recombination and dynamic-programming
/// kernels rely on in their self-checks; `f64` is the fallback for instances
/// with fractional setup times.
pub trait Weight:
    Copy
    + PartialEq
    + PartialOrd
    + Debug
    + Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + AddAssign
    + SubAssign
{
    /// Additive identity.
    const ZERO: Self;
    /// Sentinel larger than any cost that occurs in practice; never fed into
    /// arithmetic by the solvers, only compared against.
    const INF: Self;

    /// Lossy view for statistics and probabilities.
    fn to_f64(self) -> f64;

    /// Whether the value may appear in a setup matrix (finite; sign is
    /// checked separately).
    fn is_finite_value(self) -> bool;

    /// Parse a weight from a text token, e.g. a CLI argument.
    fn from_token(tok: &str) -> Option<Self>;
}

impl Weight for i64 {
    const ZERO: Self = 0;
    const INF: Self = i64::MAX / 2;

    fn to_f64(self) -> f64 {
        self as f64
    }

    fn is_finite_value(self) -> bool {
        self < Self::INF
    }

    fn from_token(tok: &str) -> Option<Self> {
        tok.parse().ok()
    }
}

impl Weight for f64 {
    const ZERO: Self = 0.0;
    const INF: Self = f64::INFINITY;

    fn to_f64(self) -> f64 {
        self
    }

    fn is_finite_value(self) -> bool {
        self.is_finite()
    }

    fn from_token(tok: &str) -> Option<Self> {
        tok.parse().ok()
    }
}
