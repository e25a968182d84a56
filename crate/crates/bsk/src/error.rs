//! Error type shared by every fallible operation in the crate.
//!
//! The CLI maps each variant to a stable process exit code (see the
//! `exit_code` method), so library users and shell scripts observe the
//! same failure taxonomy.

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An input lies outside its mathematical domain: a point outside the
    /// unit hypercube, an index outside its admissible range, a malformed
    /// argument list, and so on.
    #[error("domain error: {0}")]
    Domain(String),

    /// An operation that requires the degree/shift regime `n > 2r` was
    /// invoked with `n <= 2r`.
    #[error("regime violation: n = {n} does not exceed 2r = {}", 2 * *r)]
    Regime { n: usize, r: usize },

    /// The lattice sum would touch more than the configured number of terms.
    #[error("term budget exceeded: (n+1)^d = {terms} > budget {budget}")]
    Budget { terms: u128, budget: u128 },

    /// An expression could not be parsed; `pos` is a byte offset into the
    /// source text.
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// Neither an exact nor a finite-difference derivative is available
    /// (the function has a jump or kink on the differentiated axis).
    #[error("derivative of `{label}` unavailable along axis {axis}")]
    DerivativeUnavailable { label: String, axis: usize },

    /// A modulus step size outside `(0, 1]`.
    #[error("step delta = {0} outside the admissible range (0, 1]")]
    StepOutOfRange(f64),

    /// An input list (sweep, candidate set, ...) was empty where at least
    /// one element is required.
    #[error("{0}")]
    Empty(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line interface.
    ///
    /// * `2` — usage or parse errors (bad flags, bad expressions, domain errors)
    /// * `3` — regime violations (`n <= 2r`)
    /// * `4` — term-budget violations
    /// * `5` — I/O failures
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_)
            | Error::Parse { .. }
            | Error::DerivativeUnavailable { .. }
            | Error::StepOutOfRange(_)
            | Error::Empty(_) => 2,
            Error::Regime { .. } => 3,
            Error::Budget { .. } => 4,
            Error::Io(_) => 5,
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
