//! Operator parameters: polynomial degree `n`, shift `r`, dimension `d`.

use crate::error::{Error, Result};

/// Default cap on the number of lattice terms `(n+1)^d` a single operator
/// application may touch.
pub const DEFAULT_TERM_BUDGET: u128 = 10_000_000;

/// Degree, shift, and dimension of one member of the operator family.
///
/// Construction enforces `n >= 1`, `d >= 1`, and `n >= r` (the shift can
/// never exceed the degree). The stronger regime `n > 2r`, which the
/// closed-form moment identities and all bound quantities assume, is
/// checked separately by [`OperatorParams::require_strict_regime`]: the
/// univariate operator itself is well defined for every `n >= r`, so the
/// one-dimensional evaluation path accepts the wider range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OperatorParams {
    n: usize,
    r: usize,
    d: usize,
}

impl OperatorParams {
    /// Validate and build a parameter set.
    pub fn new(n: usize, r: usize, d: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("degree n must be at least 1".into()));
        }
        if d == 0 {
            return Err(Error::Domain("dimension d must be at least 1".into()));
        }
        if r > n {
            return Err(Error::Domain(format!(
                "shift r = {r} exceeds degree n = {n}"
            )));
        }
        Ok(Self { n, r, d })
    }

    /// Polynomial degree `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Shift `r` (`r = 0` and `r = 1` reduce the family to the classical
    /// Kantorovich operator).
    pub fn r(&self) -> usize {
        self.r
    }

    /// Dimension `d` of the hypercube.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Whether the parameters satisfy `n > 2r`.
    pub fn strict_regime(&self) -> bool {
        self.n > 2 * self.r
    }

    /// Error with [`Error::Regime`] unless `n > 2r`.
    pub fn require_strict_regime(&self) -> Result<()> {
        if self.strict_regime() {
            Ok(())
        } else {
            Err(Error::Regime { n: self.n, r: self.r })
        }
    }

    /// Number of lattice terms `(n+1)^d` the full tensor sum touches.
    pub fn term_count(&self) -> u128 {
        (self.n as u128 + 1).saturating_pow(self.d as u32)
    }

    /// Error with [`Error::Budget`] when `(n+1)^d` exceeds `budget`.
    pub fn check_budget(&self, budget: u128) -> Result<()> {
        let terms = self.term_count();
        if terms > budget {
            Err(Error::Budget { terms, budget })
        } else {
            Ok(())
        }
    }

    /// Validate that `x` is a point of the closed unit hypercube with the
    /// right number of coordinates.
    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.d {
            return Err(Error::Domain(format!(
                "point has {} coordinates, operator dimension is {}",
                x.len(),
                self.d
            )));
        }
        for (i, &xi) in x.iter().enumerate() {
            if !(0.0..=1.0).contains(&xi) || xi.is_nan() {
                return Err(Error::Domain(format!(
                    "coordinate {} = {xi} outside [0, 1]",
                    i + 1
                )));
            }
        }
        Ok(())
    }
}
