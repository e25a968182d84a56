//! Shifted-basis Kantorovich operators on the unit hypercube.
//!
//! This crate implements a two-parameter family of positive polynomial
//! operators on `[0, 1]^d`: per axis, a degree-`n` shifted basis (a convex
//! blend of two Bernstein rows, controlled by a shift `r`) weights the
//! averages of the input over the `(n+1)^d` lattice cells. With `r = 0` or
//! `1` the family collapses to the classical Kantorovich operator; larger
//! shifts trade approximation constants for flexibility while the operator
//! stays positive and mass one.
//!
//! Alongside the operator itself the crate provides the analysis tooling
//! needed to study it numerically:
//!
//! * [`basis`] — Bernstein and shifted basis functions, rows, and their
//!   integrals, stable up to high degrees.
//! * [`operator`] — cell means, tensor-product evaluation on points and
//!   grids, and the closed-form first/second/central moments.
//! * [`moduli`] — `L^p` modulus of continuity, local oscillation, the
//!   averaged (tau) modulus, mixed partials, a Sobolev-type seminorm, and
//!   a K-functional upper estimate.
//! * [`bounds`] — the closed-form bound quantities `A(n, r)`, `M(r, d)`,
//!   `B(r)` and numerical verification of the approximation theorems as
//!   bound-ratio reports.
//! * [`convergence`] — degree sweeps relating operator error to modulus
//!   scales, with ratio columns and a fitted convergence order.
//! * [`report`] — deterministic CSV/JSON rendering (17-digit floats,
//!   bit-exact JSON round-trip).
//!
//! Functions are described by [`field::ScalarField`]: either a parsed
//! arithmetic expression in `x1..xd` (with `abs`, `step`, `min`, `max`,
//! whose kinks and jumps are auto-detected and respected by every
//! quadrature in the crate) or an arbitrary closure with declared
//! singularities.
//!
//! ```
//! use bsk::{OperatorParams, ScalarField};
//! use bsk::operator::bsk_apply;
//! use bsk::quadrature::QuadratureRule;
//!
//! let f = ScalarField::from_expression("x1 * x2", 2).unwrap();
//! let params = OperatorParams::new(8, 2, 2).unwrap();
//! let rule = QuadratureRule::gauss_legendre(8).unwrap();
//! let value = bsk_apply(&params, &f, &[0.5, 0.5], &rule).unwrap();
//! assert!((value - 0.25).abs() < 0.02); // first-order accurate at n = 8
//! ```

pub mod basis;
pub mod bounds;
pub mod convergence;
pub mod error;
pub mod expr;
pub mod field;
pub mod guide;
pub mod kahan;
pub mod moduli;
pub mod norms;
pub mod operator;
pub mod params;
pub mod quadrature;
pub mod report;

pub use error::{Error, Result};
pub use field::{catalog, catalog_entry, resolve_function, ScalarField};
pub use params::{OperatorParams, DEFAULT_TERM_BUDGET};
