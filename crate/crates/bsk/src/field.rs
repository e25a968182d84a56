//! Scalar fields on the unit hypercube `[0, 1]^d`.
//!
//! A [`ScalarField`] couples an evaluator with the metadata the rest of the
//! crate needs to treat it honestly:
//!
//! * the dimension `d` it lives on,
//! * a human-readable label,
//! * its known axis-aligned jumps and kinks ([`Singularity`]), which
//!   quadrature partitions and sup grids force-include so that step and
//!   kink integrands are integrated piece by piece rather than smeared.
//!
//! Fields built from the expression language keep their syntax tree, so
//! exact symbolic partial derivatives are available wherever the grammar
//! permits them; fields built from raw closures fall back to finite
//! differences (see `moduli::mixed_partial`).
//!
//! Evaluation is checked: points outside the hypercube are a domain error
//! (with a `1e-9` snap tolerance for accumulated round-off in callers'
//! arithmetic) and a NaN result is reported as an error rather than
//! propagated into quadrature sums.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::{self, Expr};

/// How a field fails to be smooth across an axis-aligned hyperplane.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SingularityKind {
    /// A discontinuity of the value.
    Jump,
    /// Continuous value, discontinuous first derivative.
    Kink,
}

/// An axis-aligned singular hyperplane `x_axis = coord`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Singularity {
    /// Zero-based axis index.
    pub axis: usize,
    /// Coordinate of the hyperplane on that axis, inside `[0, 1]`.
    pub coord: f64,
    /// Jump or kink.
    pub kind: SingularityKind,
}

#[derive(Clone)]
enum FieldBody {
    Expr(Arc<Expr>),
    Closure(Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>),
}

/// A scalar function on `[0, 1]^d` with evaluation metadata.
#[derive(Clone)]
pub struct ScalarField {
    d: usize,
    label: String,
    body: FieldBody,
    singularities: Vec<Singularity>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("d", &self.d)
            .field("label", &self.label)
            .field("singularities", &self.singularities)
            .finish()
    }
}

/// Snap tolerance for coordinates that drifted out of `[0, 1]` by rounding.
const DOMAIN_SNAP: f64 = 1e-9;

impl ScalarField {
    /// Build a field from expression source text in dimension `d`.
    ///
    /// Kinks and jumps of `abs`/`step`/`min`/`max` arguments that are
    /// affine in a single variable are detected and declared automatically.
    pub fn from_expression(text: &str, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("dimension d must be at least 1".into()));
        }
        let tree = expr::parse_for_dimension(text, d)?;
        let label = expr::pretty(&tree);
        let singularities = expr::detect_breaks(&tree)
            .into_iter()
            .map(|b| Singularity {
                axis: b.axis,
                coord: b.coord,
                kind: if b.jump { SingularityKind::Jump } else { SingularityKind::Kink },
            })
            .collect();
        Ok(Self {
            d,
            label,
            body: FieldBody::Expr(Arc::new(tree)),
            singularities,
        })
    }

    /// Build a field from a closure, declaring its singular hyperplanes
    /// explicitly (an empty list asserts the function is smooth enough for
    /// finite differences everywhere).
    pub fn from_closure<F>(
        label: impl Into<String>,
        d: usize,
        singularities: Vec<Singularity>,
        f: F,
    ) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            d,
            label: label.into(),
            body: FieldBody::Closure(Arc::new(f)),
            singularities,
        }
    }

    /// Replace the label (catalog entries use short names).
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Dimension of the domain.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Human-readable name.
    pub fn label(&self) -> &str {
        &self.label
    }

    /// Declared singular hyperplanes.
    pub fn singularities(&self) -> &[Singularity] {
        &self.singularities
    }

    /// Singular coordinates on one axis (used as forced quadrature
    /// breakpoints and sup-grid points).
    pub fn singular_coords(&self, axis: usize) -> Vec<f64> {
        self.singularities
            .iter()
            .filter(|s| s.axis == axis)
            .map(|s| s.coord)
            .collect()
    }

    /// Whether any singular hyperplane crosses `axis`.
    pub fn singular_on_axis(&self, axis: usize) -> bool {
        self.singularities.iter().any(|s| s.axis == axis)
    }

    /// Whether the field declares no singularities at all (the
    /// "differentiable catalog entries" in property reports).
    pub fn is_singularity_free(&self) -> bool {
        self.singularities.is_empty()
    }

    /// The expression tree, when the field was built from one.
    pub fn expression(&self) -> Option<&Expr> {
        match &self.body {
            FieldBody::Expr(e) => Some(e),
            FieldBody::Closure(_) => None,
        }
    }

    /// Exact symbolic partial along `axis`, when the grammar permits one.
    ///
    /// Returns `None` for closure-backed fields and for expressions where
    /// the variable sits under `abs`/`step`/`min`/`max` or in an exponent.
    pub fn symbolic_partial(&self, axis: usize) -> Option<ScalarField> {
        let tree = self.expression()?;
        let d = expr::differentiate(tree, axis)?;
        let label = format!("d/dx{}({})", axis + 1, self.label);
        // A symbolic derivative exists only where the singular structure is
        // off the differentiated path, so the singularities that remain are
        // the ones on other axes.
        let singularities = self
            .singularities
            .iter()
            .filter(|s| s.axis != axis)
            .copied()
            .collect();
        Some(Self {
            d: self.d,
            label,
            body: FieldBody::Expr(Arc::new(d)),
            singularities,
        })
    }

    /// Evaluate at a point of the closed hypercube.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.d {
            return Err(Error::Domain(format!(
                "point has {} coordinates, field `{}` expects {}",
                x.len(),
                self.label,
                self.d
            )));
        }
        let mut snapped: Option<Vec<f64>> = None;
        for (i, &xi) in x.iter().enumerate() {
            if xi.is_nan() {
                return Err(Error::Domain(format!(
                    "coordinate {} is NaN in evaluation of `{}`",
                    i + 1,
                    self.label
                )));
            }
            if !(0.0..=1.0).contains(&xi) {
                if xi > -DOMAIN_SNAP && xi < 1.0 + DOMAIN_SNAP {
                    snapped
                        .get_or_insert_with(|| x.to_vec())
                        .get_mut(i)
                        .map(|v| *v = xi.clamp(0.0, 1.0));
                } else {
                    return Err(Error::Domain(format!(
                        "coordinate {} = {xi} outside [0, 1] in evaluation of `{}`",
                        i + 1,
                        self.label
                    )));
                }
            }
        }
        let point = snapped.as_deref().unwrap_or(x);
        let value = match &self.body {
            FieldBody::Expr(e) => expr::eval(e, point),
            FieldBody::Closure(f) => f(point),
        };
        if value.is_nan() {
            return Err(Error::Domain(format!(
                "`{}` evaluated to NaN at {point:?}",
                self.label
            )));
        }
        Ok(value)
    }
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

/// The named test functions in dimension `d`, in a stable order:
///
/// * `one` — the constant `1`
/// * `x1`, ..., `xd` — coordinate projections
/// * `sq1` — the first coordinate squared
/// * `sum` — `x1 + ... + xd` (only for `d >= 2`)
/// * `prod` — `x1 * ... * xd` (only for `d >= 2`)
/// * `runge` — `1 / (1 + 25 (x1 - 1/2)^2)`, a smooth non-polynomial bump
/// * `kink` — `|x1 - 1/2|`, Lipschitz with a kink on the first axis
/// * `step` — the unit jump at `x1 = 1/2`
pub fn catalog(d: usize) -> Vec<ScalarField> {
    let mut entries = Vec::new();
    let mk = |src: &str, name: &str| {
        ScalarField::from_expression(src, d)
            .expect("catalog expressions are well-formed")
            .with_label(name)
    };
    entries.push(mk("1", "one"));
    for i in 1..=d {
        let src = format!("x{i}");
        entries.push(mk(&src, &src));
    }
    entries.push(mk("x1^2", "sq1"));
    if d >= 2 {
        let sum = (1..=d).map(|i| format!("x{i}")).collect::<Vec<_>>().join(" + ");
        entries.push(mk(&sum, "sum"));
        let prod = (1..=d).map(|i| format!("x{i}")).collect::<Vec<_>>().join(" * ");
        entries.push(mk(&prod, "prod"));
    }
    entries.push(mk("1/(1 + 25*(x1 - 0.5)^2)", "runge"));
    entries.push(mk("abs(x1 - 0.5)", "kink"));
    entries.push(mk("step(x1 - 0.5)", "step"));
    entries
}

/// Look up one catalog entry by name.
pub fn catalog_entry(name: &str, d: usize) -> Result<ScalarField> {
    catalog(d)
        .into_iter()
        .find(|f| f.label() == name)
        .ok_or_else(|| {
            let names: Vec<String> = catalog(d).iter().map(|f| f.label().to_string()).collect();
            Error::Domain(format!(
                "unknown function `{name}` (catalog for d = {d}: {})",
                names.join(", ")
            ))
        })
}

/// Resolve a function source: either a catalog name or `expr:<text>`.
pub fn resolve_function(source: &str, d: usize) -> Result<ScalarField> {
    if let Some(text) = source.strip_prefix("expr:") {
        ScalarField::from_expression(text, d)
    } else {
        catalog_entry(source, d)
    }
}
