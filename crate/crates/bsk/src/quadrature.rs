//! Gauss-Legendre quadrature on the unit interval and composite rules over
//! axis partitions.
//!
//! ## Design
//!
//! * A [`QuadratureRule`] of order `q` holds nodes and weights for the
//!   reference interval `[0, 1]`; the weights sum to one, so mapping the
//!   rule onto a cell `[a, b]` is a pure affine rescale. The rule
//!   integrates polynomials of degree `<= 2q - 1` exactly.
//! * A [`Partition`] is a sorted list of axis breakpoints spanning
//!   `[0, 1]`. Composite integration applies the rule cell by cell and
//!   accumulates with compensated summation. Callers insert extra
//!   breakpoints (lattice cell edges, jump coordinates) so integrands are
//!   smooth within every cell.
//!
//! Nodes are found by Newton iteration on the Legendre polynomial
//! recurrence, seeded with the Chebyshev-style angle estimate; ten
//! iterations reach machine precision for every order this crate accepts.

use crate::error::{Error, Result};
use crate::kahan::KahanSum;

/// Largest supported Gauss-Legendre order.
pub const MAX_QUADRATURE_ORDER: usize = 64;

/// Gauss-Legendre rule on the reference interval `[0, 1]`.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    order: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Legendre polynomial `P_m` and its derivative at `x`, by the three-term
/// recurrence.
fn legendre_value_and_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0; // P_0
    let mut p = x; // P_1
    if m == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=m {
        let jf = j as f64;
        let p_next = ((2.0 * jf - 1.0) * x * p - (jf - 1.0) * p_prev) / jf;
        p_prev = p;
        p = p_next;
    }
    // P_m'(x) = m (x P_m - P_{m-1}) / (x^2 - 1)
    let dp = (m as f64) * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

impl QuadratureRule {
    /// Build the Gauss-Legendre rule with `order` nodes (1 ..= 64).
    pub fn gauss_legendre(order: usize) -> Result<Self> {
        if order == 0 || order > MAX_QUADRATURE_ORDER {
            return Err(Error::Domain(format!(
                "quadrature order {order} outside 1..={MAX_QUADRATURE_ORDER}"
            )));
        }
        let m = order;
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        // Roots come in symmetric pairs; solve the positive half.
        for i in 0..(m + 1) / 2 {
            // Initial guess for the i-th root (descending in x).
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_value_and_derivative(m, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre_value_and_derivative(m, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // Map from [-1, 1] to [0, 1]: node (x+1)/2, weight w/2.
            nodes[m - 1 - i] = 0.5 * (1.0 + x);
            weights[m - 1 - i] = 0.5 * w;
            nodes[i] = 0.5 * (1.0 - x);
            weights[i] = 0.5 * w;
        }
        Ok(Self { order, nodes, weights })
    }

    /// Number of nodes.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Nodes in `(0, 1)`, strictly increasing.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Positive weights summing to one.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrate `f` over `[a, b]` with the rule mapped affinely.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let len = b - a;
        let mut acc = KahanSum::new();
        for (&t, &w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(a + len * t));
        }
        len * acc.total()
    }
}

/// Sorted breakpoints `0 = b_0 < b_1 < ... < b_M = 1` of one axis.
#[derive(Clone, Debug)]
pub struct Partition {
    points: Vec<f64>,
}

impl Partition {
    /// Uniform partition with `cells >= 1` cells.
    pub fn uniform(cells: usize) -> Self {
        let cells = cells.max(1);
        let points = (0..=cells).map(|i| i as f64 / cells as f64).collect();
        Self { points }
    }

    /// The `n + 1` lattice cells `[k/(n+1), (k+1)/(n+1)]` of the operator
    /// with degree `n`.
    pub fn lattice_cells(n: usize) -> Self {
        Self::uniform(n + 1)
    }

    /// Insert extra interior breakpoints (values outside `(0, 1)` or closer
    /// than `1e-12` to an existing breakpoint are skipped).
    pub fn with_breakpoints(mut self, extra: &[f64]) -> Self {
        for &p in extra {
            if p <= 0.0 || p >= 1.0 || !p.is_finite() {
                continue;
            }
            match self
                .points
                .binary_search_by(|probe| probe.partial_cmp(&p).unwrap())
            {
                Ok(_) => {}
                Err(idx) => {
                    let near_prev = idx > 0 && (p - self.points[idx - 1]).abs() < 1e-12;
                    let near_next =
                        idx < self.points.len() && (self.points[idx] - p).abs() < 1e-12;
                    if !near_prev && !near_next {
                        self.points.insert(idx, p);
                    }
                }
            }
        }
        self
    }

    /// Breakpoints, including both endpoints.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Number of cells.
    pub fn cell_count(&self) -> usize {
        self.points.len() - 1
    }

    /// Iterate over cells `(a, b)`.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.windows(2).map(|w| (w[0], w[1]))
    }

    /// Composite integral of `f` over `[0, 1]` using `rule` on every cell.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, rule: &QuadratureRule, mut f: F) -> f64 {
        let mut acc = KahanSum::new();
        for (a, b) in self.cells() {
            acc.add(rule.integrate(a, b, &mut f));
        }
        acc.total()
    }

    /// Flattened composite nodes and weights over all cells, in ascending
    /// node order. The weights sum to one.
    pub fn grid(&self, rule: &QuadratureRule) -> (Vec<f64>, Vec<f64>) {
        let mut nodes = Vec::with_capacity(self.cell_count() * rule.order());
        let mut weights = Vec::with_capacity(nodes.capacity());
        for (a, b) in self.cells() {
            let len = b - a;
            for (&t, &w) in rule.nodes().iter().zip(rule.weights()) {
                nodes.push(a + len * t);
                weights.push(len * w);
            }
        }
        (nodes, weights)
    }

    /// Cell midpoints paired with cell widths (the composite midpoint rule).
    pub fn midpoint_grid(&self) -> (Vec<f64>, Vec<f64>) {
        let mut nodes = Vec::with_capacity(self.cell_count());
        let mut weights = Vec::with_capacity(self.cell_count());
        for (a, b) in self.cells() {
            nodes.push(0.5 * (a + b));
            weights.push(b - a);
        }
        (nodes, weights)
    }
}
