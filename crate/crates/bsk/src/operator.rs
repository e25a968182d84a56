//! The Kantorovich-type tensor operator on `[0, 1]^d`.
//!
//! ## Construction
//!
//! For degree `n`, shift `r`, and dimension `d`, the operator applied to an
//! integrable `f` at `x` is
//!
//! ```text
//! K(f; x) = sum_{k in {0..n}^d}  prod_i w_{n,k_i,r}(x_i)  *  mean_{Q_k}(f)
//! ```
//!
//! where `Q_k = prod_i [k_i/(n+1), (k_i+1)/(n+1)]` is a lattice cell and
//! `mean_{Q_k}(f)` the average of `f` over it. Averaging over cells instead
//! of sampling at lattice points is what extends the polynomial operator to
//! arbitrary integrable functions; with shift `r` in `{0, 1}` the weights
//! collapse to the Bernstein row and the operator is the classical
//! Kantorovich operator.
//!
//! ## Regimes
//!
//! Construction needs `n >= r`. The closed-form moment identities and all
//! derived bound quantities additionally assume `n > 2r`; the univariate
//! (`d = 1`) evaluation path accepts the wider `n >= r` range, while
//! multivariate evaluation and every moment/bound routine insist on
//! `n > 2r` and fail with a regime error otherwise.
//!
//! ## Numerics
//!
//! * Cell means use tensor Gauss-Legendre quadrature; cells are split at
//!   declared jump/kink coordinates first, so discontinuous integrands are
//!   averaged exactly piece by piece.
//! * The lattice sum runs through compensated accumulation in a fixed
//!   order; grid evaluation parallelizes over points (each point's sum is
//!   still sequential), so results are bitwise deterministic.
//! * `(n+1)^d` is checked against a term budget before any allocation.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::kahan::KahanSum;
use crate::params::{OperatorParams, DEFAULT_TERM_BUDGET};
use crate::quadrature::QuadratureRule;
use crate::basis::{bernstein_row, stancu_basis, stancu_basis_integral, stancu_row};

/// An axis-aligned box inside the unit hypercube.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Cell {
    /// Validate and build a box `prod_i [lower_i, upper_i]` inside `[0,1]^d`.
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::Domain(
                "cell bounds must be non-empty and of equal length".into(),
            ));
        }
        for (lo, hi) in lower.iter().zip(&upper) {
            if !(0.0..=1.0).contains(lo) || !(0.0..=1.0).contains(hi) || lo >= hi {
                return Err(Error::Domain(format!(
                    "cell [{lo}, {hi}] is not a proper subinterval of [0, 1]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The lattice cell `prod_i [k_i/(n+1), (k_i+1)/(n+1)]`.
    pub fn lattice(n: usize, k: &[usize]) -> Result<Self> {
        let step = 1.0 / (n as f64 + 1.0);
        let mut lower = Vec::with_capacity(k.len());
        let mut upper = Vec::with_capacity(k.len());
        for &ki in k {
            if ki > n {
                return Err(Error::Domain(format!("lattice index {ki} exceeds n = {n}")));
            }
            lower.push(ki as f64 * step);
            upper.push((ki + 1) as f64 * step);
        }
        Cell::new(lower, upper)
    }

    /// Lower corner.
    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    /// Upper corner.
    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Product of side lengths.
    pub fn volume(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| hi - lo)
            .product()
    }
}

/// Per-axis segments of a cell after splitting at declared singular
/// coordinates that fall strictly inside.
fn split_axis(lo: f64, hi: f64, cuts: &[f64]) -> Vec<(f64, f64)> {
    let mut edges = vec![lo];
    let mut inner: Vec<f64> = cuts
        .iter()
        .copied()
        .filter(|c| *c > lo + 1e-14 && *c < hi - 1e-14)
        .collect();
    inner.sort_by(|a, b| a.partial_cmp(b).unwrap());
    inner.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    edges.extend(inner);
    edges.push(hi);
    edges.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Average of `f` over `cell` by tensor Gauss-Legendre quadrature, with the
/// cell split at `f`'s declared jump/kink coordinates first.
pub fn cell_mean(f: &ScalarField, cell: &Cell, rule: &QuadratureRule) -> Result<f64> {
    let d = f.d();
    if cell.lower.len() != d {
        return Err(Error::Domain(format!(
            "cell dimension {} does not match field dimension {d}",
            cell.lower.len()
        )));
    }
    let segments: Vec<Vec<(f64, f64)>> = (0..d)
        .map(|ax| split_axis(cell.lower[ax], cell.upper[ax], &f.singular_coords(ax)))
        .collect();
    let nodes = rule.nodes();
    let weights = rule.weights();
    let q = rule.order();
    let seg_counts: Vec<usize> = segments.iter().map(|s| s.len()).collect();
    let box_total: usize = seg_counts.iter().product();
    let node_total: usize = q.checked_pow(d as u32).ok_or_else(|| {
        Error::Domain(format!("tensor quadrature with order {q} in dimension {d} overflows"))
    })?;

    // Cartesian product of sub-segments, then the tensor quadrature nodes
    // inside each sub-box; both products are walked by flat-index decoding.
    let mut acc = KahanSum::new();
    let mut point = vec![0.0; d];
    let mut boxes = vec![(0.0, 0.0); d];
    for box_flat in 0..box_total {
        let mut rest = box_flat;
        for ax in (0..d).rev() {
            boxes[ax] = segments[ax][rest % seg_counts[ax]];
            rest /= seg_counts[ax];
        }
        let box_volume: f64 = boxes.iter().map(|(a, b)| b - a).product();
        for node_flat in 0..node_total {
            let mut rest = node_flat;
            let mut w = box_volume;
            for ax in (0..d).rev() {
                let ni = rest % q;
                rest /= q;
                let (a, b) = boxes[ax];
                point[ax] = a + (b - a) * nodes[ni];
                w *= weights[ni];
            }
            acc.add(w * f.eval(&point)?);
        }
    }
    Ok(acc.total() / cell.volume())
}

/// Product weight `prod_i w_{n,k_i,r}(x_i)` of one lattice index.
///
/// Requires the strict regime `n > 2r` (the multivariate setting).
pub fn tensor_weight(params: &OperatorParams, k: &[usize], x: &[f64]) -> Result<f64> {
    params.require_strict_regime()?;
    params.check_point(x)?;
    if k.len() != params.d() {
        return Err(Error::Domain(format!(
            "multi-index has {} components, expected {}",
            k.len(),
            params.d()
        )));
    }
    let mut w = 1.0;
    for ax in 0..params.d() {
        w *= stancu_basis(params.n(), params.r(), k[ax] as i64, x[ax])?;
    }
    Ok(w)
}

/// Product of the weight integrals over the hypercube,
/// `prod_i integral_0^1 w_{n,k_i,r}`; bounded by `1/(n-r+2)^d`.
pub fn weight_hypercube_integral(params: &OperatorParams, k: &[usize]) -> Result<f64> {
    params.require_strict_regime()?;
    if k.len() != params.d() {
        return Err(Error::Domain(format!(
            "multi-index has {} components, expected {}",
            k.len(),
            params.d()
        )));
    }
    let mut v = 1.0;
    for &ki in k {
        v *= stancu_basis_integral(params.n(), params.r(), ki as i64)?;
    }
    Ok(v)
}

/// All `(n+1)^d` cell means of a field, stored flat with the last axis
/// fastest.
#[derive(Clone, Debug)]
pub struct CellMeans {
    n: usize,
    data: Vec<f64>,
}

impl CellMeans {
    /// Average `f` over every lattice cell (parallel over cells).
    pub fn compute(
        params: &OperatorParams,
        f: &ScalarField,
        rule: &QuadratureRule,
        budget: u128,
    ) -> Result<Self> {
        params.check_budget(budget)?;
        if f.d() != params.d() {
            return Err(Error::Domain(format!(
                "field `{}` has dimension {}, operator has {}",
                f.label(),
                f.d(),
                params.d()
            )));
        }
        let n = params.n();
        let d = params.d();
        let total = params.term_count() as usize;
        let data: Vec<f64> = (0..total)
            .into_par_iter()
            .map(|flat| {
                let k = decode_index(flat, n, d);
                let cell = Cell::lattice(n, &k)?;
                cell_mean(f, &cell, rule)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self { n, data })
    }

    /// Mean of the cell at multi-index `k`.
    pub fn at(&self, k: &[usize]) -> f64 {
        self.data[encode_index(k, self.n)]
    }

    /// Flat data, last axis fastest.
    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

fn encode_index(k: &[usize], n: usize) -> usize {
    let stride = n + 1;
    k.iter().fold(0usize, |acc, &ki| acc * stride + ki)
}

fn decode_index(mut flat: usize, n: usize, d: usize) -> Vec<usize> {
    let stride = n + 1;
    let mut k = vec![0usize; d];
    for ax in (0..d).rev() {
        k[ax] = flat % stride;
        flat /= stride;
    }
    k
}

/// Reusable operator evaluator: cell means are computed once, then the
/// operator can be applied at many points or whole tensor grids.
pub struct BskEvaluator {
    params: OperatorParams,
    means: CellMeans,
}

impl BskEvaluator {
    /// Compute cell means and validate regimes and budget.
    ///
    /// Univariate operators accept every `n >= r`; for `d >= 2` the strict
    /// regime `n > 2r` is required.
    pub fn new(
        params: OperatorParams,
        f: &ScalarField,
        rule: &QuadratureRule,
        budget: u128,
    ) -> Result<Self> {
        if params.d() >= 2 {
            params.require_strict_regime()?;
        }
        let means = CellMeans::compute(&params, f, rule, budget)?;
        Ok(Self { params, means })
    }

    /// Operator parameters.
    pub fn params(&self) -> &OperatorParams {
        &self.params
    }

    /// Apply the operator at one point.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.params.check_point(x)?;
        let d = self.params.d();
        let n = self.params.n();
        let rows: Vec<Vec<f64>> = x
            .iter()
            .map(|&xi| stancu_row(n, self.params.r(), xi))
            .collect::<Result<_>>()?;
        Ok(contract(&rows, &self.means.data, n, d))
    }

    /// Apply the operator on the tensor grid spanned by per-axis
    /// coordinates, returning values flat with the last axis fastest.
    /// Parallel over grid points; each point's lattice sum is sequential,
    /// so the output is deterministic.
    pub fn eval_grid(&self, axes: &[Vec<f64>]) -> Result<Vec<f64>> {
        let d = self.params.d();
        let n = self.params.n();
        let r = self.params.r();
        if axes.len() != d {
            return Err(Error::Domain(format!(
                "grid has {} axes, operator has {d}",
                axes.len()
            )));
        }
        // Weight rows per axis coordinate, computed once.
        let mut row_tables: Vec<Vec<Vec<f64>>> = Vec::with_capacity(d);
        for coords in axes {
            let table: Vec<Vec<f64>> = coords
                .iter()
                .map(|&xi| {
                    if !(0.0..=1.0).contains(&xi) {
                        return Err(Error::Domain(format!("grid point {xi} outside [0, 1]")));
                    }
                    stancu_row(n, r, xi)
                })
                .collect::<Result<_>>()?;
            row_tables.push(table);
        }
        let dims: Vec<usize> = axes.iter().map(|a| a.len()).collect();
        let total: usize = dims.iter().product();
        let values: Vec<f64> = (0..total)
            .into_par_iter()
            .map(|flat| {
                let mut rows: Vec<&[f64]> = Vec::with_capacity(d);
                let mut rest = flat;
                let mut idx = vec![0usize; d];
                for ax in (0..d).rev() {
                    idx[ax] = rest % dims[ax];
                    rest /= dims[ax];
                }
                for ax in 0..d {
                    rows.push(&row_tables[ax][idx[ax]]);
                }
                contract_refs(&rows, &self.means.data, n, d)
            })
            .collect();
        Ok(values)
    }
}

/// Lattice contraction `sum_k prod_i rows[i][k_i] * means[k]` with
/// compensated accumulation in flat order.
fn contract(rows: &[Vec<f64>], means: &[f64], n: usize, d: usize) -> f64 {
    let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
    contract_refs(&refs, means, n, d)
}

fn contract_refs(rows: &[&[f64]], means: &[f64], n: usize, d: usize) -> f64 {
    let stride = n + 1;
    let mut acc = KahanSum::new();
    let mut k = vec![0usize; d];
    for &mean in means {
        let mut w = 1.0;
        for ax in 0..d {
            w *= rows[ax][k[ax]];
        }
        if w != 0.0 {
            acc.add(w * mean);
        }
        // advance odometer, last axis fastest (wraps to zero after the
        // final term, where the outer loop ends anyway)
        for ax in (0..d).rev() {
            k[ax] += 1;
            if k[ax] < stride {
                break;
            }
            k[ax] = 0;
        }
    }
    acc.total()
}

/// One-shot operator application at a point.
pub fn bsk_apply(
    params: &OperatorParams,
    f: &ScalarField,
    x: &[f64],
    rule: &QuadratureRule,
) -> Result<f64> {
    bsk_apply_budgeted(params, f, x, rule, DEFAULT_TERM_BUDGET)
}

/// One-shot operator application with an explicit term budget.
pub fn bsk_apply_budgeted(
    params: &OperatorParams,
    f: &ScalarField,
    x: &[f64],
    rule: &QuadratureRule,
    budget: u128,
) -> Result<f64> {
    let evaluator = BskEvaluator::new(*params, f, rule, budget)?;
    evaluator.eval(x)
}

/// The classical univariate Kantorovich operator
/// `K_n(f; x) = sum_k p_{n,k}(x) * (n+1) * integral_{k/(n+1)}^{(k+1)/(n+1)} f`,
/// kept as an independent reference path: shifts `r = 0, 1` of the shifted
/// family must reproduce it.
pub fn kantorovich_classical(
    n: usize,
    f: &ScalarField,
    x: f64,
    rule: &QuadratureRule,
) -> Result<f64> {
    if f.d() != 1 {
        return Err(Error::Domain(format!(
            "classical Kantorovich path is univariate; field `{}` has d = {}",
            f.label(),
            f.d()
        )));
    }
    let row = bernstein_row(n, x)?;
    let mut acc = KahanSum::new();
    for (k, &p) in row.iter().enumerate() {
        let cell = Cell::lattice(n, &[k])?;
        let mean = cell_mean(f, &cell, rule)?;
        acc.add(p * mean);
    }
    Ok(acc.total())
}

// ---------------------------------------------------------------------------
// Closed-form moments
// ---------------------------------------------------------------------------

fn check_axis(params: &OperatorParams, axis: usize) -> Result<()> {
    if axis >= params.d() {
        return Err(Error::Domain(format!(
            "axis {axis} outside 0..{}",
            params.d()
        )));
    }
    Ok(())
}

/// First coordinate moment: `K(pr_axis; x) = n/(n+1) x_axis + 1/(2(n+1))`.
///
/// Independent of the shift `r`; requires `n > 2r`.
pub fn moment_first(params: &OperatorParams, axis: usize, x: &[f64]) -> Result<f64> {
    params.require_strict_regime()?;
    check_axis(params, axis)?;
    params.check_point(x)?;
    let n = params.n() as f64;
    Ok(n / (n + 1.0) * x[axis] + 0.5 / (n + 1.0))
}

/// Second coordinate moment:
///
/// ```text
/// K(pr_axis^2; x) = n^2/(n+1)^2 [ x^2 + (1 + r(r-1)/n) x(1-x)/n ]
///                   + (3 n x + 1) / (3 (n+1)^2)
/// ```
pub fn moment_second(params: &OperatorParams, axis: usize, x: &[f64]) -> Result<f64> {
    params.require_strict_regime()?;
    check_axis(params, axis)?;
    params.check_point(x)?;
    let n = params.n() as f64;
    let r = params.r() as f64;
    let xi = x[axis];
    let np1 = n + 1.0;
    let bracket = xi * xi + (1.0 + r * (r - 1.0) / n) * xi * (1.0 - xi) / n;
    Ok(n * n / (np1 * np1) * bracket + (3.0 * n * xi + 1.0) / (3.0 * np1 * np1))
}

/// Central second moment:
///
/// ```text
/// K((pr_axis - x_axis)^2; x) = (n - 1 + r(r-1))/(n+1)^2 x(1-x) + 1/(3(n+1)^2)
/// ```
///
/// Its supremum over `x` is the quantity `A_{n,r}` from the bounds module.
pub fn central_second_moment(params: &OperatorParams, axis: usize, x: &[f64]) -> Result<f64> {
    params.require_strict_regime()?;
    check_axis(params, axis)?;
    params.check_point(x)?;
    let n = params.n() as f64;
    let r = params.r() as f64;
    let xi = x[axis];
    let np1 = n + 1.0;
    Ok((n - 1.0 + r * (r - 1.0)) / (np1 * np1) * xi * (1.0 - xi) + 1.0 / (3.0 * np1 * np1))
}
