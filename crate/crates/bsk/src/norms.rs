//! `L^p` norms on the unit hypercube and operator approximation errors.
//!
//! All integrals are composite tensor Gauss-Legendre sums over per-axis
//! partitions. Declared jump/kink coordinates of the integrand are forced
//! into the partitions, so piecewise-smooth integrands are handled at full
//! quadrature accuracy.
//!
//! For the univariate error `K f - f` the integrand `|K f - f|^p` also has
//! kinks wherever the error changes sign. Those roots are located by
//! scanning the composite grid for sign changes and bisecting, and the
//! partition is split there; with that, `L^1` errors of polynomial inputs
//! are computed to near machine precision rather than quadrature-order
//! accuracy.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::kahan::KahanSum;
use crate::operator::BskEvaluator;
use crate::quadrature::{Partition, QuadratureRule};

/// Reject exponents outside `[1, infinity)`.
pub fn check_exponent(p: f64) -> Result<()> {
    if !p.is_finite() || p < 1.0 {
        return Err(Error::Domain(format!(
            "L^p exponent must be a finite value >= 1, got {p}"
        )));
    }
    Ok(())
}

fn abs_pow(v: f64, p: f64) -> f64 {
    let a = v.abs();
    if p == 1.0 {
        a
    } else if p == 2.0 {
        a * a
    } else {
        a.powf(p)
    }
}

/// Composite axis grid: the partition's quadrature nodes plus its cell
/// edges carried with weight zero, in ascending order. The zero-weight
/// edges contribute nothing to integrals but let the same evaluation grid
/// serve for endpoint-inclusive sup scans.
fn merged_axis_grid(partition: &Partition, rule: &QuadratureRule) -> (Vec<f64>, Vec<f64>) {
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for (a, b) in partition.cells() {
        points.push(a);
        weights.push(0.0);
        for (node, w) in rule.nodes().iter().zip(rule.weights()) {
            points.push(a + (b - a) * node);
            weights.push(w * (b - a));
        }
    }
    points.push(1.0);
    weights.push(0.0);
    (points, weights)
}

fn axis_partition(f: &ScalarField, axis: usize, cells_per_axis: usize) -> Partition {
    Partition::uniform(cells_per_axis).with_breakpoints(&f.singular_coords(axis))
}

/// Evaluate `f` on the tensor grid of per-axis points (flat, last axis
/// fastest), in parallel.
fn field_on_grid(f: &ScalarField, axes: &[Vec<f64>]) -> Result<Vec<f64>> {
    let d = f.d();
    let dims: Vec<usize> = axes.iter().map(|a| a.len()).collect();
    let total: usize = dims.iter().product();
    (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut rest = flat;
            let mut x = vec![0.0; d];
            for ax in (0..d).rev() {
                x[ax] = axes[ax][rest % dims[ax]];
                rest /= dims[ax];
            }
            f.eval(&x)
        })
        .collect()
}

/// Tensor weight of a flat grid index.
fn grid_weight(flat: usize, axis_weights: &[Vec<f64>]) -> f64 {
    let d = axis_weights.len();
    let mut rest = flat;
    let mut w = 1.0;
    for ax in (0..d).rev() {
        let m = axis_weights[ax].len();
        w *= axis_weights[ax][rest % m];
        rest /= m;
    }
    w
}

fn lp_from_grid(values: &[f64], axis_weights: &[Vec<f64>], p: f64) -> f64 {
    let mut acc = KahanSum::new();
    for (flat, &v) in values.iter().enumerate() {
        let w = grid_weight(flat, axis_weights);
        if w != 0.0 {
            acc.add(w * abs_pow(v, p));
        }
    }
    acc.total().max(0.0).powf(1.0 / p)
}

fn sup_from_grid(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
}

/// `L^p` norm of a field over `[0, 1]^d`.
///
/// `cells_per_axis` controls the composite resolution; the field's declared
/// singular coordinates are always forced into the partition.
pub fn field_lp_norm(
    f: &ScalarField,
    p: f64,
    rule: &QuadratureRule,
    cells_per_axis: usize,
) -> Result<f64> {
    check_exponent(p)?;
    if cells_per_axis == 0 {
        return Err(Error::Domain("cells_per_axis must be positive".into()));
    }
    let d = f.d();
    let mut axes = Vec::with_capacity(d);
    let mut axis_weights = Vec::with_capacity(d);
    for ax in 0..d {
        let (pts, wts) = merged_axis_grid(&axis_partition(f, ax, cells_per_axis), rule);
        axes.push(pts);
        axis_weights.push(wts);
    }
    let values = field_on_grid(f, &axes)?;
    Ok(lp_from_grid(&values, &axis_weights, p))
}

/// Norms of the approximation error `K f - f` for several exponents at
/// once, sharing one evaluation of `K f` on the composite grid.
#[derive(Clone, Debug)]
pub struct ErrorNorms {
    /// `|| K f - f ||_p`, aligned with the requested exponent list.
    pub lp: Vec<f64>,
    /// `max |K f - f|` over the grid (cell edges included).
    pub sup: f64,
}

/// Compute `|| K f - f ||_p` for every `p` in `p_list` plus the grid sup.
///
/// Univariate operators additionally split integration cells at the sign
/// changes of the error, found by bisection, so `|error|^p` is smooth on
/// every cell.
pub fn operator_error_norms(
    ev: &BskEvaluator,
    f: &ScalarField,
    p_list: &[f64],
    rule: &QuadratureRule,
    cells_per_axis: usize,
) -> Result<ErrorNorms> {
    for &p in p_list {
        check_exponent(p)?;
    }
    if cells_per_axis == 0 {
        return Err(Error::Domain("cells_per_axis must be positive".into()));
    }
    let d = ev.params().d();
    if f.d() != d {
        return Err(Error::Domain(format!(
            "field `{}` has dimension {}, operator has {d}",
            f.label(),
            f.d()
        )));
    }

    let mut partitions: Vec<Partition> = (0..d)
        .map(|ax| axis_partition(f, ax, cells_per_axis))
        .collect();

    if d == 1 {
        let roots = univariate_error_roots(ev, f, &partitions[0], rule)?;
        partitions[0] = partitions[0].clone().with_breakpoints(&roots);
    }

    let mut axes = Vec::with_capacity(d);
    let mut axis_weights = Vec::with_capacity(d);
    for partition in &partitions {
        let (pts, wts) = merged_axis_grid(partition, rule);
        axes.push(pts);
        axis_weights.push(wts);
    }

    let operator_values = ev.eval_grid(&axes)?;
    let field_values = field_on_grid(f, &axes)?;
    let errors: Vec<f64> = operator_values
        .iter()
        .zip(&field_values)
        .map(|(k, v)| k - v)
        .collect();

    let lp = p_list
        .iter()
        .map(|&p| lp_from_grid(&errors, &axis_weights, p))
        .collect();
    Ok(ErrorNorms {
        lp,
        sup: sup_from_grid(&errors),
    })
}

/// `|| K f ||_p` over the hypercube (the operator image is a polynomial,
/// so a plain composite grid suffices).
pub fn operator_image_lp_norm(
    ev: &BskEvaluator,
    p: f64,
    rule: &QuadratureRule,
    cells_per_axis: usize,
) -> Result<f64> {
    check_exponent(p)?;
    if cells_per_axis == 0 {
        return Err(Error::Domain("cells_per_axis must be positive".into()));
    }
    let d = ev.params().d();
    let partition = Partition::uniform(cells_per_axis);
    let (pts, wts) = merged_axis_grid(&partition, rule);
    let axes: Vec<Vec<f64>> = (0..d).map(|_| pts.clone()).collect();
    let axis_weights: Vec<Vec<f64>> = (0..d).map(|_| wts.clone()).collect();
    let values = ev.eval_grid(&axes)?;
    Ok(lp_from_grid(&values, &axis_weights, p))
}

/// Locate sign changes of `K f - f` on the scan grid of a partition and
/// bisect each bracketing interval down to the root.
fn univariate_error_roots(
    ev: &BskEvaluator,
    f: &ScalarField,
    partition: &Partition,
    rule: &QuadratureRule,
) -> Result<Vec<f64>> {
    let (pts, _) = merged_axis_grid(partition, rule);
    let mut err_at = |x: f64| -> Result<f64> { Ok(ev.eval(&[x])? - f.eval(&[x])?) };
    let mut scan = Vec::with_capacity(pts.len());
    for &x in &pts {
        scan.push((x, err_at(x)?));
    }
    let mut roots = Vec::new();
    for pair in scan.windows(2) {
        let (x0, e0) = pair[0];
        let (x1, e1) = pair[1];
        if e0 == 0.0 || e1 == 0.0 || x1 - x0 < 1e-14 {
            continue;
        }
        if (e0 < 0.0) != (e1 < 0.0) {
            roots.push(bisect(x0, x1, e0, &mut err_at)?);
        }
    }
    Ok(roots)
}

fn bisect(
    mut lo: f64,
    mut hi: f64,
    mut err_lo: f64,
    err_at: &mut impl FnMut(f64) -> Result<f64>,
) -> Result<f64> {
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-15 || mid == lo || mid == hi {
            break;
        }
        let em = err_at(mid)?;
        if em == 0.0 {
            return Ok(mid);
        }
        if (err_lo < 0.0) != (em < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            err_lo = em;
        }
    }
    Ok(0.5 * (lo + hi))
}
