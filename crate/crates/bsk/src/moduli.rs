//! Smoothness functionals on `[0, 1]^d`.
//!
//! * [`lp_modulus`]: the first-order `L^p` modulus
//!   `omega(f, delta)_p = sup_{0 < |h|_inf <= delta} || f(. + h) - f(.) ||_p`,
//!   the norm taken over the overlap domain where both arguments stay in
//!   the cube.
//! * [`local_modulus`]: the oscillation of `f` over the window
//!   `{ y : |y - x|_inf <= delta/2 }` intersected with the cube.
//! * [`tau_modulus`]: the averaged modulus, the `L^p` norm in `x` of the
//!   local modulus.
//! * [`mixed_partial`] / [`sobolev_seminorm`]: mixed first partials
//!   `D^alpha f` for `alpha in {0,1}^d` (symbolic where possible, finite
//!   differences otherwise) and the sum of their `L^p` norms.
//! * [`kfunctional_upper`]: an upper estimate of the Peetre K-functional
//!   `K(f, t) = inf_g { ||f - g||_p + t |g|_W }` obtained by minimizing
//!   over Steklov means of `f`.
//!
//! ## Numerics
//!
//! Shift-difference and local-modulus integrals use composite midpoint
//! quadrature with breakpoints forced at every declared singular
//! coordinate, its shifts, and the window/boundary transition points; for
//! piecewise-linear integrands this makes the values exact. Candidate
//! shifts `h` run over a symmetric per-axis grid, and window oscillations
//! scan a grid that always contains the window corners and any singular
//! coordinates inside, so suprema of piecewise-monotone functions are
//! attained exactly.
//!
//! Profile functions evaluate a whole ascending list of radii and take the
//! running maximum, which makes the reported profile monotone by
//! construction: every shift admissible for a smaller radius is also
//! admissible for a larger one, so the running maximum is simply a sup
//! over the union of the candidate grids.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::kahan::KahanSum;
use crate::norms::{check_exponent, field_lp_norm};
use crate::quadrature::QuadratureRule;

/// Resolution of the modulus estimators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridSpec {
    /// Points of the uniform per-axis integration partition
    /// (`x_points - 1` cells per axis).
    pub x_points: usize,
    /// Per-axis size of the shift grid and of window scans; must be odd so
    /// the shift grid `{-delta, ..., 0, ..., delta}` is symmetric.
    pub h_points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            x_points: 257,
            h_points: 65,
        }
    }
}

impl GridSpec {
    /// Validate the resolution parameters.
    pub fn validate(&self) -> Result<()> {
        if self.x_points < 2 {
            return Err(Error::Domain(format!(
                "x_points must be at least 2, got {}",
                self.x_points
            )));
        }
        if self.h_points < 3 || self.h_points % 2 == 0 {
            return Err(Error::Domain(format!(
                "h_points must be an odd number >= 3, got {}",
                self.h_points
            )));
        }
        Ok(())
    }

    fn cells(&self) -> usize {
        self.x_points - 1
    }

    fn half_shifts(&self) -> usize {
        (self.h_points - 1) / 2
    }
}

fn check_radius(delta: f64) -> Result<()> {
    if !delta.is_finite() || delta <= 0.0 || delta > 1.0 {
        return Err(Error::Domain(format!(
            "modulus radius must lie in (0, 1], got {delta}"
        )));
    }
    Ok(())
}

fn check_ascending(deltas: &[f64]) -> Result<()> {
    if deltas.is_empty() {
        return Err(Error::Domain("radius list must be non-empty".into()));
    }
    for pair in deltas.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::Domain(format!(
                "radius list must be strictly ascending, got {} after {}",
                pair[1], pair[0]
            )));
        }
    }
    deltas.iter().try_for_each(|&d| check_radius(d))
}

/// Midpoints and widths of a uniform partition of `[lo, hi]` refined by
/// the given interior breakpoints.
fn axis_midpoints(lo: f64, hi: f64, cells: usize, breaks: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut edges: Vec<f64> = (0..=cells)
        .map(|i| lo + (hi - lo) * i as f64 / cells as f64)
        .collect();
    for &b in breaks {
        if b <= lo + 1e-12 || b >= hi - 1e-12 {
            continue;
        }
        match edges.binary_search_by(|e| e.partial_cmp(&b).unwrap()) {
            Ok(_) => {}
            Err(pos) => {
                let near_prev = pos > 0 && (b - edges[pos - 1]).abs() < 1e-12;
                let near_next = pos < edges.len() && (edges[pos] - b).abs() < 1e-12;
                if !near_prev && !near_next {
                    edges.insert(pos, b);
                }
            }
        }
    }
    let mids = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let widths = edges.windows(2).map(|w| w[1] - w[0]).collect();
    (mids, widths)
}

/// Sorted scan points of the window `[lo, hi]`: an even spread of `count`
/// points plus any extras (singular coordinates) inside.
fn window_points(lo: f64, hi: f64, count: usize, extras: &[f64]) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect();
    for &e in extras {
        if e < lo || e > hi {
            continue;
        }
        match pts.binary_search_by(|p| p.partial_cmp(&e).unwrap()) {
            Ok(_) => {}
            Err(pos) => {
                let near_prev = pos > 0 && (e - pts[pos - 1]).abs() < 1e-13;
                let near_next = pos < pts.len() && (pts[pos] - e).abs() < 1e-13;
                if !near_prev && !near_next {
                    pts.insert(pos, e);
                }
            }
        }
    }
    pts
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

// ---------------------------------------------------------------------------
// L^p modulus of continuity
// ---------------------------------------------------------------------------

/// `L^p` norm of the shift difference `f(. + h) - f(.)` over the overlap
/// domain `prod_i [max(0, -h_i), min(1, 1 - h_i)]`.
fn shift_difference_norm(f: &ScalarField, h: &[f64], p: f64, grid: &GridSpec) -> Result<f64> {
    let d = f.d();
    let mut axes_mids: Vec<Vec<f64>> = Vec::with_capacity(d);
    let mut axes_widths: Vec<Vec<f64>> = Vec::with_capacity(d);
    for ax in 0..d {
        let lo = (-h[ax]).max(0.0);
        let hi = (1.0 - h[ax]).min(1.0);
        // Kinks/jumps of x -> f(x) at s and of x -> f(x + h) at s - h.
        let mut breaks = f.singular_coords(ax);
        let shifted: Vec<f64> = breaks.iter().map(|s| s - h[ax]).collect();
        breaks.extend(shifted);
        let (mids, widths) = axis_midpoints(lo, hi, grid.cells(), &breaks);
        axes_mids.push(mids);
        axes_widths.push(widths);
    }
    let dims: Vec<usize> = axes_mids.iter().map(|m| m.len()).collect();
    let total: usize = dims.iter().product();
    let terms: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut rest = flat;
            let mut x = vec![0.0; d];
            let mut y = vec![0.0; d];
            let mut w = 1.0;
            for ax in (0..d).rev() {
                let i = rest % dims[ax];
                rest /= dims[ax];
                x[ax] = axes_mids[ax][i];
                y[ax] = axes_mids[ax][i] + h[ax];
                w *= axes_widths[ax][i];
            }
            Ok(w * abs_pow(f.eval(&y)? - f.eval(&x)?, p))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut acc = KahanSum::new();
    for t in terms {
        acc.add(t);
    }
    Ok(acc.total().max(0.0).powf(1.0 / p))
}

/// First-order `L^p` modulus of continuity
/// `omega(f, delta)_p = sup_{0 < |h|_inf <= delta} || f(.+h) - f(.) ||_p`,
/// the supremum taken over a symmetric per-axis shift grid.
pub fn lp_modulus(f: &ScalarField, delta: f64, p: f64, grid: &GridSpec) -> Result<f64> {
    check_radius(delta)?;
    check_exponent(p)?;
    grid.validate()?;
    let d = f.d();
    let half = grid.half_shifts();
    // Signed per-axis shift values -delta ... 0 ... delta.
    let axis_shifts: Vec<f64> = (-(half as i64)..=half as i64)
        .map(|j| delta * j as f64 / half as f64)
        .collect();
    let m = axis_shifts.len();
    let combos: usize = m.pow(d as u32);
    let mut best = 0.0f64;
    let mut h = vec![0.0; d];
    'combo: for flat in 0..combos {
        let mut rest = flat;
        for ax in (0..d).rev() {
            h[ax] = axis_shifts[rest % m];
            rest /= m;
        }
        // h and -h give the same norm; keep the representative whose first
        // nonzero component is positive, and skip the zero shift.
        for &hi in h.iter() {
            if hi > 0.0 {
                break;
            }
            if hi < 0.0 {
                continue 'combo;
            }
        }
        if h.iter().all(|&hi| hi == 0.0) {
            continue;
        }
        best = best.max(shift_difference_norm(f, &h, p, grid)?);
    }
    Ok(best)
}

/// Monotone profile of [`lp_modulus`] over strictly ascending radii: each
/// entry is the running maximum, i.e. the supremum over the union of all
/// shift grids up to that radius.
pub fn lp_modulus_profile(
    f: &ScalarField,
    deltas: &[f64],
    p: f64,
    grid: &GridSpec,
) -> Result<Vec<f64>> {
    check_ascending(deltas)?;
    let mut out = Vec::with_capacity(deltas.len());
    let mut running = 0.0f64;
    for &delta in deltas {
        running = running.max(lp_modulus(f, delta, p, grid)?);
        out.push(running);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Local and averaged (tau) moduli
// ---------------------------------------------------------------------------

/// Oscillation (max minus min) of `f` over the window
/// `{ y : |y - x|_inf <= delta/2 }` intersected with the cube, scanned on
/// a per-axis grid that contains the window corners and any singular
/// coordinates inside, so piecewise-monotone functions are resolved
/// exactly.
pub fn local_modulus(f: &ScalarField, x: &[f64], delta: f64, grid: &GridSpec) -> Result<f64> {
    check_radius(delta)?;
    grid.validate()?;
    let d = f.d();
    if x.len() != d {
        return Err(Error::Domain(format!(
            "point has {} coordinates, field `{}` has {d}",
            x.len(),
            f.label()
        )));
    }
    for &xi in x {
        if !(0.0..=1.0).contains(&xi) {
            return Err(Error::Domain(format!("point coordinate {xi} outside [0, 1]")));
        }
    }
    let axes: Vec<Vec<f64>> = (0..d)
        .map(|ax| {
            let lo = (x[ax] - 0.5 * delta).max(0.0);
            let hi = (x[ax] + 0.5 * delta).min(1.0);
            window_points(lo, hi, grid.h_points, &f.singular_coords(ax))
        })
        .collect();
    let dims: Vec<usize> = axes.iter().map(|a| a.len()).collect();
    let total: usize = dims.iter().product();
    let mut max = f64::NEG_INFINITY;
    let mut min = f64::INFINITY;
    let mut y = vec![0.0; d];
    for flat in 0..total {
        let mut rest = flat;
        for ax in (0..d).rev() {
            y[ax] = axes[ax][rest % dims[ax]];
            rest /= dims[ax];
        }
        let v = f.eval(&y)?;
        max = max.max(v);
        min = min.min(v);
    }
    Ok(max - min)
}

/// Integration grid for the averaged modulus: midpoint cells refined at
/// singular coordinates, their `+- delta/2` shifts, and the boundary
/// window-clipping points `delta/2`, `1 - delta/2`.
fn tau_axis_grid(f: &ScalarField, ax: usize, delta: f64, grid: &GridSpec) -> (Vec<f64>, Vec<f64>) {
    let mut breaks = vec![0.5 * delta, 1.0 - 0.5 * delta];
    for s in f.singular_coords(ax) {
        breaks.push(s);
        breaks.push(s - 0.5 * delta);
        breaks.push(s + 0.5 * delta);
    }
    axis_midpoints(0.0, 1.0, grid.cells(), &breaks)
}

/// Averaged modulus of smoothness
/// `tau(f, delta)_p = || local_modulus(f, ., delta) ||_p`.
pub fn tau_modulus(f: &ScalarField, delta: f64, p: f64, grid: &GridSpec) -> Result<f64> {
    check_radius(delta)?;
    check_exponent(p)?;
    grid.validate()?;
    let d = f.d();
    let mut axes_mids = Vec::with_capacity(d);
    let mut axes_widths = Vec::with_capacity(d);
    for ax in 0..d {
        let (mids, widths) = tau_axis_grid(f, ax, delta, grid);
        axes_mids.push(mids);
        axes_widths.push(widths);
    }
    let dims: Vec<usize> = axes_mids.iter().map(|m| m.len()).collect();
    let total: usize = dims.iter().product();
    let terms: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut rest = flat;
            let mut x = vec![0.0; d];
            let mut w = 1.0;
            for ax in (0..d).rev() {
                let i = rest % dims[ax];
                rest /= dims[ax];
                x[ax] = axes_mids[ax][i];
                w *= axes_widths[ax][i];
            }
            Ok(w * abs_pow(local_modulus(f, &x, delta, grid)?, p))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut acc = KahanSum::new();
    for t in terms {
        acc.add(t);
    }
    Ok(acc.total().max(0.0).powf(1.0 / p))
}

/// Monotone profile of [`tau_modulus`] over strictly ascending radii
/// (running maximum, as in [`lp_modulus_profile`]).
pub fn tau_modulus_profile(
    f: &ScalarField,
    deltas: &[f64],
    p: f64,
    grid: &GridSpec,
) -> Result<Vec<f64>> {
    check_ascending(deltas)?;
    let mut out = Vec::with_capacity(deltas.len());
    let mut running = 0.0f64;
    for &delta in deltas {
        running = running.max(tau_modulus(f, delta, p, grid)?);
        out.push(running);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Mixed partial derivatives and the Sobolev-type seminorm
// ---------------------------------------------------------------------------

/// Default step for finite-difference derivatives.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// All nonzero multi-indices `alpha in {0,1}^d`, ordered by total order
/// `|alpha|` and then lexicographically.
pub fn mixed_indices(d: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (1u32..(1u32 << d))
        .map(|mask| (0..d).map(|ax| ((mask >> ax) & 1) as usize).collect())
        .collect();
    out.sort_by_key(|alpha| {
        let weight: usize = alpha.iter().sum();
        let mut lex = 0usize;
        for &a in alpha {
            lex = lex * 2 + (1 - a);
        }
        (weight, lex)
    });
    out
}

fn check_alpha(f: &ScalarField, alpha: &[usize]) -> Result<()> {
    if alpha.len() != f.d() {
        return Err(Error::Domain(format!(
            "multi-index has {} components, field `{}` has {}",
            alpha.len(),
            f.label(),
            f.d()
        )));
    }
    if alpha.iter().any(|&a| a > 1) {
        return Err(Error::Domain(
            "mixed partials take one derivative per axis at most".into(),
        ));
    }
    Ok(())
}

/// One finite-difference derivative layer along `axis`: central in the
/// interior, second-order one-sided within `step` of the boundary.
fn fd_partial(f: &ScalarField, axis: usize, step: f64) -> ScalarField {
    let inner = f.clone();
    let label = format!("fd_d/dx{}({})", axis + 1, f.label());
    let singularities: Vec<_> = f
        .singularities()
        .iter()
        .filter(|s| s.axis != axis)
        .cloned()
        .collect();
    let d = f.d();
    ScalarField::from_closure(&label, d, singularities, move |x: &[f64]| {
        let probe = |xi: f64| -> f64 {
            let mut y = x.to_vec();
            y[axis] = xi;
            inner.eval(&y).unwrap_or(f64::NAN)
        };
        let xi = x[axis];
        if xi >= step && xi <= 1.0 - step {
            (probe(xi + step) - probe(xi - step)) / (2.0 * step)
        } else if xi < step {
            (-3.0 * probe(xi) + 4.0 * probe(xi + step) - probe(xi + 2.0 * step)) / (2.0 * step)
        } else {
            (3.0 * probe(xi) - 4.0 * probe(xi - step) + probe(xi - 2.0 * step)) / (2.0 * step)
        }
    })
}

/// Mixed first partial `D^alpha f` for `alpha in {0,1}^d`, using the
/// default finite-difference step where symbolic differentiation is not
/// available.
pub fn mixed_partial(f: &ScalarField, alpha: &[usize]) -> Result<ScalarField> {
    mixed_partial_with_step(f, alpha, DEFAULT_FD_STEP)
}

/// [`mixed_partial`] with an explicit finite-difference step in
/// `(0, 0.05]`.
pub fn mixed_partial_with_step(f: &ScalarField, alpha: &[usize], step: f64) -> Result<ScalarField> {
    check_alpha(f, alpha)?;
    if !step.is_finite() || step <= 0.0 || step > 0.05 {
        return Err(Error::StepOutOfRange(step));
    }
    // A derivative across a declared jump or kink does not exist.
    for (axis, &a) in alpha.iter().enumerate() {
        if a == 1 && f.singular_on_axis(axis) {
            return Err(Error::DerivativeUnavailable {
                label: f.label().to_string(),
                axis,
            });
        }
    }
    // Symbolic phase: peel off every axis the expression can differentiate.
    let mut current = f.clone();
    let mut fd_axes = Vec::new();
    for (axis, &a) in alpha.iter().enumerate() {
        if a == 0 {
            continue;
        }
        match current.symbolic_partial(axis) {
            Some(df) => current = df,
            None => fd_axes.push(axis),
        }
    }
    for axis in fd_axes {
        current = fd_partial(&current, axis, step);
    }
    Ok(current)
}

/// `L^p` norms of every nonzero mixed partial, in [`mixed_indices`] order.
pub fn mixed_partial_norms(
    f: &ScalarField,
    p: f64,
    rule: &QuadratureRule,
    cells_per_axis: usize,
) -> Result<Vec<(Vec<usize>, f64)>> {
    check_exponent(p)?;
    let mut out = Vec::new();
    for alpha in mixed_indices(f.d()) {
        let df = mixed_partial(f, &alpha)?;
        let norm = field_lp_norm(&df, p, rule, cells_per_axis)?;
        out.push((alpha, norm));
    }
    Ok(out)
}

/// Sobolev-type seminorm: the sum of the `L^p` norms of all nonzero mixed
/// partials `D^alpha f`, `alpha in {0,1}^d`.
pub fn sobolev_seminorm(
    f: &ScalarField,
    p: f64,
    rule: &QuadratureRule,
    cells_per_axis: usize,
) -> Result<f64> {
    let norms = mixed_partial_norms(f, p, rule, cells_per_axis)?;
    let mut acc = KahanSum::new();
    for (_, norm) in norms {
        acc.add(norm);
    }
    Ok(acc.total())
}

// ---------------------------------------------------------------------------
// Steklov means and the K-functional upper estimate
// ---------------------------------------------------------------------------

/// Clamped box average: `g(x)` is the mean of `f` over
/// `prod_i [max(0, x_i - rho), min(1, x_i + rho)]`. The result carries no
/// singularities — averaging smooths declared jumps and kinks into
/// Lipschitz behaviour.
pub fn steklov_mean(f: &ScalarField, rho: f64) -> Result<ScalarField> {
    if !rho.is_finite() || rho <= 0.0 || rho > 0.5 {
        return Err(Error::Domain(format!(
            "Steklov radius must lie in (0, 0.5], got {rho}"
        )));
    }
    let inner = f.clone();
    let rule = QuadratureRule::gauss_legendre(8)?;
    let label = format!("steklov[{rho}]({})", f.label());
    let d = f.d();
    Ok(ScalarField::from_closure(&label, d, Vec::new(), move |x: &[f64]| {
        let lower: Vec<f64> = x.iter().map(|&xi| (xi - rho).max(0.0)).collect();
        let upper: Vec<f64> = x.iter().map(|&xi| (xi + rho).min(1.0)).collect();
        match crate::operator::Cell::new(lower, upper) {
            Ok(cell) => {
                crate::operator::cell_mean(&inner, &cell, &rule).unwrap_or(f64::NAN)
            }
            Err(_) => f64::NAN,
        }
    }))
}

/// Geometric ladder of Steklov radii between `1e-3` and `0.25`.
pub fn default_steklov_radii() -> Vec<f64> {
    let lo = 1e-3f64;
    let hi = 0.25f64;
    let steps = 5usize;
    (0..=steps)
        .map(|i| lo * (hi / lo).powf(i as f64 / steps as f64))
        .collect()
}

/// Upper estimate of the K-functional
/// `K(f, t)_p = inf_g { || f - g ||_p + t |g|_W }`.
///
/// Candidates are `g = f` itself (when `f` is singularity-free) and the
/// Steklov means of `f` at each radius in `radii` (entries outside
/// `(0, 0.5]` are ignored). Returns the smallest candidate value; fails
/// with an emptiness error when no candidate is available.
pub fn kfunctional_upper(
    f: &ScalarField,
    t: f64,
    p: f64,
    rule: &QuadratureRule,
    cells_per_axis: usize,
    radii: &[f64],
) -> Result<f64> {
    check_exponent(p)?;
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Domain(format!(
            "K-functional parameter t must be finite and >= 0, got {t}"
        )));
    }
    let mut best: Option<f64> = None;
    if f.is_singularity_free() {
        match sobolev_seminorm(f, p, rule, cells_per_axis) {
            Ok(seminorm) => best = Some(t * seminorm),
            Err(Error::DerivativeUnavailable { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    for &rho in radii {
        if !(rho > 0.0 && rho <= 0.5) || !rho.is_finite() {
            continue;
        }
        let g = steklov_mean(f, rho)?;
        let f0 = f.clone();
        let g0 = g.clone();
        let diff = ScalarField::from_closure(
            &format!("({}) - {}", f.label(), g.label()),
            f.d(),
            f.singularities().to_vec(),
            move |x: &[f64]| match (f0.eval(x), g0.eval(x)) {
                (Ok(a), Ok(b)) => a - b,
                _ => f64::NAN,
            },
        );
        let distance = field_lp_norm(&diff, p, rule, cells_per_axis)?;
        let seminorm = sobolev_seminorm(&g, p, rule, cells_per_axis)?;
        let value = distance + t * seminorm;
        best = Some(match best {
            Some(b) => b.min(value),
            None => value,
        });
    }
    best.ok_or_else(|| {
        Error::Empty(format!(
            "no K-functional candidates for `{}`: the field has singularities and no \
             admissible Steklov radius was supplied",
            f.label()
        ))
    })
}

// ---------------------------------------------------------------------------
// Property checks for the averaged modulus
// ---------------------------------------------------------------------------

/// Outcome of the structural checks on the averaged modulus.
#[derive(Clone, Debug)]
pub struct TauPropertyReport {
    /// The radii that were probed (strictly ascending).
    pub deltas: Vec<f64>,
    /// Raw averaged-modulus values at those radii.
    pub tau_values: Vec<f64>,
    /// Whether the raw values are nondecreasing (up to a 1e-9 relative
    /// slack for grid noise).
    pub monotone: bool,
    /// Scaling factor probed for the dilation inequality.
    pub lambda: f64,
    /// `tau(lambda * delta_0)`.
    pub scaled_tau: f64,
    /// `(2 floor(lambda) + 2)^(d+1) * tau(delta_0)`.
    pub scaling_bound: f64,
    /// Whether `scaled_tau <= scaling_bound` (with slack).
    pub scaling_holds: bool,
    /// Per-radius values of `2 sum_alpha delta^|alpha| ||D^alpha f||_p`,
    /// when every mixed partial exists.
    pub derivative_bounds: Option<Vec<f64>>,
    /// Whether `tau(delta) <= derivative bound` held at every radius.
    pub derivative_holds: Option<bool>,
}

/// Check the structural inequalities of the averaged modulus on a list of
/// ascending radii:
///
/// 1. monotonicity in the radius,
/// 2. the dilation bound
///    `tau(lambda delta) <= (2 floor(lambda) + 2)^(d+1) tau(delta)`,
/// 3. when `f` has all mixed partials, the derivative bound
///    `tau(delta) <= 2 sum_{alpha != 0} delta^|alpha| || D^alpha f ||_p`.
pub fn tau_property_check(
    f: &ScalarField,
    deltas: &[f64],
    lambda: f64,
    p: f64,
    grid: &GridSpec,
    rule: &QuadratureRule,
    cells_per_axis: usize,
) -> Result<TauPropertyReport> {
    check_ascending(deltas)?;
    if !lambda.is_finite() || lambda < 1.0 {
        return Err(Error::Domain(format!(
            "dilation factor must be >= 1, got {lambda}"
        )));
    }
    let delta0 = deltas[0];
    if lambda * delta0 > 1.0 {
        return Err(Error::Domain(format!(
            "scaled radius {} exceeds 1; pick a smaller base radius or factor",
            lambda * delta0
        )));
    }
    let tau_values: Vec<f64> = deltas
        .iter()
        .map(|&delta| tau_modulus(f, delta, p, grid))
        .collect::<Result<_>>()?;
    let monotone = tau_values
        .windows(2)
        .all(|w| w[1] >= w[0] * (1.0 - 1e-9) - 1e-12);

    let scaled_tau = tau_modulus(f, lambda * delta0, p, grid)?;
    let d = f.d();
    let factor = (2.0 * lambda.floor() + 2.0).powi(d as i32 + 1);
    let scaling_bound = factor * tau_values[0];
    let scaling_holds = scaled_tau <= scaling_bound * (1.0 + 1e-9) + 1e-12;

    let (derivative_bounds, derivative_holds) = match mixed_partial_norms(f, p, rule, cells_per_axis)
    {
        Ok(norms) => {
            let bounds: Vec<f64> = deltas
                .iter()
                .map(|&delta| {
                    2.0 * norms
                        .iter()
                        .map(|(alpha, norm)| {
                            let weight: usize = alpha.iter().sum();
                            delta.powi(weight as i32) * norm
                        })
                        .sum::<f64>()
                })
                .collect();
            let holds = tau_values
                .iter()
                .zip(&bounds)
                .all(|(tau, bound)| *tau <= bound * (1.0 + 1e-9) + 1e-12);
            (Some(bounds), Some(holds))
        }
        Err(Error::DerivativeUnavailable { .. }) => (None, None),
        Err(e) => return Err(e),
    };

    Ok(TauPropertyReport {
        deltas: deltas.to_vec(),
        tau_values,
        monotone,
        lambda,
        scaled_tau,
        scaling_bound,
        scaling_holds,
        derivative_bounds,
        derivative_holds,
    })
}
