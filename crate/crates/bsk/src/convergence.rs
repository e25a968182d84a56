//! Convergence sweeps: operator error against modulus scales, degree by
//! degree.
//!
//! For every degree `n` in a sweep and every requested exponent `p`, one
//! row records
//!
//! * `error_lp = || K f - f ||_p` and the grid sup of the error,
//! * the moment bound `A(n, r)`,
//! * `tau_scale = tau(f, A(n,r)^(1/(2d)))_p` — the averaged modulus at
//!   the radius the moment bound dictates,
//! * `omega_scale = omega(f, (n+1)^(-1/(2d)))_p` — the plain modulus at
//!   the degree-driven radius,
//! * the ratios `error_lp / tau_scale` and `error_lp / omega_scale`,
//!   empty when the respective scale vanishes.
//!
//! Bounded ratios across a doubling degree ladder are the numerical
//! witness of the convergence theorems; the report also carries a fitted
//! convergence order (least-squares slope of `log error` against `log n`
//! for the first exponent).

use crate::bounds::a_nr;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::moduli::{lp_modulus, tau_modulus, GridSpec};
use crate::norms::{check_exponent, operator_error_norms};
use crate::operator::BskEvaluator;
use crate::params::OperatorParams;
use crate::quadrature::QuadratureRule;

use serde::Deserialize;

/// Everything a sweep needs besides the field itself.
#[derive(Clone, Debug)]
pub struct SweepConfig {
    /// Shift parameter of the operator family.
    pub r: usize,
    /// Dimension (must match the field).
    pub d: usize,
    /// Strictly ascending degrees, all in the regime `n > 2r`.
    pub n_list: Vec<usize>,
    /// `L^p` exponents, each `>= 1`.
    pub p_list: Vec<f64>,
    /// Gauss-Legendre order for cell means and norm integrals.
    pub quad_order: usize,
    /// Composite cells per axis for norm integrals.
    pub cells_per_axis: usize,
    /// Resolution of the modulus estimators.
    pub grid: GridSpec,
    /// Lattice term budget per operator application.
    pub budget: u128,
}

impl SweepConfig {
    /// A doubling degree ladder `start, 2 start, ...` up to `stop`
    /// (inclusive when hit exactly).
    pub fn doubling_degrees(start: usize, stop: usize) -> Result<Vec<usize>> {
        if start == 0 || stop < start {
            return Err(Error::Domain(format!(
                "degree ladder needs 0 < start <= stop, got {start}..{stop}"
            )));
        }
        let mut out = Vec::new();
        let mut n = start;
        while n <= stop {
            out.push(n);
            match n.checked_mul(2) {
                Some(next) => n = next,
                None => break,
            }
        }
        Ok(out)
    }

    fn validate(&self, f: &ScalarField) -> Result<()> {
        if self.d != f.d() {
            return Err(Error::Domain(format!(
                "sweep dimension {} does not match field `{}` dimension {}",
                self.d,
                f.label(),
                f.d()
            )));
        }
        if self.n_list.is_empty() {
            return Err(Error::Domain("degree list must be non-empty".into()));
        }
        for pair in self.n_list.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::Domain(format!(
                    "degree list must be strictly ascending, got {} after {}",
                    pair[1], pair[0]
                )));
            }
        }
        if self.p_list.is_empty() {
            return Err(Error::Domain("exponent list must be non-empty".into()));
        }
        for &p in &self.p_list {
            check_exponent(p)?;
        }
        self.grid.validate()?;
        if self.cells_per_axis == 0 {
            return Err(Error::Domain("cells_per_axis must be positive".into()));
        }
        Ok(())
    }
}

/// One `(n, p)` entry of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub p: f64,
    pub error_lp: f64,
    pub error_sup: f64,
    pub a_nr: f64,
    pub tau_scale: f64,
    pub omega_scale: f64,
    pub ratio_tau: Option<f64>,
    pub ratio_omega: Option<f64>,
}

/// Sweep configuration echo carried inside the report.
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct SweepEcho {
    pub n_list: Vec<usize>,
    pub p_list: Vec<f64>,
    pub quad_order: usize,
    pub cells_per_axis: usize,
    pub x_points: usize,
    pub h_points: usize,
}

/// Full outcome of a convergence sweep.
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct ConvergenceReport {
    pub label: String,
    pub d: usize,
    pub r: usize,
    pub config: SweepEcho,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `-log error_lp` against `log n` for the
    /// first exponent; present when at least three degrees carry an error
    /// above `1e-13`.
    pub fitted_order: Option<f64>,
}

/// Run a convergence sweep of the operator family over a field.
pub fn run_convergence(f: &ScalarField, cfg: &SweepConfig) -> Result<ConvergenceReport> {
    cfg.validate(f)?;
    let rule = QuadratureRule::gauss_legendre(cfg.quad_order)?;
    let d = cfg.d;
    let mut rows = Vec::with_capacity(cfg.n_list.len() * cfg.p_list.len());
    for &n in &cfg.n_list {
        let params = OperatorParams::new(n, cfg.r, d)?;
        params.require_strict_regime()?;
        let ev = BskEvaluator::new(params, f, &rule, cfg.budget)?;
        let norms = operator_error_norms(&ev, f, &cfg.p_list, &rule, cfg.cells_per_axis)?;
        let a = a_nr(&params)?;
        let tau_radius = a.powf(1.0 / (2.0 * d as f64));
        let omega_radius = ((n + 1) as f64).powf(-1.0 / (2.0 * d as f64));
        for (pi, &p) in cfg.p_list.iter().enumerate() {
            let tau_scale = tau_modulus(f, tau_radius, p, &cfg.grid)?;
            let omega_scale = lp_modulus(f, omega_radius, p, &cfg.grid)?;
            let error_lp = norms.lp[pi];
            let ratio = |scale: f64| if scale > 0.0 { Some(error_lp / scale) } else { None };
            rows.push(ConvergenceRow {
                n,
                p,
                error_lp,
                error_sup: norms.sup,
                a_nr: a,
                tau_scale,
                omega_scale,
                ratio_tau: ratio(tau_scale),
                ratio_omega: ratio(omega_scale),
            });
        }
    }
    let fitted_order = fit_order(&rows, cfg.p_list[0]);
    Ok(ConvergenceReport {
        label: f.label().to_string(),
        d,
        r: cfg.r,
        config: SweepEcho {
            n_list: cfg.n_list.clone(),
            p_list: cfg.p_list.clone(),
            quad_order: cfg.quad_order,
            cells_per_axis: cfg.cells_per_axis,
            x_points: cfg.grid.x_points,
            h_points: cfg.grid.h_points,
        },
        rows,
        fitted_order,
    })
}

/// Least-squares slope of `log error` against `log n` for the rows of one
/// exponent, negated so a typical first-order decay reports `~1`. Rows at
/// or below `1e-13` are treated as converged-to-noise and skipped; at
/// least three surviving rows are required.
fn fit_order(rows: &[ConvergenceRow], p: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|row| row.p == p && row.error_lp > 1e-13)
        .map(|row| ((row.n as f64).ln(), row.error_lp.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let m = pts.len() as f64;
    let sx: f64 = pts.iter().map(|(x, _)| x).sum();
    let sy: f64 = pts.iter().map(|(_, y)| y).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| x * y).sum();
    let denom = m * sxx - sx * sx;
    if denom.abs() < 1e-30 {
        return None;
    }
    Some(-(m * sxy - sx * sy) / denom)
}
