//! Closed-form bound quantities and numerical verification of the
//! approximation theorems as bound-ratio reports.
//!
//! Three scalar quantities drive every estimate:
//!
//! * `A(n, r) = (3n + 1 + 3r(r-1)) / (12 (n+1)^2)` — the supremum over `x`
//!   of the per-axis central second moment, attained at `x = 1/2`.
//! * `M(r, d)` — the `L^p` operator-norm constant: `1` for `r in {0, 1}`
//!   and `((2r+2)/(r+3))^d` otherwise, the supremum of
//!   `((n+1)/(n-r+2))^d` over the admissible range `n > 2r` (attained at
//!   `n = 2r + 1`).
//! * `B(r)` — the supremum of `(n+1) A(n, r)` over `n > 2r`: `1/4` for
//!   `r in {0, 1}` and `(3r^2 + 3r + 4) / (24 (r+1))` otherwise (attained
//!   at `n = 2r + 1`).
//!
//! [`verify_theorem`] turns each inequality of interest into data: for a
//! list of degrees it computes the two sides and reports the ratio
//! `lhs / rhs`, which must stay bounded (and for the norm inequality stay
//! `<= 1`) when the theorem holds.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::moduli::{lp_modulus, mixed_partial_norms, tau_modulus, GridSpec};
use crate::norms::{field_lp_norm, operator_error_norms, operator_image_lp_norm};
use crate::operator::BskEvaluator;
use crate::params::{OperatorParams, DEFAULT_TERM_BUDGET};
use crate::quadrature::QuadratureRule;

/// Supremum of the per-axis central second moment,
/// `A(n, r) = (3n + 1 + 3r(r-1)) / (12 (n+1)^2)`. Requires `n > 2r`.
pub fn a_nr(params: &OperatorParams) -> Result<f64> {
    params.require_strict_regime()?;
    let n = params.n() as f64;
    let r = params.r() as f64;
    let np1 = n + 1.0;
    Ok((3.0 * n + 1.0 + 3.0 * r * (r - 1.0)) / (12.0 * np1 * np1))
}

/// Operator-norm constant `M(r, d)`: the tensor power of the worst-case
/// per-axis mass ratio over all admissible degrees.
pub fn m_r(r: usize, d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    if r <= 1 {
        return Ok(1.0);
    }
    let rf = r as f64;
    Ok(((2.0 * rf + 2.0) / (rf + 3.0)).powi(d as i32))
}

/// Degree-free moment constant `B(r) = sup_{n > 2r} (n+1) A(n, r)`.
pub fn b_r(r: usize) -> f64 {
    if r <= 1 {
        return 0.25;
    }
    let rf = r as f64;
    (3.0 * rf * rf + 3.0 * rf + 4.0) / (24.0 * (rf + 1.0))
}

/// The three bound quantities for one parameter set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundQuantities {
    pub a_nr: f64,
    pub m_r: f64,
    pub b_r: f64,
}

/// Compute `A(n, r)`, `M(r, d)`, `B(r)` together.
pub fn bound_quantities(params: &OperatorParams) -> Result<BoundQuantities> {
    Ok(BoundQuantities {
        a_nr: a_nr(params)?,
        m_r: m_r(params.r(), params.d())?,
        b_r: b_r(params.r()),
    })
}

/// The inequalities that can be verified numerically.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TheoremId {
    /// `|| K f - f ||_p` against the averaged modulus at radius
    /// `A(n, r)^(1/(2d))`.
    TauEstimate,
    /// `|| K f - f ||_p` against the derivative sum
    /// `sum_alpha (n+1)^(-|alpha|/(2d)) || D^alpha f ||_p`.
    SmoothEstimate,
    /// `|| K f - f ||_p` against the `L^p` modulus at radius
    /// `(n+1)^(-1/(2d))`.
    OmegaEstimate,
    /// `|| K f ||_p <= M(r, d)^(1/p) || f ||_p` — the ratio must stay
    /// at or below one.
    LpNormBound,
}

impl TheoremId {
    /// Stable lowercase identifier (used by the CLI and reports).
    pub fn name(&self) -> &'static str {
        match self {
            TheoremId::TauEstimate => "tau-estimate",
            TheoremId::SmoothEstimate => "smooth-estimate",
            TheoremId::OmegaEstimate => "omega-estimate",
            TheoremId::LpNormBound => "lp-norm-bound",
        }
    }

    /// Parse the identifier produced by [`TheoremId::name`].
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "tau-estimate" => Ok(TheoremId::TauEstimate),
            "smooth-estimate" => Ok(TheoremId::SmoothEstimate),
            "omega-estimate" => Ok(TheoremId::OmegaEstimate),
            "lp-norm-bound" => Ok(TheoremId::LpNormBound),
            other => Err(Error::Domain(format!(
                "unknown theorem `{other}`; expected one of tau-estimate, smooth-estimate, \
                 omega-estimate, lp-norm-bound"
            ))),
        }
    }
}

/// Numerical resolution knobs for [`verify_theorem`].
#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    /// `L^p` exponent.
    pub p: f64,
    /// Gauss-Legendre order for norms and cell means.
    pub quad_order: usize,
    /// Composite cells per axis for norm integrals.
    pub cells_per_axis: usize,
    /// Resolution of the modulus estimators.
    pub grid: GridSpec,
    /// Lattice term budget.
    pub budget: u128,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            p: 1.0,
            quad_order: 8,
            cells_per_axis: 64,
            grid: GridSpec::default(),
            budget: DEFAULT_TERM_BUDGET,
        }
    }
}

/// One degree's worth of evidence for an inequality.
#[derive(Clone, Copy, Debug)]
pub struct BoundRatioRow {
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`, or `None` when the right-hand side vanishes.
    pub ratio: Option<f64>,
}

/// Bound-ratio evidence for one theorem, one field, one shift.
#[derive(Clone, Debug)]
pub struct BoundRatioReport {
    pub theorem: TheoremId,
    pub label: String,
    pub d: usize,
    pub r: usize,
    pub p: f64,
    pub rows: Vec<BoundRatioRow>,
    /// Largest finite ratio across the rows.
    pub max_ratio: Option<f64>,
}

/// Evaluate both sides of a theorem for every degree in `n_list` (strictly
/// ascending, all in the regime `n > 2r`) and report the ratios.
pub fn verify_theorem(
    theorem: TheoremId,
    f: &ScalarField,
    r: usize,
    n_list: &[usize],
    cfg: &VerifyConfig,
) -> Result<BoundRatioReport> {
    if n_list.is_empty() {
        return Err(Error::Domain("degree list must be non-empty".into()));
    }
    for pair in n_list.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::Domain(format!(
                "degree list must be strictly ascending, got {} after {}",
                pair[1], pair[0]
            )));
        }
    }
    let d = f.d();
    let rule = QuadratureRule::gauss_legendre(cfg.quad_order)?;

    // Degree-independent pieces, computed once.
    let field_norm = match theorem {
        TheoremId::LpNormBound => Some(field_lp_norm(f, cfg.p, &rule, cfg.cells_per_axis)?),
        _ => None,
    };
    let partial_norms = match theorem {
        TheoremId::SmoothEstimate => Some(mixed_partial_norms(f, cfg.p, &rule, cfg.cells_per_axis)?),
        _ => None,
    };
    let m_const = m_r(r, d)?;

    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let params = OperatorParams::new(n, r, d)?;
        params.require_strict_regime()?;
        let ev = BskEvaluator::new(params, f, &rule, cfg.budget)?;
        let (lhs, rhs) = match theorem {
            TheoremId::TauEstimate => {
                let lhs =
                    operator_error_norms(&ev, f, &[cfg.p], &rule, cfg.cells_per_axis)?.lp[0];
                let radius = a_nr(&params)?.powf(1.0 / (2.0 * d as f64));
                let rhs = tau_modulus(f, radius, cfg.p, &cfg.grid)?;
                (lhs, rhs)
            }
            TheoremId::OmegaEstimate => {
                let lhs =
                    operator_error_norms(&ev, f, &[cfg.p], &rule, cfg.cells_per_axis)?.lp[0];
                let radius = ((n + 1) as f64).powf(-1.0 / (2.0 * d as f64));
                let rhs = lp_modulus(f, radius, cfg.p, &cfg.grid)?;
                (lhs, rhs)
            }
            TheoremId::SmoothEstimate => {
                let lhs =
                    operator_error_norms(&ev, f, &[cfg.p], &rule, cfg.cells_per_axis)?.lp[0];
                let norms = partial_norms.as_ref().unwrap();
                let rhs = norms
                    .iter()
                    .map(|(alpha, norm)| {
                        let weight: usize = alpha.iter().sum();
                        ((n + 1) as f64).powf(-(weight as f64) / (2.0 * d as f64)) * norm
                    })
                    .sum::<f64>();
                (lhs, rhs)
            }
            TheoremId::LpNormBound => {
                let lhs = operator_image_lp_norm(&ev, cfg.p, &rule, cfg.cells_per_axis)?;
                let rhs = m_const.powf(1.0 / cfg.p) * field_norm.unwrap();
                (lhs, rhs)
            }
        };
        let ratio = if rhs.abs() > 0.0 { Some(lhs / rhs) } else { None };
        rows.push(BoundRatioRow { n, lhs, rhs, ratio });
    }
    let max_ratio = rows
        .iter()
        .filter_map(|row| row.ratio)
        .fold(None, |m: Option<f64>, v| {
            Some(match m {
                Some(cur) => cur.max(v),
                None => v,
            })
        });
    Ok(BoundRatioReport {
        theorem,
        label: f.label().to_string(),
        d,
        r,
        p: cfg.p,
        rows,
        max_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::central_second_moment;
    use approx::assert_abs_diff_eq;

    fn small_cfg() -> VerifyConfig {
        VerifyConfig {
            p: 1.0,
            quad_order: 8,
            cells_per_axis: 16,
            grid: GridSpec {
                x_points: 33,
                h_points: 9,
            },
            budget: DEFAULT_TERM_BUDGET,
        }
    }

    #[test]
    fn closed_forms_at_reference_values() {
        let p52 = OperatorParams::new(5, 2, 1).unwrap();
        assert_abs_diff_eq!(a_nr(&p52).unwrap(), 11.0 / 216.0, epsilon = 1e-16);
        assert_abs_diff_eq!(m_r(2, 1).unwrap(), 1.2, epsilon = 1e-15);
        assert_abs_diff_eq!(m_r(2, 2).unwrap(), 1.44, epsilon = 1e-15);
        assert_eq!(m_r(0, 3).unwrap(), 1.0);
        assert_eq!(m_r(1, 2).unwrap(), 1.0);
        assert_abs_diff_eq!(b_r(2), 11.0 / 36.0, epsilon = 1e-16);
        assert_eq!(b_r(0), 0.25);
        assert_eq!(b_r(1), 0.25);
        // regime enforcement
        let tight = OperatorParams::new(4, 2, 1).unwrap();
        assert!(a_nr(&tight).is_err());
    }

    #[test]
    fn a_nr_is_the_centre_value_of_the_central_moment() {
        for &(n, r) in &[(5usize, 2usize), (9, 1), (17, 4), (33, 0)] {
            let params = OperatorParams::new(n, r, 1).unwrap();
            assert_abs_diff_eq!(
                a_nr(&params).unwrap(),
                central_second_moment(&params, 0, &[0.5]).unwrap(),
                epsilon = 1e-16
            );
        }
    }

    #[test]
    fn bound_quantity_inequalities() {
        for r in 0..=6usize {
            let br = b_r(r);
            for n in (2 * r + 1)..=(2 * r + 40) {
                let params = OperatorParams::new(n, r, 1).unwrap();
                let a = a_nr(&params).unwrap();
                assert!(a <= 1.0);
                assert!(
                    a <= br / (n as f64 + 1.0) + 1e-15,
                    "A(n={n}, r={r}) = {a} exceeds B(r)/(n+1)"
                );
            }
            // For r > 1 the supremum is attained at n = 2r + 1.
            if r > 1 {
                let first = OperatorParams::new(2 * r + 1, r, 1).unwrap();
                assert_abs_diff_eq!(
                    a_nr(&first).unwrap() * (2.0 * r as f64 + 2.0),
                    br,
                    epsilon = 1e-14
                );
            }
            assert!(m_r(r, 2).unwrap() >= 1.0);
        }
    }

    #[test]
    fn theorem_parsing_round_trips() {
        for id in [
            TheoremId::TauEstimate,
            TheoremId::SmoothEstimate,
            TheoremId::OmegaEstimate,
            TheoremId::LpNormBound,
        ] {
            assert_eq!(TheoremId::parse(id.name()).unwrap(), id);
        }
        assert!(TheoremId::parse("nope").is_err());
    }

    #[test]
    fn norm_bound_ratios_stay_below_one() {
        let f = ScalarField::from_expression("step(x1 - 0.5)", 1).unwrap();
        let report =
            verify_theorem(TheoremId::LpNormBound, &f, 2, &[5, 9, 17], &small_cfg()).unwrap();
        assert_eq!(report.rows.len(), 3);
        for row in &report.rows {
            let ratio = row.ratio.unwrap();
            assert!(ratio <= 1.0 + 1e-10, "ratio {ratio} exceeds one at n = {}", row.n);
        }
        assert!(report.max_ratio.unwrap() <= 1.0 + 1e-10);
    }

    #[test]
    fn zero_field_yields_no_ratios() {
        let f = ScalarField::from_expression("0", 1).unwrap();
        let report =
            verify_theorem(TheoremId::LpNormBound, &f, 1, &[5, 9], &small_cfg()).unwrap();
        assert!(report.rows.iter().all(|row| row.ratio.is_none()));
        assert!(report.max_ratio.is_none());
    }

    #[test]
    fn tau_estimate_ratios_stay_bounded() {
        let f = ScalarField::from_expression("abs(x1 - 0.5)", 1).unwrap();
        let report =
            verify_theorem(TheoremId::TauEstimate, &f, 1, &[5, 9, 17, 33], &small_cfg()).unwrap();
        let max = report.max_ratio.unwrap();
        assert!(max.is_finite() && max > 0.0);
        assert!(max < 10.0, "tau-estimate ratio unexpectedly large: {max}");
        // the error itself must decrease with n
        let lhs: Vec<f64> = report.rows.iter().map(|row| row.lhs).collect();
        assert!(lhs.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn degree_list_validation() {
        let f = ScalarField::from_expression("x1", 1).unwrap();
        assert!(verify_theorem(TheoremId::OmegaEstimate, &f, 1, &[], &small_cfg()).is_err());
        assert!(
            verify_theorem(TheoremId::OmegaEstimate, &f, 1, &[9, 5], &small_cfg()).is_err()
        );
        // n = 2r is out of regime
        assert!(matches!(
            verify_theorem(TheoremId::OmegaEstimate, &f, 2, &[4, 9], &small_cfg()),
            Err(Error::Regime { .. })
        ));
    }
}
