//! Bernstein and Stancu fundamental functions on `[0, 1]`.
//!
//! ## Definitions
//!
//! The Bernstein basis of degree `n` is
//!
//! ```text
//! p_{n,k}(x) = C(n,k) x^k (1-x)^(n-k)   for 0 <= k <= n,   else 0.
//! ```
//!
//! The Stancu fundamental functions with shift `r` combine two Bernstein
//! rows of degree `n - r`:
//!
//! ```text
//! w_{n,k,r}(x) = (1-x) p_{n-r,k}(x) + x p_{n-r,k-r}(x)
//! ```
//!
//! with the usual convention that out-of-range Bernstein indices
//! contribute zero. Splitting by which of the two terms survives gives the
//! familiar three branches (`0 <= k < r`, `r <= k <= n-r`, `n-r < k <= n`);
//! for `r = 0` and `r = 1` the degree-raising identity collapses the sum
//! back to `p_{n,k}`, which is why those shifts reproduce the classical
//! Bernstein operator.
//!
//! ## Numerics
//!
//! Binomial coefficients overflow `f64` near `n = 60`, and the textbook
//! recurrence seeded at `p_{n,0} = (1-x)^n` underflows to an unrecoverable
//! hard zero once `n ln(1-x) < -745`. Rows are therefore evaluated by an
//! incremental ratio recurrence anchored at the distribution mode
//! `k* ~ x(n+1)`: the anchor value is computed in log space, neighbours
//! follow from
//!
//! ```text
//! p_{n,k+1} = p_{n,k} * ((n-k)/(k+1)) * (x/(1-x)),
//! ```
//!
//! and tail terms that underflow are genuinely negligible (below
//! `1e-300`). Endpoints `x = 0, 1` are special-cased to exact unit
//! vectors.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::kahan::KahanSum;
use crate::params::OperatorParams;

fn check_unit_interval(x: f64) -> Result<()> {
    if x.is_nan() || !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x = {x} outside [0, 1]")));
    }
    Ok(())
}

/// `ln C(n, k)` summed over the smaller factor count, compensated.
fn ln_binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = KahanSum::new();
    for j in 1..=k {
        acc.add(((n - k + j) as f64).ln() - (j as f64).ln());
    }
    acc.total()
}

/// Log-space evaluation of `p_{n,k}(x)` for interior `x`.
fn ln_bernstein(n: usize, k: usize, x: f64) -> f64 {
    ln_binomial(n, k) + (k as f64) * x.ln() + ((n - k) as f64) * (1.0 - x).ln()
}

/// Bernstein fundamental function `p_{n,k}(x)`.
///
/// Any integer `k` is accepted; indices outside `0..=n` give `0`, matching
/// the convention used throughout the Stancu combination.
pub fn bernstein_basis(n: usize, k: i64, x: f64) -> Result<f64> {
    check_unit_interval(x)?;
    if k < 0 || k > n as i64 {
        return Ok(0.0);
    }
    let k = k as usize;
    if x == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    if x == 1.0 {
        return Ok(if k == n { 1.0 } else { 0.0 });
    }
    Ok(ln_bernstein(n, k, x).exp())
}

/// The whole row `[p_{n,0}(x), ..., p_{n,n}(x)]`, mode-anchored.
pub fn bernstein_row(n: usize, x: f64) -> Result<Vec<f64>> {
    check_unit_interval(x)?;
    let mut row = vec![0.0; n + 1];
    if x == 0.0 {
        row[0] = 1.0;
        return Ok(row);
    }
    if x == 1.0 {
        row[n] = 1.0;
        return Ok(row);
    }
    let anchor = (((n + 1) as f64) * x).floor() as usize;
    let anchor = anchor.min(n);
    row[anchor] = ln_bernstein(n, anchor, x).exp();
    let up_ratio = x / (1.0 - x);
    // downwards: p_{n,k-1} = p_{n,k} * (k / (n-k+1)) * ((1-x)/x)
    for k in (1..=anchor).rev() {
        row[k - 1] = row[k] * (k as f64) / ((n - k + 1) as f64) / up_ratio;
    }
    // upwards: p_{n,k+1} = p_{n,k} * ((n-k)/(k+1)) * (x/(1-x))
    for k in anchor..n {
        row[k + 1] = row[k] * ((n - k) as f64) / ((k + 1) as f64) * up_ratio;
    }
    Ok(row)
}

fn check_shift(n: usize, r: usize) -> Result<()> {
    if r > n {
        return Err(Error::Domain(format!("shift r = {r} exceeds degree n = {n}")));
    }
    Ok(())
}

/// Stancu fundamental function `w_{n,k,r}(x)`.
///
/// `k` must lie in `0..=n`; the shift must satisfy `r <= n`.
pub fn stancu_basis(n: usize, r: usize, k: i64, x: f64) -> Result<f64> {
    check_shift(n, r)?;
    check_unit_interval(x)?;
    if k < 0 || k > n as i64 {
        return Err(Error::Domain(format!("index k = {k} outside 0..={n}")));
    }
    let m = n - r;
    let left = bernstein_basis(m, k, x)?;
    let right = bernstein_basis(m, k - r as i64, x)?;
    Ok((1.0 - x) * left + x * right)
}

/// The whole row `[w_{n,0,r}(x), ..., w_{n,n,r}(x)]`.
pub fn stancu_row(n: usize, r: usize, x: f64) -> Result<Vec<f64>> {
    check_shift(n, r)?;
    let base = bernstein_row(n - r, x)?;
    let m = n - r;
    let mut row = vec![0.0; n + 1];
    for k in 0..=n {
        let mut w = 0.0;
        if k <= m {
            w += (1.0 - x) * base[k];
        }
        if k >= r && k - r <= m {
            w += x * base[k - r];
        }
        row[k] = w;
    }
    Ok(row)
}

/// Closed form of `integral_0^1 w_{n,k,r}(x) dx`:
///
/// ```text
/// (n-r-k+1) / ((n-r+2)(n-r+1))    for 0 <= k < r
/// (n-2r+2) / ((n-r+2)(n-r+1))     for r <= k <= n-r
/// (k-r+1) / ((n-r+2)(n-r+1))      for n-r < k <= n
/// ```
///
/// obtained by integrating each Bernstein term against the Beta kernel;
/// the branches are the survivors of the two-term combination, so the
/// formula below sums the live terms and covers every `n >= r`.
pub fn stancu_basis_integral(n: usize, r: usize, k: i64) -> Result<f64> {
    check_shift(n, r)?;
    if k < 0 || k > n as i64 {
        return Err(Error::Domain(format!("index k = {k} outside 0..={n}")));
    }
    let k = k as usize;
    let m = n - r;
    let denom = ((m + 2) * (m + 1)) as f64;
    let mut numer = 0.0;
    if k <= m {
        numer += (m - k + 1) as f64; // integral of (1-x) p_{m,k}
    }
    if k >= r && k - r <= m {
        numer += (k - r + 1) as f64; // integral of x p_{m,k-r}
    }
    Ok(numer / denom)
}

/// The shifted Bernstein-Stancu polynomial operator applied to a univariate
/// field:
///
/// ```text
/// L_{n,r}(f; x) = sum_{k=0}^{n-r} p_{n-r,k}(x) [ (1-x) f(k/n) + x f((k+r)/n) ]
/// ```
///
/// Defined for every `n >= r`; it interpolates `f` at both endpoints and
/// reduces to the Bernstein polynomial for `r` in `{0, 1}`.
pub fn bsb_apply(params: &OperatorParams, f: &ScalarField, x: f64) -> Result<f64> {
    if params.d() != 1 {
        return Err(Error::Domain(format!(
            "the polynomial operator is univariate; got d = {}",
            params.d()
        )));
    }
    if f.d() != 1 {
        return Err(Error::Domain(format!(
            "field `{}` has dimension {}, expected 1",
            f.label(),
            f.d()
        )));
    }
    check_unit_interval(x)?;
    let (n, r) = (params.n(), params.r());
    let row = bernstein_row(n - r, x)?;
    let nf = n as f64;
    let mut acc = KahanSum::new();
    for (k, &p) in row.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let low = f.eval(&[k as f64 / nf])?;
        let high = f.eval(&[(k + r) as f64 / nf])?;
        acc.add(p * ((1.0 - x) * low + x * high));
    }
    Ok(acc.total())
}
