//! Exact rational reference implementation of the shifted-basis
//! Kantorovich operator, used to validate the f64 pipeline against
//! round-off-free ground truth for small degrees.
//!
//! Everything here is `BigRational` arithmetic: basis weights, monomial
//! cell means, and full lattice sums are computed without any floating
//! point, then converted to `f64` only for the final comparison.

#![allow(dead_code)]

use bsk::ScalarField;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, ToPrimitive, Zero};

/// Shorthand rational constructor.
pub fn rat(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Lossy conversion for final comparisons.
pub fn to_f64(v: &BigRational) -> f64 {
    v.to_f64().expect("rational should fit in f64")
}

fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut out = BigInt::one();
    for i in 0..k {
        out = out * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    out
}

fn rat_pow(x: &BigRational, e: usize) -> BigRational {
    let mut out = BigRational::one();
    for _ in 0..e {
        out *= x;
    }
    out
}

/// Exact Bernstein weight `C(m, k) x^k (1 - x)^(m - k)`; indices outside
/// `0..=m` give zero, matching the f64 implementation's convention.
pub fn bernstein_exact(m: usize, k: i64, x: &BigRational) -> BigRational {
    if k < 0 || k > m as i64 {
        return BigRational::zero();
    }
    let k = k as usize;
    let one_minus = BigRational::one() - x;
    BigRational::from(binomial(m, k)) * rat_pow(x, k) * rat_pow(&one_minus, m - k)
}

/// Exact shifted weight `(1 - x) p_{n-r,k}(x) + x p_{n-r,k-r}(x)`.
pub fn stancu_exact(n: usize, r: usize, k: usize, x: &BigRational) -> BigRational {
    assert!(r <= n, "shift must not exceed degree");
    assert!(k <= n, "index must lie in 0..=n");
    let m = n - r;
    let one_minus = BigRational::one() - x;
    one_minus * bernstein_exact(m, k as i64, x)
        + x.clone() * bernstein_exact(m, k as i64 - r as i64, x)
}

/// Exact mean of the monomial `prod_i x_i^(e_i)` over the lattice cell
/// `prod_i [k_i/(n+1), (k_i+1)/(n+1)]`.
pub fn monomial_cell_mean_exact(n: usize, k: &[usize], exps: &[usize]) -> BigRational {
    assert_eq!(k.len(), exps.len());
    let np1 = BigInt::from(n + 1);
    let mut out = BigRational::one();
    for (&ki, &e) in k.iter().zip(exps) {
        let lo = BigRational::new(BigInt::from(ki), np1.clone());
        let hi = BigRational::new(BigInt::from(ki + 1), np1.clone());
        // mean of t^e over [lo, hi]: (hi^(e+1) - lo^(e+1)) / ((e+1)(hi - lo))
        let numer = rat_pow(&hi, e + 1) - rat_pow(&lo, e + 1);
        let denom = BigRational::from(BigInt::from(e + 1)) * (hi - lo);
        out *= numer / denom;
    }
    out
}

/// Exact operator value on a monomial at a rational point: the full
/// lattice sum of tensor weights times exact cell means.
pub fn bsk_monomial_exact(n: usize, r: usize, exps: &[usize], x: &[BigRational]) -> BigRational {
    let d = exps.len();
    assert_eq!(x.len(), d);
    let stride = n + 1;
    let total = stride.pow(d as u32);
    let mut out = BigRational::zero();
    for flat in 0..total {
        let mut k = vec![0usize; d];
        let mut rest = flat;
        for ax in (0..d).rev() {
            k[ax] = rest % stride;
            rest /= stride;
        }
        let mut w = BigRational::one();
        for ax in 0..d {
            w *= stancu_exact(n, r, k[ax], &x[ax]);
        }
        out += w * monomial_cell_mean_exact(n, &k, exps);
    }
    out
}

/// The same monomial as an f64 field (smooth, so no declared singularities).
pub fn monomial_field(exps: &[usize]) -> ScalarField {
    let owned: Vec<usize> = exps.to_vec();
    let label = owned
        .iter()
        .enumerate()
        .map(|(ax, e)| format!("x{}^{}", ax + 1, e))
        .collect::<Vec<_>>()
        .join("*");
    ScalarField::from_closure(label, exps.len(), Vec::new(), move |x: &[f64]| {
        x.iter()
            .zip(&owned)
            .map(|(xi, &e)| xi.powi(e as i32))
            .product()
    })
}
