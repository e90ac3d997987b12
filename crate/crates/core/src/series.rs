//! Truncated power series with exact rational coefficients.

use num_traits::{One, Zero};

use crate::scalar::{int, Rational};

/// Coefficients of `(1 − x)^s` through `x^order`.
pub fn binomial_series(s: &Rational, order: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(order + 1);
    let mut c = Rational::one();
    out.push(c);
    for j in 0..order {
        c = c * (int(j as i128) - s) / int(j as i128 + 1);
        out.push(c);
    }
    out
}

/// Coefficients of `(1 + x)^s` through `x^order`.
pub fn binomial_series_plus(s: &Rational, order: usize) -> Vec<Rational> {
    binomial_series(s, order)
        .into_iter()
        .enumerate()
        .map(|(j, c)| if j % 2 == 0 { c } else { -c })
        .collect()
}

/// Product of two power series truncated at the shorter length.
pub fn series_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().min(b.len());
    let mut out = vec![Rational::zero(); n];
    for (i, x) in a.iter().take(n).enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().take(n - i).enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Substitutes `x ↦ x^k` into a series, keeping terms through `x^order`.
pub fn series_dilate(a: &[Rational], k: usize, order: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); order + 1];
    for (i, x) in a.iter().enumerate() {
        if i * k <= order {
            out[i * k] = *x;
        }
    }
    out
}
