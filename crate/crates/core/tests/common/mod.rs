#![allow(dead_code)]

use std::collections::BTreeMap;

use num_traits::Zero;
use twistfock_core::fock::FockVector;
use twistfock_core::lattice::{Lattice, LatticeVector};
use twistfock_core::scalar::Rational;
use twistfock_core::series::binomial_series;
use twistfock_core::vertex::ExpSeries;
use twistfock_core::Scalar;

pub type Laurent = BTreeMap<(i64, i64), FockVector>;

pub fn add_into(map: &mut Laurent, key: (i64, i64), v: &FockVector, c: &Scalar) {
    let slot = map.entry(key).or_default();
    slot.add_scaled(v, c);
}

pub fn clean(mut map: Laurent) -> Laurent {
    map.retain(|_, v| !v.is_zero());
    map
}

/// `series⁺(a, z) series⁻(b, w)·v` through `w^order`.
pub fn plus_then_minus(s_plus: &ExpSeries, s_minus: &ExpSeries, v: &FockVector, order: usize) -> Laurent {
    let mut out = Laurent::new();
    for (wexp, u) in s_minus.apply_creation(v, order) {
        for (zexp, x) in s_plus.apply_annihilation(&u) {
            add_into(&mut out, (zexp, wexp), &x, &Scalar::one());
        }
    }
    clean(out)
}

/// `f(w/z) · series⁻(b, w) series⁺(a, z)·v` through `w^order`.
pub fn minus_then_plus(s_plus: &ExpSeries, s_minus: &ExpSeries, v: &FockVector, factor: &[Rational], order: usize) -> Laurent {
    let mut out = Laurent::new();
    for (zexp, u) in s_plus.apply_annihilation(v) {
        for (wexp, x) in s_minus.apply_creation(&u, order) {
            for (s, c) in factor.iter().enumerate() {
                let s = s as i64;
                if wexp + s > order as i64 || c.is_zero() {
                    continue;
                }
                add_into(&mut out, (zexp - s, wexp + s), &x, &Scalar::from_rational(*c));
            }
        }
    }
    clean(out)
}

pub fn truncate(map: Laurent, order: i64) -> Laurent {
    map.into_iter().filter(|((_, w), _)| *w <= order).collect()
}

/// `(1 − x)^s (1 + x)^{−s}` through `x^order`.
pub fn ratio_series(s: &Rational, order: usize) -> Vec<Rational> {
    let minus = binomial_series(s, order);
    let plus: Vec<Rational> = binomial_series(&-*s, order)
        .into_iter()
        .enumerate()
        .map(|(j, c)| if j % 2 == 0 { c } else { -c })
        .collect();
    let mut out = vec![Rational::zero(); order + 1];
    for (i, a) in minus.iter().enumerate() {
        for (j, b) in plus.iter().enumerate() {
            if i + j <= order {
                out[i + j] += a * b;
            }
        }
    }
    out
}


/// Checks `series⁺(a,z) series⁻(b,w)·v = f(w/z) series⁻(b,w) series⁺(a,z)·v`
/// through `w^order` for both the even and the odd exponential.
pub fn contraction_holds(lattice: &Lattice, a: &LatticeVector, b: &LatticeVector, vs: &[FockVector], order: usize) -> (bool, bool) {
    let ab = lattice.gram(a, b).unwrap();
    let mut e_factor = vec![Rational::zero(); order + 1];
    for (j, c) in binomial_series(&ab, order / 2).into_iter().enumerate() {
        e_factor[2 * j] = c;
    }
    let pa = lattice.p_map(a).unwrap();
    let pb = lattice.p_map(b).unwrap();
    let f_factor = ratio_series(&lattice.gram(&pa, &pb).unwrap(), order);
    let check = |sp: ExpSeries, sm: ExpSeries, factor: &[Rational]| {
        vs.iter().all(|v| plus_then_minus(&sp, &sm, v, order) == truncate(minus_then_plus(&sp, &sm, v, factor, order), order as i64))
    };
    (
        check(ExpSeries::e(lattice, a), ExpSeries::e(lattice, b), &e_factor),
        check(ExpSeries::f(lattice, &pa), ExpSeries::f(lattice, &pb), &f_factor),
    )
}

pub fn roots_and_zero(lattice: &Lattice) -> Vec<LatticeVector> {
    let mut v: Vec<LatticeVector> = lattice.roots().all().into_iter().map(|(_, r)| r).collect();
    v.push(LatticeVector::zero(lattice.rank()));
    v
}
