//! Operator-identity suites over a set of test vectors.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::Engine;
use crate::error::Result;
use crate::fock::{sector_allows, FockMonomial, FockSpace, FockVector, OscillatorMode, Oscillators};
use crate::lattice::{Lattice, LatticeVector};
use crate::scalar::{rat, Rational, Scalar};
use crate::series::{binomial_series, binomial_series_plus, series_mul};
use crate::vertex::{ExpSeries, ModeIndex};

#[derive(Clone, Debug, Default, Serialize)]
pub struct SuiteReport {
    pub checks: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.failures.len() < 20 {
            self.failures.push(what());
        }
    }
}

/// Seeded monomials with up to three creation modes of depth ≤ `max_twice`
/// and exponents in `[−2, 2]^l`.
pub fn random_monomials(fs: &FockSpace, count: usize, max_twice: i32, seed: u64) -> Vec<FockMonomial> {
    let rank = fs.rank();
    let l = rank.get();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut osc = Oscillators::empty();
            for _ in 0..rng.gen_range(0..4) {
                loop {
                    let twice = -rng.gen_range(1..=max_twice);
                    if let Ok(mode) = OscillatorMode::new(rank, rng.gen_range(0..=l), twice) {
                        osc.insert(mode, 1);
                        break;
                    }
                }
            }
            let exp: Vec<i32> = (0..l).map(|_| rng.gen_range(-2..=2)).collect();
            FockMonomial::new(osc, &exp)
        })
        .collect()
}

/// Coordinate Heisenberg modes `(dir, 2·degree)` with `|degree| ≤ max_twice/2`.
fn coordinate_modes(fs: &FockSpace, max_twice: i32) -> Vec<(usize, i32)> {
    let rank = fs.rank();
    (0..=fs.l())
        .flat_map(|d| (-max_twice..=max_twice).map(move |t| (d, t)))
        .filter(|&(d, t)| t != 0 && sector_allows(rank, d, t))
        .collect()
}

/// Commutators of coordinate modes, zero modes and the central element on
/// each monomial.
pub fn heisenberg_relations(fs: &FockSpace, monomials: &[FockMonomial], max_twice: i32) -> Result<SuiteReport> {
    let lattice = fs.lattice();
    let rank = fs.rank();
    let modes = coordinate_modes(fs, max_twice);
    let mut report = SuiteReport::default();
    for m in monomials {
        let v = FockVector::from_monomial(m.clone());
        let s = fs.exponent_vector(&m.exp).add(&lattice.lambda());
        for d in 0..fs.l() {
            let b = LatticeVector::basis(rank, d);
            let expected = v.scaled(&Scalar::from_rational(lattice.gram(&b, &s)?));
            report.record(fs.zero_mode(&b, &v)? == expected, || format!("zero mode {b} on {m}"));
        }
        report.record(fs.central(&v) == v, || format!("central element on {m}"));
        for &(dx, tx) in &modes {
            let x = LatticeVector::basis(rank, dx);
            let xv = fs.heisenberg(&x, tx, &v)?;
            for &(dy, ty) in &modes {
                let y = LatticeVector::basis(rank, dy);
                let lhs = fs.heisenberg(&x, tx, &fs.heisenberg(&y, ty, &v)?)?.difference(&fs.heisenberg(&y, ty, &xv)?);
                let c = if tx + ty == 0 { rat(tx as i128, 2) * lattice.gram_entry(dx, dy) } else { Rational::zero() };
                report.record(lhs == v.scaled(&Scalar::from_rational(c)), || format!("[{x}({tx}/2), {y}({ty}/2)] on {m}"));
            }
        }
    }
    Ok(report)
}

/// `[d₀, a(k)] = −k·a(k)` for coordinate modes and `deg X_d(α)v = deg v + d`
/// for every root and `|d| ≤ max_mode`.
pub fn grading(engine: &Engine, basis: &[FockMonomial], max_mode: i32) -> Result<SuiteReport> {
    let fs = engine.fock();
    let rank = fs.rank();
    let modes = coordinate_modes(fs, 2 * max_mode);
    let roots = engine.roots().all();
    let mut report = SuiteReport::default();
    for m in basis {
        let v = FockVector::from_monomial(m.clone());
        let d0v = fs.d0_apply(&v);
        for &(d, t) in &modes {
            let a = LatticeVector::basis(rank, d);
            let av = fs.heisenberg(&a, t, &v)?;
            let lhs = fs.d0_apply(&av).difference(&fs.heisenberg(&a, t, &d0v)?);
            report.record(lhs == av.scaled(&Scalar::from_rational(rat(-t as i128, 2))), || format!("[d0, {a}({t}/2)] on {m}"));
        }
        let deg = fs.degree_of(m);
        for (_, alpha) in &roots {
            for t in -2 * max_mode..=2 * max_mode {
                let d = ModeIndex::from_twice(t);
                let out = engine.x_mode(alpha, d, &v)?;
                if !out.is_zero() {
                    let ok = fs.homogeneous_degree(&out)? == Some(deg + d.value());
                    report.record(ok, || format!("degree of X_{}({alpha}) on {m}", d.value()));
                }
            }
        }
    }
    Ok(report)
}

type Bivariate = BTreeMap<(i64, i64), FockVector>;

/// `series⁺(a, z)·series⁻(b, w)·v` through `w^order`.
fn plus_minus(sp: &ExpSeries, sm: &ExpSeries, v: &FockVector, order: usize) -> Bivariate {
    let mut out = Bivariate::new();
    for (wexp, u) in sm.apply_creation(v, order) {
        for (zexp, x) in sp.apply_annihilation(&u) {
            out.entry((zexp, wexp)).or_default().add_assign(&x);
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// `f(w/z)·series⁻(b, w)·series⁺(a, z)·v` through `w^order`.
fn minus_plus(sp: &ExpSeries, sm: &ExpSeries, v: &FockVector, factor: &[Rational], order: usize) -> Bivariate {
    let mut out = Bivariate::new();
    for (zexp, u) in sp.apply_annihilation(v) {
        for (wexp, x) in sm.apply_creation(&u, order) {
            for (s, c) in factor.iter().enumerate() {
                let s = s as i64;
                if wexp + s <= order as i64 && !c.is_zero() {
                    out.entry((zexp - s, wexp + s)).or_default().add_scaled(&x, &Scalar::from_rational(*c));
                }
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Reordering identities for the exponential halves to `order` in `w/z`:
/// `E⁺(a,z)E⁻(b,w) = (1 − w²/z²)^{(a,b)} E⁻(b,w)E⁺(a,z)` and
/// `F⁺(pa,z)F⁻(pb,w) = (1 − w/z)^s (1 + w/z)^{−s} F⁻(pb,w)F⁺(pa,z)`, `s = (pa,pb)`.
pub fn contraction(lattice: &Lattice, vectors: &[FockVector], order: usize) -> Result<SuiteReport> {
    let mut points: Vec<LatticeVector> = lattice.roots().all().into_iter().map(|(_, r)| r).collect();
    points.push(LatticeVector::zero(lattice.rank()));
    let mut report = SuiteReport::default();
    for a in &points {
        for b in &points {
            let mut e_factor = vec![Rational::zero(); order + 1];
            for (j, c) in binomial_series(&lattice.gram(a, b)?, order / 2).into_iter().enumerate() {
                e_factor[2 * j] = c;
            }
            let (pa, pb) = (lattice.p_map(a)?, lattice.p_map(b)?);
            let s = lattice.gram(&pa, &pb)?;
            let f_factor = series_mul(&binomial_series(&s, order), &binomial_series_plus(&-s, order));
            let cases = [
                ("E", ExpSeries::e(lattice, a), ExpSeries::e(lattice, b), e_factor),
                ("F", ExpSeries::f(lattice, &pa), ExpSeries::f(lattice, &pb), f_factor),
            ];
            for (name, sp, sm, factor) in cases {
                let ok = vectors.iter().all(|v| {
                    let mut rhs = minus_plus(&sp, &sm, v, &factor[..=order], order);
                    rhs.retain(|(_, w), _| *w <= order as i64);
                    plus_minus(&sp, &sm, v, order) == rhs
                });
                report.record(ok, || format!("{name} identity for ({a}, {b})"));
            }
        }
    }
    Ok(report)
}
