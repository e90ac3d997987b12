//! Twisted vertex operators `X(α, z)` and exact extraction of their modes.
//!
//! Every exponential factor is handled as `exp(Σ_k t_k x^k)` with `k` counted
//! in half-units: even `k` carry the integer modes of `α`, odd `k` carry the
//! half-odd modes of `p(α)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use parking_lot::RwLock;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{add_rational, osc_poly_one, FockMonomial, FockSpace, FockVector, OscPoly, Oscillators, OscillatorMode};
use crate::lattice::{cocycle_ints, p0_ints, Lattice, LatticeVector, RootClass};
use crate::scalar::{int, rat, Rational, Scalar};

/// How the phase operator `(−1)^{−p₀(α)}` acts on `v ⊗ e^{s+λ}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseConvention {
    /// Pairs `p₀(α)` with the full exponent `s + λ`.
    FullExponent,
    /// Pairs `p₀(α)` with the lattice part `s` only.
    LatticeOnly,
}

impl PhaseConvention {
    pub const ALL: [PhaseConvention; 2] = [PhaseConvention::FullExponent, PhaseConvention::LatticeOnly];

    pub fn name(self) -> &'static str {
        match self {
            PhaseConvention::FullExponent => "full-exponent",
            PhaseConvention::LatticeOnly => "lattice-only",
        }
    }
}

/// A mode index `d ∈ ½Z`, stored as `2d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeIndex {
    pub twice: i32,
}

impl ModeIndex {
    pub fn from_twice(twice: i32) -> Self {
        ModeIndex { twice }
    }

    pub fn from_rational(d: &Rational) -> Option<Self> {
        let t = d * int(2);
        t.is_integer().then(|| ModeIndex { twice: t.to_integer() as i32 })
    }

    pub fn value(self) -> Rational {
        rat(self.twice as i128, 2)
    }

    pub fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }
}

/// `exp(∓Σ_k (2/k) γ_k(±k/2) x^{±k})` where `γ_k` is `even` for even `k` and
/// `odd` for odd `k`; either may be absent.
///
/// `E^±(α)` is `even = α`, `F^±(pα)` is `odd = pα`, and `Y` uses both.
#[derive(Debug)]
pub struct ExpSeries {
    even: Option<LatticeVector>,
    odd: Option<LatticeVector>,
    even_pairings: Vec<Rational>,
    odd_pairings: Vec<Rational>,
    creation: RwLock<Vec<Arc<OscPoly>>>,
}

impl Clone for ExpSeries {
    fn clone(&self) -> Self {
        ExpSeries {
            even: self.even.clone(),
            odd: self.odd.clone(),
            even_pairings: self.even_pairings.clone(),
            odd_pairings: self.odd_pairings.clone(),
            creation: RwLock::new(self.creation.read().clone()),
        }
    }
}

impl ExpSeries {
    pub fn new(lattice: &Lattice, even: Option<LatticeVector>, odd: Option<LatticeVector>) -> Self {
        let pair = |v: &Option<LatticeVector>| match v {
            Some(v) => (0..=lattice.l()).map(|d| lattice.pair_with_basis(v, d)).collect(),
            None => vec![Rational::zero(); lattice.l() + 1],
        };
        let even = even.filter(|v| !v.is_zero());
        let odd = odd.filter(|v| !v.is_zero());
        ExpSeries {
            even_pairings: pair(&even),
            odd_pairings: pair(&odd),
            even,
            odd,
            creation: RwLock::new(vec![Arc::new(osc_poly_one())]),
        }
    }

    /// `E^±(α)`.
    pub fn e(lattice: &Lattice, alpha: &LatticeVector) -> Self {
        ExpSeries::new(lattice, Some(alpha.clone()), None)
    }

    /// `F^±(pα)`.
    pub fn f(lattice: &Lattice, p_alpha: &LatticeVector) -> Self {
        ExpSeries::new(lattice, None, Some(p_alpha.clone()))
    }

    fn gamma(&self, k: usize) -> Option<&LatticeVector> {
        if k.is_multiple_of(2) {
            self.even.as_ref()
        } else {
            self.odd.as_ref()
        }
    }

    fn pairings(&self, k: usize) -> &[Rational] {
        if k.is_multiple_of(2) {
            &self.even_pairings
        } else {
            &self.odd_pairings
        }
    }

    /// Coefficient of `x^c` in the creation half `exp(Σ (2/k) γ_k(−k/2) x^k)`.
    pub fn creation(&self, c: usize) -> Arc<OscPoly> {
        if let Some(p) = self.creation.read().get(c) {
            return p.clone();
        }
        let mut cache = self.creation.write();
        while cache.len() <= c {
            let n = cache.len();
            // n·S_n = Σ_k 2·γ_k(−k/2)·S_{n−k}
            let mut next = OscPoly::default();
            for k in 1..=n {
                let Some(g) = self.gamma(k) else { continue };
                let prev = &cache[n - k];
                for (dir, coef) in g.coeffs().iter().enumerate() {
                    if coef.is_zero() {
                        continue;
                    }
                    let mode = OscillatorMode { twice_degree: -(k as i32), dir: dir as u16 };
                    let f = coef * rat(2, n as i128);
                    for (osc, x) in prev.iter() {
                        add_rational(&mut next, osc.with(mode, 1), x * f);
                    }
                }
            }
            cache.push(Arc::new(next));
        }
        cache[c].clone()
    }

    /// Coefficients `U_k u` of `x^{−k}` in the annihilation half
    /// `exp(−Σ (2/k) γ_k(k/2) x^{−k})` applied to a single oscillator
    /// monomial; index `k` runs over `0..=depth(u)`.
    pub fn annihilation(&self, u: &Oscillators) -> Vec<OscPoly> {
        let depth = u.half_units().max(0) as usize;
        let mut out: Vec<OscPoly> = Vec::with_capacity(depth + 1);
        let mut first = OscPoly::default();
        first.insert(u.clone(), Rational::one());
        out.push(first);
        for k in 1..=depth {
            // k·U_k = Σ_j (−2·γ_j(j/2)) U_{k−j}
            let mut next = OscPoly::default();
            for j in 1..=k {
                if self.gamma(j).is_none() {
                    continue;
                }
                let pairings = self.pairings(j);
                for (osc, x) in out[k - j].iter() {
                    for (o, c) in osc.contract(pairings, j as i32) {
                        add_rational(&mut next, o, c * x * rat(-2, k as i128));
                    }
                }
            }
            out.push(next);
        }
        out
    }

    /// Creation terms through `x^max` as a map `exponent → polynomial`.
    pub fn creation_truncated(&self, max: usize) -> BTreeMap<i64, OscPoly> {
        (0..=max)
            .map(|c| (c as i64, (*self.creation(c)).clone()))
            .filter(|(_, p)| !p.is_empty())
            .collect()
    }

    /// Annihilation half applied to `v`, as a finite map `x`-exponent → vector.
    pub fn apply_annihilation(&self, v: &FockVector) -> BTreeMap<i64, FockVector> {
        let mut out: BTreeMap<i64, FockVector> = BTreeMap::new();
        for (m, c) in v.iter() {
            for (k, poly) in self.annihilation(&m.osc).into_iter().enumerate() {
                let slot = out.entry(-(k as i64)).or_default();
                for (osc, x) in poly {
                    slot.add_term(FockMonomial { osc, exp: m.exp.clone() }, c.scale(&x));
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    /// Creation half through `x^max` applied to `v`.
    pub fn apply_creation(&self, v: &FockVector, max: usize) -> BTreeMap<i64, FockVector> {
        let mut out: BTreeMap<i64, FockVector> = BTreeMap::new();
        for cexp in 0..=max {
            let poly = self.creation(cexp);
            let slot = out.entry(cexp as i64).or_default();
            for (m, c) in v.iter() {
                for (osc, x) in poly.iter() {
                    slot.add_term(FockMonomial { osc: m.osc.product(osc), exp: m.exp.clone() }, c.scale(x));
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }
}

/// `E⁺(α, z)·v`, keyed by the exponent of `z`.
pub fn e_plus_apply(lattice: &Lattice, alpha: &LatticeVector, v: &FockVector) -> BTreeMap<i64, FockVector> {
    ExpSeries::e(lattice, alpha).apply_annihilation(v)
}

/// Creation terms of `E⁻(α, z)` of total depth at most `budget`, keyed by the exponent of `z`.
pub fn e_minus_truncated(lattice: &Lattice, alpha: &LatticeVector, budget: &Rational) -> BTreeMap<i64, OscPoly> {
    let max = (budget * int(2)).floor().to_integer().max(0) as usize;
    ExpSeries::e(lattice, alpha).creation_truncated(max)
}

/// `F⁺(pα, z)·v`, keyed by the exponent of `z`.
pub fn f_plus_apply(lattice: &Lattice, p_alpha: &LatticeVector, v: &FockVector) -> BTreeMap<i64, FockVector> {
    ExpSeries::f(lattice, p_alpha).apply_annihilation(v)
}

/// Creation terms of `F⁻(pα, z)` of total depth at most `budget`.
pub fn f_minus_truncated(lattice: &Lattice, p_alpha: &LatticeVector, budget: &Rational) -> BTreeMap<i64, OscPoly> {
    let max = (budget * int(2)).floor().to_integer().max(0) as usize;
    ExpSeries::f(lattice, p_alpha).creation_truncated(max)
}

/// A lattice point of `Q` together with its folding data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexSymbol {
    pub alpha: LatticeVector,
    pub class: Option<RootClass>,
    pub p: LatticeVector,
    pub p0: LatticeVector,
}

impl VertexSymbol {
    pub fn new(lattice: &Lattice, alpha: &LatticeVector) -> Result<Self> {
        let p = lattice.p_map(alpha)?;
        let p0 = lattice.p0_map(alpha)?;
        let class = lattice.roots().classify(alpha);
        Ok(VertexSymbol { alpha: alpha.clone(), class, p, p0 })
    }
}

/// `X(α, z)` ready for repeated mode extraction.
#[derive(Clone, Debug)]
pub struct VertexOperator {
    symbol: VertexSymbol,
    lattice: Lattice,
    alpha: Vec<i64>,
    p0: Vec<i64>,
    norm: Rational,
    twice_alpha_lambda: Rational,
    p0_lambda: Rational,
    prefactor: Scalar,
    y: ExpSeries,
}

impl VertexOperator {
    pub fn new(lattice: &Lattice, alpha: &LatticeVector) -> Result<Self> {
        let symbol = VertexSymbol::new(lattice, alpha)?;
        Ok(VertexOperator::from_symbol(lattice, symbol))
    }

    pub fn from_symbol(lattice: &Lattice, symbol: VertexSymbol) -> Self {
        let alpha = symbol.alpha.q_coords().expect("symbol lies in Q");
        let p0 = p0_ints(&alpha);
        let norm = rat(lattice.twice_pair_q(&alpha, &alpha) as i128, 2);
        let twice_alpha_lambda = lattice.pair_lambda(&alpha) * int(2);
        let p0_lambda = lattice.pair_lambda(&p0);
        let prefactor = if symbol.class == Some(RootClass::Short) { Scalar::i() } else { Scalar::one() };
        let y = ExpSeries::new(lattice, Some(symbol.alpha.clone()), Some(symbol.p.clone()));
        VertexOperator {
            lattice: lattice.clone(),
            alpha,
            p0,
            norm,
            twice_alpha_lambda,
            p0_lambda,
            prefactor,
            y,
            symbol,
        }
    }

    pub fn symbol(&self) -> &VertexSymbol {
        &self.symbol
    }

    pub fn alpha(&self) -> &[i64] {
        &self.alpha
    }

    /// Exponent of `z` contributed by `z^{(α,α)} z^{2α}` on exponent `r`.
    pub fn z_shift(&self, r: &[i64]) -> Rational {
        self.norm + int(self.lattice.twice_pair_q(&self.alpha, r) as i128) + self.twice_alpha_lambda
    }

    /// The phase `(−1)^{−(p₀α, s)}` on the exponent `s` (lattice part).
    pub fn phase(&self, s: &[i64], convention: PhaseConvention) -> Scalar {
        let mut q = rat(self.lattice.twice_pair_q(&self.p0, s) as i128, 2);
        if convention == PhaseConvention::FullExponent {
            q += self.p0_lambda;
        }
        Scalar::minus_one_pow(&-q).expect("phase lies in Q(ζ8)")
    }

    /// Scalar multiplying every term of `X(α, z)` on a monomial with exponent `r`.
    pub fn monomial_scalar(&self, r: &[i64], convention: PhaseConvention) -> Scalar {
        let out: Vec<i64> = r.iter().zip(&self.alpha).map(|(a, b)| a + b).collect();
        let sign = cocycle_ints(&self.alpha, r);
        let s = &self.phase(&out, convention) * &self.prefactor;
        if sign < 0 {
            -s
        } else {
            s
        }
    }

    /// The coefficient of `z^{−2d}` of `X(α, z)` applied to a single monomial.
    pub fn mode_on_monomial(&self, d: ModeIndex, m: &FockMonomial, convention: PhaseConvention) -> FockVector {
        let r = m.exp_i64();
        let mut out = FockVector::zero();
        let Some(base) = self.creation_base(d, &r) else { return out };
        let poly = self.oscillator_part(base, &m.osc);
        if poly.is_empty() {
            return out;
        }
        let scalar = self.monomial_scalar(&r, convention);
        let exp = self.shifted_exponent(&r);
        for (osc, x) in poly {
            out.add_term(FockMonomial { osc, exp: exp.clone() }, scalar.scale(&x));
        }
        out
    }

    /// Creation index offset `−2d − shift` on exponent `r`, or `None` when
    /// the mode is not present (non-integral shift).
    pub fn creation_base(&self, d: ModeIndex, r: &[i64]) -> Option<i64> {
        let shift = self.z_shift(r);
        if !shift.is_integer() {
            return None;
        }
        Some(-(d.twice as i64) - shift.to_integer())
    }

    pub fn shifted_exponent(&self, r: &[i64]) -> crate::fock::Point {
        r.iter().zip(&self.alpha).map(|(a, b)| (a + b) as i32).collect()
    }

    /// `Σ_k S_{base+k} U_k u`: the oscillator polynomial of a mode, without
    /// its scalar.
    pub fn oscillator_part(&self, base: i64, u: &Oscillators) -> OscPoly {
        let mut out = OscPoly::default();
        if base + u.half_units() < 0 {
            return out;
        }
        let ann = self.y.annihilation(u);
        for (k, poly) in ann.iter().enumerate() {
            let c = base + k as i64;
            if c < 0 || poly.is_empty() {
                continue;
            }
            let cre = self.y.creation(c as usize);
            for (o1, x1) in poly.iter() {
                for (o2, x2) in cre.iter() {
                    add_rational(&mut out, o1.product(o2), x1 * x2);
                }
            }
        }
        out
    }

    /// `X_d(α)·v`.
    pub fn x_mode(&self, d: ModeIndex, v: &FockVector, convention: PhaseConvention) -> FockVector {
        let mut out = FockVector::zero();
        for (m, c) in v.iter() {
            out.add_scaled(&self.mode_on_monomial(d, m, convention), c);
        }
        out
    }
}

/// `X_d(α)·v` for a one-off query.
pub fn x_mode(fs: &FockSpace, alpha: &LatticeVector, d: ModeIndex, v: &FockVector, convention: PhaseConvention) -> Result<FockVector> {
    if alpha.rank() != fs.rank() {
        return Err(Error::RankMismatch { left: fs.l(), right: alpha.rank().get() });
    }
    Ok(VertexOperator::new(fs.lattice(), alpha)?.x_mode(d, v, convention))
}

/// Coefficients of `X(a, b, z, w)·v` on the first `order + 1` exponents of
/// each variable above the lowest one reached from `v`, keyed by
/// `(z-exponent, w-exponent)`. Every returned coefficient is exact.
pub fn two_point_composite(
    lattice: &Lattice,
    a: &LatticeVector,
    b: &LatticeVector,
    order: usize,
    v: &FockVector,
    convention: PhaseConvention,
) -> Result<BTreeMap<(Rational, Rational), FockVector>> {
    let tp = TwoPoint::new(lattice, a, b)?;
    let mut keys = std::collections::BTreeSet::new();
    for m in v.monomials() {
        let depth = m.osc.half_units();
        let w0 = tp.w_shift(&m.exp_i64()) - int(depth as i128);
        for i in 0..=order as i64 {
            for j in 0..=order as i64 {
                keys.insert((int((i - depth) as i128), w0 + int(j as i128)));
            }
        }
    }
    let mut out = BTreeMap::new();
    for (z, w) in keys {
        let c = tp.coefficient(&z, &w, v, convention);
        if !c.is_zero() {
            out.insert((z, w), c);
        }
    }
    Ok(out)
}

/// Coefficient of `z^{zexp} w^{wexp}` in the normally ordered composite
/// `X(a, b, z, w)·v`.
pub fn two_point_coefficient(
    lattice: &Lattice,
    a: &LatticeVector,
    b: &LatticeVector,
    zexp: &Rational,
    wexp: &Rational,
    v: &FockVector,
    convention: PhaseConvention,
) -> Result<FockVector> {
    let pa = TwoPoint::new(lattice, a, b)?;
    Ok(pa.coefficient(zexp, wexp, v, convention))
}

/// Shared data of the composite `X(a, b, z, w)`.
#[derive(Clone, Debug)]
pub struct TwoPoint {
    ya: VertexOperator,
    yb: VertexOperator,
    sum: VertexOperator,
}

impl TwoPoint {
    pub fn new(lattice: &Lattice, a: &LatticeVector, b: &LatticeVector) -> Result<Self> {
        Ok(TwoPoint {
            ya: VertexOperator::new(lattice, a)?,
            yb: VertexOperator::new(lattice, b)?,
            sum: VertexOperator::new(lattice, &a.add(b))?,
        })
    }

    /// Exponent of `w` from `w^{(a+b,a+b)} w^{2(a+b)}` on exponent `r`.
    pub fn w_shift(&self, r: &[i64]) -> Rational {
        self.sum.z_shift(r)
    }

    pub fn coefficient(&self, zexp: &Rational, wexp: &Rational, v: &FockVector, convention: PhaseConvention) -> FockVector {
        let mut out = FockVector::zero();
        for (m, coef) in v.iter() {
            let r = m.exp_i64();
            let wz = *wexp - self.w_shift(&r);
            if !zexp.is_integer() || !wz.is_integer() {
                continue;
            }
            let (zc, wc) = (zexp.to_integer(), wz.to_integer());
            let sign = cocycle_ints(self.sum.alpha(), &r);
            let out_exp: Vec<i64> = r.iter().zip(self.sum.alpha()).map(|(x, y)| x + y).collect();
            let mut scalar = &(&self.sum.phase(&out_exp, convention) * &self.ya.prefactor) * &self.yb.prefactor;
            if sign < 0 {
                scalar = -scalar;
            }
            scalar *= coef;
            let exp: crate::fock::Point = out_exp.iter().map(|&x| x as i32).collect();
            // all annihilators act first: z-part, then w-part
            let ann_a = self.ya.y.annihilation(&m.osc);
            for (ka, pa) in ann_a.iter().enumerate() {
                let ca = zc + ka as i64;
                if ca < 0 || pa.is_empty() {
                    continue;
                }
                let cre_a = self.ya.y.creation(ca as usize);
                for (oa, xa) in pa.iter() {
                    let ann_b = self.yb.y.annihilation(oa);
                    for (kb, pb) in ann_b.iter().enumerate() {
                        let cb = wc + kb as i64;
                        if cb < 0 || pb.is_empty() {
                            continue;
                        }
                        let cre_b = self.yb.y.creation(cb as usize);
                        for (ob, xb) in pb.iter() {
                            for (o1, y1) in cre_a.iter() {
                                for (o2, y2) in cre_b.iter() {
                                    let osc = ob.product(o1).product(o2);
                                    let x = xa * xb * y1 * y2;
                                    out.add_term(FockMonomial { osc, exp: exp.clone() }, scalar.scale(&x));
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::DegreeWindow;
    use crate::lattice::Rank;

    fn setup() -> (FockSpace, Rank) {
        let fs = FockSpace::new(Rank::new(2).unwrap());
        let r = fs.rank();
        (fs, r)
    }

    fn osc(dir: u16, twice_degree: i32) -> Oscillators {
        Oscillators::empty().with(OscillatorMode { twice_degree, dir }, 1)
    }

    #[test]
    fn e_plus_fixes_vacuum() {
        let (fs, r) = setup();
        let vac = FockVector::vacuum(&[1, 0]);
        let out = e_plus_apply(fs.lattice(), &LatticeVector::alpha(r, 1), &vac);
        assert_eq!(out.len(), 1);
        assert_eq!(out[&0], vac);
    }

    #[test]
    fn e_plus_single_contraction() {
        let (fs, r) = setup();
        let v = FockVector::from_monomial(FockMonomial::new(osc(1, -2), &[0, 0]));
        let out = e_plus_apply(fs.lattice(), &LatticeVector::alpha(r, 2), &v);
        assert_eq!(out[&0], v);
        assert_eq!(out[&-2], FockVector::vacuum(&[0, 0]).scaled(&Scalar::from_rational(rat(-1, 2))));
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn e_minus_low_orders() {
        let (fs, r) = setup();
        let a = LatticeVector::alpha(r, 1);
        let zero = e_minus_truncated(fs.lattice(), &a, &int(0));
        assert_eq!(zero.len(), 1);
        assert_eq!(zero[&0], osc_poly_one());
        let two = e_minus_truncated(fs.lattice(), &a, &int(2));
        assert_eq!(two[&2].len(), 1);
        assert_eq!(two[&2][&osc(0, -2)], int(1));
        let z4 = &two[&4];
        assert_eq!(z4[&osc(0, -4)], rat(1, 2));
        assert_eq!(z4[&Oscillators::empty().with(OscillatorMode { twice_degree: -2, dir: 0 }, 2)], rat(1, 2));
        assert!(!two.contains_key(&1) && !two.contains_key(&3));
    }

    #[test]
    fn f_minus_first_order() {
        let (fs, r) = setup();
        let p = fs.lattice().p_map(&LatticeVector::alpha(r, 2)).unwrap();
        let series = f_minus_truncated(fs.lattice(), &p, &rat(1, 2));
        assert_eq!(series[&1][&osc(2, -1)], int(2));
        let vac = FockVector::vacuum(&[0, 0]);
        let out = f_plus_apply(fs.lattice(), &p, &vac);
        assert_eq!(out[&0], vac);
    }

    #[test]
    fn f_trivial_for_long_roots() {
        let (fs, r) = setup();
        let long = LatticeVector::from_ints(r, &[0, 2]);
        let p = fs.lattice().p_map(&long).unwrap();
        assert!(p.is_zero());
        let series = f_minus_truncated(fs.lattice(), &p, &int(3));
        assert_eq!(series.len(), 1);
    }

    #[test]
    fn simple_root_zero_modes_kill_top_vacuum() {
        let (fs, r) = setup();
        let vac = FockVector::vacuum(&[0, 0]);
        for i in 1..=2 {
            for conv in PhaseConvention::ALL {
                let out = x_mode(&fs, &LatticeVector::alpha(r, i), ModeIndex::from_twice(0), &vac, conv).unwrap();
                assert!(out.is_zero());
            }
        }
    }

    #[test]
    fn lowest_mode_is_vacuum_to_vacuum() {
        let (fs, r) = setup();
        let a = LatticeVector::alpha(r, 2);
        let op = VertexOperator::new(fs.lattice(), &a).unwrap();
        let m = FockMonomial::vacuum(&[0, 0]);
        // z-exponent of the lowest term equals the z-shift
        let shift = op.z_shift(&[0, 0]);
        assert_eq!(shift, int(1));
        let d = ModeIndex::from_twice(-1);
        let out = op.mode_on_monomial(d, &m, PhaseConvention::FullExponent);
        let expected = op.monomial_scalar(&[0, 0], PhaseConvention::FullExponent);
        assert_eq!(out, FockVector::vacuum(&[0, 1]).scaled(&expected));
        assert!(op.monomial_scalar(&[0, 0], PhaseConvention::FullExponent).coords()[0].is_zero());
    }

    #[test]
    fn long_roots_have_no_integer_modes() {
        let (fs, _) = setup();
        let basis = fs.window_basis(&int(2));
        for a in fs.lattice().roots().long.iter() {
            let op = VertexOperator::new(fs.lattice(), a).unwrap();
            for twice in [-4, -2, 0, 2, 4] {
                for m in &basis {
                    assert!(op.mode_on_monomial(ModeIndex::from_twice(twice), m, PhaseConvention::FullExponent).is_zero());
                }
            }
        }
    }

    #[test]
    fn modes_shift_degree() {
        let (fs, _) = setup();
        let basis = fs.window_basis(&int(2));
        for (_, a) in fs.lattice().roots().all() {
            let op = VertexOperator::new(fs.lattice(), &a).unwrap();
            for twice in -3..=3 {
                for m in &basis {
                    let out = op.mode_on_monomial(ModeIndex::from_twice(twice), m, PhaseConvention::LatticeOnly);
                    let expect = fs.degree_of(m) + rat(twice as i128, 2);
                    for n in out.monomials() {
                        assert_eq!(fs.degree_of(n), expect);
                    }
                }
            }
        }
    }

    #[test]
    fn results_do_not_depend_on_cache_state() {
        let (fs, r) = setup();
        let a = LatticeVector::from_ints(r, &[1, 2]);
        let warm = VertexOperator::new(fs.lattice(), &a).unwrap();
        warm.y.creation(20);
        let basis = fs.enumerate_basis(&DegreeWindow::new(rat(-1, 8) - int(2), rat(-1, 8)), 8).unwrap().monomials;
        for m in basis.iter().take(40) {
            let cold = VertexOperator::new(fs.lattice(), &a).unwrap();
            for twice in -2..=2 {
                let d = ModeIndex::from_twice(twice);
                assert_eq!(
                    cold.mode_on_monomial(d, m, PhaseConvention::FullExponent),
                    warm.mode_on_monomial(d, m, PhaseConvention::FullExponent)
                );
            }
        }
    }

    #[test]
    fn composite_with_zero_vectors_is_prefactor_only() {
        let (fs, r) = setup();
        let zero = LatticeVector::zero(r);
        let v = FockVector::from_monomial(FockMonomial::new(osc(0, -2), &[0, 1]));
        let series = two_point_composite(fs.lattice(), &zero, &zero, 3, &v, PhaseConvention::FullExponent).unwrap();
        assert_eq!(series.len(), 1);
        assert_eq!(series[&(int(0), int(0))], v);
    }

    #[test]
    fn phase_values_are_eighth_roots() {
        let (fs, r) = setup();
        let op = VertexOperator::new(fs.lattice(), &LatticeVector::alpha(r, 2)).unwrap();
        // p₀(α₂) = α₂, (α₂, α₂ + λ) = 3/4
        let ph = op.phase(&[0, 1], PhaseConvention::FullExponent);
        assert_eq!(ph, Scalar::zeta_pow(-3));
        let ph = op.phase(&[0, 1], PhaseConvention::LatticeOnly);
        assert_eq!(ph, Scalar::zeta_pow(-2));
    }
}
