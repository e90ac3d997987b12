//! The Fock module `V(Q) = S(Ĥ⁻) ⊗ C[Q]` with the Heisenberg action and the
//! degree grading.
//!
//! A basis monomial is a multiset of creation modes together with a lattice
//! point `r ∈ Q`; the physical exponent is `e^{r+λ}`. Oscillator directions
//! index the coordinate basis `(α_1, …, α_l, β)`: integer modes live on
//! `α_1..α_l`, half-odd modes on `α_1..α_{l-1}, β`.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::lattice::{Lattice, LatticeVector, Rank};
use crate::scalar::{int, parse_rational, rat, rational_to_string, Rational, Scalar};

/// A lattice point of `Q` in `α`-coordinates.
pub type Point = SmallVec<[i32; 6]>;

/// One oscillator `e_dir(twice_degree / 2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OscillatorMode {
    pub twice_degree: i32,
    pub dir: u16,
}

impl OscillatorMode {
    pub fn new(rank: Rank, dir: usize, twice_degree: i32) -> Result<Self> {
        let mode = OscillatorMode { twice_degree, dir: dir as u16 };
        if twice_degree == 0 {
            return Err(Error::ModeDegree("0".into()));
        }
        if !sector_allows(rank, dir, twice_degree) {
            return Err(Error::SectorMismatch(format!("direction {dir} at degree {}", mode.degree())));
        }
        Ok(mode)
    }

    pub fn degree(&self) -> Rational {
        rat(self.twice_degree as i128, 2)
    }

    pub fn is_half_odd(&self) -> bool {
        self.twice_degree.rem_euclid(2) == 1
    }
}

/// Whether coordinate direction `dir` carries modes of the given parity.
pub fn sector_allows(rank: Rank, dir: usize, twice_degree: i32) -> bool {
    let l = rank.get();
    if twice_degree.rem_euclid(2) == 0 {
        dir < l
    } else {
        dir <= l && dir != l - 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OscRun {
    pub mode: OscillatorMode,
    pub mult: u32,
}

/// Canonical sorted run-length multiset of creation modes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Oscillators(SmallVec<[OscRun; 4]>);

impl Oscillators {
    pub fn empty() -> Self {
        Oscillators::default()
    }

    pub fn runs(&self) -> &[OscRun] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total `-2·degree`, i.e. the depth in half-units.
    pub fn half_units(&self) -> i64 {
        self.0.iter().map(|r| -(r.mode.twice_degree as i64) * r.mult as i64).sum()
    }

    pub fn count(&self) -> u32 {
        self.0.iter().map(|r| r.mult).sum()
    }

    pub fn with(&self, mode: OscillatorMode, k: u32) -> Self {
        let mut out = self.clone();
        out.insert(mode, k);
        out
    }

    pub fn insert(&mut self, mode: OscillatorMode, k: u32) {
        if k == 0 {
            return;
        }
        match self.0.binary_search_by(|r| r.mode.cmp(&mode)) {
            Ok(i) => self.0[i].mult += k,
            Err(i) => self.0.insert(i, OscRun { mode, mult: k }),
        }
    }

    fn remove_one_at(&self, i: usize) -> Self {
        let mut out = self.clone();
        if out.0[i].mult == 1 {
            out.0.remove(i);
        } else {
            out.0[i].mult -= 1;
        }
        out
    }

    pub fn product(&self, other: &Self) -> Self {
        if other.0.is_empty() {
            return self.clone();
        }
        if self.0.is_empty() {
            return other.clone();
        }
        let mut out = SmallVec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].mode.cmp(&other.0[j].mode) {
                Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push(OscRun { mode: self.0[i].mode, mult: self.0[i].mult + other.0[j].mult });
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Oscillators(out)
    }

    /// Action of the annihilator `a(k/2)`, `k > 0`, as a derivation.
    ///
    /// `pairings[d]` must hold `(a, e_d)` for every coordinate direction.
    pub fn contract(&self, pairings: &[Rational], twice_degree: i32) -> SmallVec<[(Oscillators, Rational); 4]> {
        let mut out = SmallVec::new();
        let half = rat(twice_degree as i128, 2);
        for (i, run) in self.0.iter().enumerate() {
            if run.mode.twice_degree != -twice_degree {
                continue;
            }
            let pairing = &pairings[run.mode.dir as usize];
            if pairing.is_zero() {
                continue;
            }
            let c = half * pairing * int(run.mult as i128);
            out.push((self.remove_one_at(i), c));
        }
        out
    }

    /// Flattened list of modes with multiplicity.
    pub fn modes(&self) -> Vec<OscillatorMode> {
        self.0.iter().flat_map(|r| std::iter::repeat_n(r.mode, r.mult as usize)).collect()
    }
}

/// A basis element `osc ⊗ e^{exp+λ}` of `V(Q)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockMonomial {
    pub osc: Oscillators,
    pub exp: Point,
}

impl FockMonomial {
    pub fn vacuum(exp: &[i32]) -> Self {
        FockMonomial { osc: Oscillators::empty(), exp: exp.iter().copied().collect() }
    }

    pub fn new(osc: Oscillators, exp: &[i32]) -> Self {
        FockMonomial { osc, exp: exp.iter().copied().collect() }
    }

    pub fn exp_i64(&self) -> Vec<i64> {
        self.exp.iter().map(|&x| x as i64).collect()
    }
}

impl fmt::Display for FockMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.osc.is_empty() {
            write!(f, "1")?;
        }
        for run in self.osc.runs() {
            write!(f, "e{}({})", run.mode.dir, run.mode.degree())?;
            if run.mult > 1 {
                write!(f, "^{}", run.mult)?;
            }
        }
        write!(f, "⊗e^{{λ")?;
        for (i, k) in self.exp.iter().enumerate() {
            if *k != 0 {
                write!(f, "{:+}α{}", k, i + 1)?;
            }
        }
        write!(f, "}}")
    }
}

/// Polynomial in creation modes with rational coefficients.
pub type OscPoly = FxHashMap<Oscillators, Rational>;

pub fn osc_poly_one() -> OscPoly {
    let mut p = OscPoly::default();
    p.insert(Oscillators::empty(), Rational::one());
    p
}

pub fn osc_poly_add_scaled(target: &mut OscPoly, src: &OscPoly, c: &Rational) {
    if c.is_zero() {
        return;
    }
    for (m, x) in src {
        add_rational(target, m.clone(), x * c);
    }
}

pub(crate) fn add_rational(target: &mut OscPoly, key: Oscillators, c: Rational) {
    if c.is_zero() {
        return;
    }
    use std::collections::hash_map::Entry;
    match target.entry(key) {
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
        Entry::Vacant(e) => {
            e.insert(c);
        }
    }
}

/// Sparse element of `V(Q)` with cyclotomic coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FockVector {
    terms: FxHashMap<FockMonomial, Scalar>,
}

impl FockVector {
    pub fn zero() -> Self {
        FockVector::default()
    }

    pub fn from_monomial(m: FockMonomial) -> Self {
        let mut v = FockVector::zero();
        v.add_term(m, Scalar::one());
        v
    }

    pub fn vacuum(exp: &[i32]) -> Self {
        FockVector::from_monomial(FockMonomial::vacuum(exp))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &FockMonomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FockMonomial, &Scalar)> {
        self.terms.iter()
    }

    /// Terms in canonical monomial order.
    pub fn sorted_terms(&self) -> Vec<(&FockMonomial, &Scalar)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    pub fn add_term(&mut self, m: FockMonomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::hash_map::Entry;
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &FockVector, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (m, x) in &other.terms {
            let t = if c.is_one() { x.clone() } else { x * c };
            self.add_term(m.clone(), t);
        }
    }

    pub fn add_assign(&mut self, other: &FockVector) {
        self.add_scaled(other, &Scalar::one());
    }

    pub fn sub_assign(&mut self, other: &FockVector) {
        self.add_scaled(other, &Scalar::from_int(-1));
    }

    pub fn sum(&self, other: &FockVector) -> FockVector {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn difference(&self, other: &FockVector) -> FockVector {
        let mut out = self.clone();
        out.sub_assign(other);
        out
    }

    pub fn scaled(&self, c: &Scalar) -> FockVector {
        let mut out = FockVector::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn monomials(&self) -> impl Iterator<Item = &FockMonomial> {
        self.terms.keys()
    }

    /// Whether some coefficient is an explicit zero (must never happen).
    pub fn has_stored_zero(&self) -> bool {
        self.terms.values().any(Scalar::is_zero)
    }
}

impl fmt::Display for FockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})·{m}")?;
        }
        Ok(())
    }
}

/// JSON wire form of a [`FockVector`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockVectorJson {
    pub terms: Vec<FockTermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockTermJson {
    pub osc: Vec<(u16, String)>,
    pub exp: Vec<String>,
    pub coef: [String; 4],
}

impl FockVector {
    pub fn to_json(&self) -> FockVectorJson {
        let terms = self
            .sorted_terms()
            .into_iter()
            .map(|(m, c)| FockTermJson {
                osc: m.osc.modes().into_iter().map(|md| (md.dir, rational_to_string(&md.degree()))).collect(),
                exp: m.exp.iter().map(|k| k.to_string()).collect(),
                coef: c.to_strings(),
            })
            .collect();
        FockVectorJson { terms }
    }

    pub fn from_json(json: &FockVectorJson) -> Option<FockVector> {
        let mut v = FockVector::zero();
        for t in &json.terms {
            let mut osc = Oscillators::empty();
            for (dir, deg) in &t.osc {
                let d = parse_rational(deg)? * int(2);
                if !d.is_integer() || d >= Rational::zero() {
                    return None;
                }
                osc.insert(OscillatorMode { twice_degree: d.to_integer() as i32, dir: *dir }, 1);
            }
            let exp: Option<Point> = t.exp.iter().map(|s| s.parse::<i32>().ok()).collect();
            let coef = Scalar::from_strings(&t.coef)?;
            v.add_term(FockMonomial { osc, exp: exp? }, coef);
        }
        Some(v)
    }
}

/// Closed degree interval; the lower end must be finite for enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeWindow {
    pub lo: Option<Rational>,
    pub hi: Option<Rational>,
}

impl DegreeWindow {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        DegreeWindow { lo: Some(lo), hi: Some(hi) }
    }

    pub fn single(d: Rational) -> Self {
        DegreeWindow::new(d, d)
    }

    pub fn contains(&self, d: &Rational) -> bool {
        self.lo.is_none_or(|lo| *d >= lo) && self.hi.is_none_or(|hi| *d <= hi)
    }
}

/// Output of [`FockSpace::enumerate_basis`].
#[derive(Clone, Debug)]
pub struct BasisEnumeration {
    pub monomials: Vec<FockMonomial>,
    pub height: i64,
    /// True when every monomial of the window has exponent within the height bound.
    pub complete: bool,
}

/// The Fock module over a fixed lattice.
#[derive(Clone, Debug)]
pub struct FockSpace {
    lattice: Lattice,
    lambda: LatticeVector,
}

impl FockSpace {
    pub fn new(rank: Rank) -> Self {
        let lattice = Lattice::new(rank);
        let lambda = lattice.lambda();
        FockSpace { lattice, lambda }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn rank(&self) -> Rank {
        self.lattice.rank()
    }

    pub fn l(&self) -> usize {
        self.lattice.l()
    }

    /// `(v, e_d)` for every coordinate direction `d`.
    pub fn pairings(&self, v: &LatticeVector) -> Vec<Rational> {
        (0..=self.l()).map(|d| self.lattice.pair_with_basis(v, d)).collect()
    }

    fn check_sector(&self, v: &LatticeVector, twice_degree: i32) -> Result<()> {
        self.check_rank(v)?;
        for (d, c) in v.coeffs().iter().enumerate() {
            if !c.is_zero() && !sector_allows(self.rank(), d, twice_degree) {
                return Err(Error::SectorMismatch(v.to_string()));
            }
        }
        Ok(())
    }

    fn check_rank(&self, v: &LatticeVector) -> Result<()> {
        if v.rank() != self.rank() {
            return Err(Error::RankMismatch { left: self.l(), right: v.rank().get() });
        }
        Ok(())
    }

    /// Multiplication by the creation mode.
    pub fn create(&self, mode: OscillatorMode, v: &FockVector) -> Result<FockVector> {
        if mode.twice_degree >= 0 {
            return Err(Error::ModeDegree(mode.degree().to_string()));
        }
        if !sector_allows(self.rank(), mode.dir as usize, mode.twice_degree) {
            return Err(Error::SectorMismatch(format!("direction {}", mode.dir)));
        }
        let mut out = FockVector::zero();
        for (m, c) in v.iter() {
            let nm = FockMonomial { osc: m.osc.with(mode, 1), exp: m.exp.clone() };
            out.add_term(nm, c.clone());
        }
        Ok(out)
    }

    /// Annihilation mode `e_dir(k)`, `k > 0`, acting as a derivation.
    pub fn annihilate(&self, mode: OscillatorMode, v: &FockVector) -> Result<FockVector> {
        if mode.twice_degree <= 0 {
            return Err(Error::ModeDegree(mode.degree().to_string()));
        }
        if !sector_allows(self.rank(), mode.dir as usize, mode.twice_degree) {
            return Err(Error::SectorMismatch(format!("direction {}", mode.dir)));
        }
        let pairings = self.pairings(&LatticeVector::basis(self.rank(), mode.dir as usize));
        Ok(self.contract_all(&pairings, mode.twice_degree, v))
    }

    fn contract_all(&self, pairings: &[Rational], twice_degree: i32, v: &FockVector) -> FockVector {
        let mut out = FockVector::zero();
        for (m, c) in v.iter() {
            for (osc, x) in m.osc.contract(pairings, twice_degree) {
                out.add_term(FockMonomial { osc, exp: m.exp.clone() }, c.scale(&x));
            }
        }
        out
    }

    /// The Heisenberg mode `a(k)` for a general vector `a` of the matching
    /// sector and any nonzero degree (creation, annihilation) or zero
    /// (zero mode).
    pub fn heisenberg(&self, a: &LatticeVector, twice_degree: i32, v: &FockVector) -> Result<FockVector> {
        if twice_degree == 0 {
            return self.zero_mode(a, v);
        }
        self.check_sector(a, twice_degree)?;
        if twice_degree > 0 {
            return Ok(self.contract_all(&self.pairings(a), twice_degree, v));
        }
        let mut out = FockVector::zero();
        for (d, coef) in a.coeffs().iter().enumerate() {
            if coef.is_zero() {
                continue;
            }
            let mode = OscillatorMode { twice_degree, dir: d as u16 };
            out.add_scaled(&self.create(mode, v)?, &Scalar::from_rational(*coef));
        }
        Ok(out)
    }

    /// `b(0)`: multiplies each monomial by `(b, r+λ)`.
    pub fn zero_mode(&self, b: &LatticeVector, v: &FockVector) -> Result<FockVector> {
        self.check_rank(b)?;
        if !b.coeffs()[self.l()].is_zero() {
            return Err(Error::ZeroModeOutsideH);
        }
        let mut out = FockVector::zero();
        for (m, c) in v.iter() {
            let s = self.exponent_vector(&m.exp).add(&self.lambda);
            let e = self.lattice.gram_unchecked(b, &s);
            out.add_term(m.clone(), c.scale(&e));
        }
        Ok(out)
    }

    pub fn central(&self, v: &FockVector) -> FockVector {
        v.clone()
    }

    pub fn exponent_vector(&self, exp: &[i32]) -> LatticeVector {
        let k: Vec<i64> = exp.iter().map(|&x| x as i64).collect();
        LatticeVector::from_ints(self.rank(), &k)
    }

    /// `deg = Σ(oscillator degrees) − ½(r+λ, r+λ)`.
    pub fn degree_of(&self, m: &FockMonomial) -> Rational {
        let r: Vec<i64> = m.exp_i64();
        rat(-m.osc.half_units() as i128, 2) - self.lattice.shifted_norm(&r) / int(2)
    }

    /// Degree of a vector whose monomials all share one degree.
    pub fn homogeneous_degree(&self, v: &FockVector) -> Result<Option<Rational>> {
        let mut deg = None;
        for m in v.monomials() {
            let d = self.degree_of(m);
            match deg {
                None => deg = Some(d),
                Some(ref e) if *e != d => return Err(Error::NotHomogeneous),
                _ => {}
            }
        }
        Ok(deg)
    }

    /// `d₀ x = −deg(x)·x` on monomials.
    pub fn d0_apply(&self, v: &FockVector) -> FockVector {
        let mut out = FockVector::zero();
        for (m, c) in v.iter() {
            out.add_term(m.clone(), c.scale(&-self.degree_of(m)));
        }
        out
    }

    /// Top degree `−½(λ, λ)`.
    pub fn top_degree(&self) -> Rational {
        -self.lattice.lambda_norm() / int(2)
    }

    /// Smallest box height certifying completeness down to degree `lo`.
    pub fn certified_height(&self, lo: &Rational) -> i64 {
        let mut h = 0;
        while !self.height_certifies(h, lo) {
            h += 1;
        }
        h
    }

    /// Whether every `r` with `−½(r+λ,r+λ) ≥ lo` satisfies `max|r_i| ≤ h`.
    ///
    /// The region is an ellipsoid around `−λ`; its extent along coordinate
    /// `i` is `sqrt(R·(G⁻¹)_ii)` with `R = −2·lo`.
    pub fn height_certifies(&self, h: i64, lo: &Rational) -> bool {
        let radius = -*lo * int(2);
        if radius < Rational::zero() {
            return true;
        }
        let inv = self.inverse_gram_q();
        let lam = self.lambda.coeffs();
        (0..self.l()).all(|i| {
            let slack = int(h as i128) - lam[i];
            slack >= Rational::zero() && slack * slack >= radius * inv[i][i]
        })
    }

    fn inverse_gram_q(&self) -> Vec<Vec<Rational>> {
        let l = self.l();
        let g = self.lattice.gram_matrix();
        let mut a: Vec<Vec<Rational>> = (0..l)
            .map(|i| {
                let mut row: Vec<Rational> = g[i][..l].to_vec();
                row.extend((0..l).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
                row
            })
            .collect();
        for col in 0..l {
            let piv = (col..l).find(|&r| !a[r][col].is_zero()).expect("Gram matrix is nonsingular");
            a.swap(col, piv);
            let p = a[col][col];
            for x in a[col].iter_mut() {
                *x /= p;
            }
            for r in 0..l {
                if r != col && !a[r][col].is_zero() {
                    let f = a[r][col];
                    for c in 0..2 * l {
                        let t = a[col][c] * f;
                        a[r][c] -= t;
                    }
                }
            }
        }
        a.into_iter().map(|row| row[l..].to_vec()).collect()
    }

    /// All basis monomials with degree in `window` and exponent coefficients
    /// bounded by `height`, in canonical order (degree descending, then
    /// exponent, then oscillators).
    pub fn enumerate_basis(&self, window: &DegreeWindow, height: i64) -> Result<BasisEnumeration> {
        let lo = window.lo.ok_or(Error::UnboundedWindow)?;
        let hi = window.hi.unwrap_or_else(|| self.top_degree());
        let complete = self.height_certifies(height, &lo);
        let mut monomials = Vec::new();
        if lo > hi {
            return Ok(BasisEnumeration { monomials, height, complete });
        }
        let l = self.l();
        let max_half_units = floor_nonneg((self.top_degree() - lo) * int(2));
        let osc_by_units = oscillator_multisets(self.rank(), max_half_units);
        let mut r = vec![-height; l];
        loop {
            let exp_deg = -self.lattice.shifted_norm(&r) / int(2);
            if exp_deg >= lo {
                // oscillator depth u (half-units) gives degree exp_deg − u/2
                let u_min = ceil_nonneg((exp_deg - hi) * int(2));
                let u_max = floor_nonneg((exp_deg - lo) * int(2));
                let point: Point = r.iter().map(|&x| x as i32).collect();
                for u in u_min..=u_max {
                    if let Some(list) = osc_by_units.get(u as usize) {
                        for osc in list {
                            monomials.push(FockMonomial { osc: osc.clone(), exp: point.clone() });
                        }
                    }
                }
            }
            let mut idx = 0;
            loop {
                if idx == l {
                    let mut keyed: Vec<(Rational, FockMonomial)> =
                        monomials.into_iter().map(|m| (self.degree_of(&m), m)).collect();
                    keyed.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.exp.cmp(&b.1.exp)).then_with(|| a.1.osc.cmp(&b.1.osc)));
                    let monomials = keyed.into_iter().map(|(_, m)| m).collect();
                    return Ok(BasisEnumeration { monomials, height, complete });
                }
                r[idx] += 1;
                if r[idx] <= height {
                    break;
                }
                r[idx] = -height;
                idx += 1;
            }
        }
    }

    /// Enumeration of `[top − depth, top]` with an automatically certified height.
    pub fn window_basis(&self, depth: &Rational) -> Vec<FockMonomial> {
        let top = self.top_degree();
        let lo = top - *depth;
        let h = self.certified_height(&lo);
        self.enumerate_basis(&DegreeWindow::new(lo, top), h).expect("finite window").monomials
    }

    /// Random vector: `nterms` distinct basis monomials with coefficients
    /// from `{±1, ±½, ζ²}`.
    pub fn random_vector<R: Rng>(&self, basis: &[FockMonomial], nterms: usize, rng: &mut R) -> FockVector {
        let coefs = [
            Scalar::from_int(1),
            Scalar::from_int(-1),
            Scalar::from_rational(rat(1, 2)),
            Scalar::from_rational(rat(-1, 2)),
            Scalar::i(),
        ];
        let mut v = FockVector::zero();
        for m in basis.choose_multiple(rng, nterms.min(basis.len())) {
            let c = coefs[rng.gen_range(0..coefs.len())].clone();
            v.add_term(m.clone(), c);
        }
        v
    }
}

fn floor_nonneg(q: Rational) -> i64 {
    if q < Rational::zero() {
        -1
    } else {
        q.floor().to_integer()
    }
}

fn ceil_nonneg(q: Rational) -> i64 {
    if q < Rational::zero() {
        0
    } else {
        q.ceil().to_integer()
    }
}

/// All creation multisets with total depth `u` half-units, for `u ≤ max`,
/// indexed by `u`.
pub fn oscillator_multisets(rank: Rank, max: i64) -> Vec<Vec<Oscillators>> {
    let mut out = vec![Vec::new(); (max.max(0) + 1) as usize];
    if max < 0 {
        return Vec::new();
    }
    let mut modes = Vec::new();
    for k in 1..=max as i32 {
        for d in 0..=rank.get() {
            if sector_allows(rank, d, -k) {
                modes.push(OscillatorMode { twice_degree: -k, dir: d as u16 });
            }
        }
    }
    modes.sort();
    fn rec(modes: &[OscillatorMode], idx: usize, budget: i64, cur: &mut Oscillators, used: i64, out: &mut Vec<Vec<Oscillators>>) {
        if idx == modes.len() {
            out[used as usize].push(cur.clone());
            return;
        }
        let w = -(modes[idx].twice_degree as i64);
        let mut k = 0;
        loop {
            rec(modes, idx + 1, budget, cur, used + k * w, out);
            if used + (k + 1) * w > budget {
                break;
            }
            k += 1;
            cur.insert(modes[idx], 1);
        }
        // undo
        if k > 0 {
            let pos = cur.0.iter().position(|r| r.mode == modes[idx]).unwrap();
            cur.0.remove(pos);
        }
    }
    let mut cur = Oscillators::empty();
    rec(&modes, 0, max, &mut cur, 0, &mut out);
    for list in out.iter_mut() {
        list.sort();
    }
    out
}
