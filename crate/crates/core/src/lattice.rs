//! The root lattice `Q` of type `B_l`, the auxiliary direction `β`, root
//! classes, the sign cocycle and the folding maps `p`, `p₀`.
//!
//! Vectors are coordinates over the basis `(α_1, …, α_l, β)`. The form is
//! normalized so that short roots have norm ½, long roots of `B_l` norm 1.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{int, rat, rational_vec_str, Rational};

/// Rank `l ≥ 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Rank(usize);

impl Rank {
    pub fn new(l: usize) -> Result<Rank> {
        if l < 2 {
            return Err(Error::InvalidRank(l));
        }
        Ok(Rank(l))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Index of `β` in the coordinate basis.
    pub fn beta_index(self) -> usize {
        self.0
    }
}

/// An element of `Q ⊗ Q ⊕ Qβ` with exact rational coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticeVector {
    #[serde(with = "rational_vec_str")]
    coeffs: Vec<Rational>,
}

impl LatticeVector {
    pub fn zero(rank: Rank) -> Self {
        LatticeVector { coeffs: vec![Rational::zero(); rank.get() + 1] }
    }

    /// The simple root `α_i`, `1 ≤ i ≤ l`.
    pub fn alpha(rank: Rank, i: usize) -> Self {
        assert!((1..=rank.get()).contains(&i), "simple root index out of range");
        let mut v = LatticeVector::zero(rank);
        v.coeffs[i - 1] = Rational::one();
        v
    }

    pub fn beta(rank: Rank) -> Self {
        let mut v = LatticeVector::zero(rank);
        v.coeffs[rank.beta_index()] = Rational::one();
        v
    }

    /// Basis vector for coordinate index `d` (`d = l` is `β`).
    pub fn basis(rank: Rank, d: usize) -> Self {
        let mut v = LatticeVector::zero(rank);
        v.coeffs[d] = Rational::one();
        v
    }

    /// Element of `Q` from integer coefficients on `α_1..α_l`.
    pub fn from_ints(rank: Rank, k: &[i64]) -> Self {
        assert_eq!(k.len(), rank.get());
        let mut v = LatticeVector::zero(rank);
        for (c, &x) in v.coeffs.iter_mut().zip(k) {
            *c = int(x as i128);
        }
        v
    }

    pub fn from_coeffs(coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.len() < 3 {
            return Err(Error::InvalidRank(coeffs.len().saturating_sub(1)));
        }
        Ok(LatticeVector { coeffs })
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn rank(&self) -> Rank {
        Rank(self.coeffs.len() - 1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Whether the vector lies in `Q`: integer `α` coefficients, no `β`.
    pub fn is_in_q(&self) -> bool {
        let l = self.coeffs.len() - 1;
        self.coeffs[..l].iter().all(|c| c.is_integer()) && self.coeffs[l].is_zero()
    }

    /// Whether the vector lies in `Q_M + Zβ`.
    pub fn is_in_qm_beta(&self) -> bool {
        let l = self.coeffs.len() - 1;
        self.coeffs.iter().all(|c| c.is_integer()) && self.coeffs[l - 1].is_zero()
    }

    /// Integer coefficients on `α_1..α_l`, if the vector lies in `Q`.
    pub fn q_coords(&self) -> Option<Vec<i64>> {
        if !self.is_in_q() {
            return None;
        }
        let l = self.coeffs.len() - 1;
        Some(self.coeffs[..l].iter().map(|c| c.to_integer()).collect())
    }

    pub fn scaled(&self, q: &Rational) -> Self {
        LatticeVector { coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.coeffs.len(), other.coeffs.len(), "rank mismatch");
        LatticeVector { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        LatticeVector { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl fmt::Debug for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = self.coeffs.len() - 1;
        let mut wrote = false;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let name = if i == l { "β".to_string() } else { format!("α{}", i + 1) };
            let neg = *c < Rational::zero();
            let abs = if neg { -c } else { *c };
            if wrote {
                write!(f, "{}", if neg { "-" } else { "+" })?;
            } else if neg {
                write!(f, "-")?;
            }
            if abs.is_one() {
                write!(f, "{name}")?;
            } else {
                write!(f, "{abs}{name}")?;
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RootClass {
    Long,
    Middle,
    Short,
}

impl RootClass {
    pub fn name(self) -> &'static str {
        match self {
            RootClass::Long => "long",
            RootClass::Middle => "middle",
            RootClass::Short => "short",
        }
    }
}

/// The finite root data, split into the three classes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RootSystem {
    pub short: Vec<LatticeVector>,
    pub middle: Vec<LatticeVector>,
    pub long: Vec<LatticeVector>,
}

impl RootSystem {
    pub fn class(&self, class: RootClass) -> &[LatticeVector] {
        match class {
            RootClass::Long => &self.long,
            RootClass::Middle => &self.middle,
            RootClass::Short => &self.short,
        }
    }

    /// All roots, in the order short, middle, long.
    pub fn all(&self) -> Vec<(RootClass, LatticeVector)> {
        let mut out = Vec::new();
        for class in [RootClass::Short, RootClass::Middle, RootClass::Long] {
            out.extend(self.class(class).iter().map(|v| (class, v.clone())));
        }
        out
    }

    pub fn classify(&self, v: &LatticeVector) -> Option<RootClass> {
        [RootClass::Short, RootClass::Middle, RootClass::Long]
            .into_iter()
            .find(|&c| self.class(c).contains(v))
    }

    /// Roots of the finite algebra `B_l`: short and middle classes.
    pub fn finite_roots(&self) -> Vec<LatticeVector> {
        self.short.iter().chain(&self.middle).cloned().collect()
    }
}

/// The bilinear form on `span(α_1..α_l, β)`.
#[derive(Clone, Debug)]
pub struct Lattice {
    rank: Rank,
    gram: Vec<Vec<Rational>>,
    // 2·(α_i, α_j), integral.
    twice_gram_q: Vec<Vec<i64>>,
}

impl Lattice {
    pub fn new(rank: Rank) -> Self {
        let l = rank.get();
        let n = l + 1;
        let mut gram = vec![vec![Rational::zero(); n]; n];
        for i in 0..l {
            gram[i][i] = if i == l - 1 { rat(1, 2) } else { int(1) };
            if i + 1 < l {
                gram[i][i + 1] = rat(-1, 2);
                gram[i + 1][i] = rat(-1, 2);
            }
        }
        gram[l][l] = rat(3, 2);
        gram[l][l - 1] = rat(1, 2);
        gram[l - 1][l] = rat(1, 2);
        gram[l][l - 2] = rat(-1, 2);
        gram[l - 2][l] = rat(-1, 2);
        let twice_gram_q = (0..l)
            .map(|i| (0..l).map(|j| (gram[i][j] * int(2)).to_integer() as i64).collect())
            .collect();
        Lattice { rank, gram, twice_gram_q }
    }

    pub fn rank(&self) -> Rank {
        self.rank
    }

    pub fn l(&self) -> usize {
        self.rank.get()
    }

    pub fn gram_matrix(&self) -> &[Vec<Rational>] {
        &self.gram
    }

    /// Gram entry between coordinate directions.
    pub fn gram_entry(&self, i: usize, j: usize) -> Rational {
        self.gram[i][j]
    }

    fn check_rank(&self, v: &LatticeVector) -> Result<()> {
        if v.rank() != self.rank {
            return Err(Error::RankMismatch { left: self.rank.get(), right: v.rank().get() });
        }
        Ok(())
    }

    pub fn gram(&self, v: &LatticeVector, w: &LatticeVector) -> Result<Rational> {
        self.check_rank(v)?;
        self.check_rank(w)?;
        Ok(self.gram_unchecked(v, w))
    }

    pub(crate) fn gram_unchecked(&self, v: &LatticeVector, w: &LatticeVector) -> Rational {
        let mut acc = Rational::zero();
        for (i, a) in v.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in w.coeffs.iter().enumerate() {
                if b.is_zero() || self.gram[i][j].is_zero() {
                    continue;
                }
                acc += a * b * self.gram[i][j];
            }
        }
        acc
    }

    /// `2(a, b)` for integer points of `Q`.
    pub fn twice_pair_q(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut acc = 0;
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                acc += x * y * self.twice_gram_q[i][j];
            }
        }
        acc
    }

    /// `(v, e_d)` for a coordinate direction `d`.
    pub fn pair_with_basis(&self, v: &LatticeVector, d: usize) -> Rational {
        let mut acc = Rational::zero();
        for (i, a) in v.coeffs.iter().enumerate() {
            if !a.is_zero() {
                acc += a * self.gram[i][d];
            }
        }
        acc
    }

    /// The shift vector `λ = Σ (i/2) α_i`.
    pub fn lambda(&self) -> LatticeVector {
        let l = self.l();
        let mut v = LatticeVector::zero(self.rank);
        for i in 1..=l {
            v.coeffs[i - 1] = rat(i as i128, 2);
        }
        v
    }

    /// `2λ` as an integer point of `Q`.
    pub fn two_lambda(&self) -> Vec<i64> {
        (1..=self.l() as i64).collect()
    }

    /// `(a, λ)` for `a ∈ Q`.
    pub fn pair_lambda(&self, a: &[i64]) -> Rational {
        rat(self.twice_pair_q(a, &self.two_lambda()) as i128, 4)
    }

    /// `(a, r + λ)` for integer points.
    pub fn pair_shifted(&self, a: &[i64], r: &[i64]) -> Rational {
        rat(self.twice_pair_q(a, r) as i128, 2) + self.pair_lambda(a)
    }

    /// `(r + λ, r + λ)`.
    pub fn shifted_norm(&self, r: &[i64]) -> Rational {
        rat(self.twice_pair_q(r, r) as i128, 2)
            + self.pair_lambda(r) * int(2)
            + self.lambda_norm()
    }

    /// `(λ, λ) = l/8`.
    pub fn lambda_norm(&self) -> Rational {
        let lam = self.lambda();
        self.gram_unchecked(&lam, &lam)
    }

    /// Finite roots by exhaustive enumeration of the coefficient box
    /// `[-2, 2]^l`, classified by norm; `Δ_L` is the set of doubled short
    /// roots.
    pub fn roots(&self) -> RootSystem {
        let l = self.l();
        let mut short = Vec::new();
        let mut middle = Vec::new();
        let mut k = vec![-2i64; l];
        loop {
            let n2 = self.twice_pair_q(&k, &k);
            if n2 == 1 {
                short.push(k.clone());
            } else if n2 == 2 {
                middle.push(k.clone());
            }
            // odometer
            let mut idx = 0;
            loop {
                if idx == l {
                    return self.finish_roots(short, middle);
                }
                k[idx] += 1;
                if k[idx] <= 2 {
                    break;
                }
                k[idx] = -2;
                idx += 1;
            }
        }
    }

    fn finish_roots(&self, short: Vec<Vec<i64>>, middle: Vec<Vec<i64>>) -> RootSystem {
        let order = |v: &Vec<i64>| {
            let positive = v.iter().find(|&&x| x != 0).map(|&x| x > 0).unwrap_or(true);
            let height: i64 = v.iter().sum();
            (!positive, height.abs(), v.iter().map(|x| -x).collect::<Vec<_>>())
        };
        let mut short = short;
        let mut middle = middle;
        short.sort_by_key(order);
        middle.sort_by_key(order);
        let long: Vec<Vec<i64>> = short.iter().map(|v| v.iter().map(|x| 2 * x).collect()).collect();
        let conv = |vs: Vec<Vec<i64>>| vs.iter().map(|v| LatticeVector::from_ints(self.rank, v)).collect();
        RootSystem { short: conv(short), middle: conv(middle), long: conv(long) }
    }

    /// The sign cocycle `ε(a, b) = Π ε(α_i, α_j)^{a_i b_j}` with
    /// `ε(α_i, α_j) = -1` exactly when `i = j + 1`.
    pub fn cocycle(&self, a: &LatticeVector, b: &LatticeVector) -> Result<i8> {
        self.check_rank(a)?;
        self.check_rank(b)?;
        let ka = a.q_coords().ok_or_else(|| Error::NotInRootLattice(a.to_string()))?;
        let kb = b.q_coords().ok_or_else(|| Error::NotInRootLattice(b.to_string()))?;
        Ok(cocycle_ints(&ka, &kb))
    }

    /// The folding map `p : Q → Q_M + Zβ`.
    pub fn p_map(&self, a: &LatticeVector) -> Result<LatticeVector> {
        self.check_rank(a)?;
        let k = a.q_coords().ok_or_else(|| Error::NotInRootLattice(a.to_string()))?;
        let l = self.l();
        let mut v = LatticeVector::zero(self.rank);
        for (i, &x) in k.iter().enumerate() {
            let slot = if i == l - 1 { l } else { i };
            v.coeffs[slot] = int(fold(x) as i128);
        }
        Ok(v)
    }

    /// The folding map `p₀ : Q → Q`.
    pub fn p0_map(&self, a: &LatticeVector) -> Result<LatticeVector> {
        self.check_rank(a)?;
        let k = a.q_coords().ok_or_else(|| Error::NotInRootLattice(a.to_string()))?;
        Ok(LatticeVector::from_ints(self.rank, &p0_ints(&k)))
    }
}

/// `sgn(k)·(k − 2⌊k/2⌋)` with `sgn(0) = +1`.
pub fn fold(k: i64) -> i64 {
    let r = k - 2 * k.div_euclid(2);
    if k >= 0 {
        r
    } else {
        -r
    }
}

pub fn p0_ints(k: &[i64]) -> Vec<i64> {
    k.iter().map(|&x| fold(x)).collect()
}

pub fn cocycle_ints(a: &[i64], b: &[i64]) -> i8 {
    let mut e = 0i64;
    for j in 0..a.len().saturating_sub(1) {
        e += a[j + 1] * b[j];
    }
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l2() -> Lattice {
        Lattice::new(Rank::new(2).unwrap())
    }

    fn q(lat: &Lattice, k: &[i64]) -> LatticeVector {
        LatticeVector::from_ints(lat.rank(), k)
    }

    #[test]
    fn rank_one_rejected() {
        assert_eq!(Rank::new(1), Err(Error::InvalidRank(1)));
    }

    #[test]
    fn gram_examples() {
        let lat = l2();
        let r = lat.rank();
        let a1 = LatticeVector::alpha(r, 1);
        let a2 = LatticeVector::alpha(r, 2);
        let b = LatticeVector::beta(r);
        assert_eq!(lat.gram(&a2, &a2).unwrap(), rat(1, 2));
        assert_eq!(lat.gram(&b, &b).unwrap(), rat(3, 2));
        let s = a1.add(&a2);
        assert_eq!(lat.gram(&s, &s).unwrap(), rat(1, 2));
        assert_eq!(lat.gram(&b, &a2).unwrap(), rat(1, 2));
        assert_eq!(lat.gram(&b, &a1).unwrap(), rat(-1, 2));
    }

    #[test]
    fn gram_rank_mismatch() {
        let lat = l2();
        let v3 = LatticeVector::alpha(Rank::new(3).unwrap(), 1);
        let v2 = LatticeVector::alpha(lat.rank(), 1);
        assert!(matches!(lat.gram(&v2, &v3), Err(Error::RankMismatch { .. })));
    }

    #[test]
    fn roots_l2() {
        let lat = l2();
        let rs = lat.roots();
        let set = |vs: &[LatticeVector]| {
            let mut v: Vec<_> = vs.iter().map(|x| x.q_coords().unwrap()).collect();
            v.sort();
            v
        };
        let mut short = vec![vec![0, 1], vec![0, -1], vec![1, 1], vec![-1, -1]];
        short.sort();
        let mut middle = vec![vec![1, 0], vec![-1, 0], vec![1, 2], vec![-1, -2]];
        middle.sort();
        let mut long = vec![vec![0, 2], vec![0, -2], vec![2, 2], vec![-2, -2]];
        long.sort();
        assert_eq!(set(&rs.short), short);
        assert_eq!(set(&rs.middle), middle);
        assert_eq!(set(&rs.long), long);
    }

    #[test]
    fn root_counts() {
        for l in 2..=6 {
            let lat = Lattice::new(Rank::new(l).unwrap());
            let rs = lat.roots();
            assert_eq!(rs.short.len(), 2 * l);
            assert_eq!(rs.middle.len(), 2 * l * (l - 1));
            assert_eq!(rs.long.len(), 2 * l);
        }
    }

    #[test]
    fn cocycle_examples() {
        let lat = l2();
        let r = lat.rank();
        let a1 = LatticeVector::alpha(r, 1);
        let a2 = LatticeVector::alpha(r, 2);
        assert_eq!(lat.cocycle(&a2, &a1).unwrap(), -1);
        assert_eq!(lat.cocycle(&a1, &a2).unwrap(), 1);
        let s = a1.add(&a2);
        assert_eq!(lat.cocycle(&s, &s).unwrap(), -1);
        let half = a1.scaled(&rat(1, 2));
        assert!(lat.cocycle(&half, &a1).is_err());
    }

    #[test]
    fn p_map_examples() {
        let lat = l2();
        let r = lat.rank();
        assert!(lat.p_map(&q(&lat, &[2, 2])).unwrap().is_zero());
        assert_eq!(lat.p_map(&q(&lat, &[0, 1])).unwrap(), LatticeVector::beta(r));
        assert_eq!(lat.p_map(&q(&lat, &[0, -1])).unwrap(), LatticeVector::beta(r).neg());
        assert_eq!(
            lat.p_map(&q(&lat, &[1, 1])).unwrap(),
            LatticeVector::alpha(r, 1).add(&LatticeVector::beta(r))
        );
    }

    #[test]
    fn p0_examples() {
        let lat = l2();
        assert_eq!(lat.p0_map(&q(&lat, &[-3, 0])).unwrap(), q(&lat, &[-1, 0]));
        assert!(lat.p0_map(&q(&lat, &[0, 2])).unwrap().is_zero());
        for s in lat.roots().short {
            assert_eq!(lat.p0_map(&s).unwrap(), s);
        }
        assert_eq!(fold(0), 0);
        assert_eq!(fold(-1), -1);
        assert_eq!(fold(5), 1);
        assert_eq!(fold(-4), 0);
    }

    #[test]
    fn lambda_pairings() {
        let lat = l2();
        let r = lat.rank();
        let lam = lat.lambda();
        assert_eq!(lam, LatticeVector::alpha(r, 1).scaled(&rat(1, 2)).add(&LatticeVector::alpha(r, 2)));
        assert_eq!(lat.gram(&lam, &LatticeVector::alpha(r, 2)).unwrap(), rat(1, 4));
        assert_eq!(lat.gram(&lam, &LatticeVector::alpha(r, 1)).unwrap(), int(0));
        assert_eq!(lat.gram(&lam, &lam).unwrap(), rat(1, 4));
        assert_eq!(lat.lambda_norm(), rat(1, 4));
    }

    #[test]
    fn integer_helpers_agree_with_gram() {
        let lat = Lattice::new(Rank::new(3).unwrap());
        let a = [1, -2, 3];
        let b = [0, 2, -1];
        let va = LatticeVector::from_ints(lat.rank(), &a);
        let vb = LatticeVector::from_ints(lat.rank(), &b);
        assert_eq!(rat(lat.twice_pair_q(&a, &b) as i128, 2), lat.gram(&va, &vb).unwrap());
        let shifted = va.add(&lat.lambda());
        assert_eq!(lat.shifted_norm(&a), lat.gram(&shifted, &shifted).unwrap());
        assert_eq!(lat.pair_shifted(&b, &a), lat.gram(&vb, &shifted).unwrap());
    }
}
