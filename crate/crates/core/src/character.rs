//! Weight decomposition, graded dimensions and highest-weight vectors.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::algebra::{Engine, GeneratorDictionary};
use crate::error::Result;
use crate::fock::{FockMonomial, FockSpace, FockVector, FockVectorJson};
use crate::lattice::{Lattice, LatticeVector, Rank};
use crate::linalg;
use crate::scalar::{int, rat, Rational, Scalar};
use crate::vertex::ModeIndex;

/// Simultaneous eigenvalues of `h_1..h_l`, `d₀` and `c` on a monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AffineWeight {
    #[serde(with = "crate::scalar::rational_vec_str")]
    pub finite: Vec<Rational>,
    #[serde(with = "crate::scalar::rational_str")]
    pub degree: Rational,
    #[serde(with = "crate::scalar::rational_str")]
    pub level: Rational,
}

impl AffineWeight {
    /// Finite part `(0, …, 0, 1)` at level 1.
    pub fn is_lambda_l(&self) -> bool {
        let l = self.finite.len();
        self.level.is_one()
            && self.finite[..l - 1].iter().all(Zero::is_zero)
            && self.finite[l - 1].is_one()
    }
}

/// `h_i = (2/(α_i,α_i)) α_i(0)` eigenvalues, `d₀ = −deg`, level 1.
pub fn weight_of(fs: &FockSpace, m: &FockMonomial) -> AffineWeight {
    let lattice = fs.lattice();
    let r = m.exp_i64();
    let l = fs.l();
    let finite = (1..=l)
        .map(|i| {
            let mut a = vec![0i64; l];
            a[i - 1] = 1;
            let norm = rat(lattice.twice_pair_q(&a, &a) as i128, 2);
            lattice.pair_shifted(&a, &r) * int(2) / norm
        })
        .collect();
    AffineWeight { finite, degree: -fs.degree_of(m), level: Rational::one() }
}

#[derive(Clone, Debug, Serialize)]
pub struct WeightMultiplicity {
    pub weight: AffineWeight,
    /// Offset below the top degree.
    #[serde(with = "crate::scalar::rational_str")]
    pub offset: Rational,
    pub multiplicity: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CharacterTable {
    pub l: usize,
    #[serde(with = "crate::scalar::rational_str")]
    pub depth: Rational,
    pub height: i64,
    pub complete: bool,
    pub weights: Vec<WeightMultiplicity>,
}

impl CharacterTable {
    /// Total dimension per offset below the top.
    pub fn graded_dimensions(&self) -> BTreeMap<Rational, u64> {
        let mut out = BTreeMap::new();
        for w in &self.weights {
            *out.entry(w.offset).or_insert(0) += w.multiplicity;
        }
        out
    }
}

/// Multiplicities of every weight within `depth` of the top degree.
pub fn character_table(rank: Rank, depth: &Rational) -> Result<CharacterTable> {
    let fs = FockSpace::new(rank);
    let top = fs.top_degree();
    let lo = top - *depth;
    let height = fs.certified_height(&lo);
    let basis = fs.enumerate_basis(&crate::fock::DegreeWindow::new(lo, top), height)?;
    let mut counts: BTreeMap<AffineWeight, u64> = BTreeMap::new();
    for m in &basis.monomials {
        *counts.entry(weight_of(&fs, m)).or_insert(0) += 1;
    }
    let mut weights: Vec<WeightMultiplicity> = counts
        .into_iter()
        .map(|(weight, multiplicity)| WeightMultiplicity { offset: weight.degree + top, weight, multiplicity })
        .collect();
    weights.sort_by(|a, b| a.offset.cmp(&b.offset).then_with(|| b.weight.finite.cmp(&a.weight.finite)));
    Ok(CharacterTable { l: rank.get(), depth: *depth, height, complete: basis.complete, weights })
}

/// Graded dimensions by offset below the top, from basis enumeration.
pub fn q_character(rank: Rank, depth: &Rational) -> Result<BTreeMap<Rational, u64>> {
    Ok(character_table(rank, depth)?.graded_dimensions())
}

/// Graded dimensions from the product formula
/// `Π_{n≥1}(1−q^n)^{−l}(1−q^{n−½})^{−l} · Σ_{α∈Q} q^{½(α+λ,α+λ)−½(λ,λ)}`,
/// by offset below the top degree.
pub fn generating_function(rank: Rank, depth: &Rational) -> BTreeMap<Rational, u64> {
    let lattice = Lattice::new(rank);
    let l = rank.get();
    // oscillator factor in x = q^{1/2}: Π_{k≥1} (1 − x^k)^{−l}
    let max_x = (*depth * int(2)).floor().to_integer().max(0) as usize;
    let mut osc = vec![0u64; max_x + 1];
    osc[0] = 1;
    for k in 1..=max_x {
        for _ in 0..l {
            for n in k..=max_x {
                osc[n] += osc[n - k];
            }
        }
    }
    // theta series relative to its minimum
    let theta = theta_exponents(&lattice, depth);
    let mut out = BTreeMap::new();
    for (t, count) in &theta {
        for (k, c) in osc.iter().enumerate() {
            let off = *t + rat(k as i128, 2);
            if off <= *depth && *c > 0 {
                *out.entry(off).or_insert(0) += count * c;
            }
        }
    }
    out
}

/// `½(α+λ,α+λ)` offsets from the minimum, for all `α ∈ Q`, up to `depth`.
fn theta_exponents(lattice: &Lattice, depth: &Rational) -> BTreeMap<Rational, u64> {
    let l = lattice.l();
    let half = |r: &[i64]| lattice.shifted_norm(r) / int(2);
    let mut values: Vec<(Vec<i64>, Rational)> = Vec::new();
    let mut h = 1i64;
    let mut min = half(&vec![0; l]);
    loop {
        values.clear();
        let mut r = vec![-h; l];
        loop {
            let v = half(&r);
            if v < min {
                min = v;
            }
            values.push((r.clone(), v));
            let mut i = 0;
            while i < l {
                r[i] += 1;
                if r[i] <= h {
                    break;
                }
                r[i] = -h;
                i += 1;
            }
            if i == l {
                break;
            }
        }
        if shell_beyond(lattice, h, &min, depth) {
            break;
        }
        h += 1;
    }
    let mut out = BTreeMap::new();
    for (_, v) in values {
        let off = v - min;
        if off <= *depth {
            *out.entry(off).or_insert(0) += 1;
        }
    }
    out
}

/// Whether `½(r+λ,r+λ) − min > depth` for every `r` outside the box of
/// height `h`: a coordinate `x_i` of `x = r+λ` forces `(x,x) ≥ x_i²/(G⁻¹)_ii`.
fn shell_beyond(lattice: &Lattice, h: i64, min: &Rational, depth: &Rational) -> bool {
    let l = lattice.l();
    let g: Vec<Vec<Scalar>> = (0..l)
        .map(|i| (0..l).map(|j| Scalar::from_rational(lattice.gram_entry(i, j))).collect())
        .collect();
    let lam = lattice.lambda();
    (0..l).all(|i| {
        // (G⁻¹)_ii via the solution of G x = e_i
        let mut rows: Vec<Vec<Scalar>> = g.clone();
        for (j, row) in rows.iter_mut().enumerate() {
            row.push(if j == i { Scalar::one() } else { Scalar::zero() });
        }
        linalg::rref(&mut rows, l);
        let inv_ii = rows[i][l].as_rational().expect("rational Gram");
        let slack = int(h as i128 + 1) - lam.coeffs()[i];
        slack * slack / inv_ii / int(2) - *min > *depth
    })
}

/// Joint kernel data for one weight space.
#[derive(Clone, Debug, Serialize)]
pub struct HwvVector {
    pub weight: AffineWeight,
    pub vector: FockVectorJson,
}

#[derive(Clone, Debug, Serialize)]
pub struct HwvReport {
    pub l: usize,
    #[serde(with = "crate::scalar::rational_str")]
    pub depth: Rational,
    pub basis_size: usize,
    pub weight_spaces: usize,
    pub vectors: Vec<HwvVector>,
    /// `X_1(−2θ)·(1⊗e^λ)` vanishes.
    pub x1_on_vacuum_vanishes: bool,
    /// `X_{½}(−2θ)·(1⊗e^λ)` vanishes.
    pub x_half_on_vacuum_vanishes: bool,
}

impl HwvReport {
    /// The kernel is spanned by `1⊗e^λ` alone.
    pub fn is_unique_vacuum(&self) -> bool {
        if self.vectors.len() != 1 {
            return false;
        }
        let v = FockVector::from_json(&self.vectors[0].vector).expect("valid vector");
        let terms = v.sorted_terms();
        terms.len() == 1 && terms[0].0.osc.is_empty() && terms[0].0.exp.iter().all(|&x| x == 0)
    }
}

/// A raising operator applied to single monomials.
enum Raising {
    Heisenberg(LatticeVector, i32),
    Vertex(LatticeVector, ModeIndex),
}

fn raising_set(engine: &Engine, depth: &Rational) -> Vec<Raising> {
    let lattice = engine.lattice();
    let rank = lattice.rank();
    let l = lattice.l();
    let max_twice = (*depth * int(2)).floor().to_integer() as i32;
    let mut ops = Vec::new();
    for i in 1..=l {
        let a = LatticeVector::alpha(rank, i);
        let pa = lattice.p_map(&a).expect("simple root in Q");
        for twice in 1..=max_twice.max(0) {
            if twice % 2 == 0 {
                ops.push(Raising::Heisenberg(a.clone(), twice));
            } else {
                ops.push(Raising::Heisenberg(pa.clone(), twice));
            }
        }
        ops.push(Raising::Vertex(a, ModeIndex::from_twice(0)));
    }
    ops.push(Raising::Vertex(GeneratorDictionary::theta(rank).scaled(&int(-2)), ModeIndex::from_twice(1)));
    ops
}

/// Vectors within `depth` of the top killed by every raising operator,
/// solved weight space by weight space. With `pure_exponentials` the search
/// is restricted to oscillator-free monomials.
pub fn hwv_search(engine: &Engine, depth: &Rational, pure_exponentials: bool) -> Result<HwvReport> {
    let fs = engine.fock();
    let mut basis = fs.window_basis(depth);
    if pure_exponentials {
        basis.retain(|m| m.osc.is_empty());
    }
    let mut spaces: BTreeMap<AffineWeight, Vec<FockMonomial>> = BTreeMap::new();
    for m in &basis {
        spaces.entry(weight_of(fs, m)).or_default().push(m.clone());
    }
    let ops = raising_set(engine, depth);
    let spaces: Vec<(AffineWeight, Vec<FockMonomial>)> = spaces.into_iter().rev().collect();
    let found: Vec<Result<Vec<HwvVector>>> = spaces
        .par_iter()
        .map(|(weight, monos)| {
            let mut rows: Vec<Vec<Scalar>> = Vec::new();
            for op in &ops {
                let mut index: FxHashMap<FockMonomial, usize> = FxHashMap::default();
                let mut block: Vec<Vec<Scalar>> = Vec::new();
                for (col, m) in monos.iter().enumerate() {
                    let v = FockVector::from_monomial(m.clone());
                    let image = match op {
                        Raising::Heisenberg(a, twice) => fs.heisenberg(a, *twice, &v)?,
                        Raising::Vertex(a, d) => engine.x_mode(a, *d, &v)?,
                    };
                    for (out, c) in image.sorted_terms() {
                        let n = index.len();
                        let row = *index.entry(out.clone()).or_insert(n);
                        if row == block.len() {
                            block.push(vec![Scalar::zero(); monos.len()]);
                        }
                        block[row][col] = c.clone();
                    }
                }
                rows.extend(block);
            }
            let kernel = linalg::kernel(&rows, monos.len());
            Ok(kernel
                .into_iter()
                .map(|x| {
                    let mut v = FockVector::zero();
                    for (m, c) in monos.iter().zip(x) {
                        v.add_term(m.clone(), c);
                    }
                    HwvVector { weight: weight.clone(), vector: v.to_json() }
                })
                .collect())
        })
        .collect();
    let mut vectors = Vec::new();
    for f in found {
        vectors.extend(f?);
    }
    let rank = engine.lattice().rank();
    let vacuum = FockVector::vacuum(&vec![0; rank.get()]);
    let minus_two_theta = GeneratorDictionary::theta(rank).scaled(&int(-2));
    let x1 = engine.x_mode(&minus_two_theta, ModeIndex::from_twice(2), &vacuum)?;
    let xh = engine.x_mode(&minus_two_theta, ModeIndex::from_twice(1), &vacuum)?;
    Ok(HwvReport {
        l: rank.get(),
        depth: *depth,
        basis_size: basis.len(),
        weight_spaces: spaces.len(),
        vectors,
        x1_on_vacuum_vanishes: x1.is_zero(),
        x_half_on_vacuum_vanishes: xh.is_zero(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DominanceReport {
    pub l: usize,
    pub height: i64,
    /// Points satisfying `(α,α_i) ≥ 0` for all `i` and `(α, α_1+…+α_l) ≤ ¼`.
    pub solutions: Vec<LatticeVector>,
    pub dominant_nonzero: usize,
    /// Least `(α, α_1+…+α_l)` over nonzero dominant points in the box.
    #[serde(with = "option_rational")]
    pub min_nonzero_pairing: Option<Rational>,
}

mod option_rational {
    use super::*;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(q: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        q.map(|q| crate::scalar::rational_to_string(&q)).serialize(s)
    }
}

/// Scan of the box `[−h, h]^l` for dominant points of small pairing with `α_1+…+α_l`.
pub fn dominance_check(rank: Rank, height: i64) -> DominanceReport {
    let lattice = Lattice::new(rank);
    let l = rank.get();
    let sum: Vec<i64> = vec![1; l];
    let simple: Vec<Vec<i64>> = (0..l)
        .map(|i| {
            let mut a = vec![0; l];
            a[i] = 1;
            a
        })
        .collect();
    let quarter = rat(1, 4);
    let mut solutions = Vec::new();
    let mut dominant_nonzero = 0;
    let mut min_nonzero: Option<Rational> = None;
    let mut r = vec![-height; l];
    loop {
        let dominant = simple.iter().all(|a| lattice.twice_pair_q(&r, a) >= 0);
        if dominant {
            let pairing = rat(lattice.twice_pair_q(&r, &sum) as i128, 2);
            if pairing <= quarter {
                solutions.push(LatticeVector::from_ints(rank, &r));
            }
            if r.iter().any(|&x| x != 0) {
                dominant_nonzero += 1;
                min_nonzero = Some(min_nonzero.map_or(pairing, |m: Rational| m.min(pairing)));
            }
        }
        let mut i = 0;
        while i < l {
            r[i] += 1;
            if r[i] <= height {
                break;
            }
            r[i] = -height;
            i += 1;
        }
        if i == l {
            break;
        }
    }
    DominanceReport { l, height, solutions, dominant_nonzero, min_nonzero_pairing: min_nonzero }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vertex::PhaseConvention;

    fn rank(l: usize) -> Rank {
        Rank::new(l).unwrap()
    }

    #[test]
    fn vacuum_weight_is_lambda_l() {
        let fs = FockSpace::new(rank(2));
        let w = weight_of(&fs, &FockMonomial::vacuum(&[0, 0]));
        assert_eq!(w.finite, vec![int(0), int(1)]);
        assert!(w.is_lambda_l());
        assert_eq!(w.degree, rat(1, 8));
        let w = weight_of(&fs, &FockMonomial::vacuum(&[0, -1]));
        assert_eq!(w.finite[1], int(-1));
    }

    #[test]
    fn top_slice() {
        let t = character_table(rank(2), &int(0)).unwrap();
        assert!(t.complete);
        assert_eq!(t.graded_dimensions().get(&int(0)), Some(&4));
        let top_lambda: Vec<_> = t.weights.iter().filter(|w| w.weight.is_lambda_l()).collect();
        assert_eq!(top_lambda.len(), 1);
        assert_eq!(top_lambda[0].multiplicity, 1);
    }

    #[test]
    fn enumeration_matches_product_formula() {
        for l in [2, 3] {
            let d = int(3);
            assert_eq!(q_character(rank(l), &d).unwrap(), generating_function(rank(l), &d), "l = {l}");
        }
    }

    #[test]
    fn dominance_only_zero() {
        let rep = dominance_check(rank(2), 3);
        assert_eq!(rep.solutions, vec![LatticeVector::zero(rank(2))]);
        assert!(rep.min_nonzero_pairing.unwrap() >= rat(1, 2));
    }

    #[test]
    fn hwv_depth_one() {
        let e = Engine::new(rank(2), PhaseConvention::FullExponent);
        let rep = hwv_search(&e, &int(1), false).unwrap();
        assert!(rep.is_unique_vacuum());
        assert!(rep.x1_on_vacuum_vanishes);
        assert!(rep.x_half_on_vacuum_vanishes);
    }
}
