use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twistfock_core::fock::{FockMonomial, FockSpace, FockVector};
use twistfock_core::lattice::{LatticeVector, Rank, RootClass};
use twistfock_core::scalar::{int, rat, Scalar};
use twistfock_core::vertex::{ExpSeries, ModeIndex, PhaseConvention};
use twistfock_core::Engine;

mod common;

use common::{contraction_holds, roots_and_zero};

fn rank2() -> Rank {
    Rank::new(2).unwrap()
}

fn sample_vectors(fs: &FockSpace) -> Vec<FockVector> {
    let basis = fs.window_basis(&int(2));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut out: Vec<FockVector> = basis.iter().step_by(37).map(|m| FockVector::from_monomial(m.clone())).collect();
    out.push(fs.random_vector(&basis, 6, &mut rng));
    out
}

#[test]
fn contraction_identities_all_pairs() {
    let fs = FockSpace::new(rank2());
    let lattice = fs.lattice();
    let vs = sample_vectors(&fs);
    for a in roots_and_zero(lattice) {
        for b in roots_and_zero(lattice) {
            let (e, f) = contraction_holds(lattice, &a, &b, &vs, 6);
            assert!(e, "E identity fails for a = {a}, b = {b}");
            assert!(f, "F identity fails for a = {a}, b = {b}");
        }
    }
}

/// `exp(B)·v` by the Taylor series of the exponential, with
/// `B = Σ_k (2/k) γ_k(−k/2) x^k` applied through the Heisenberg action.
fn naive_creation(fs: &FockSpace, even: &LatticeVector, odd: &LatticeVector, v: &FockVector, order: i64) -> BTreeMap<i64, FockVector> {
    let apply_b = |x: &BTreeMap<i64, FockVector>| -> BTreeMap<i64, FockVector> {
        let mut out: BTreeMap<i64, FockVector> = BTreeMap::new();
        for (e, u) in x {
            for k in 1..=order - e {
                let g = if k % 2 == 0 { even } else { odd };
                if g.is_zero() {
                    continue;
                }
                let t = fs.heisenberg(g, -(k as i32), u).unwrap();
                out.entry(e + k).or_default().add_scaled(&t, &Scalar::from_rational(rat(2, k as i128)));
            }
        }
        out
    };
    let mut total: BTreeMap<i64, FockVector> = BTreeMap::new();
    let mut term: BTreeMap<i64, FockVector> = BTreeMap::from([(0, v.clone())]);
    let mut j = 0;
    while !term.is_empty() {
        for (e, u) in &term {
            total.entry(*e).or_default().add_assign(u);
        }
        j += 1;
        term = apply_b(&term)
            .into_iter()
            .map(|(e, u)| (e, u.scaled(&Scalar::from_rational(rat(1, j)))))
            .filter(|(_, u)| !u.is_zero())
            .collect();
    }
    total
}

/// `exp(A)·v` with `A = −Σ_k (2/k) γ_k(k/2) x^{−k}`.
fn naive_annihilation(fs: &FockSpace, even: &LatticeVector, odd: &LatticeVector, v: &FockVector) -> BTreeMap<i64, FockVector> {
    let apply_a = |x: &BTreeMap<i64, FockVector>| -> BTreeMap<i64, FockVector> {
        let mut out: BTreeMap<i64, FockVector> = BTreeMap::new();
        for (e, u) in x {
            for k in 1..=12i64 {
                let g = if k % 2 == 0 { even } else { odd };
                if g.is_zero() {
                    continue;
                }
                let t = fs.heisenberg(g, k as i32, u).unwrap();
                out.entry(e - k).or_default().add_scaled(&t, &Scalar::from_rational(rat(-2, k as i128)));
            }
        }
        out.retain(|_, u| !u.is_zero());
        out
    };
    let mut total: BTreeMap<i64, FockVector> = BTreeMap::new();
    let mut term: BTreeMap<i64, FockVector> = BTreeMap::from([(0, v.clone())]);
    let mut j = 0;
    while !term.is_empty() {
        for (e, u) in &term {
            total.entry(*e).or_default().add_assign(u);
        }
        j += 1;
        term = apply_a(&term).into_iter().map(|(e, u)| (e, u.scaled(&Scalar::from_rational(rat(1, j))))).collect();
    }
    total
}

#[test]
fn creation_recursion_matches_taylor_expansion() {
    let fs = FockSpace::new(rank2());
    let lattice = fs.lattice();
    let vac = FockVector::vacuum(&[0, 0]);
    for (_, a) in lattice.roots().all() {
        let pa = lattice.p_map(&a).unwrap();
        let series = ExpSeries::new(lattice, Some(a.clone()), Some(pa.clone()));
        let fast = series.apply_creation(&vac, 7);
        let naive = naive_creation(&fs, &a, &pa, &vac, 7);
        let naive: BTreeMap<i64, FockVector> = naive.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        assert_eq!(fast, naive, "creation series of {a}");
    }
}

/// `X_d(α)·m` from the naive exponentials and independently computed prefactors.
fn naive_mode(fs: &FockSpace, alpha: &LatticeVector, class: RootClass, d: ModeIndex, m: &FockMonomial, conv: PhaseConvention) -> FockVector {
    let lattice = fs.lattice();
    let pa = lattice.p_map(alpha).unwrap();
    let p0 = lattice.p0_map(alpha).unwrap();
    let r = fs.exponent_vector(&m.exp);
    let lam = lattice.lambda();
    let shift = lattice.gram(alpha, alpha).unwrap()
        + int(2) * lattice.gram(alpha, &r).unwrap()
        + int(2) * lattice.gram(alpha, &lam).unwrap();
    let mut out = FockVector::zero();
    if !shift.is_integer() {
        return out;
    }
    let target = -(d.twice as i64) - shift.to_integer();
    let v = FockVector::from_monomial(m.clone());
    let ann = naive_annihilation(fs, alpha, &pa, &v);
    let max_c = ann.keys().map(|k| target - k).max().unwrap_or(0).max(0);
    let s = r.add(alpha);
    let mut q = lattice.gram(&p0, &s).unwrap();
    if conv == PhaseConvention::FullExponent {
        q += lattice.gram(&p0, &lam).unwrap();
    }
    let mut scalar = Scalar::minus_one_pow(&-q).unwrap();
    if class == RootClass::Short {
        scalar = &scalar * &Scalar::i();
    }
    if lattice.cocycle(alpha, &r).unwrap() < 0 {
        scalar = -scalar;
    }
    let shifted_exp: Vec<i32> = s.q_coords().unwrap().iter().map(|&x| x as i32).collect();
    for (k, u) in ann {
        let c = target - k;
        if c < 0 {
            continue;
        }
        let cre = naive_creation(fs, alpha, &pa, &u, max_c);
        if let Some(w) = cre.get(&c) {
            for (mono, coef) in w.iter() {
                let moved = FockMonomial::new(mono.osc.clone(), &shifted_exp);
                out.add_term(moved, coef * &scalar);
            }
        }
    }
    out
}

#[test]
fn mode_extraction_matches_naive_oracle() {
    for conv in PhaseConvention::ALL {
        let engine = Engine::new(rank2(), conv);
        let fs = engine.fock();
        let basis = fs.window_basis(&int(1));
        for (class, alpha) in fs.lattice().roots().all() {
            for twice in -4..=4 {
                let d = ModeIndex::from_twice(twice);
                for m in &basis {
                    let fast = engine.x_mode(&alpha, d, &FockVector::from_monomial(m.clone())).unwrap();
                    let slow = naive_mode(fs, &alpha, class, d, m, conv);
                    assert_eq!(fast, slow, "X_{d:?}({alpha}) on {m} under {conv:?}");
                }
            }
        }
    }
}
