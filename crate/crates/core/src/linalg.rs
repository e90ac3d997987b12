//! Exact linear algebra over `Q(ζ8)`.

use crate::scalar::Scalar;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(rows: &mut [Vec<Scalar>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][col].inverse().expect("pivot is nonzero");
        for x in rows[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        for i in 0..rows.len() {
            if i == r || rows[i][col].is_zero() {
                continue;
            }
            let f = rows[i][col].clone();
            for c in col..ncols {
                if rows[r][c].is_zero() {
                    continue;
                }
                let t = &rows[r][c] * &f;
                rows[i][c] -= &t;
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

/// A basis of `{x : A x = 0}` where `A` has `ncols` columns.
pub fn kernel(rows: &[Vec<Scalar>], ncols: usize) -> Vec<Vec<Scalar>> {
    let mut a: Vec<Vec<Scalar>> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let pivots = rref(&mut a, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Scalar::zero(); ncols];
            x[f] = Scalar::one();
            for (row, &p) in pivots.iter().enumerate() {
                x[p] = -&a[row][f];
            }
            x
        })
        .collect()
}

pub fn rank(rows: &[Vec<Scalar>], ncols: usize) -> usize {
    let mut a = rows.to_vec();
    rref(&mut a, ncols).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, Scalar};

    fn s(n: i128) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn kernel_of_rank_one() {
        let rows = vec![vec![s(1), s(2), s(3)], vec![s(2), s(4), s(6)]];
        let k = kernel(&rows, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            for r in &rows {
                let mut acc = Scalar::zero();
                for (a, b) in r.iter().zip(v) {
                    acc += &(a * b);
                }
                assert!(acc.is_zero());
            }
        }
    }

    #[test]
    fn cyclotomic_entries() {
        let i = Scalar::i();
        // [1, i; i, -1] has rank 1
        let rows = vec![vec![s(1), i.clone()], vec![i.clone(), s(-1)]];
        assert_eq!(rank(&rows, 2), 1);
        let k = kernel(&rows, 2);
        assert_eq!(k, vec![vec![-&i, Scalar::one()]]);
        let rows = vec![vec![s(1), Scalar::zeta_pow(1)], vec![s(0), Scalar::from_rational(int(3))]];
        assert!(kernel(&rows, 2).is_empty());
    }
}
