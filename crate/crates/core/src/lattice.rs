//! Integer and rational linear algebra on small dense matrices: Hermite and
//! Smith normal forms, Bareiss determinants and exact solving.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Row Hermite normal form of the lattice spanned by `rows` in ℤ^d.
///
/// The result has one row per pivot, pivots strictly increase in column,
/// pivot entries are positive, and entries above a pivot lie in
/// `0..pivot`. A full rank lattice gives an upper triangular `d × d` matrix.
pub fn hermite_rows(rows: &[Vec<BigInt>], d: usize) -> Vec<Vec<BigInt>> {
    let mut work: Vec<Vec<BigInt>> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut out: Vec<Vec<BigInt>> = Vec::new();
    for col in 0..d {
        // Euclid on the column until at most one row has a nonzero entry.
        loop {
            let mut nz: Vec<usize> = (0..work.len()).filter(|&i| !work[i][col].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            nz.sort_by(|&a, &b| work[a][col].abs().cmp(&work[b][col].abs()));
            let p = nz[0];
            let pivot_row = work[p].clone();
            for &i in &nz[1..] {
                let q = work[i][col].div_floor(&pivot_row[col]);
                for k in col..d {
                    let t = &q * &pivot_row[k];
                    work[i][k] -= t;
                }
            }
        }
        if let Some(i) = (0..work.len()).find(|&i| !work[i][col].is_zero()) {
            let mut row = work.swap_remove(i);
            if row[col].is_negative() {
                row.iter_mut().for_each(|x| *x = -x.clone());
            }
            out.push(row);
        }
        work.retain(|r| r.iter().any(|x| !x.is_zero()));
    }
    reduce_above(&mut out);
    out
}

fn reduce_above(h: &mut [Vec<BigInt>]) {
    for i in 0..h.len() {
        let col = h[i].iter().position(|x| !x.is_zero()).unwrap();
        let pivot_row = h[i].clone();
        for row in h.iter_mut().take(i) {
            let q = row[col].div_floor(&pivot_row[col]);
            if !q.is_zero() {
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &q * p;
                }
            }
        }
    }
}

/// Reduces `v` modulo a full rank upper triangular HNF basis, returning the
/// unique representative with `0 ≤ v_i < h_ii`.
pub fn reduce_mod_hnf(h: &[Vec<BigInt>], v: &[BigInt]) -> Vec<BigInt> {
    let mut v = v.to_vec();
    for (i, row) in h.iter().enumerate() {
        let q = v[i].div_floor(&row[i]);
        if !q.is_zero() {
            for (x, r) in v.iter_mut().zip(row) {
                *x -= &q * r;
            }
        }
    }
    v
}

/// Product of the diagonal of a square triangular matrix.
pub fn diagonal_product(h: &[Vec<BigInt>]) -> BigInt {
    h.iter().enumerate().map(|(i, r)| r[i].clone()).product()
}

/// Diagonal of the Smith normal form (the nonzero invariant factors, each
/// dividing the next).
pub fn smith_invariants(rows: &[Vec<BigInt>]) -> Vec<BigInt> {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        // Smallest nonzero entry in the remaining block becomes the pivot.
        let Some((pi, pj)) = (t..m)
            .flat_map(|i| (t..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !a[i][j].is_zero())
            .min_by(|&(i, j), &(k, l)| a[i][j].abs().cmp(&a[k][l].abs()))
        else {
            break;
        };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        let mut clean = true;
        for i in t + 1..m {
            let q = a[i][t].div_floor(&a[t][t]);
            if !q.is_zero() {
                let pr = a[t].clone();
                for (x, p) in a[i].iter_mut().zip(&pr) {
                    *x -= &q * p;
                }
            }
            clean &= a[i][t].is_zero();
        }
        for j in t + 1..n {
            let q = a[t][j].div_floor(&a[t][t]);
            if !q.is_zero() {
                for row in a.iter_mut() {
                    let p = row[t].clone();
                    row[j] -= &q * p;
                }
            }
            clean &= a[t][j].is_zero();
        }
        if !clean {
            continue;
        }
        // The pivot must divide the rest of the block.
        if let Some(i) = (t + 1..m).find(|&i| (t + 1..n).any(|j| !(&a[i][j] % &a[t][t]).is_zero())) {
            let r = a[i].clone();
            for (x, y) in a[t].iter_mut().zip(&r) {
                *x += y;
            }
            continue;
        }
        out.push(a[t][t].abs());
        t += 1;
    }
    out
}

/// Determinant of a square integer matrix by fraction free elimination.
pub fn determinant(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Solves `Σ_k x_k · columns[k] = target` over ℚ. Returns `None` when the
/// system has no solution or the columns are dependent.
pub fn solve_columns(columns: &[Vec<BigInt>], target: &[BigInt]) -> Option<Vec<BigRational>> {
    let n = columns.len();
    let m = target.len();
    let r = |x: &BigInt| BigRational::from_integer(x.clone());
    // Augmented m × (n+1) system.
    let mut a: Vec<Vec<BigRational>> =
        (0..m).map(|i| columns.iter().map(|c| r(&c[i])).chain([r(&target[i])]).collect()).collect();
    let mut row = 0;
    for col in 0..n {
        let p = (row..m).find(|&i| !a[i][col].is_zero())?;
        a.swap(row, p);
        let inv = a[row][col].recip();
        for x in a[row].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m {
            if i != row && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                let pr = a[row].clone();
                for (x, y) in a[i].iter_mut().zip(&pr) {
                    *x -= &f * y;
                }
            }
        }
        row += 1;
    }
    if (row..m).any(|i| !a[i][n].is_zero()) {
        return None;
    }
    Some((0..n).map(|i| a[i][n].clone()).collect())
}

/// Integer solution of [`solve_columns`], if the rational one is integral.
pub fn solve_columns_integer(columns: &[Vec<BigInt>], target: &[BigInt]) -> Option<Vec<BigInt>> {
    solve_columns(columns, target)?
        .into_iter()
        .map(|x| x.is_integer().then(|| x.to_integer()))
        .collect()
}

pub fn to_big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn to_big_matrix(m: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    m.iter().map(|r| to_big(r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(m: &[&[i64]]) -> Vec<Vec<BigInt>> {
        m.iter().map(|r| to_big(r)).collect()
    }

    #[test]
    fn hermite() {
        // ideal (√2) in ℤ[√2]: generators √2 = (0,1) and √2·√2 = (2,0)
        let h = hermite_rows(&mat(&[&[0, 1], &[2, 0]]), 2);
        assert_eq!(h, mat(&[&[2, 0], &[0, 1]]));
        let h = hermite_rows(&mat(&[&[4, 6], &[6, 9], &[2, 3]]), 2);
        assert_eq!(h, mat(&[&[2, 3]]));
        let h = hermite_rows(&mat(&[&[3, 1], &[1, 3]]), 2);
        assert_eq!(h, mat(&[&[1, 3], &[0, 8]]));
        assert_eq!(diagonal_product(&h), BigInt::from(8));
        assert_eq!(reduce_mod_hnf(&h, &to_big(&[5, 2])), to_big(&[0, 3]));
    }

    #[test]
    fn smith() {
        assert_eq!(smith_invariants(&mat(&[&[2, 0], &[0, 3]])), to_big(&[1, 6]));
        assert_eq!(smith_invariants(&mat(&[&[2, 4], &[6, 8]])), to_big(&[2, 4]));
        assert_eq!(smith_invariants(&mat(&[&[2, 0], &[0, 2]])), to_big(&[2, 2]));
    }

    #[test]
    fn determinants() {
        assert_eq!(determinant(&mat(&[&[1, 2], &[3, 4]])), BigInt::from(-2));
        assert_eq!(determinant(&mat(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]])), BigInt::from(-1));
        assert_eq!(determinant(&mat(&[&[1, 0], &[2, 0]])), BigInt::zero());
        assert_eq!(determinant(&mat(&[&[2, 1, 3], &[0, 4, 1], &[5, 2, 0]])), BigInt::from(-59));
    }

    #[test]
    fn solving() {
        let cols = mat(&[&[1, 0], &[1, 1]]);
        assert_eq!(solve_columns_integer(&cols, &to_big(&[2, 3])), Some(to_big(&[-1, 3])));
        let cols = mat(&[&[2, 0], &[0, 2]]);
        assert_eq!(solve_columns_integer(&cols, &to_big(&[1, 0])), None);
        assert!(solve_columns(&cols, &to_big(&[1, 0])).is_some());
        assert_eq!(solve_columns(&mat(&[&[1, 1], &[2, 2]]), &to_big(&[1, 0])), None);
    }
}
