//! Independent reference implementations on plain `Vec<Vec<_>>` matrices.
//! Nothing here goes through the quadtree or the recursive algorithms.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use quadalg::domain::{IntegerRing, RationalField, Ring};
use quadalg::QuadMatrix;

pub type Dense<T> = Vec<Vec<T>>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Dense random integers in `(-2^bits, 2^bits)`, roughly `zero_pct` percent zeros.
pub fn random_ints(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bits: u32, zero_pct: u32) -> Dense<BigInt> {
    (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| {
                    if rng.gen_range(0..100) < zero_pct {
                        BigInt::zero()
                    } else {
                        let m = 1i64 << bits;
                        BigInt::from(rng.gen_range(-m + 1..m))
                    }
                })
                .collect()
        })
        .collect()
}

/// `n x n` of rank at most `r`, as a product of random factors.
pub fn low_rank(rng: &mut ChaCha8Rng, n: usize, r: usize, bits: u32) -> Dense<BigInt> {
    if r == 0 {
        return vec![vec![BigInt::zero(); n]; n];
    }
    let a = random_ints(rng, n, r, bits, 0);
    let b = random_ints(rng, r, n, bits, 0);
    naive_mul(&a, &b)
}

pub fn to_quad(m: &Dense<BigInt>) -> QuadMatrix<IntegerRing> {
    QuadMatrix::from_rows(IntegerRing, m.clone()).unwrap()
}

pub fn to_quad_leaf(m: &Dense<BigInt>, leaf: usize) -> QuadMatrix<IntegerRing> {
    QuadMatrix::from_rows_with_leaf(IntegerRing, m.clone(), leaf).unwrap()
}

pub fn to_rational(m: &Dense<BigInt>) -> Dense<BigRational> {
    m.iter().map(|r| r.iter().map(|v| BigRational::from_integer(v.clone())).collect()).collect()
}

pub fn rational_quad(m: &Dense<BigInt>, leaf: usize) -> QuadMatrix<RationalField> {
    QuadMatrix::from_rows_with_leaf(RationalField, to_rational(m), leaf).unwrap()
}

pub fn naive_mul<T>(a: &Dense<T>, b: &Dense<T>) -> Dense<T>
where
    T: Clone + Zero + std::ops::Mul<Output = T>,
{
    let (n, k, m) = (a.len(), b.len(), b.first().map_or(0, |r| r.len()));
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s = T::zero();
                    for t in 0..k {
                        s = s + a[i][t].clone() * b[t][j].clone();
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Generic triple loop over any domain.
pub fn naive_mul_in<D: Ring>(dom: &D, a: &Dense<D::Elem>, b: &Dense<D::Elem>) -> Dense<D::Elem> {
    let (n, k, m) = (a.len(), b.len(), b.first().map_or(0, |r| r.len()));
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s = dom.zero();
                    for t in 0..k {
                        s = dom.add(&s, &dom.mul(&a[i][t], &b[t][j]));
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Fraction-free Bareiss elimination with row swaps.
pub fn bareiss_det(m: &Dense<BigInt>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
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
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                assert!((&v % &prev).is_zero(), "Bareiss division must be exact");
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(m: &mut Dense<BigRational>) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let d = &f * &m[r][j];
                    m[i][j] = &m[i][j] - d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank_q(m: &Dense<BigRational>) -> usize {
    rref(&mut m.clone()).len()
}

pub fn rank_z(m: &Dense<BigInt>) -> usize {
    rank_q(&to_rational(m))
}

/// Gauss-Jordan inverse, `None` when singular.
pub fn inverse_q(m: &Dense<BigRational>) -> Option<Dense<BigRational>> {
    let n = m.len();
    let mut aug: Dense<BigRational> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.len() < n || piv[n - 1] >= n {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Null space basis of `m` from its reduced echelon form.
pub fn kernel_q(m: &Dense<BigRational>) -> Vec<Vec<BigRational>> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = m.clone();
    let piv = rref(&mut r);
    (0..cols)
        .filter(|c| !piv.contains(c))
        .map(|free| {
            let mut v = vec![BigRational::zero(); cols];
            v[free] = BigRational::one();
            for (row, &pc) in piv.iter().enumerate() {
                v[pc] = -r[row][free].clone();
            }
            v
        })
        .collect()
}

/// Whether two families of vectors span the same subspace.
pub fn same_span(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> bool {
    let ra = rank_q(&a.to_vec());
    let rb = rank_q(&b.to_vec());
    let both: Dense<BigRational> = a.iter().chain(b).cloned().collect();
    ra == rb && rank_q(&both) == ra
}

pub fn identity_q(n: usize) -> Dense<BigRational> {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect()).collect()
}

/// Random lower triangular integer matrix with nonzero diagonal.
pub fn random_lower(rng: &mut ChaCha8Rng, n: usize, bits: u32) -> Dense<BigInt> {
    let mut m = random_ints(rng, n, n, bits, 30);
    for i in 0..n {
        for j in i + 1..n {
            m[i][j] = BigInt::zero();
        }
        while m[i][i].is_zero() {
            m[i][i] = BigInt::from(rng.gen_range(1..1i64 << bits));
        }
        if m[i][i].is_negative() {
            m[i][i] = -m[i][i].clone();
        }
    }
    m
}

pub fn transpose<T: Clone>(m: &Dense<T>) -> Dense<T> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols).map(|j| (0..rows).map(|i| m[i][j].clone()).collect()).collect()
}

/// Permutation matrix of `perm`: row `i` has its one in column `perm[i]`.
pub fn permutation(perm: &[usize]) -> Dense<BigInt> {
    let n = perm.len();
    (0..n).map(|i| (0..n).map(|j| BigInt::from((perm[i] == j) as i64)).collect()).collect()
}

/// Zero, identity, permutation, rank-deficient and nilpotent inputs.
pub fn structured_corpus() -> Vec<(String, Dense<BigInt>)> {
    let mut out = Vec::new();
    let mut r = rng(0x5eed);
    for n in [1usize, 2, 3, 4, 5, 7, 8, 9, 16] {
        out.push((format!("zero{n}"), vec![vec![BigInt::zero(); n]; n]));
        out.push((format!("identity{n}"), (0..n).map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect()).collect()));
        let rev: Vec<usize> = (0..n).rev().collect();
        out.push((format!("reversal{n}"), permutation(&rev)));
        let cyc: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        out.push((format!("cycle{n}"), permutation(&cyc)));
        let shift: Dense<BigInt> =
            (0..n).map(|i| (0..n).map(|j| BigInt::from((j == i + 1) as i64)).collect()).collect();
        out.push((format!("shift{n}"), shift));
        let mut upper = random_ints(&mut r, n, n, 6, 0);
        for i in 0..n {
            for j in 0..=i {
                upper[i][j] = BigInt::zero();
            }
        }
        out.push((format!("strict_upper{n}"), upper));
        if n >= 2 {
            for rank in [1, n / 2, n - 1] {
                out.push((format!("rank{rank}_of{n}"), low_rank(&mut r, n, rank.max(1), 5)));
            }
            let mut dup = random_ints(&mut r, n, n, 8, 0);
            dup[n - 1] = dup[0].clone();
            out.push((format!("dup_row{n}"), dup));
            let mut zc = random_ints(&mut r, n, n, 8, 0);
            for row in zc.iter_mut() {
                row[0] = BigInt::zero();
            }
            out.push((format!("zero_col{n}"), zc));
        }
    }
    out
}

/// Checks `A M = S`, `d E = S J_E` and `S = I_E S` on dense copies, with the
/// triple-loop product. `M` is `m` embedded with identity padding.
pub fn identities_hold<D: Ring>(m: &QuadMatrix<D>, r: &quadalg::AdjointResult<D>) -> Result<(), String> {
    let dom = m.domain();
    let n = r.s.order();
    let mut p = m.to_dense();
    for row in p.iter_mut() {
        row.resize(n, dom.zero());
    }
    for i in m.rows()..n {
        let mut row = vec![dom.zero(); n];
        row[i] = dom.one();
        p.push(row);
    }
    let a = r.a.to_dense();
    let s = r.s.to_dense();
    if naive_mul_in(dom, &a, &p) != s {
        return Err("A M != S".into());
    }
    let e = r.e.to_dense();
    let cols = r.e.col_selector();
    let rows = r.e.row_selector();
    for i in 0..n {
        for j in 0..n {
            let de = if e[i][j] == 1 { r.d.clone() } else { dom.zero() };
            let sj = if cols.contains(j) { s[i][j].clone() } else { dom.zero() };
            if de != sj {
                return Err(format!("d E != S J_E at ({i}, {j})"));
            }
            if !rows.contains(i) && !dom.is_zero(&s[i][j]) {
                return Err(format!("S != I_E S at ({i}, {j})"));
            }
        }
    }
    Ok(())
}
