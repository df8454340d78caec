//! Exact integer and rational linear algebra on small dense matrices.
//!
//! Everything here works over `BigInt` / `BigRational`; there is no floating
//! point anywhere in the crate.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(v: i64) -> Int {
    BigInt::from(v)
}

pub fn rat(v: i64) -> Rat {
    BigRational::from_integer(BigInt::from(v))
}

pub fn to_rat(v: &Int) -> Rat {
    BigRational::from_integer(v.clone())
}

/// gcd of all entries (0 for the zero vector).
pub fn content(v: &[Int]) -> Int {
    v.iter().fold(Int::zero(), |g, x| g.gcd(x))
}

/// Determinant of a square integer matrix (fraction-free Bareiss elimination).
pub fn det(rows: &[Vec<Int>]) -> Int {
    let n = rows.len();
    if n == 0 {
        return Int::one();
    }
    let mut m: Vec<Vec<Int>> = rows.to_vec();
    let mut sign = Int::one();
    let mut prev = Int::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return Int::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Determinant of the matrix whose rows are `vectors`.
pub fn det_of(vectors: &[&[Int]]) -> Int {
    let rows: Vec<Vec<Int>> = vectors.iter().map(|v| v.to_vec()).collect();
    det(&rows)
}

/// Row-reduce a rational matrix in place; returns the pivot columns.
fn row_reduce(m: &mut [Vec<Rat>], ncols: usize) -> Vec<usize> {
    let nrows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..nrows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..m[i].len() {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank of a family of integer vectors.
pub fn rank(vectors: &[&[Int]]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let ncols = vectors[0].len();
    let mut m: Vec<Vec<Rat>> = vectors
        .iter()
        .map(|v| v.iter().map(to_rat).collect())
        .collect();
    row_reduce(&mut m, ncols).len()
}

/// Solve `sum_i c_i * columns[i] = target` for rational `c`.
///
/// Returns `None` when the system has no solution. When the columns are
/// dependent the solution with free variables set to zero is returned.
pub fn solve(columns: &[&[Int]], target: &[Int]) -> Option<Vec<Rat>> {
    let n = target.len();
    let k = columns.len();
    let mut m: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rat> = columns.iter().map(|c| to_rat(&c[i])).collect();
            row.push(to_rat(&target[i]));
            row
        })
        .collect();
    let pivots = row_reduce(&mut m, k + 1);
    if pivots.last() == Some(&k) {
        return None;
    }
    let mut sol = vec![Rat::zero(); k];
    for (r, &c) in pivots.iter().enumerate() {
        sol[c] = m[r][k].clone();
    }
    Some(sol)
}

/// Same as [`solve`] but over rational input vectors.
pub fn solve_rat(columns: &[Vec<Rat>], target: &[Rat]) -> Option<Vec<Rat>> {
    let n = target.len();
    let k = columns.len();
    let mut m: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rat> = columns.iter().map(|c| c[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let pivots = row_reduce(&mut m, k + 1);
    if pivots.last() == Some(&k) {
        return None;
    }
    let mut sol = vec![Rat::zero(); k];
    for (r, &c) in pivots.iter().enumerate() {
        sol[c] = m[r][k].clone();
    }
    Some(sol)
}

/// Inverse of the square matrix whose *columns* are `columns`.
pub fn inverse_of_columns(columns: &[&[Int]]) -> Option<Vec<Vec<Rat>>> {
    let n = columns.len();
    let mut m: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rat> = columns.iter().map(|c| to_rat(&c[i])).collect();
            row.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            row
        })
        .collect();
    let pivots = row_reduce(&mut m, n);
    if pivots.len() < n {
        return None;
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn mat_vec(m: &[Vec<Rat>], v: &[Int]) -> Vec<Rat> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * to_rat(b)).sum())
        .collect()
}

pub fn int_mat_vec(m: &[Vec<Int>], v: &[Int]) -> Vec<Int> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// Extended gcd: returns `(g, s, t)` with `s*a + t*b = g >= 0`.
fn xgcd(a: &Int, b: &Int) -> (Int, Int, Int) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Unimodular `U` (n x n) with `U * G` upper triangular, where the columns of
/// `G` are `generators`.
///
/// Rows are eliminated column by column; the pivot for column `c` is built in
/// row `c` by pairwise extended-gcd steps against the rows below, in
/// increasing order. The procedure is deterministic, so quotient coordinates
/// built from it are reproducible.
///
/// Returns `(U, diag)` where `diag` are the diagonal entries of `U * G`.
pub fn unimodular_reduction(generators: &[&[Int]], n: usize) -> (Vec<Vec<Int>>, Vec<Int>) {
    let k = generators.len();
    let mut g: Vec<Vec<Int>> = (0..n)
        .map(|i| generators.iter().map(|c| c[i].clone()).collect())
        .collect();
    let mut u: Vec<Vec<Int>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Int::one() } else { Int::zero() }).collect())
        .collect();
    let combine = |m: &mut Vec<Vec<Int>>, c: usize, r: usize, s: &Int, t: &Int, p: &Int, q: &Int| {
        // [row_c; row_r] <- [[s, t], [p, q]] * [row_c; row_r]
        for j in 0..m[c].len() {
            let a = m[c][j].clone();
            let b = m[r][j].clone();
            m[c][j] = s * &a + t * &b;
            m[r][j] = p * &a + q * &b;
        }
    };
    for c in 0..k.min(n) {
        for r in c + 1..n {
            if g[r][c].is_zero() {
                continue;
            }
            let a = g[c][c].clone();
            let b = g[r][c].clone();
            let (d, s, t) = xgcd(&a, &b);
            let p = -(&b / &d);
            let q = &a / &d;
            combine(&mut g, c, r, &s, &t, &p, &q);
            combine(&mut u, c, r, &s, &t, &p, &q);
        }
        if g[c][c].is_negative() {
            for v in g[c].iter_mut() {
                *v = -v.clone();
            }
            for v in u[c].iter_mut() {
                *v = -v.clone();
            }
        }
    }
    let diag = (0..k.min(n)).map(|c| g[c][c].clone()).collect();
    (u, diag)
}
