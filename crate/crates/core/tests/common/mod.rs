//! Independent brute-force oracles shared by the integration tests. They
//! work on `i128` copies of the data and avoid the library's LP, cone
//! location and primitive-collection code.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_traits::ToPrimitive;
use torfan::catalog;
use torfan::Fan;

pub fn fan(name: &str) -> Fan {
    catalog::catalog(name).unwrap_or_else(|e| panic!("{name}: {e}")).fan
}

/// Every built-in catalog fan, by name.
pub fn all_fans() -> Vec<(String, Fan)> {
    catalog::names().into_iter().map(|n| {
        let f = fan(&n);
        (n, f)
    }).collect()
}

pub fn fano_fans() -> Vec<(String, Fan)> {
    all_fans()
        .into_iter()
        .filter(|(_, f)| f.validate().is_ok() && torfan::primitive::is_fano(f).unwrap())
        .collect()
}

pub fn rays_i128(fan: &Fan) -> Vec<Vec<i128>> {
    fan.rays()
        .iter()
        .map(|r| r.iter().map(|x| x.to_i128().expect("small coordinates")).collect())
        .collect()
}

fn mask(ix: &[usize]) -> u128 {
    ix.iter().fold(0, |m, &i| m | (1u128 << i))
}

/// Subsets of the rays contained in some maximal cone.
fn is_face(fan: &Fan, m: u128) -> bool {
    fan.max_cones().iter().any(|c| mask(c) & m == m)
}

/// Minimal non-faces, found by scanning every subset of the rays.
pub fn brute_primitive_collections(fan: &Fan) -> BTreeSet<Vec<usize>> {
    let n = fan.num_rays();
    assert!(n <= 20, "exhaustive scan is limited to 20 rays");
    let mut out = BTreeSet::new();
    for m in 1u128..(1u128 << n) {
        if is_face(fan, m) {
            continue;
        }
        let minimal = (0..n).filter(|i| m >> i & 1 == 1).all(|i| is_face(fan, m & !(1u128 << i)));
        if minimal {
            out.insert((0..n).filter(|i| m >> i & 1 == 1).collect());
        }
    }
    out
}

pub fn det(m: &[Vec<i128>]) -> i128 {
    // Bareiss elimination, exact for integer input.
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a = m.to_vec();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Solves `sum_j x_j cols[j] = b` for square unimodular or general
/// invertible systems by Cramer's rule; returns numerators and the
/// common denominator.
fn cramer(cols: &[Vec<i128>], b: &[i128]) -> Option<(Vec<i128>, i128)> {
    let n = cols.len();
    let rows = |cs: &[Vec<i128>]| -> Vec<Vec<i128>> { (0..n).map(|r| cs.iter().map(|c| c[r]).collect()).collect() };
    let d = det(&rows(cols));
    if d == 0 {
        return None;
    }
    let xs = (0..n)
        .map(|j| {
            let mut cs = cols.to_vec();
            cs[j] = b.to_vec();
            det(&rows(&cs))
        })
        .collect();
    Some((xs, d))
}

/// Primitive relation of a collection: the sum expressed in the maximal
/// cone containing it, returned as `(focus, coefficients)`.
pub fn brute_relation(fan: &Fan, collection: &[usize]) -> (Vec<usize>, Vec<i128>) {
    let rays = rays_i128(fan);
    let n = fan.dim();
    let s: Vec<i128> = (0..n).map(|k| collection.iter().map(|&i| rays[i][k]).sum()).collect();
    for c in fan.max_cones() {
        let cols: Vec<Vec<i128>> = c.iter().map(|&i| rays[i].clone()).collect();
        let (xs, d) = cramer(&cols, &s).expect("maximal cones are full-dimensional");
        if xs.iter().all(|x| x * d.signum() >= 0) {
            let mut out: Vec<(usize, i128)> = c
                .iter()
                .zip(&xs)
                .filter(|(_, x)| **x != 0)
                .map(|(&i, x)| (i, x / d))
                .collect();
            out.sort();
            return out.into_iter().unzip();
        }
    }
    panic!("sum of collection lies in no maximal cone; fan is not complete");
}

fn rank(vs: &[Vec<i128>]) -> usize {
    // Fraction-free row reduction on a copy.
    let mut a = vs.to_vec();
    let cols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, p);
        for i in 0..a.len() {
            if i != r && a[i][c] != 0 {
                let (x, y) = (a[r][c], a[i][c]);
                for k in 0..cols {
                    a[i][k] = a[i][k] * x - a[r][k] * y;
                }
                let g = a[i].iter().fold(0i128, |g, &v| gcd(g, v.abs()));
                if g > 1 {
                    a[i].iter_mut().for_each(|v| *v /= g);
                }
            }
        }
        r += 1;
    }
    r
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Whether `c` is a nonnegative combination of `gens`, by Carathéodory:
/// try every linearly independent subset of size `rank(gens)`.
pub fn in_cone_caratheodory(c: &[i128], gens: &[Vec<i128>]) -> bool {
    if c.iter().all(|&x| x == 0) {
        return true;
    }
    let gens: Vec<Vec<i128>> = {
        let mut set: Vec<Vec<i128>> = gens.iter().filter(|g| g.iter().any(|&x| x != 0)).cloned().collect();
        set.sort();
        set.dedup();
        set
    };
    let r = rank(&gens);
    if r == 0 {
        return false;
    }
    let mut with_c = gens.clone();
    with_c.push(c.to_vec());
    if rank(&with_c) > r {
        return false;
    }
    let mut found = false;
    torfan::surgery::for_each_subset(gens.len(), r, &mut |sel| {
        if found {
            return;
        }
        let basis: Vec<Vec<i128>> = sel.iter().map(|&i| gens[i].clone()).collect();
        if let Some(x) = solve_in_basis(&basis, c) {
            found = x.iter().all(|(num, den)| num * den.signum() >= 0);
        }
    });
    found
}

/// Coordinates of `c` in an independent family `basis`, as fractions, using
/// `r` coordinate rows on which the family has full rank.
fn solve_in_basis(basis: &[Vec<i128>], c: &[i128]) -> Option<Vec<(i128, i128)>> {
    let r = basis.len();
    let len = c.len();
    // Greedily choose rows making the restricted matrix invertible.
    let mut chosen: Vec<usize> = Vec::new();
    for row in 0..len {
        let mut trial = chosen.clone();
        trial.push(row);
        let sub: Vec<Vec<i128>> = trial.iter().map(|&k| basis.iter().map(|b| b[k]).collect()).collect();
        if rank(&sub) == trial.len() {
            chosen = trial;
            if chosen.len() == r {
                break;
            }
        }
    }
    if chosen.len() < r {
        return None;
    }
    let cols: Vec<Vec<i128>> = basis.iter().map(|b| chosen.iter().map(|&k| b[k]).collect()).collect();
    let rhs: Vec<i128> = chosen.iter().map(|&k| c[k]).collect();
    let (xs, d) = cramer(&cols, &rhs)?;
    // The restricted solution must solve the full system.
    let ok = (0..len).all(|k| basis.iter().zip(&xs).map(|(b, x)| b[k] * x).sum::<i128>() == c[k] * d);
    ok.then(|| xs.into_iter().map(|x| (x, d)).collect())
}

/// Facet description of the cone generated by `gens` inside their span,
/// found by trying every `rank - 1` generators as a supporting hyperplane.
pub struct FacetOracle {
    /// Coordinates on which the span projects isomorphically.
    rows: Vec<usize>,
    rank: usize,
    span: Vec<Vec<i128>>,
    facets: Vec<Vec<i128>>,
    gens: Vec<Vec<i128>>,
}

impl FacetOracle {
    pub fn new(gens: &[Vec<i128>]) -> Self {
        let mut gens: Vec<Vec<i128>> = gens.iter().filter(|g| g.iter().any(|&x| x != 0)).cloned().collect();
        gens.sort();
        gens.dedup();
        let r = rank(&gens);
        let len = gens.first().map_or(0, |g| g.len());
        let mut rows: Vec<usize> = Vec::new();
        for k in 0..len {
            let mut trial = rows.clone();
            trial.push(k);
            let sub: Vec<Vec<i128>> = gens.iter().map(|g| trial.iter().map(|&j| g[j]).collect()).collect();
            if rank(&sub) == trial.len() {
                rows = trial;
            }
        }
        let proj: Vec<Vec<i128>> = gens.iter().map(|g| rows.iter().map(|&j| g[j]).collect()).collect();
        let mut facets: BTreeSet<Vec<i128>> = BTreeSet::new();
        if r >= 2 {
            torfan::surgery::for_each_subset(proj.len(), r - 1, &mut |sel| {
                let m: Vec<&Vec<i128>> = sel.iter().map(|&i| &proj[i]).collect();
                let mut n: Vec<i128> = (0..r)
                    .map(|j| {
                        let minor: Vec<Vec<i128>> = m
                            .iter()
                            .map(|v| v.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| *x).collect())
                            .collect();
                        if j % 2 == 0 { det(&minor) } else { -det(&minor) }
                    })
                    .collect();
                if n.iter().all(|&x| x == 0) {
                    return;
                }
                let g = n.iter().fold(0i128, |g, &x| gcd(g, x.abs()));
                n.iter_mut().for_each(|x| *x /= g);
                let dots: Vec<i128> = proj.iter().map(|p| dot(p, &n)).collect();
                if dots.iter().all(|&d| d >= 0) {
                    facets.insert(n);
                } else if dots.iter().all(|&d| d <= 0) {
                    facets.insert(n.iter().map(|x| -x).collect());
                }
            });
        }
        FacetOracle { rows, rank: r, span: gens.clone(), facets: facets.into_iter().collect(), gens: proj }
    }

    fn project(&self, c: &[i128]) -> Option<Vec<i128>> {
        let mut with_c = self.span.clone();
        with_c.push(c.to_vec());
        (rank(&with_c) == self.rank).then(|| self.rows.iter().map(|&j| c[j]).collect())
    }

    /// Extremality of `c` in the cone, assumed pointed: `c` lies in the
    /// cone and the facets through it cut out a line.
    pub fn extremal(&self, c: &[i128]) -> bool {
        if c.iter().all(|&x| x == 0) {
            return false;
        }
        let Some(p) = self.project(c) else { return false };
        if self.rank == 1 {
            return self.gens.iter().any(|g| g[0] * p[0] > 0);
        }
        if self.facets.iter().any(|n| dot(n, &p) < 0) {
            return false;
        }
        let active: Vec<Vec<i128>> = self.facets.iter().filter(|n| dot(n, &p) == 0).cloned().collect();
        rank(&active) == self.rank - 1
    }
}

fn dot(a: &[i128], b: &[i128]) -> i128 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn class_i128(c: &torfan::primitive::RelationClass) -> Vec<i128> {
    c.entries.iter().map(|x| x.to_i128().unwrap()).collect()
}
