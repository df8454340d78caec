//! Lattice isomorphism of fans: a unimodular matrix carrying rays to rays
//! and maximal cones to maximal cones.

use std::collections::{BTreeSet, HashMap};

use num_traits::Signed;

use crate::fan::{mask_of, Fan, LatticePoint};
use crate::linalg::{self, Int, Rat};

/// Number of maximal cones through each ray.
fn ray_degrees(fan: &Fan) -> Vec<usize> {
    let mut d = vec![0; fan.num_rays()];
    for c in fan.max_cones() {
        for &i in c {
            d[i] += 1;
        }
    }
    d
}

/// Per-ray invariant: degree plus the sorted degrees of its neighbours.
fn ray_signatures(fan: &Fan) -> Vec<(usize, Vec<usize>)> {
    let deg = ray_degrees(fan);
    (0..fan.num_rays())
        .map(|i| {
            let mut nb: Vec<usize> = fan.neighbors(i).iter().map(|&j| deg[j]).collect();
            nb.sort_unstable();
            (deg[i], nb)
        })
        .collect()
}

fn sorted<T: Ord + Clone>(v: &[T]) -> Vec<T> {
    let mut v = v.to_vec();
    v.sort();
    v
}

/// Finds `M` in `GL_n(Z)` with `M · rays(a) = rays(b)` as sets and the
/// induced bijection carrying cones to cones. Returns the matrix (rows).
///
/// One maximal cone of `a` is fixed; every maximal cone of `b` and every
/// ordering of its rays compatible with the ray signatures determines a
/// candidate matrix, which is then checked exactly.
pub fn lattice_isomorphic(a: &Fan, b: &Fan) -> Option<Vec<Vec<Int>>> {
    let n = a.dim();
    if n != b.dim() || a.num_rays() != b.num_rays() || a.max_cones().len() != b.max_cones().len() {
        return None;
    }
    let sa = ray_signatures(a);
    let sb = ray_signatures(b);
    if sorted(&sa) != sorted(&sb) {
        return None;
    }
    let a0 = &a.max_cones()[0];
    let cols: Vec<&[Int]> = a0.iter().map(|&i| a.ray(i).as_slice()).collect();
    let inv = linalg::inverse_of_columns(&cols)?;
    let b_index: HashMap<&LatticePoint, usize> = b.rays().iter().enumerate().map(|(i, r)| (r, i)).collect();
    let b_cones: BTreeSet<u128> = b.max_cones().iter().map(|c| mask_of(c)).collect();
    for cb in b.max_cones() {
        let mut found = None;
        permute(cb, &mut |img: &[usize]| {
            if found.is_some() {
                return;
            }
            if a0.iter().zip(img).any(|(&i, &j)| sa[i] != sb[j]) {
                return;
            }
            // M = B · A^{-1}, with A, B the column matrices of the two cones.
            let m = match candidate_matrix(b, img, &inv, n) {
                Some(m) => m,
                None => return,
            };
            let mut map = Vec::with_capacity(a.num_rays());
            for r in a.rays() {
                match b_index.get(&linalg::int_mat_vec(&m, r)) {
                    Some(&j) => map.push(j),
                    None => return,
                }
            }
            let ok = a
                .max_cones()
                .iter()
                .all(|c| b_cones.contains(&c.iter().fold(0u128, |acc, &i| acc | (1u128 << map[i]))));
            if ok {
                found = Some(m);
            }
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

fn candidate_matrix(b: &Fan, img: &[usize], inv: &[Vec<Rat>], n: usize) -> Option<Vec<Vec<Int>>> {
    let mut m = vec![vec![Int::from(0); n]; n];
    for (r, row) in m.iter_mut().enumerate() {
        for (c, entry) in row.iter_mut().enumerate() {
            let mut s = Rat::from_integer(Int::from(0));
            for (k, &j) in img.iter().enumerate() {
                s += Rat::from_integer(b.ray(j)[r].clone()) * &inv[k][c];
            }
            if !s.is_integer() {
                return None;
            }
            *entry = s.to_integer();
        }
    }
    if !linalg::det(&m).abs().eq(&Int::from(1)) {
        return None;
    }
    Some(m)
}

fn permute(items: &[usize], f: &mut dyn FnMut(&[usize])) {
    fn rec(cur: &mut Vec<usize>, rest: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if rest.is_empty() {
            f(cur);
            return;
        }
        for k in 0..rest.len() {
            let x = rest.remove(k);
            cur.push(x);
            rec(cur, rest, f);
            cur.pop();
            rest.insert(k, x);
        }
    }
    rec(&mut Vec::with_capacity(items.len()), &mut items.to_vec(), f);
}
