//! Brute-force enumeration of smooth Fano fans in small dimension, up to
//! lattice isomorphism.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_integer::Integer;
use rayon::prelude::*;

use crate::catalog::{self, CatalogEntry, Expected};
use crate::error::{Error, Result};
use crate::fan::{Fan, LatticePoint};
use crate::iso;
use crate::linalg::Int;
use crate::primitive;

/// Default coordinate bound per dimension. Dimension 2: every del Pezzo fan
/// fits in `[-1, 1]^2`, and the result is stable from 3 to 4. Dimension 3:
/// the search fixes one maximal cone to the standard basis, which puts all
/// rays of the known examples in `[-2, 2]^3`; stability from 2 to 3 is
/// checked by the test suite.
pub fn default_bound(dim: usize) -> Option<i64> {
    match dim {
        2 => Some(3),
        3 => Some(2),
        _ => None,
    }
}

pub fn enumerate_smooth_fano(dim: usize) -> Result<Vec<CatalogEntry>> {
    let b = default_bound(dim)
        .ok_or_else(|| Error::Precondition(format!("enumeration is supported in dimensions 2 and 3, got {dim}")))?;
    enumerate_with_bound(dim, b)
}

pub fn enumerate_with_bound(dim: usize, bound: i64) -> Result<Vec<CatalogEntry>> {
    let fans = match dim {
        2 => surfaces(bound)?,
        3 => ridge_extension(3, bound)?,
        _ => {
            return Err(Error::Precondition(format!(
                "enumeration is supported in dimensions 2 and 3, got {dim}"
            )))
        }
    };
    let checked: Vec<Option<Fan>> = fans
        .into_par_iter()
        .map(|f| Ok((f.validate().is_ok() && primitive::is_fano(&f)?).then_some(f)))
        .collect::<Result<_>>()?;
    let mut reps: Vec<Fan> = Vec::new();
    for f in checked.into_iter().flatten() {
        if !reps.iter().any(|r| iso::lattice_isomorphic(r, &f).is_some()) {
            reps.push(f);
        }
    }
    reps.sort_by_key(|f| (f.num_rays(), f.max_cones().len()));
    let named = known_names(dim);
    let mut out = Vec::with_capacity(reps.len());
    let mut unnamed = 0;
    for f in reps {
        let name = match named.iter().find(|(_, g)| iso::lattice_isomorphic(g, &f).is_some()) {
            Some((n, _)) => n.clone(),
            None => {
                unnamed += 1;
                format!("fano{dim}-{unnamed}")
            }
        };
        out.push(CatalogEntry {
            name,
            expected: Expected {
                picard: f.picard_number(),
                fano: true,
                dim,
                notes: "enumerated".into(),
            },
            fan: f,
        });
    }
    Ok(out)
}

fn known_names(dim: usize) -> Vec<(String, Fan)> {
    let names: &[&str] = match dim {
        2 => &["P2", "P1xP1", "S1", "S2", "S3"],
        3 => &[
            "P3", "P1xP2", "PP(O+O+O(1))/P1", "P1xP1xP1", "S1xP1", "S2xP1", "S3xP1", "F", "case-2b",
        ],
        _ => &[],
    };
    names
        .iter()
        .filter_map(|n| catalog::catalog(n).ok().map(|e| (n.to_string(), e.fan)))
        .collect()
}

fn primitive_points(dim: usize, bound: i64) -> Vec<Vec<i64>> {
    let side = (2 * bound + 1) as usize;
    let total = side.pow(dim as u32);
    let mut out = Vec::new();
    for k in 0..total {
        let mut v = Vec::with_capacity(dim);
        let mut r = k;
        for _ in 0..dim {
            v.push((r % side) as i64 - bound);
            r /= side;
        }
        let g = v.iter().fold(0i64, |g, &x| g.gcd(&x));
        if g == 1 {
            out.push(v);
        }
    }
    out
}

fn to_point(v: &[i64]) -> LatticePoint {
    v.iter().map(|&x| Int::from(x)).collect()
}

fn det2(a: &[i64], b: &[i64]) -> i64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Counter-clockwise order starting from the positive x-axis.
fn angle_cmp(a: &[i64], b: &[i64]) -> Ordering {
    let half = |v: &[i64]| if v[1] > 0 || (v[1] == 0 && v[0] > 0) { 0 } else { 1 };
    half(a).cmp(&half(b)).then_with(|| 0.cmp(&det2(a, b)))
}

/// Complete smooth fans in the plane whose rays lie in the box, with the
/// necessary Fano condition `det(v_{i-1}, v_{i+1}) <= 1` used for pruning.
fn surfaces(bound: i64) -> Result<Vec<Fan>> {
    let mut pts = primitive_points(2, bound);
    pts.sort_by(|a, b| angle_cmp(a, b));
    let mut out = Vec::new();
    for s in 0..pts.len() {
        let mut seq = vec![s];
        extend_cycle(&pts, &mut seq, &mut out);
    }
    out.into_iter()
        .map(|seq: Vec<usize>| {
            let rays: Vec<LatticePoint> = seq.iter().map(|&i| to_point(&pts[i])).collect();
            let k = rays.len();
            let cones = (0..k).map(|i| vec![i, (i + 1) % k]).collect();
            Fan::new(2, rays, cones)
        })
        .collect()
}

fn extend_cycle(pts: &[Vec<i64>], seq: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let last = *seq.last().unwrap();
    let first = seq[0];
    if seq.len() >= 3 && det2(&pts[last], &pts[first]) == 1 {
        let k = seq.len();
        let ok_last = det2(&pts[seq[k - 2]], &pts[first]) <= 1;
        let ok_first = det2(&pts[last], &pts[seq[1]]) <= 1;
        if ok_last && ok_first {
            out.push(seq.clone());
        }
    }
    if seq.len() >= 12 {
        return;
    }
    for next in last + 1..pts.len() {
        if det2(&pts[last], &pts[next]) != 1 {
            continue;
        }
        if seq.len() >= 2 && det2(&pts[seq[seq.len() - 2]], &pts[next]) > 1 {
            continue;
        }
        seq.push(next);
        extend_cycle(pts, seq, out);
        seq.pop();
    }
}

/// Integer determinant of small matrices given by rows.
fn det_i(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    match n {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| *x).collect())
                    .collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[0][j] * det_i(&minor)
            })
            .sum(),
    }
}

/// Functional `u` with `<u, v> = 1` on the rays of a unimodular cone.
fn facet_functional(vs: &[&Vec<i64>]) -> Vec<i64> {
    // Solve A^T u = 1 by Cramer's rule; det A = ±1.
    let n = vs.len();
    let d = det_i(&vs.iter().map(|v| v.to_vec()).collect::<Vec<_>>());
    (0..n)
        .map(|j| {
            let m: Vec<Vec<i64>> = vs
                .iter()
                .map(|v| {
                    let mut r = v.to_vec();
                    r[j] = 1;
                    r
                })
                .collect();
            det_i(&m) / d
        })
        .collect()
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Search<'a> {
    pool: &'a [Vec<i64>],
    rays: Vec<Vec<i64>>,
    cones: Vec<Vec<usize>>,
    functionals: Vec<Vec<i64>>,
    found: Vec<(Vec<Vec<i64>>, Vec<Vec<usize>>)>,
    seen: BTreeSet<BTreeSet<Vec<i64>>>,
}

impl Search<'_> {
    fn open_ridge(&self) -> Option<(Vec<usize>, usize)> {
        let mut count: std::collections::BTreeMap<Vec<usize>, (usize, usize)> = Default::default();
        for (k, c) in self.cones.iter().enumerate() {
            for skip in 0..c.len() {
                let r: Vec<usize> = c.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, x)| *x).collect();
                let e = count.entry(r).or_insert((0, k));
                e.0 += 1;
            }
        }
        count.into_iter().find(|(_, (n, _))| *n == 1).map(|(r, (_, k))| (r, k))
    }

    fn run(&mut self) {
        let Some((ridge, k)) = self.open_ridge() else {
            let key: BTreeSet<Vec<i64>> = self.rays.iter().cloned().collect();
            if self.seen.insert(key) {
                self.found.push((self.rays.clone(), self.cones.clone()));
            }
            return;
        };
        let opposite = *self.cones[k].iter().find(|i| !ridge.contains(i)).unwrap();
        let ridge_rows: Vec<Vec<i64>> = ridge.iter().map(|&i| self.rays[i].clone()).collect();
        let side = |v: &[i64]| -> i64 {
            let mut m = ridge_rows.clone();
            m.push(v.to_vec());
            det_i(&m)
        };
        let s0 = side(&self.rays[opposite]);
        let candidates: Vec<Vec<i64>> = self.pool.to_vec();
        for v in candidates {
            if side(&v) != -s0 {
                continue;
            }
            let existing = self.rays.iter().position(|r| *r == v);
            if existing.is_none() && self.functionals.iter().any(|u| dot(u, &v) > 0) {
                continue;
            }
            let mut vs: Vec<&Vec<i64>> = ridge_rows.iter().collect();
            vs.push(&v);
            let u = facet_functional(&vs);
            let vi = existing.unwrap_or(self.rays.len());
            let mut cone: Vec<usize> = ridge.clone();
            cone.push(vi);
            cone.sort_unstable();
            if self.cones.contains(&cone) {
                continue;
            }
            let ok = self
                .rays
                .iter()
                .enumerate()
                .all(|(i, r)| cone.contains(&i) || dot(&u, r) <= 0);
            if !ok {
                continue;
            }
            if existing.is_none() {
                self.rays.push(v.clone());
            }
            self.cones.push(cone);
            self.functionals.push(u);
            self.run();
            self.functionals.pop();
            self.cones.pop();
            if existing.is_none() {
                self.rays.pop();
            }
        }
    }
}

/// Smooth Fano fans found by growing face fans of smooth Fano polytopes
/// from the standard cone, one ridge at a time. Every other ray must lie
/// strictly below each facet hyperplane `<u, v> = 1`.
fn ridge_extension(dim: usize, bound: i64) -> Result<Vec<Fan>> {
    let pool = primitive_points(dim, bound);
    let basis: Vec<Vec<i64>> = (0..dim)
        .map(|i| (0..dim).map(|j| (i == j) as i64).collect())
        .collect();
    let mut s = Search {
        pool: &pool,
        rays: basis.clone(),
        cones: vec![(0..dim).collect()],
        functionals: vec![vec![1; dim]],
        found: Vec::new(),
        seen: BTreeSet::new(),
    };
    s.run();
    s.found
        .into_iter()
        .map(|(rays, cones)| Fan::new(dim, rays.iter().map(|r| to_point(r)).collect(), cones))
        .collect()
}
