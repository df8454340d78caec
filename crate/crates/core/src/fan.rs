//! Lattice fans: representation, validation and point location.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, Int, Rat};
use crate::lp::{LpProblem, Relation, VarKind};

/// Ray index set as a bitmask; fans are limited to [`MAX_RAYS`] rays.
pub type RaySet = u128;

pub const MAX_RAYS: usize = 128;

/// A lattice point; ray generators are primitive.
pub type LatticePoint = Vec<Int>;

/// Sorted, duplicate-free list of ray indices. The zero cone is empty.
pub type Cone = Vec<usize>;

pub fn mask_of(indices: &[usize]) -> RaySet {
    indices.iter().fold(0, |m, &i| m | (1u128 << i))
}

pub fn indices_of(mut mask: RaySet) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        let i = mask.trailing_zeros() as usize;
        out.push(i);
        mask &= mask - 1;
    }
    out
}

pub fn point(xs: &[i64]) -> LatticePoint {
    xs.iter().map(|&x| linalg::int(x)).collect()
}

pub fn format_point(p: &[Int]) -> String {
    let parts: Vec<String> = p.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub smooth: bool,
    pub complete: bool,
    pub defects: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.smooth && self.complete
    }
}

/// Codimension-one cone shared by two maximal cones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wall {
    /// Rays of the wall itself.
    pub rays: Cone,
    /// Indices of the two maximal cones.
    pub cones: (usize, usize),
    /// Ray of the first cone opposite the wall.
    pub a: usize,
    /// Ray of the second cone opposite the wall.
    pub b: usize,
    /// Coefficients aligned with `rays` in `a + b = sum(coeffs * rays)`.
    pub coeffs: Vec<Int>,
}

#[derive(Debug, Default, Clone)]
struct Cache {
    faces: OnceLock<HashSet<RaySet>>,
    validation: OnceLock<ValidationReport>,
    inverses: OnceLock<Vec<Option<Vec<Vec<Rat>>>>>,
    projective: OnceLock<bool>,
    primitive: OnceLock<Vec<Vec<usize>>>,
}

/// A simplicial fan: rays plus full-dimensional maximal cones.
///
/// Derived data (face table, validation, projectivity, primitive
/// collections) is computed lazily and cached; fans are immutable.
#[derive(Clone)]
pub struct Fan {
    dim: usize,
    rays: Vec<LatticePoint>,
    max_cones: Vec<Cone>,
    cache: Cache,
}

impl fmt::Debug for Fan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rays: Vec<String> = self.rays.iter().map(|r| format_point(r)).collect();
        f.debug_struct("Fan")
            .field("dim", &self.dim)
            .field("rays", &rays)
            .field("max_cones", &self.max_cones)
            .finish()
    }
}

/// Structural equality: same ray set and same cones, regardless of ray order.
impl PartialEq for Fan {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.rays.len() == other.rays.len()
            && self.max_cones.len() == other.max_cones.len()
            && self.canonical() == other.canonical()
    }
}

impl Eq for Fan {}

impl Fan {
    /// Builds a fan after structural checks: ray lengths, nonzero and
    /// primitive rays, distinct rays, cone indices in range, cones of size
    /// `dim`, every ray used by some cone.
    pub fn new(dim: usize, rays: Vec<LatticePoint>, max_cones: Vec<Vec<usize>>) -> Result<Fan> {
        if dim == 0 {
            return Err(Error::structural("dim", "dimension must be positive"));
        }
        if rays.len() > MAX_RAYS {
            return Err(Error::structural(
                "rays",
                format!("at most {MAX_RAYS} rays are supported, got {}", rays.len()),
            ));
        }
        let mut seen = HashMap::new();
        for (i, r) in rays.iter().enumerate() {
            if r.len() != dim {
                return Err(Error::structural(
                    format!("rays[{i}]"),
                    format!("expected {dim} coordinates, got {}", r.len()),
                ));
            }
            if r.iter().all(|x| x.is_zero()) {
                return Err(Error::structural(format!("rays[{i}]"), "zero ray"));
            }
            if !linalg::content(r).is_one() {
                return Err(Error::NonPrimitiveRay {
                    index: i,
                    coords: format_point(r),
                });
            }
            if let Some(j) = seen.insert(r.clone(), i) {
                return Err(Error::structural(
                    format!("rays[{i}]"),
                    format!("duplicate of rays[{j}]"),
                ));
            }
        }
        let mut cones = Vec::with_capacity(max_cones.len());
        let mut used = vec![false; rays.len()];
        let mut cone_seen = HashSet::new();
        for (k, c) in max_cones.into_iter().enumerate() {
            let mut c = c;
            c.sort_unstable();
            if c.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::structural(format!("max_cones[{k}]"), "repeated ray index"));
            }
            if let Some(&bad) = c.iter().find(|&&i| i >= rays.len()) {
                return Err(Error::structural(
                    format!("max_cones[{k}]"),
                    format!("ray index {bad} out of range"),
                ));
            }
            if c.len() != dim {
                return Err(Error::structural(
                    format!("max_cones[{k}]"),
                    format!("expected {dim} rays, got {}", c.len()),
                ));
            }
            if !cone_seen.insert(c.clone()) {
                return Err(Error::structural(format!("max_cones[{k}]"), "duplicate cone"));
            }
            for &i in &c {
                used[i] = true;
            }
            cones.push(c);
        }
        if cones.is_empty() {
            return Err(Error::structural("max_cones", "no maximal cones"));
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(Error::structural(format!("rays[{i}]"), "ray not used by any cone"));
        }
        Ok(Fan {
            dim,
            rays,
            max_cones: cones,
            cache: Cache::default(),
        })
    }

    /// Convenience constructor from small integers.
    pub fn from_i64(dim: usize, rays: &[&[i64]], max_cones: &[&[usize]]) -> Result<Fan> {
        Fan::new(
            dim,
            rays.iter().map(|r| point(r)).collect(),
            max_cones.iter().map(|c| c.to_vec()).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[LatticePoint] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &LatticePoint {
        &self.rays[i]
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn max_cones(&self) -> &[Cone] {
        &self.max_cones
    }

    pub fn ray_index(&self, p: &[Int]) -> Option<usize> {
        self.rays.iter().position(|r| r.as_slice() == p)
    }

    pub fn check_ray_index(&self, i: usize) -> Result<()> {
        if i < self.rays.len() {
            Ok(())
        } else {
            Err(Error::structural(
                "ray",
                format!("ray index {i} out of range (fan has {} rays)", self.rays.len()),
            ))
        }
    }

    /// Rays sorted lexicographically and cones re-indexed and sorted.
    pub fn canonical(&self) -> (Vec<LatticePoint>, Vec<Cone>) {
        let mut order: Vec<usize> = (0..self.rays.len()).collect();
        order.sort_by(|&a, &b| self.rays[a].cmp(&self.rays[b]));
        let mut new_index = vec![0; self.rays.len()];
        for (k, &i) in order.iter().enumerate() {
            new_index[i] = k;
        }
        let rays = order.iter().map(|&i| self.rays[i].clone()).collect();
        let mut cones: Vec<Cone> = self
            .max_cones
            .iter()
            .map(|c| {
                let mut c: Cone = c.iter().map(|&i| new_index[i]).collect();
                c.sort_unstable();
                c
            })
            .collect();
        cones.sort();
        (rays, cones)
    }

    pub fn faces(&self) -> &HashSet<RaySet> {
        self.cache.faces.get_or_init(|| {
            let mut set = HashSet::new();
            for c in &self.max_cones {
                let m = mask_of(c);
                // Enumerate all submasks of m.
                let mut s = m;
                loop {
                    set.insert(s);
                    if s == 0 {
                        break;
                    }
                    s = (s - 1) & m;
                }
            }
            set
        })
    }

    pub fn is_face_mask(&self, m: RaySet) -> bool {
        self.faces().contains(&m)
    }

    /// True if the given rays span a cone of the fan (the empty set does).
    pub fn is_face(&self, indices: &[usize]) -> bool {
        indices.iter().all(|&i| i < self.rays.len()) && self.is_face_mask(mask_of(indices))
    }

    /// Maximal cones containing every index in `indices`.
    pub fn cones_containing(&self, indices: &[usize]) -> Vec<usize> {
        let m = mask_of(indices);
        (0..self.max_cones.len())
            .filter(|&k| mask_of(&self.max_cones[k]) & m == m)
            .collect()
    }

    /// Rays `y != x` with `<x, y>` a cone.
    pub fn neighbors(&self, x: usize) -> Vec<usize> {
        let mut m: RaySet = 0;
        for c in &self.max_cones {
            if c.contains(&x) {
                m |= mask_of(c);
            }
        }
        m &= !(1u128 << x);
        indices_of(m)
    }

    pub fn sum_of(&self, indices: &[usize]) -> LatticePoint {
        let mut s = vec![Int::zero(); self.dim];
        for &i in indices {
            for (a, b) in s.iter_mut().zip(&self.rays[i]) {
                *a += b;
            }
        }
        s
    }

    fn cone_det(&self, c: &[usize]) -> Int {
        let vs: Vec<&[Int]> = c.iter().map(|&i| self.rays[i].as_slice()).collect();
        linalg::det_of(&vs)
    }

    pub fn validate(&self) -> &ValidationReport {
        self.cache.validation.get_or_init(|| self.compute_validation())
    }

    pub fn is_smooth(&self) -> bool {
        self.validate().smooth
    }

    pub fn is_complete(&self) -> bool {
        self.validate().complete
    }

    /// Errors unless the fan is smooth and complete.
    pub fn require_smooth_complete(&self) -> Result<()> {
        let r = self.validate();
        if !r.complete {
            Err(Error::NotComplete)
        } else if !r.smooth {
            Err(Error::NotSmooth)
        } else {
            Ok(())
        }
    }

    fn compute_validation(&self) -> ValidationReport {
        let mut defects = Vec::new();
        let dets: Vec<Int> = self.max_cones.iter().map(|c| self.cone_det(c)).collect();
        let mut smooth = true;
        let mut degenerate = false;
        for (c, d) in self.max_cones.iter().zip(&dets) {
            if d.abs() != Int::one() {
                smooth = false;
                defects.push(format!("cone {c:?} has determinant {d}"));
            }
            if d.is_zero() {
                degenerate = true;
            }
        }
        if degenerate {
            return ValidationReport {
                smooth,
                complete: false,
                defects,
            };
        }
        let complete = self.check_complete(&dets, &mut defects);
        if !complete {
            self.check_fan_condition(&mut defects);
        }
        ValidationReport {
            smooth,
            complete,
            defects,
        }
    }

    /// Pseudo-manifold test plus a degree count at a generic point.
    ///
    /// If every facet lies in exactly two maximal cones that sit on opposite
    /// sides of it and the facet graph is connected, the cones cover space
    /// with a constant multiplicity; multiplicity one at a single generic
    /// point then proves the cones form a complete fan.
    fn check_complete(&self, dets: &[Int], defects: &mut Vec<String>) -> bool {
        let n = self.dim;
        let mut walls: HashMap<RaySet, Vec<(usize, usize)>> = HashMap::new();
        for (k, c) in self.max_cones.iter().enumerate() {
            for (pos, &i) in c.iter().enumerate() {
                let m = mask_of(c) & !(1u128 << i);
                walls.entry(m).or_default().push((k, pos));
            }
        }
        let mut ok = true;
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.max_cones.len()];
        let mut walls_sorted: Vec<_> = walls.iter().collect();
        walls_sorted.sort_by_key(|(m, _)| indices_of(**m));
        for (m, owners) in walls_sorted {
            if owners.len() != 2 {
                ok = false;
                defects.push(format!(
                    "facet {:?} lies in {} maximal cones",
                    indices_of(*m),
                    owners.len()
                ));
                continue;
            }
            let (k1, p1) = owners[0];
            let (k2, p2) = owners[1];
            // Replace the opposite vertex in place and compare orientations.
            let c1 = &self.max_cones[k1];
            let c2 = &self.max_cones[k2];
            let a = c1[p1];
            let b = c2[p2];
            let mut rows: Vec<&[Int]> = c1.iter().map(|&i| self.rays[i].as_slice()).collect();
            rows[p1] = self.rays[b].as_slice();
            let d_swapped = linalg::det_of(&rows);
            if d_swapped.signum() == dets[k1].signum() || d_swapped.is_zero() {
                ok = false;
                defects.push(format!(
                    "cones {c1:?} and {c2:?} lie on the same side of their common facet {:?} (rays {a}, {b})",
                    indices_of(*m)
                ));
            }
            adj[k1].push(k2);
            adj[k2].push(k1);
        }
        let mut seen = vec![false; self.max_cones.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(k) = stack.pop() {
            for &j in &adj[k] {
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            ok = false;
            defects.push("facet graph is disconnected".to_string());
        }
        if !ok {
            return false;
        }
        let inverses = self.inverses();
        for base in 2i64.. {
            let p: Vec<Int> = (0..n)
                .map(|i| {
                    let mut v = Int::from(base + 7);
                    v = num_traits::pow(v, i) * if i % 2 == 0 { 1 } else { -1 };
                    v + Int::from(i as i64)
                })
                .collect();
            let mut generic = true;
            let mut count = 0;
            for inv in inverses.iter().flatten() {
                let coeffs = linalg::mat_vec(inv, &p);
                if coeffs.iter().any(|c| c.is_zero()) {
                    generic = false;
                    break;
                }
                if coeffs.iter().all(|c| c.is_positive()) {
                    count += 1;
                }
            }
            if generic {
                if count != 1 {
                    defects.push(format!(
                        "generic point {} is covered {count} times",
                        format_point(&p)
                    ));
                    return false;
                }
                return true;
            }
        }
        unreachable!()
    }

    /// Pairwise separation: for every two maximal cones there is a linear
    /// form vanishing on their common rays, positive on the rest of the
    /// first and negative on the rest of the second.
    fn check_fan_condition(&self, defects: &mut Vec<String>) {
        let n = self.dim;
        for a in 0..self.max_cones.len() {
            for b in a + 1..self.max_cones.len() {
                let ca = &self.max_cones[a];
                let cb = &self.max_cones[b];
                let mut lp = LpProblem::new();
                let u: Vec<usize> = (0..n).map(|i| lp.add_var(format!("u{i}"), VarKind::Free)).collect();
                let row = |r: &LatticePoint| -> Vec<(usize, Rat)> {
                    u.iter().zip(r).map(|(&v, x)| (v, linalg::to_rat(x))).collect()
                };
                for &i in ca {
                    if cb.contains(&i) {
                        lp.add_constraint(row(&self.rays[i]), Relation::Eq, Rat::zero());
                    } else {
                        lp.add_constraint(row(&self.rays[i]), Relation::Ge, Rat::one());
                    }
                }
                for &i in cb {
                    if !ca.contains(&i) {
                        lp.add_constraint(row(&self.rays[i]), Relation::Le, -Rat::one());
                    }
                }
                if !lp.solve().is_feasible() {
                    defects.push(format!("cones {ca:?} and {cb:?} overlap improperly"));
                }
            }
        }
    }

    /// Inverse generator matrices of the maximal cones (`None` if singular).
    fn inverses(&self) -> &Vec<Option<Vec<Vec<Rat>>>> {
        self.cache.inverses.get_or_init(|| {
            self.max_cones
                .iter()
                .map(|c| {
                    let cols: Vec<&[Int]> = c.iter().map(|&i| self.rays[i].as_slice()).collect();
                    linalg::inverse_of_columns(&cols)
                })
                .collect()
        })
    }

    /// Walls of a smooth complete fan: pairs of maximal cones sharing a
    /// facet, with the wall relation `a + b = sum(coeffs[w] * w)` where `a`
    /// and `b` are the two opposite rays.
    pub fn walls(&self) -> Result<Vec<Wall>> {
        self.require_smooth_complete()?;
        let mut owners: HashMap<RaySet, Vec<(usize, usize)>> = HashMap::new();
        for (k, c) in self.max_cones.iter().enumerate() {
            for &i in c {
                owners
                    .entry(mask_of(c) & !(1u128 << i))
                    .or_default()
                    .push((k, i));
            }
        }
        let mut out = Vec::with_capacity(owners.len());
        for (m, o) in owners {
            let (k1, a) = o[0];
            let (k2, b) = o[1];
            let (k1, a, k2, b) = if k1 < k2 { (k1, a, k2, b) } else { (k2, b, k1, a) };
            let rays = indices_of(m);
            let mut target = self.rays[a].clone();
            for (t, y) in target.iter_mut().zip(&self.rays[b]) {
                *t += y;
            }
            let cols: Vec<&[Int]> = rays.iter().map(|&i| self.rays[i].as_slice()).collect();
            let coeffs = linalg::solve(&cols, &target)
                .ok_or_else(|| Error::Internal(format!("wall {rays:?} has no relation")))?;
            let coeffs = coeffs.into_iter().map(|c| c.to_integer()).collect();
            out.push(Wall {
                rays,
                cones: (k1, k2),
                a,
                b,
                coeffs,
            });
        }
        out.sort_by(|x, y| x.cones.cmp(&y.cones));
        Ok(out)
    }

    /// The unique cone whose relative interior contains `p`, with the
    /// strictly positive coefficients of `p` in its generators.
    pub fn locate(&self, p: &[Int]) -> Result<(Cone, Vec<Rat>)> {
        if p.len() != self.dim {
            return Err(Error::structural(
                "point",
                format!("expected {} coordinates, got {}", self.dim, p.len()),
            ));
        }
        if !self.is_complete() {
            return Err(Error::NotComplete);
        }
        if p.iter().all(|x| x.is_zero()) {
            return Ok((Vec::new(), Vec::new()));
        }
        for (c, inv) in self.max_cones.iter().zip(self.inverses()) {
            let Some(inv) = inv else { continue };
            let coeffs = linalg::mat_vec(inv, p);
            if coeffs.iter().all(|x| !x.is_negative()) {
                let mut cone = Vec::new();
                let mut cs = Vec::new();
                for (i, x) in c.iter().zip(coeffs) {
                    if x.is_positive() {
                        cone.push(*i);
                        cs.push(x);
                    }
                }
                return Ok((cone, cs));
            }
        }
        Err(Error::Internal(format!(
            "point {} not covered by a complete fan",
            format_point(p)
        )))
    }

    /// Number of cones of each dimension 1..=n.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut f = vec![0; self.dim];
        for &m in self.faces() {
            let k = m.count_ones() as usize;
            if k > 0 {
                f[k - 1] += 1;
            }
        }
        f
    }

    pub(crate) fn cached_projective(&self, compute: impl FnOnce() -> bool) -> bool {
        *self.cache.projective.get_or_init(compute)
    }

    pub(crate) fn cached_primitive(&self, compute: impl FnOnce() -> Vec<Vec<usize>>) -> &Vec<Vec<usize>> {
        self.cache.primitive.get_or_init(compute)
    }

    /// Picard number of the toric variety: rays minus dimension.
    pub fn picard_number(&self) -> usize {
        self.rays.len() - self.dim
    }

    /// Product fan in the direct sum of the two lattices.
    pub fn product(&self, other: &Fan) -> Fan {
        let n = self.dim + other.dim;
        let mut rays = Vec::with_capacity(self.rays.len() + other.rays.len());
        for r in &self.rays {
            let mut v = r.clone();
            v.resize(n, Int::zero());
            rays.push(v);
        }
        for r in &other.rays {
            let mut v = vec![Int::zero(); self.dim];
            v.extend(r.iter().cloned());
            rays.push(v);
        }
        let off = self.rays.len();
        let mut cones = Vec::new();
        for a in &self.max_cones {
            for b in &other.max_cones {
                let mut c = a.clone();
                c.extend(b.iter().map(|&i| i + off));
                cones.push(c);
            }
        }
        Fan::new(n, rays, cones).expect("product of fans is well formed")
    }

    /// Same fan with rays re-listed in the order `perm` (new ray k is old ray
    /// `perm[k]`).
    pub fn permuted(&self, perm: &[usize]) -> Fan {
        let mut new_index = vec![0; perm.len()];
        for (k, &i) in perm.iter().enumerate() {
            new_index[i] = k;
        }
        let rays = perm.iter().map(|&i| self.rays[i].clone()).collect();
        let cones = self
            .max_cones
            .iter()
            .map(|c| c.iter().map(|&i| new_index[i]).collect())
            .collect();
        Fan::new(self.dim, rays, cones).expect("permutation of a valid fan")
    }

    /// Image of the fan under the linear map with the given integer matrix
    /// (rows act on column vectors). Errors if the result is malformed,
    /// e.g. when the matrix is not unimodular.
    pub fn transformed(&self, m: &[Vec<Int>]) -> Result<Fan> {
        let rays = self.rays.iter().map(|r| linalg::int_mat_vec(m, r)).collect();
        Fan::new(self.dim, rays, self.max_cones.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> Fan {
        Fan::from_i64(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[1, 2], &[0, 2]]).unwrap()
    }

    #[test]
    fn p2_is_smooth_complete() {
        let f = p2();
        let r = f.validate();
        assert!(r.smooth && r.complete, "{r:?}");
        assert_eq!(f.f_vector(), vec![3, 3]);
    }

    #[test]
    fn missing_cone_is_incomplete() {
        let f = Fan::from_i64(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[1, 2]]).unwrap();
        let r = f.validate();
        assert!(r.smooth);
        assert!(!r.complete);
        assert!(matches!(f.locate(&point(&[1, 1])), Err(Error::NotComplete)));
    }

    #[test]
    fn determinant_two_is_singular() {
        let f = Fan::from_i64(2, &[&[1, 0], &[1, 2], &[0, -1]], &[&[0, 1]]);
        // ray 2 unused -> structural
        assert!(f.is_err());
        let f = Fan::from_i64(2, &[&[1, 0], &[1, 2]], &[&[0, 1]]).unwrap();
        assert!(!f.validate().smooth);
    }

    #[test]
    fn overlapping_cones_flagged() {
        // Two cones covering the same quadrant twice.
        let f = Fan::from_i64(2, &[&[1, 0], &[0, 1], &[1, 1]], &[&[0, 1], &[0, 2]]).unwrap();
        let r = f.validate();
        assert!(!r.complete);
        assert!(r.defects.iter().any(|d| d.contains("overlap")), "{r:?}");
    }

    #[test]
    fn double_cover_is_not_complete() {
        // Five cones winding twice around the origin (a pentagram).
        let f = Fan::from_i64(
            2,
            &[&[1, 0], &[-4, 3], &[1, -3], &[1, 3], &[-4, -3]],
            &[&[0, 1], &[1, 2], &[2, 3], &[3, 4], &[0, 4]],
        )
        .unwrap();
        let r = f.validate();
        assert!(!r.complete);
        assert!(r.defects.iter().any(|d| d.contains("covered 2 times")), "{r:?}");
    }

    #[test]
    fn locate_examples() {
        let f = p2();
        let (c, k) = f.locate(&point(&[1, 1])).unwrap();
        assert_eq!(c, vec![0, 1]);
        assert_eq!(k, vec![linalg::rat(1), linalg::rat(1)]);
        let (c, k) = f.locate(&point(&[0, 0])).unwrap();
        assert!(c.is_empty() && k.is_empty());
        let s1 = Fan::from_i64(
            2,
            &[&[1, 0], &[0, 1], &[-1, -1], &[1, 1]],
            &[&[0, 3], &[1, 3], &[1, 2], &[0, 2]],
        )
        .unwrap();
        let (c, k) = s1.locate(&point(&[2, 1])).unwrap();
        assert_eq!(c, vec![0, 3]);
        assert_eq!(k, vec![linalg::rat(1), linalg::rat(1)]);
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(
            Fan::from_i64(2, &[&[2, 2], &[0, 1]], &[&[0, 1]]),
            Err(Error::NonPrimitiveRay { index: 0, .. })
        ));
        assert!(matches!(
            Fan::from_i64(2, &[&[0, 0], &[0, 1]], &[&[0, 1]]),
            Err(Error::Structural { .. })
        ));
        assert!(matches!(
            Fan::from_i64(2, &[&[1, 0], &[0, 1]], &[&[0, 5]]),
            Err(Error::Structural { .. })
        ));
    }

    #[test]
    fn equality_ignores_ray_order() {
        let f = p2();
        let g = f.permuted(&[2, 0, 1]);
        assert_eq!(f, g);
    }
}
