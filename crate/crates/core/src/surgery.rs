//! Fan surgery: star subdivision, its inverse, and quotient (star) fans.

use std::collections::BTreeSet;

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::fan::{mask_of, Cone, Fan, LatticePoint};
use crate::linalg::{self, Int};

fn check_cone_indices(fan: &Fan, tau: &[usize]) -> Result<Cone> {
    let mut t = tau.to_vec();
    t.sort_unstable();
    t.dedup();
    if t.len() != tau.len() {
        return Err(Error::structural("cone", "repeated ray index"));
    }
    for &i in &t {
        fan.check_ray_index(i)?;
    }
    Ok(t)
}

/// Star subdivision at `tau`: adds the ray `v = sum(tau)` as the last ray and
/// replaces every maximal cone `c ⊇ tau` by the cones `c - t + v`, `t ∈ tau`.
pub fn star_subdivide(fan: &Fan, tau: &[usize]) -> Result<Fan> {
    let tau = check_cone_indices(fan, tau)?;
    if !fan.is_face(&tau) {
        return Err(Error::NotACone(tau));
    }
    if tau.len() < 2 {
        return Err(Error::Precondition(format!(
            "star subdivision needs a cone of dimension >= 2, got {tau:?}"
        )));
    }
    if !fan.is_smooth() {
        return Err(Error::NotSmooth);
    }
    let v = fan.sum_of(&tau);
    let vi = fan.num_rays();
    let mut rays = fan.rays().to_vec();
    rays.push(v);
    let tm = mask_of(&tau);
    let mut cones = Vec::with_capacity(fan.max_cones().len() + tau.len());
    for c in fan.max_cones() {
        if mask_of(c) & tm == tm {
            for &t in &tau {
                let mut nc: Cone = c.iter().copied().filter(|&i| i != t).collect();
                nc.push(vi);
                cones.push(nc);
            }
        } else {
            cones.push(c.clone());
        }
    }
    Fan::new(fan.dim(), rays, cones)
}

/// Candidate coarse fan obtained by removing ray `x` and merging its star
/// assuming the center `center` (indices in `fan`, not containing `x`).
fn coarsen(fan: &Fan, x: usize, center: &[usize]) -> Option<(Fan, Cone)> {
    let n = fan.dim();
    let cm = mask_of(center);
    let mut merged: BTreeSet<Cone> = BTreeSet::new();
    let mut cones = Vec::new();
    for c in fan.max_cones() {
        if c.contains(&x) {
            let m = (mask_of(c) & !(1u128 << x)) | cm;
            if m.count_ones() as usize != n {
                return None;
            }
            merged.insert(crate::fan::indices_of(m));
        } else {
            cones.push(c.clone());
        }
    }
    let reindex = |i: usize| if i > x { i - 1 } else { i };
    let mut all: Vec<Cone> = cones
        .into_iter()
        .chain(merged)
        .map(|c| c.into_iter().map(reindex).collect())
        .collect();
    all.sort();
    let rays: Vec<LatticePoint> = fan
        .rays()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != x)
        .map(|(_, r)| r.clone())
        .collect();
    let coarse = Fan::new(n, rays, all).ok()?;
    let center: Cone = center.iter().map(|&i| reindex(i)).collect();
    Some((coarse, center))
}

fn verify_coarse(fan: &Fan, coarse: &Fan, center: &[usize]) -> bool {
    coarse.validate().is_ok()
        && star_subdivide(coarse, center).is_ok_and(|f| &f == fan)
}

/// Inverse of [`star_subdivide`]: finds a center `tau` with `ray = sum(tau)`
/// such that subdividing the coarse fan at `tau` gives back `fan`.
///
/// Candidate centers are subsets of the neighbours of the ray, tried by size
/// and then lexicographically. The returned center uses the coarse fan's
/// indices (the ray is removed, later indices shift down by one).
pub fn blow_down(fan: &Fan, ray: usize) -> Result<(Fan, Cone)> {
    fan.check_ray_index(ray)?;
    fan.require_smooth_complete()?;
    let target = fan.ray(ray).clone();
    let nbrs = fan.neighbors(ray);
    let k = nbrs.len();
    if k <= 20 {
        for size in 2..=fan.dim().min(k) {
            let mut found = None;
            for_each_subset(k, size, &mut |sel| {
                if found.is_some() {
                    return;
                }
                let center: Vec<usize> = sel.iter().map(|&j| nbrs[j]).collect();
                if fan.sum_of(&center) != target {
                    return;
                }
                if let Some((coarse, c)) = coarsen(fan, ray, &center) {
                    if verify_coarse(fan, &coarse, &c) {
                        found = Some((coarse, c));
                    }
                }
            });
            if let Some(r) = found {
                return Ok(r);
            }
        }
    }
    Err(Error::NotBlowDownable(ray))
}

/// Blow-down of `ray` with a prescribed center (indices in `fan`).
pub fn blow_down_onto(fan: &Fan, ray: usize, center: &[usize]) -> Result<(Fan, Cone)> {
    fan.check_ray_index(ray)?;
    let center = check_cone_indices(fan, center)?;
    if center.contains(&ray) || center.len() < 2 || fan.sum_of(&center) != *fan.ray(ray) {
        return Err(Error::NotBlowDownable(ray));
    }
    match coarsen(fan, ray, &center) {
        Some((coarse, c)) if verify_coarse(fan, &coarse, &c) => Ok((coarse, c)),
        _ => Err(Error::NotBlowDownable(ray)),
    }
}

/// Calls `f` with every increasing `size`-subset of `0..k`, in lexicographic
/// order.
pub fn for_each_subset(k: usize, size: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(start: usize, k: usize, size: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == size {
            f(cur);
            return;
        }
        for i in start..k {
            if k - i < size - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, k, size, cur, f);
            cur.pop();
        }
    }
    if size <= k {
        rec(0, k, size, &mut Vec::with_capacity(size), f);
    }
}

/// Lattice projection killing the span of the given generators.
///
/// Returns the `(n-k) x n` integer matrix of `N -> N / span(gens)`. Fails if
/// the generators are dependent or do not span a saturated sublattice.
pub fn quotient_projection(gens: &[&[Int]], n: usize) -> Result<Vec<Vec<Int>>> {
    let k = gens.len();
    if linalg::rank(gens) != k {
        return Err(Error::Precondition("quotient generators are dependent".into()));
    }
    let (u, diag) = linalg::unimodular_reduction(gens, n);
    if diag.iter().any(|d| !d.abs().is_one()) {
        return Err(Error::Precondition(
            "quotient generators do not span a saturated sublattice".into(),
        ));
    }
    Ok(u[k..].to_vec())
}

/// Quotient fan of the star of the cone `eta`, in `N / span(eta)`.
///
/// Returns the fan and, for each of its rays, the index of the original
/// ray it is the image of.
pub fn star_quotient(fan: &Fan, eta: &[usize]) -> Result<(Fan, Vec<usize>)> {
    let eta = check_cone_indices(fan, eta)?;
    fan.require_smooth_complete()?;
    if !fan.is_face(&eta) {
        return Err(Error::NotACone(eta));
    }
    let n = fan.dim();
    if eta.len() >= n {
        return Err(Error::Precondition(format!(
            "quotient by a cone of dimension {} leaves a zero-dimensional lattice",
            eta.len()
        )));
    }
    let gens: Vec<&[Int]> = eta.iter().map(|&i| fan.ray(i).as_slice()).collect();
    let proj = quotient_projection(&gens, n)?;
    let em = mask_of(&eta);
    let star: Vec<&Cone> = fan
        .max_cones()
        .iter()
        .filter(|c| mask_of(c) & em == em)
        .collect();
    let mut star_rays: BTreeSet<usize> = BTreeSet::new();
    for c in &star {
        star_rays.extend(c.iter().copied().filter(|i| !eta.contains(i)));
    }
    let origin: Vec<usize> = star_rays.into_iter().collect();
    let mut new_index = vec![usize::MAX; fan.num_rays()];
    for (k, &i) in origin.iter().enumerate() {
        new_index[i] = k;
    }
    let rays: Vec<LatticePoint> = origin
        .iter()
        .map(|&i| linalg::int_mat_vec(&proj, fan.ray(i)))
        .collect();
    let cones: Vec<Cone> = star
        .iter()
        .map(|c| {
            c.iter()
                .filter(|i| !eta.contains(i))
                .map(|&i| new_index[i])
                .collect()
        })
        .collect();
    Ok((Fan::new(n - eta.len(), rays, cones)?, origin))
}

/// Fan of the invariant divisor of `ray`.
pub fn divisor_fan(fan: &Fan, ray: usize) -> Result<Fan> {
    fan.check_ray_index(ray)?;
    Ok(star_quotient(fan, &[ray])?.0)
}

/// Picard number of the orbit closure of `eta` (0 for a point).
pub fn orbit_closure_picard(fan: &Fan, eta: &[usize]) -> Result<usize> {
    if eta.len() == fan.dim() {
        if !fan.is_face(eta) {
            return Err(Error::NotACone(eta.to_vec()));
        }
        return Ok(0);
    }
    if eta.is_empty() {
        return Ok(fan.picard_number());
    }
    Ok(star_quotient(fan, eta)?.0.picard_number())
}
