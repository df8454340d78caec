//! Equivariant birational morphisms given as fan refinements: refinement
//! maps, center partitions, exceptional sets, the classification of how a
//! maximal cone of a 4-dimensional target is subdivided, and blow-up
//! factorizations.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::catalog;
use crate::error::{Error, Result};
use crate::fan::{format_point, Cone, Fan, LatticePoint};
use crate::iso;
use crate::linalg::{self, Int, Rat};
use crate::primitive;
use crate::structure;
use crate::surgery;

/// `source` refines `target`: every target ray is a source ray and every
/// source cone lies in a target cone.
#[derive(Debug, Clone)]
pub struct RefinementMap {
    pub source: Fan,
    pub target: Fan,
    /// For each source ray, the minimal target cone containing it.
    pub ray_to_cone: Vec<Cone>,
    /// For each source maximal cone, a target maximal cone containing it.
    pub cone_to_cone: Vec<usize>,
    /// For each target ray, its index among the source rays.
    pub target_ray_in_source: Vec<usize>,
}

pub fn build_refinement(source: &Fan, target: &Fan) -> Result<RefinementMap> {
    source.require_smooth_complete()?;
    target.require_smooth_complete()?;
    if source.dim() != target.dim() {
        return Err(Error::Precondition(format!(
            "dimensions differ: {} vs {}",
            source.dim(),
            target.dim()
        )));
    }
    let mut target_ray_in_source = Vec::with_capacity(target.num_rays());
    for r in target.rays() {
        match source.ray_index(r) {
            Some(i) => target_ray_in_source.push(i),
            None => {
                return Err(Error::CheckFailed(format!(
                    "not a refinement: target ray {} is not a source ray",
                    format_point(r)
                )))
            }
        }
    }
    let mut ray_to_cone = Vec::with_capacity(source.num_rays());
    for r in source.rays() {
        ray_to_cone.push(target.locate(r)?.0);
    }
    let target_masks: Vec<u128> = target.max_cones().iter().map(|c| crate::fan::mask_of(c)).collect();
    let mut cone_to_cone = Vec::with_capacity(source.max_cones().len());
    for c in source.max_cones() {
        let need = c
            .iter()
            .fold(0u128, |m, &i| m | crate::fan::mask_of(&ray_to_cone[i]));
        match target_masks.iter().position(|&t| t & need == need) {
            Some(k) => cone_to_cone.push(k),
            None => {
                return Err(Error::CheckFailed(format!(
                    "not a refinement: source cone {c:?} straddles a wall of the target"
                )))
            }
        }
    }
    Ok(RefinementMap {
        source: source.clone(),
        target: target.clone(),
        ray_to_cone,
        cone_to_cone,
        target_ray_in_source,
    })
}

impl RefinementMap {
    /// Source rays that are not target rays.
    pub fn new_rays(&self) -> Vec<usize> {
        let old: BTreeSet<usize> = self.target_ray_in_source.iter().copied().collect();
        (0..self.source.num_rays()).filter(|i| !old.contains(i)).collect()
    }

    /// Source rays lying in the closed target cone `tau`.
    pub fn rays_in(&self, tau: &[usize]) -> Vec<usize> {
        let m = crate::fan::mask_of(tau);
        (0..self.source.num_rays())
            .filter(|&i| crate::fan::mask_of(&self.ray_to_cone[i]) & !m == 0)
            .collect()
    }
}

/// `sum(tau) = x_1 + ... + x_k` over a source cone, with each `x_i` the sum
/// of a block of the generators of `tau`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CenterPartition {
    /// Source cone whose relative interior contains `sum(tau)`.
    pub cone: Cone,
    /// For each ray of `cone`, the target rays (indices) summing to it.
    pub blocks: Vec<Vec<usize>>,
}

pub fn center_partition(map: &RefinementMap, tau: &[usize]) -> Result<CenterPartition> {
    let mut tau = tau.to_vec();
    tau.sort_unstable();
    if !map.target.is_face(&tau) {
        return Err(Error::NotACone(tau));
    }
    let s = map.target.sum_of(&tau);
    let (cone, coeffs) = map.source.locate(&s)?;
    if coeffs.iter().any(|c| !c.is_one()) {
        return Err(Error::CheckFailed(format!(
            "sum of {tau:?} has non-unit coefficients in source cone {cone:?}"
        )));
    }
    let gens: Vec<&[Int]> = tau.iter().map(|&i| map.target.ray(i).as_slice()).collect();
    let mut blocks = Vec::with_capacity(cone.len());
    let mut used = BTreeSet::new();
    for &x in &cone {
        let c = linalg::solve(&gens, map.source.ray(x)).ok_or_else(|| {
            Error::CheckFailed(format!("source ray {x} is not in the span of {tau:?}"))
        })?;
        let mut block = Vec::new();
        for (j, v) in c.iter().enumerate() {
            if v.is_one() {
                block.push(tau[j]);
            } else if !v.is_zero() {
                return Err(Error::CheckFailed(format!(
                    "source ray {x} is not a 0/1 combination of {tau:?}"
                )));
            }
        }
        for &b in &block {
            if !used.insert(b) {
                return Err(Error::CheckFailed(format!("blocks of {tau:?} overlap")));
            }
        }
        blocks.push(block);
    }
    if used.len() != tau.len() {
        return Err(Error::CheckFailed(format!("blocks do not cover {tau:?}")));
    }
    Ok(CenterPartition { cone, blocks })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExceptionalSets {
    pub eta: Cone,
    /// Source rays in the interior of the support of the star of `eta`.
    pub g_set: Vec<usize>,
    /// Source rays outside that support.
    pub h_set: Vec<usize>,
    pub boundary_set: Vec<usize>,
    /// `H` is empty or `|G ∪ H| <= 4`.
    pub size_condition: bool,
    /// Every `z1 ∈ G`, `z2 ∈ H` has `z1 + z2 = 0` or `z1 + z2` a boundary ray.
    pub cross_pairs: bool,
    /// When `|G ∪ H| = 4`, whether the source is an S3-bundle.
    pub s3_bundle: Option<bool>,
}

pub fn exceptional_sets(map: &RefinementMap, eta: &[usize]) -> Result<ExceptionalSets> {
    let mut eta = eta.to_vec();
    eta.sort_unstable();
    if !map.target.is_face(&eta) {
        return Err(Error::NotACone(eta));
    }
    let em = crate::fan::mask_of(&eta);
    let mut g = Vec::new();
    let mut h = Vec::new();
    let mut b = Vec::new();
    for (z, tau) in map.ray_to_cone.iter().enumerate() {
        let tm = crate::fan::mask_of(tau);
        if tm & em == em {
            g.push(z);
        } else if !map.target.is_face_mask(tm | em) {
            h.push(z);
        } else {
            b.push(z);
        }
    }
    let size_condition = h.is_empty() || g.len() + h.len() <= 4;
    let mut cross_pairs = true;
    for &z1 in &g {
        for &z2 in &h {
            let s: LatticePoint = map
                .source
                .ray(z1)
                .iter()
                .zip(map.source.ray(z2))
                .map(|(a, c)| a + c)
                .collect();
            let ok = s.iter().all(|x| x.is_zero())
                || map.source.ray_index(&s).is_some_and(|i| b.contains(&i));
            cross_pairs &= ok;
        }
    }
    let s3_bundle = if g.len() + h.len() == 4 && !h.is_empty() {
        Some(structure::detect_s3_bundle(&map.source)?.is_some())
    } else {
        None
    };
    let out = ExceptionalSets {
        eta,
        g_set: g,
        h_set: h,
        boundary_set: b,
        size_condition,
        cross_pairs,
        s3_bundle,
    };
    if primitive::is_fano(&map.source)?
        && (!out.size_condition || !out.cross_pairs || out.s3_bundle == Some(false))
    {
        return Err(Error::CheckFailed(format!(
            "exceptional sets of {:?} violate the Fano constraints: {out:?}",
            out.eta
        )));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PuhEntry {
    /// Exceptional source ray.
    pub ray: usize,
    /// Minimal target cone containing it (the image of its divisor).
    pub image: Cone,
    pub rho_target: usize,
    pub rho_image: usize,
    /// Number of source rays mapped into the image (the set `G`).
    pub g_count: usize,
    pub ok: bool,
}

/// Picard-number bounds for every exceptional divisor of a morphism with
/// Fano source: `rho_Y - rho_A <= 3`, and for point images `rho_Y <= 3`
/// with a single component over the point unless `Y` is projective space
/// (then at most two).
pub fn check_puh(map: &RefinementMap) -> Result<Vec<PuhEntry>> {
    if !primitive::is_fano(&map.source)? {
        return Err(Error::Precondition("source is not Fano".into()));
    }
    let n = map.target.dim();
    let rho_y = map.target.picard_number();
    let mut is_pn: Option<bool> = None;
    let mut out = Vec::new();
    for z in map.new_rays() {
        let eta = map.ray_to_cone[z].clone();
        let rho_a = surgery::orbit_closure_picard(&map.target, &eta)?;
        let g_count = exceptional_sets(map, &eta)?.g_set.len();
        let mut ok = rho_y - rho_a <= 3;
        if eta.len() == n {
            let pn = *is_pn.get_or_insert_with(|| {
                iso::lattice_isomorphic(&map.target, &catalog::projective_space(n)).is_some()
            });
            ok &= if pn { g_count <= 2 } else { rho_y <= 3 && g_count == 1 };
        }
        let e = PuhEntry {
            ray: z,
            image: eta,
            rho_target: rho_y,
            rho_image: rho_a,
            g_count,
            ok,
        };
        if !ok {
            return Err(Error::CheckFailed(format!("Picard bound violated: {e:?}")));
        }
        out.push(e);
    }
    Ok(out)
}

/// One of the seventeen ways a maximal cone `<y1,y2,y3,y4>` can be
/// subdivided, as a list of star-subdivision centers.
#[derive(Debug, Clone)]
pub struct Template {
    pub code: u8,
    pub centers: &'static [&'static [&'static str]],
    /// New rays `x_i` as coefficient vectors over `y1..y4`.
    pub new_rays: &'static [(&'static str, [i64; 4])],
    pub relations: &'static [&'static str],
    /// Only possible when the target is projective space.
    pub projective_space_only: bool,
}

const TEMPLATES: &[Template] = &[
    Template { code: 1, centers: &[], new_rays: &[], relations: &[], projective_space_only: false },
    Template {
        code: 2,
        centers: &[&["y1", "y2"]],
        new_rays: &[("x1", [1, 1, 0, 0])],
        relations: &["y1+y2=x1"],
        projective_space_only: false,
    },
    Template {
        code: 3,
        centers: &[&["y1", "y2", "y3"]],
        new_rays: &[("x1", [1, 1, 1, 0])],
        relations: &["y1+y2+y3=x1"],
        projective_space_only: false,
    },
    Template {
        code: 4,
        centers: &[&["y1", "y2", "y3", "y4"]],
        new_rays: &[("x1", [1, 1, 1, 1])],
        relations: &["y1+y2+y3+y4=x1"],
        projective_space_only: false,
    },
    Template {
        code: 5,
        centers: &[&["y1", "y2"], &["y3", "y4"]],
        new_rays: &[("x1", [1, 1, 0, 0]), ("x2", [0, 0, 1, 1])],
        relations: &["y1+y2=x1", "y3+y4=x2"],
        projective_space_only: false,
    },
    Template {
        code: 6,
        centers: &[&["y1", "y2", "y3"], &["y1", "x1"]],
        new_rays: &[("x1", [1, 1, 1, 0]), ("x2", [2, 1, 1, 0])],
        relations: &["y1+y2+y3=x1", "y1+x1=x2", "y2+y3+x2=2x1"],
        projective_space_only: false,
    },
    Template {
        code: 7,
        centers: &[&["y1", "y2", "y3"], &["y1", "y4"]],
        new_rays: &[("x1", [1, 1, 1, 0]), ("x2", [1, 0, 0, 1])],
        relations: &["y1+y2+y3=x1", "y1+y4=x2", "y2+y3+x2=x1+y4"],
        projective_space_only: false,
    },
    Template {
        code: 8,
        centers: &[&["y1", "y2", "y3"], &["y1", "y2"]],
        new_rays: &[("x1", [1, 1, 1, 0]), ("x2", [1, 1, 0, 0])],
        relations: &["y1+y2=x2", "x2+y3=x1"],
        projective_space_only: false,
    },
    Template {
        code: 9,
        centers: &[&["y1", "y2", "y3", "y4"], &["y1", "y2", "y3"]],
        new_rays: &[("x1", [1, 1, 1, 1]), ("x2", [1, 1, 1, 0])],
        relations: &["y1+y2+y3=x2", "x2+y4=x1"],
        projective_space_only: false,
    },
    Template {
        code: 10,
        centers: &[&["y1", "y2", "y3"], &["y2", "y3", "y4"], &["y4", "x2"]],
        new_rays: &[("x2", [1, 1, 1, 0]), ("x3", [0, 1, 1, 1]), ("x1", [1, 1, 1, 1])],
        relations: &["y1+y2+y3=x2", "y2+y3+y4=x3", "y1+x3=x1", "y4+x2=x1", "y2+y3+x1=x2+x3"],
        projective_space_only: false,
    },
    Template {
        code: 11,
        centers: &[&["y1", "y2", "y3", "y4"], &["y1", "y2"]],
        new_rays: &[("x1", [1, 1, 1, 1]), ("x2", [1, 1, 0, 0])],
        relations: &["y1+y2=x2", "y3+y4+x2=x1"],
        projective_space_only: false,
    },
    Template {
        code: 12,
        centers: &[&["y1", "y2", "y3", "y4"], &["y1", "y2"], &["y3", "y4"]],
        new_rays: &[("x1", [1, 1, 1, 1]), ("x2", [1, 1, 0, 0]), ("x3", [0, 0, 1, 1])],
        relations: &["y1+y2=x2", "y3+y4=x3", "x2+x3=x1"],
        projective_space_only: false,
    },
    Template {
        code: 13,
        centers: &[&["y1", "y2", "y3", "y4"], &["y1", "y2"], &["x2", "y3"]],
        new_rays: &[("x1", [1, 1, 1, 1]), ("x2", [1, 1, 0, 0]), ("x3", [1, 1, 1, 0])],
        relations: &["y1+y2=x2", "y3+x2=x3", "y4+x3=x1"],
        projective_space_only: false,
    },
    Template {
        code: 14,
        centers: &[&["y1", "y2", "y3", "y4"], &["y1", "x1"]],
        new_rays: &[("x1", [1, 1, 1, 1]), ("x2", [2, 1, 1, 1])],
        relations: &["y1+y2+y3+y4=x1", "y1+x1=x2", "x2+y2+y3+y4=2x1"],
        projective_space_only: true,
    },
    Template {
        code: 15,
        centers: &[&["y1", "y2", "y3", "y4"], &["y1", "y2", "y3"], &["y1", "x1"]],
        new_rays: &[("x1", [1, 1, 1, 1]), ("x2", [1, 1, 1, 0]), ("x3", [2, 1, 1, 1])],
        relations: &["y1+y2+y3=x2", "x2+y4=x1", "y1+x1=x3", "y2+y3+x3=x1+x2"],
        projective_space_only: true,
    },
    Template {
        code: 16,
        centers: &[&["y1", "y2", "y3", "y4"], &["y1", "y2"], &["y3", "x1"]],
        new_rays: &[("x1", [1, 1, 1, 1]), ("x2", [1, 1, 0, 0]), ("x3", [1, 1, 2, 1])],
        relations: &["y1+y2=x2", "y3+y4+x2=x1", "y3+x1=x3", "y4+x2+x3=2x1"],
        projective_space_only: true,
    },
    Template {
        code: 17,
        centers: &[&["y1", "y2", "y3", "y4"], &["y1", "y2"], &["x1", "x2"]],
        new_rays: &[("x1", [1, 1, 1, 1]), ("x2", [1, 1, 0, 0]), ("x3", [2, 2, 1, 1])],
        relations: &["y1+y2=x2", "y3+y4+x2=x1", "x1+x2=x3", "y3+y4+x3=2x1"],
        projective_space_only: true,
    },
];

pub fn templates() -> &'static [Template] {
    TEMPLATES
}

pub fn template(code: u8) -> Option<&'static Template> {
    TEMPLATES.iter().find(|t| t.code == code)
}

impl Template {
    /// Coefficients of a label over `y1..y4`.
    fn coeffs(&self, label: &str) -> [i64; 4] {
        if let Some(k) = label.strip_prefix('y') {
            let k: usize = k.parse().expect("template label");
            let mut c = [0; 4];
            c[k - 1] = 1;
            return c;
        }
        self.new_rays
            .iter()
            .find(|(l, _)| *l == label)
            .map(|(_, c)| *c)
            .expect("template label")
    }

    /// Whether the template only involves `y1..y_d`.
    fn fits_dim(&self, d: usize) -> bool {
        self.new_rays.iter().all(|(_, c)| c[d..].iter().all(|&v| v == 0))
            && self
                .centers
                .iter()
                .flat_map(|c| c.iter())
                .all(|l| self.coeffs(l)[d..].iter().all(|&v| v == 0))
    }

    /// Vector of a label given the target vectors of `y1..y_d`.
    fn vector(&self, label: &str, ys: &[&LatticePoint]) -> LatticePoint {
        let c = self.coeffs(label);
        let n = ys[0].len();
        let mut v = vec![Int::zero(); n];
        for (k, y) in ys.iter().enumerate() {
            if c[k] != 0 {
                for (a, b) in v.iter_mut().zip(y.iter()) {
                    *a += Int::from(c[k]) * b;
                }
            }
        }
        v
    }
}

/// Parses `"y2+y3+x2=2x1"` into two sides of `(coefficient, label)` terms.
fn parse_relation(s: &str) -> (Vec<(i64, String)>, Vec<(i64, String)>) {
    let side = |t: &str| -> Vec<(i64, String)> {
        t.split('+')
            .map(|term| {
                let pos = term.find(|c: char| c.is_ascii_alphabetic()).expect("label");
                let coef = if pos == 0 { 1 } else { term[..pos].parse().expect("coefficient") };
                (coef, term[pos..].to_string())
            })
            .collect()
    };
    let (l, r) = s.split_once('=').expect("relation has '='");
    (side(l), side(r))
}

/// Order-insensitive key for a primitive relation.
type RelationKey = (Vec<usize>, Vec<(usize, Int)>);

fn relation_key(r: &primitive::PrimitiveRelation) -> RelationKey {
    let mut c = r.collection.clone();
    c.sort_unstable();
    let mut f: Vec<(usize, Int)> = r.focus.iter().copied().zip(r.coefficients.iter().cloned()).collect();
    f.sort();
    (c, f)
}

/// Replays the centers of a template on the maximal cone `sigma` of `fan`,
/// with `y_k = sigma[k]` in the given order. Returns the subdivided fan and
/// the index of each label in it.
pub fn replay_template(fan: &Fan, sigma: &[usize], code: u8) -> Result<(Fan, BTreeMap<String, usize>)> {
    let t = template(code).ok_or_else(|| Error::Precondition(format!("no subdivision type {code}")))?;
    let d = fan.dim();
    if sigma.len() != d || !t.fits_dim(d) {
        return Err(Error::Precondition(format!(
            "subdivision type {code} does not fit a cone of dimension {d}"
        )));
    }
    let ys: Vec<&LatticePoint> = sigma.iter().map(|&i| fan.ray(i)).collect();
    let mut labels: BTreeMap<String, LatticePoint> = BTreeMap::new();
    for k in 0..d {
        labels.insert(format!("y{}", k + 1), ys[k].clone());
    }
    for (l, _) in t.new_rays {
        labels.insert(l.to_string(), t.vector(l, &ys));
    }
    let mut cur = fan.clone();
    for center in t.centers {
        let idx: Vec<usize> = center
            .iter()
            .map(|l| cur.ray_index(&labels[*l]).ok_or_else(|| Error::Internal(format!("label {l} missing"))))
            .collect::<Result<_>>()?;
        cur = surgery::star_subdivide(&cur, &idx)?;
    }
    let map = labels
        .iter()
        .map(|(l, v)| (l.clone(), cur.ray_index(v).expect("label ray present")))
        .collect();
    Ok((cur, map))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubdivisionReport {
    /// Target maximal cone (target indices).
    pub sigma: Cone,
    pub type_code: u8,
    /// Star-subdivision centers in order, as source ray indices.
    pub centers: Vec<Cone>,
    /// The same centers written with the labels `y_i`, `x_i`.
    pub center_labels: Vec<Vec<String>>,
    /// Label of each ray of the closed cone, as a source ray index.
    pub labels: BTreeMap<String, usize>,
    pub relations: Vec<String>,
    /// Set for dimensions 2 and 3, where the seventeen types are only
    /// matched through their lower-dimensional restrictions.
    pub generalized: bool,
}

struct Candidate {
    code: u8,
    centers: Vec<Cone>,
    labels: BTreeMap<String, usize>,
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

/// Which of the seventeen subdivision types the maximal target cone `sigma`
/// undergoes.
///
/// Types are recognised by the positions of the new rays inside `sigma` and,
/// in dimension 4, by the primitive relations supported inside `sigma`.
/// Among equivalent labelings the lexicographically smallest center list is
/// reported. The center list is then replayed on the target and the result
/// compared with the source inside `sigma`.
pub fn classify_subdivision(map: &RefinementMap, sigma: &[usize]) -> Result<SubdivisionReport> {
    let d = map.target.dim();
    let mut sigma = sigma.to_vec();
    sigma.sort_unstable();
    if !map.target.max_cones().contains(&sigma) {
        return Err(Error::NotACone(sigma));
    }
    if !(2..=4).contains(&d) {
        return Err(Error::Precondition(format!(
            "subdivision types are defined for dimensions 2 to 4, got {d}"
        )));
    }
    let generalized = d != 4;
    if !generalized && !primitive::is_fano(&map.source)? {
        return Err(Error::Precondition("source is not Fano".into()));
    }
    let src = &map.source;
    let closed: Vec<usize> = map.rays_in(&sigma);
    let closed_set: BTreeSet<usize> = closed.iter().copied().collect();
    let new_in: BTreeSet<LatticePoint> = closed
        .iter()
        .filter(|i| !map.target_ray_in_source.contains(i))
        .map(|&i| src.ray(i).clone())
        .collect();
    let inside_relations: Vec<RelationKey> = if generalized {
        Vec::new()
    } else {
        let mut v: Vec<RelationKey> = primitive::primitive_relations(src)?
            .iter()
            .filter(|r| r.collection.iter().all(|i| closed_set.contains(i)))
            .map(relation_key)
            .collect();
        v.sort();
        v
    };
    let mut by_type: Vec<Candidate> = Vec::new();
    for t in TEMPLATES.iter().filter(|t| t.fits_dim(d)) {
        if t.new_rays.len() != new_in.len() {
            continue;
        }
        let mut best: Option<Candidate> = None;
        for perm in permutations(d) {
            let ys: Vec<&LatticePoint> = perm.iter().map(|&k| map.target.ray(sigma[k])).collect();
            let xs: BTreeSet<LatticePoint> = t.new_rays.iter().map(|(l, _)| t.vector(l, &ys)).collect();
            if xs != new_in {
                continue;
            }
            let mut labels = BTreeMap::new();
            for k in 0..d {
                labels.insert(format!("y{}", k + 1), map.target_ray_in_source[sigma[perm[k]]]);
            }
            for (l, _) in t.new_rays {
                let idx = src.ray_index(&t.vector(l, &ys)).expect("new ray present");
                labels.insert(l.to_string(), idx);
            }
            if !generalized {
                let mut expected: Vec<RelationKey> = t
                    .relations
                    .iter()
                    .map(|s| {
                        let (lhs, rhs) = parse_relation(s);
                        let mut c: Vec<usize> = lhs.iter().map(|(_, l)| labels[l]).collect();
                        c.sort_unstable();
                        let mut f: Vec<(usize, Int)> =
                            rhs.iter().map(|(a, l)| (labels[l], Int::from(*a))).collect();
                        f.sort();
                        (c, f)
                    })
                    .collect();
                expected.sort();
                if expected != inside_relations {
                    continue;
                }
            }
            let centers: Vec<Cone> = t
                .centers
                .iter()
                .map(|c| {
                    let mut v: Vec<usize> = c.iter().map(|l| labels[*l]).collect();
                    v.sort_unstable();
                    v
                })
                .collect();
            if best.as_ref().is_none_or(|b| centers < b.centers) {
                best = Some(Candidate {
                    code: t.code,
                    centers,
                    labels,
                });
            }
        }
        if let Some(b) = best {
            by_type.push(b);
        }
    }
    let cand = match by_type.len() {
        0 => {
            return Err(Error::CheckFailed(format!(
                "subdivision of cone {sigma:?} matches none of the seventeen types"
            )))
        }
        1 => by_type.pop().unwrap(),
        _ => {
            let codes: Vec<u8> = by_type.iter().map(|c| c.code).collect();
            return Err(Error::Internal(format!("cone {sigma:?} matches several types {codes:?}")));
        }
    };
    let t = template(cand.code).unwrap();
    verify_replay(map, &sigma, &cand.centers)?;
    if t.projective_space_only
        && iso::lattice_isomorphic(&map.target, &catalog::projective_space(d)).is_none()
    {
        return Err(Error::CheckFailed(format!(
            "subdivision type {} requires the target to be projective space",
            t.code
        )));
    }
    let center_labels = t
        .centers
        .iter()
        .map(|c| c.iter().map(|s| s.to_string()).collect())
        .collect();
    Ok(SubdivisionReport {
        sigma,
        type_code: cand.code,
        centers: cand.centers,
        center_labels,
        labels: cand.labels,
        relations: t.relations.iter().map(|s| s.to_string()).collect(),
        generalized,
    })
}

/// Membership test for the closed cone spanned by the columns `inv^{-1}`.
fn in_closed_cone(inv: &[Vec<Rat>], p: &[Int]) -> bool {
    linalg::mat_vec(inv, p).iter().all(|c| !c.is_negative())
}

/// Maximal cones of `fan` inside the closed cone with inverse matrix `inv`,
/// as sets of ray vectors.
fn cones_inside(fan: &Fan, inv: &[Vec<Rat>]) -> BTreeSet<BTreeSet<LatticePoint>> {
    fan.max_cones()
        .iter()
        .filter(|c| c.iter().all(|&i| in_closed_cone(inv, fan.ray(i))))
        .map(|c| c.iter().map(|&i| fan.ray(i).clone()).collect())
        .collect()
}

fn verify_replay(map: &RefinementMap, sigma: &[usize], centers: &[Cone]) -> Result<()> {
    let mut cur = map.target.clone();
    for c in centers {
        let idx: Vec<usize> = c
            .iter()
            .map(|&i| {
                cur.ray_index(map.source.ray(i))
                    .ok_or_else(|| Error::CheckFailed(format!("center ray {i} missing during replay")))
            })
            .collect::<Result<_>>()?;
        cur = surgery::star_subdivide(&cur, &idx)?;
    }
    let cols: Vec<&[Int]> = sigma.iter().map(|&i| map.target.ray(i).as_slice()).collect();
    let inv = linalg::inverse_of_columns(&cols).expect("maximal cone is full-dimensional");
    if cones_inside(&cur, &inv) != cones_inside(&map.source, &inv) {
        return Err(Error::CheckFailed(format!(
            "replaying the centers of cone {sigma:?} does not reproduce the source"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct FactorizationStep {
    /// Center as indices into the fan before this step.
    pub center: Cone,
    #[serde(serialize_with = "crate::io::ser_points")]
    pub center_rays: Vec<LatticePoint>,
    #[serde(skip)]
    pub fan_after: Fan,
}

/// Writes the morphism as a sequence of star subdivisions of the target.
///
/// Per-cone center lists are merged; at each step the applicable center
/// (a cone of the current fan) of largest dimension is taken, ties broken by
/// the lexicographic order of its ray vectors.
pub fn factorize(map: &RefinementMap) -> Result<Vec<FactorizationStep>> {
    let mut pending: BTreeSet<BTreeSet<LatticePoint>> = BTreeSet::new();
    for sigma in map.target.max_cones() {
        let rep = classify_subdivision(map, sigma)?;
        for c in rep.centers {
            pending.insert(c.iter().map(|&i| map.source.ray(i).clone()).collect());
        }
    }
    let mut cur = map.target.clone();
    let mut steps = Vec::new();
    while !pending.is_empty() {
        let mut choice: Option<(usize, &BTreeSet<LatticePoint>, Cone)> = None;
        for c in &pending {
            let idx: Option<Vec<usize>> = c.iter().map(|v| cur.ray_index(v)).collect();
            let Some(mut idx) = idx else { continue };
            idx.sort_unstable();
            if !cur.is_face(&idx) {
                continue;
            }
            let better = match &choice {
                None => true,
                Some((d, _, _)) => c.len() > *d,
            };
            if better {
                choice = Some((c.len(), c, idx));
            }
        }
        let Some((_, c, idx)) = choice else {
            return Err(Error::CheckFailed(
                "no admissible order of the blow-up centers exists".into(),
            ));
        };
        let c = c.clone();
        pending.remove(&c);
        let next = surgery::star_subdivide(&cur, &idx)?;
        if !next.validate().is_ok() {
            return Err(Error::CheckFailed("intermediate fan is not smooth and complete".into()));
        }
        if map.source.ray_index(next.ray(next.num_rays() - 1)).is_none() {
            return Err(Error::CheckFailed(format!(
                "center {idx:?} creates a ray that is not in the source"
            )));
        }
        steps.push(FactorizationStep {
            center: idx,
            center_rays: c.into_iter().collect(),
            fan_after: next.clone(),
        });
        cur = next;
    }
    if cur != map.source {
        return Err(Error::CheckFailed("replayed blow-ups do not reproduce the source".into()));
    }
    if steps.len() != map.new_rays().len() {
        return Err(Error::Internal("number of blow-ups differs from the number of new rays".into()));
    }
    Ok(steps)
}

/// Lookup of source ray vectors for reporting.
pub fn label_vectors(map: &RefinementMap, rep: &SubdivisionReport) -> HashMap<String, String> {
    rep.labels
        .iter()
        .map(|(l, &i)| (l.clone(), format_point(map.source.ray(i))))
        .collect()
}
