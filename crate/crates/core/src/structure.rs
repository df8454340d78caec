//! Structure of Fano fans around one invariant divisor: order-2 primitive
//! collections through a ray, the resulting divisor cases, S3-bundles,
//! flips, and the reduction of a fan with a pair `x, -x` to a P1-bundle.

use std::collections::BTreeSet;

use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fan::{Cone, Fan, LatticePoint};
use crate::linalg::Int;
use crate::mori;
use crate::primitive::{self, PrimitiveCollection, PrimitiveRelation};
use crate::surgery;

fn neg(p: &[Int]) -> LatticePoint {
    p.iter().map(|x| -x).collect()
}

fn add(a: &[Int], b: &[Int]) -> LatticePoint {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn require_fano(fan: &Fan) -> Result<()> {
    if !primitive::is_fano(fan)? {
        return Err(Error::Precondition("fan is not Fano".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "ray", rename_all = "snake_case")]
pub enum PairKind {
    /// `x + y = 0`.
    SumZero,
    /// `x + y = z` for the ray `z`.
    SumRay(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Order2Profile {
    pub ray: usize,
    /// Partners `y` with `{x, y}` primitive, sorted by index.
    pub pairs: Vec<(usize, PairKind)>,
}

impl Order2Profile {
    fn sum_ray_pairs(&self) -> Vec<(usize, usize)> {
        self.pairs
            .iter()
            .filter_map(|&(y, k)| match k {
                PairKind::SumRay(z) => Some((y, z)),
                PairKind::SumZero => None,
            })
            .collect()
    }

    fn symmetric_partner(&self) -> Option<usize> {
        self.pairs.iter().find(|(_, k)| *k == PairKind::SumZero).map(|(y, _)| *y)
    }
}

/// Order-2 primitive collections through `ray` on a Fano fan.
///
/// Two pairs `x + y = z`, `x + w = v` force `w = -x - y` and `v = -y`.
pub fn order2_profile(fan: &Fan, ray: usize) -> Result<Order2Profile> {
    fan.check_ray_index(ray)?;
    require_fano(fan)?;
    let mut pairs = Vec::new();
    for p in primitive::primitive_collections(fan) {
        if p.len() != 2 || !p.contains(ray) {
            continue;
        }
        let y = if p.members[0] == ray { p.members[1] } else { p.members[0] };
        let r = primitive::primitive_relation(fan, &p)?;
        let kind = match (r.focus.as_slice(), r.coefficients.as_slice()) {
            ([], []) => PairKind::SumZero,
            ([z], [a]) if a.is_one() => PairKind::SumRay(*z),
            _ => {
                return Err(Error::CheckFailed(format!(
                    "input not Fano-consistent: order-2 relation {}",
                    r.describe()
                )))
            }
        };
        pairs.push((y, kind));
    }
    let profile = Order2Profile { ray, pairs };
    let sums = profile.sum_ray_pairs();
    let inconsistent = profile.pairs.len() > 3
        || sums.len() > 2
        || profile.pairs.iter().filter(|(_, k)| *k == PairKind::SumZero).count() > 1
        || (sums.len() == 2 && {
            let x = fan.ray(ray);
            let ((y, z), (w, v)) = (sums[0], sums[1]);
            let (y, z, w, v) = (fan.ray(y), fan.ray(z), fan.ray(w), fan.ray(v));
            *w != neg(&add(x, y)) || *v != neg(y) || *z != neg(w)
        });
    if inconsistent {
        return Err(Error::CheckFailed(format!(
            "input not Fano-consistent: order-2 collections through ray {ray}: {:?}",
            profile.pairs
        )));
    }
    Ok(profile)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum DivisorCase {
    /// No order-2 collection through the ray.
    Case0,
    /// Only `{x, -x}`.
    Case1,
    /// One order-2 collection, not of the form `{x, -x}`; outside the
    /// scope of the classification.
    Case1Unclassified,
    /// Two degree-1 pairs around `distinguished`, possibly after replacing
    /// `x` by another ray of the configuration.
    Case2a { distinguished: usize },
    /// `{x, -x}` and `x + y = v` with neither `-y` nor `-v` a ray.
    Case2b,
    /// Three order-2 collections: an S3-bundle.
    Case3,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivisorClassification {
    pub case: DivisorCase,
    pub rho_diff: usize,
    pub profile: Order2Profile,
}

pub fn classify_divisor_case(fan: &Fan, ray: usize) -> Result<DivisorClassification> {
    let profile = order2_profile(fan, ray)?;
    let rho_diff = primitive::rho_diff(fan, ray)?;
    if rho_diff != profile.pairs.len() {
        return Err(Error::Internal("order-2 count disagrees with rho_diff".into()));
    }
    let case = match rho_diff {
        0 => DivisorCase::Case0,
        1 => match profile.pairs[0].1 {
            PairKind::SumZero => DivisorCase::Case1,
            PairKind::SumRay(_) => DivisorCase::Case1Unclassified,
        },
        2 => {
            let sums = profile.sum_ray_pairs();
            if sums.len() == 2 {
                DivisorCase::Case2a { distinguished: ray }
            } else {
                let (y, v) = sums[0];
                if fan.ray_index(&neg(fan.ray(y))).is_some() {
                    DivisorCase::Case2a { distinguished: v }
                } else if fan.ray_index(&neg(fan.ray(v))).is_some() {
                    DivisorCase::Case2a { distinguished: y }
                } else {
                    DivisorCase::Case2b
                }
            }
        }
        3 => DivisorCase::Case3,
        d => {
            return Err(Error::CheckFailed(format!(
                "Picard number drops by {d} > 3 at ray {ray}; impossible on a Fano fan"
            )))
        }
    };
    if let DivisorCase::Case2a { distinguished } = case {
        if distinguished != ray {
            let p = order2_profile(fan, distinguished)?;
            if p.sum_ray_pairs().len() != 2 {
                return Err(Error::CheckFailed(format!(
                    "ray {distinguished} does not carry two degree-1 pairs"
                )));
            }
        }
    }
    Ok(DivisorClassification {
        case,
        rho_diff,
        profile,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct S3Bundle {
    /// Ray indices of `x, -w, y, -x, w, -y` in cyclic order.
    pub hexagon: [usize; 6],
    /// Basis `x, y` of the fiber plane.
    #[serde(serialize_with = "crate::io::ser_points")]
    pub plane: Vec<LatticePoint>,
    /// Fan of the base in `N / plane`; `None` when the base is a point.
    #[serde(skip)]
    pub base: Option<Fan>,
}

/// Looks for an S3-bundle structure: a ray in three order-2 collections,
/// whose six coplanar generators satisfy the hexagon relations. The base fan
/// is the projection of the remaining rays of each maximal cone.
pub fn detect_s3_bundle(fan: &Fan) -> Result<Option<S3Bundle>> {
    require_fano(fan)?;
    for x in 0..fan.num_rays() {
        let profile = order2_profile(fan, x)?;
        if profile.pairs.len() != 3 {
            continue;
        }
        let sums = profile.sum_ray_pairs();
        let (y, mw) = sums[0];
        let (w, my) = sums[1];
        let mx = profile.symmetric_partner().expect("three pairs include x, -x");
        let hexagon = [x, mw, y, mx, w, my];
        check_hexagon(fan, &hexagon)?;
        let n = fan.dim();
        let plane = vec![fan.ray(x).clone(), fan.ray(y).clone()];
        if n == 2 {
            return Ok(Some(S3Bundle { hexagon, plane, base: None }));
        }
        let gens: Vec<&[Int]> = plane.iter().map(|p| p.as_slice()).collect();
        let proj = surgery::quotient_projection(&gens, n)
            .map_err(|e| Error::CheckFailed(format!("hexagon plane: {e}")))?;
        let hex: BTreeSet<usize> = hexagon.iter().copied().collect();
        let mut rays: Vec<LatticePoint> = Vec::new();
        let mut cones: BTreeSet<Cone> = BTreeSet::new();
        for c in fan.max_cones() {
            let inside = c.iter().filter(|i| hex.contains(i)).count();
            if inside != 2 {
                return Err(Error::CheckFailed(format!(
                    "maximal cone {c:?} meets the hexagon in {inside} rays"
                )));
            }
            let mut bc = Vec::new();
            for &i in c.iter().filter(|i| !hex.contains(i)) {
                let p = crate::linalg::int_mat_vec(&proj, fan.ray(i));
                let k = match rays.iter().position(|r| *r == p) {
                    Some(k) => k,
                    None => {
                        rays.push(p);
                        rays.len() - 1
                    }
                };
                bc.push(k);
            }
            bc.sort_unstable();
            cones.insert(bc);
        }
        let base = Fan::new(n - 2, rays, cones.into_iter().collect())
            .map_err(|e| Error::CheckFailed(format!("projected base is not a fan: {e}")))?;
        base.require_smooth_complete()
            .map_err(|e| Error::CheckFailed(format!("projected base: {e}")))?;
        if !primitive::is_fano(&base)? {
            return Err(Error::CheckFailed("base of the S3-bundle is not Fano".into()));
        }
        return Ok(Some(S3Bundle {
            hexagon,
            plane,
            base: Some(base),
        }));
    }
    Ok(None)
}

/// The nine relations among `x, -w, y, -x, w, -y`: opposite rays sum to
/// zero and any two rays at distance two sum to the ray between them.
fn check_hexagon(fan: &Fan, hex: &[usize; 6]) -> Result<()> {
    for i in 0..6 {
        let a = hex[i];
        let opposite = hex[(i + 3) % 6];
        let mid = hex[(i + 1) % 6];
        let next2 = hex[(i + 2) % 6];
        let ok_opposite = *fan.ray(opposite) == neg(fan.ray(a))
            && expect_relation(fan, &[a, opposite], &[]);
        let ok_sum = add(fan.ray(a), fan.ray(next2)) == *fan.ray(mid)
            && expect_relation(fan, &[a, next2], &[mid]);
        if !ok_opposite || !ok_sum {
            return Err(Error::CheckFailed(format!(
                "hexagon relations fail around ray {a}; contradicts the S3 case"
            )));
        }
    }
    Ok(())
}

fn expect_relation(fan: &Fan, collection: &[usize], focus: &[usize]) -> bool {
    let p = PrimitiveCollection::new(collection.to_vec());
    match primitive::primitive_relation(fan, &p) {
        Ok(r) => {
            let mut f = focus.to_vec();
            f.sort_unstable();
            r.focus == f && r.coefficients.iter().all(|c| c.is_one())
        }
        Err(_) => false,
    }
}

/// Flip of a primitive relation `sum(P) = sum(Q)` with unit coefficients,
/// `|Q| >= 2` and degree `±1`: star subdivision at `Q`, then blow-down of the
/// new ray onto `P`. The result carries the reversed relation.
pub fn flip(fan: &Fan, r: &PrimitiveRelation) -> Result<Fan> {
    let h = r.focus.len();
    let shape_ok = h >= 2
        && r.collection.len() >= 2
        && r.coefficients.iter().all(|c| c.is_one())
        && (r.degree == Int::one() || r.degree == -Int::one());
    if !shape_ok {
        return Err(Error::Precondition(format!(
            "relation {} does not have the shape of a flip",
            r.describe()
        )));
    }
    let p = PrimitiveCollection::new(r.collection.clone());
    if primitive::primitive_relation(fan, &p)? != *r {
        return Err(Error::Precondition(format!(
            "{} is not a primitive relation of the fan",
            r.describe()
        )));
    }
    if mori::is_projective(fan)? && !mori::is_extremal(fan, &primitive::relation_class(fan, r)?)? {
        return Err(Error::Precondition(format!("relation {} is not extremal", r.describe())));
    }
    let collection_vecs: Vec<LatticePoint> = r.collection.iter().map(|&i| fan.ray(i).clone()).collect();
    let focus_vecs: Vec<LatticePoint> = r.focus.iter().map(|&i| fan.ray(i).clone()).collect();
    let up = surgery::star_subdivide(fan, &r.focus)?;
    let v = up.num_rays() - 1;
    let center: Vec<usize> = collection_vecs
        .iter()
        .map(|p| up.ray_index(p).expect("collection rays survive"))
        .collect();
    let (down, _) = surgery::blow_down_onto(&up, v, &center).map_err(|e| {
        Error::CheckFailed(format!("flip of {}: blow-down failed: {e}", r.describe()))
    })?;
    let reversed: Vec<usize> = focus_vecs
        .iter()
        .map(|p| down.ray_index(p).expect("focus rays survive"))
        .collect();
    let rr = primitive::primitive_relation(&down, &PrimitiveCollection::new(reversed))?;
    let mut rr_focus: Vec<LatticePoint> = rr.focus.iter().map(|&i| down.ray(i).clone()).collect();
    let mut expected = collection_vecs;
    rr_focus.sort();
    expected.sort();
    if rr_focus != expected || rr.degree != -r.degree.clone() {
        return Err(Error::CheckFailed(format!(
            "flip of {} did not produce the reversed relation",
            r.describe()
        )));
    }
    Ok(down)
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepKind {
    Flip {
        /// Relation flipped, `(-x) + z_1 + ... + z_h = y_1 + ... + y_h`.
        #[serde(serialize_with = "crate::io::ser_points")]
        lhs: Vec<LatticePoint>,
        #[serde(serialize_with = "crate::io::ser_points")]
        rhs: Vec<LatticePoint>,
    },
    BlowDown {
        /// Contracted ray and the center it is blown down onto.
        #[serde(serialize_with = "crate::io::ser_ints")]
        ray: LatticePoint,
        #[serde(serialize_with = "crate::io::ser_points")]
        center: Vec<LatticePoint>,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineStep {
    #[serde(flatten)]
    pub kind: StepKind,
    #[serde(skip)]
    pub fan_after: Fan,
}

#[derive(Debug, Clone)]
pub struct BasicConstruction {
    pub steps: Vec<PipelineStep>,
    pub bundle: Fan,
    pub base: Fan,
}

impl BasicConstruction {
    pub fn flips(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s.kind, StepKind::Flip { .. })).count()
    }

    pub fn blow_downs(&self) -> usize {
        self.steps.len() - self.flips()
    }
}

fn vectors(fan: &Fan, idx: &[usize]) -> Vec<LatticePoint> {
    idx.iter().map(|&i| fan.ray(i).clone()).collect()
}

fn indices(fan: &Fan, vs: &[LatticePoint]) -> Result<Vec<usize>> {
    vs.iter()
        .map(|v| {
            fan.ray_index(v).ok_or_else(|| {
                Error::CheckFailed(format!("ray {} vanished during the construction", crate::fan::format_point(v)))
            })
        })
        .collect()
}

/// Maximal cones containing `x`, as sets of ray vectors.
fn star_of(fan: &Fan, x: &LatticePoint) -> BTreeSet<BTreeSet<LatticePoint>> {
    let i = fan.ray_index(x).expect("ray present");
    fan.max_cones()
        .iter()
        .filter(|c| c.contains(&i))
        .map(|c| vectors(fan, c).into_iter().collect())
        .collect()
}

/// Removes every primitive collection `P ∋ x` other than `{x, -x}` by a
/// blow-down (`|P| = 2`) or a flip (`|P| > 2`), giving a P1-bundle whose base
/// is the divisor of `x`.
pub fn basic_construction(fan: &Fan, ray: usize) -> Result<BasicConstruction> {
    fan.check_ray_index(ray)?;
    require_fano(fan)?;
    let n = fan.dim();
    let xv = fan.ray(ray).clone();
    let mxv = neg(&xv);
    let Some(mx) = fan.ray_index(&mxv) else {
        return Err(Error::Precondition(format!("the opposite of ray {ray} is not a ray")));
    };
    let mut obstructions: Vec<PrimitiveCollection> = primitive::primitive_collections(fan)
        .into_iter()
        .filter(|p| p.contains(ray) && !(p.len() == 2 && p.contains(mx)))
        .collect();
    obstructions.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.members.cmp(&b.members)));

    let mut plan = Vec::new();
    for p in &obstructions {
        let r = primitive::primitive_relation(fan, p)?;
        let h = p.len() - 1;
        let balanced = r.focus.len() == h && r.coefficients.iter().all(|c| c.is_one()) && 2 * h <= n;
        if !balanced || r.degree != Int::one() {
            return Err(Error::CheckFailed(format!(
                "relation {} through a symmetric pair is not balanced of degree 1",
                r.describe()
            )));
        }
        let ys: Vec<usize> = p.members.iter().copied().filter(|&i| i != ray).collect();
        plan.push((vectors(fan, &ys), vectors(fan, &r.focus)));
    }

    let star_before = star_of(fan, &xv);
    let mut cur = fan.clone();
    let mut steps = Vec::with_capacity(plan.len());
    for (ys, zs) in plan {
        let mut lhs = vec![mxv.clone()];
        lhs.extend(zs.iter().cloned());
        let (next, kind) = if ys.len() == 1 {
            let y = indices(&cur, &ys)?[0];
            let center = indices(&cur, &lhs)?;
            let (next, _) = surgery::blow_down_onto(&cur, y, &center)?;
            (
                next,
                StepKind::BlowDown {
                    ray: ys[0].clone(),
                    center: lhs,
                },
            )
        } else {
            let collection = PrimitiveCollection::new(indices(&cur, &lhs)?);
            let r = primitive::primitive_relation(&cur, &collection)?;
            let next = flip(&cur, &r)?;
            (next, StepKind::Flip { lhs, rhs: ys })
        };
        next.require_smooth_complete()
            .map_err(|e| Error::CheckFailed(format!("intermediate fan: {e}")))?;
        if !mori::is_projective(&next)? {
            return Err(Error::CheckFailed("intermediate fan is not projective".into()));
        }
        steps.push(PipelineStep {
            kind,
            fan_after: next.clone(),
        });
        cur = next;
    }

    let x = cur.ray_index(&xv).expect("x survives");
    let mx = cur.ray_index(&mxv).expect("-x survives");
    let pair = PrimitiveCollection::new(vec![x, mx]);
    let others = primitive::primitive_collections(&cur)
        .into_iter()
        .any(|p| p != pair && (p.contains(x) || p.contains(mx)));
    let r = primitive::primitive_relation(&cur, &pair)?;
    let extremal = mori::is_extremal(&cur, &primitive::relation_class(&cur, &r)?)?;
    if others || !extremal || !r.focus.is_empty() {
        return Err(Error::CheckFailed(
            "final fan is not a P1-bundle along the pair x, -x".into(),
        ));
    }
    if star_of(&cur, &xv) != star_before {
        return Err(Error::CheckFailed("the construction touched the star of x".into()));
    }
    let base = if n == 1 {
        return Err(Error::Precondition("dimension 1 has no base fan".into()));
    } else {
        surgery::divisor_fan(&cur, x)?
    };
    Ok(BasicConstruction {
        steps,
        bundle: cur,
        base,
    })
}

/// Largest `|G ∪ H|` over disjoint ray sets `G`, `H` such that every pair
/// `{g, h}` is a primitive collection. Scans sets `G` of up to five rays.
pub fn max_disjoint_pair_sets(fan: &Fan) -> usize {
    let nr = fan.num_rays();
    let mut partner = vec![0u128; nr];
    for p in primitive::primitive_collections(fan) {
        if p.len() == 2 {
            partner[p.members[0]] |= 1u128 << p.members[1];
            partner[p.members[1]] |= 1u128 << p.members[0];
        }
    }
    let mut best = 0;
    for size in 1..=5.min(nr) {
        surgery::for_each_subset(nr, size, &mut |g| {
            let common = g.iter().fold(u128::MAX, |m, &i| m & partner[i]);
            let gm = crate::fan::mask_of(g);
            let h = (common & !gm).count_ones() as usize;
            if h > 0 {
                best = best.max(size + h);
            }
        });
    }
    best
}

/// The opposite ray of `ray`, if present.
pub fn opposite(fan: &Fan, ray: usize) -> Option<usize> {
    fan.ray_index(&neg(fan.ray(ray)))
}

/// Fano criterion for the divisor of `ray`: the ray lies in no primitive
/// collection of degree 1 and order greater than 2.
pub fn divisor_is_fano_by_relations(fan: &Fan, ray: usize) -> Result<bool> {
    Ok(primitive::primitive_relations(fan)?
        .iter()
        .all(|r| !(r.collection.contains(&ray) && r.order() > 2 && r.degree.is_one())))
}
