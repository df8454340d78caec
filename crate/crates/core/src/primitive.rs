//! Primitive collections, primitive relations and their curve classes.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fan::{indices_of, mask_of, Cone, Fan, RaySet};
use crate::linalg::Int;
use crate::surgery;

/// A minimal set of rays that does not span a cone.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PrimitiveCollection {
    pub members: Vec<usize>,
}

impl PrimitiveCollection {
    pub fn new(mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        PrimitiveCollection { members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.contains(&i)
    }
}

/// `sum(collection) = sum(coefficients[i] * focus[i])` with the focus the
/// minimal cone containing the left-hand side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimitiveRelation {
    pub collection: Vec<usize>,
    pub focus: Cone,
    #[serde(serialize_with = "crate::io::ser_ints")]
    pub coefficients: Vec<Int>,
    #[serde(serialize_with = "crate::io::ser_int")]
    pub degree: Int,
}

impl PrimitiveRelation {
    pub fn order(&self) -> usize {
        self.collection.len()
    }

    pub fn class(&self, num_rays: usize) -> RelationClass {
        let mut entries = vec![Int::zero(); num_rays];
        for &i in &self.collection {
            entries[i] += Int::one();
        }
        for (i, a) in self.focus.iter().zip(&self.coefficients) {
            entries[*i] -= a;
        }
        RelationClass::new(entries)
    }

    /// Human-readable form such as `r0+r1=r3` or `r2+r4=2r0+r1`.
    pub fn describe(&self) -> String {
        let lhs: Vec<String> = self.collection.iter().map(|i| format!("r{i}")).collect();
        let rhs: Vec<String> = self
            .focus
            .iter()
            .zip(&self.coefficients)
            .map(|(i, a)| if a.is_one() { format!("r{i}") } else { format!("{a}r{i}") })
            .collect();
        let rhs = if rhs.is_empty() { "0".to_string() } else { rhs.join("+") };
        format!("{}={}", lhs.join("+"), rhs)
    }
}

/// An integral relation among the rays; an element of the lattice of
/// curve classes. Entries are intersection numbers with the invariant
/// divisors; the anticanonical degree is their sum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RelationClass {
    #[serde(serialize_with = "crate::io::ser_ints")]
    pub entries: Vec<Int>,
    #[serde(serialize_with = "crate::io::ser_int")]
    pub degree: Int,
}

impl RelationClass {
    pub fn new(entries: Vec<Int>) -> Self {
        let degree = entries.iter().sum();
        RelationClass { entries, degree }
    }

    pub fn from_i64(entries: &[i64]) -> Self {
        RelationClass::new(entries.iter().map(|&x| Int::from(x)).collect())
    }

    /// True if `sum(entries[x] * ray(x)) = 0`.
    pub fn is_relation_of(&self, fan: &Fan) -> bool {
        if self.entries.len() != fan.num_rays() {
            return false;
        }
        let mut s = vec![Int::zero(); fan.dim()];
        for (a, r) in self.entries.iter().zip(fan.rays()) {
            if a.is_zero() {
                continue;
            }
            for (x, y) in s.iter_mut().zip(r) {
                *x += a * y;
            }
        }
        s.iter().all(|x| x.is_zero())
    }

    pub fn negative_support(&self) -> Vec<usize> {
        (0..self.entries.len())
            .filter(|&i| self.entries[i] < Int::zero())
            .collect()
    }

    pub fn positive_support(&self) -> Vec<usize> {
        (0..self.entries.len())
            .filter(|&i| self.entries[i] > Int::zero())
            .collect()
    }

    pub fn scaled(&self, m: &Int) -> RelationClass {
        RelationClass::new(self.entries.iter().map(|x| x * m).collect())
    }

    pub fn add(&self, other: &RelationClass) -> RelationClass {
        RelationClass::new(self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| x.is_zero())
    }

    /// True if one class is a positive rational multiple of the other.
    pub fn is_positive_multiple_of(&self, other: &RelationClass) -> bool {
        if self.entries.len() != other.entries.len() || self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        // a * self = b * other with a, b > 0: compare via a pivot entry.
        let Some(p) = (0..self.entries.len()).find(|&i| !self.entries[i].is_zero()) else {
            return false;
        };
        let a = &other.entries[p];
        let b = &self.entries[p];
        if a.is_zero() || (a < &Int::zero()) != (b < &Int::zero()) {
            return false;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .all(|(x, y)| x * a == y * b)
    }
}

/// Minimal non-faces of the fan, ordered by size and then lexicographically.
///
/// Every cone has at most `n` rays, so each `(n+1)`-subset is a non-face and
/// any larger non-face contains a smaller one; sizes are therefore capped at
/// `n + 1`. Candidates of size `k` are grown from faces of size `k - 1` and
/// kept only if all their `(k-1)`-subsets are faces.
pub fn primitive_collections(fan: &Fan) -> Vec<PrimitiveCollection> {
    fan.cached_primitive(|| compute_collections(fan))
        .iter()
        .map(|m| PrimitiveCollection { members: m.clone() })
        .collect()
}

fn compute_collections(fan: &Fan) -> Vec<Vec<usize>> {
    let faces = fan.faces();
    let nr = fan.num_rays();
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut level: Vec<RaySet> = (0..nr).map(|i| 1u128 << i).filter(|m| faces.contains(m)).collect();
    for i in 0..nr {
        if !faces.contains(&(1u128 << i)) {
            out.push(vec![i]);
        }
    }
    for _size in 2..=fan.dim() + 1 {
        let mut next = Vec::new();
        let mut found = Vec::new();
        for &f in &level {
            let top = 127 - f.leading_zeros() as usize;
            for j in top + 1..nr {
                let s = f | (1u128 << j);
                let all_sub_faces = indices_of(s).iter().all(|&i| faces.contains(&(s & !(1u128 << i))));
                if !all_sub_faces {
                    continue;
                }
                if faces.contains(&s) {
                    next.push(s);
                } else {
                    found.push(indices_of(s));
                }
            }
        }
        found.sort();
        out.extend(found);
        level = next;
        if level.is_empty() {
            break;
        }
    }
    out
}

/// True if `members` is a minimal non-face.
pub fn is_primitive_collection(fan: &Fan, members: &[usize]) -> bool {
    if members.is_empty() || members.iter().any(|&i| i >= fan.num_rays()) {
        return false;
    }
    let m = mask_of(members);
    if m.count_ones() as usize != members.len() || fan.is_face_mask(m) {
        return false;
    }
    members.iter().all(|&i| fan.is_face_mask(m & !(1u128 << i)))
}

/// Primitive relation of a primitive collection.
pub fn primitive_relation(fan: &Fan, p: &PrimitiveCollection) -> Result<PrimitiveRelation> {
    if !is_primitive_collection(fan, &p.members) {
        return Err(Error::Precondition(format!(
            "{:?} is not a primitive collection",
            p.members
        )));
    }
    let s = fan.sum_of(&p.members);
    let (focus, coeffs) = fan.locate(&s)?;
    let mut coefficients = Vec::with_capacity(coeffs.len());
    for c in coeffs {
        if !c.is_integer() {
            return Err(Error::Internal(format!(
                "non-integral coefficient {c} in relation of {:?}",
                p.members
            )));
        }
        coefficients.push(c.to_integer());
    }
    let degree = Int::from(p.members.len()) - coefficients.iter().sum::<Int>();
    Ok(PrimitiveRelation {
        collection: p.members.clone(),
        focus,
        coefficients,
        degree,
    })
}

/// All primitive relations, in the order of [`primitive_collections`].
pub fn primitive_relations(fan: &Fan) -> Result<Vec<PrimitiveRelation>> {
    fan.require_smooth_complete()?;
    primitive_collections(fan)
        .iter()
        .map(|p| primitive_relation(fan, p))
        .collect()
}

/// Class of a primitive relation: `+1` on the collection, `-a_i` on the focus.
pub fn relation_class(fan: &Fan, r: &PrimitiveRelation) -> Result<RelationClass> {
    let c = r.class(fan.num_rays());
    if !c.is_relation_of(fan) {
        return Err(Error::CheckFailed(format!(
            "relation {} does not hold in the lattice",
            r.describe()
        )));
    }
    if c.degree != r.degree {
        return Err(Error::CheckFailed(format!(
            "degree mismatch for {}: {} vs {}",
            r.describe(),
            c.degree,
            r.degree
        )));
    }
    Ok(c)
}

/// Fano criterion: every primitive relation has positive degree.
pub fn is_fano(fan: &Fan) -> Result<bool> {
    Ok(primitive_relations(fan)?.iter().all(|r| r.degree >= Int::one()))
}

/// Rank of the Picard group: number of rays minus dimension.
pub fn picard_number(fan: &Fan) -> usize {
    fan.picard_number()
}

/// Picard number drop from the fan to the divisor of `ray`: the number of
/// order-2 primitive collections containing the ray. Cross-checked against
/// the Picard number of the divisor fan.
pub fn rho_diff(fan: &Fan, ray: usize) -> Result<usize> {
    fan.check_ray_index(ray)?;
    fan.require_smooth_complete()?;
    let count = primitive_collections(fan)
        .iter()
        .filter(|p| p.len() == 2 && p.contains(ray))
        .count();
    let rho_d = if fan.dim() == 1 {
        0
    } else {
        surgery::divisor_fan(fan, ray)?.picard_number()
    };
    let diff = fan.picard_number() as i64 - rho_d as i64;
    if diff != count as i64 {
        return Err(Error::CheckFailed(format!(
            "order-2 count {count} disagrees with Picard difference {diff} at ray {ray}"
        )));
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> Fan {
        Fan::from_i64(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[1, 2], &[0, 2]]).unwrap()
    }

    fn s1() -> Fan {
        surgery::star_subdivide(&p2(), &[0, 1]).unwrap()
    }

    #[test]
    fn p2_collections() {
        let pcs = primitive_collections(&p2());
        assert_eq!(pcs, vec![PrimitiveCollection::new(vec![0, 1, 2])]);
        let r = primitive_relation(&p2(), &pcs[0]).unwrap();
        assert!(r.focus.is_empty());
        assert_eq!(r.degree, Int::from(3));
        let c = relation_class(&p2(), &r).unwrap();
        assert_eq!(c, RelationClass::from_i64(&[1, 1, 1]));
    }

    #[test]
    fn s1_relation() {
        let f = s1();
        let r = primitive_relation(&f, &PrimitiveCollection::new(vec![0, 1])).unwrap();
        assert_eq!(r.focus, vec![3]);
        assert_eq!(r.degree, Int::from(1));
        assert_eq!(relation_class(&f, &r).unwrap(), RelationClass::from_i64(&[1, 1, 0, -1]));
        assert_eq!(r.describe(), "r0+r1=r3");
    }

    #[test]
    fn hirzebruch_two_is_not_fano() {
        let f2 = Fan::from_i64(
            2,
            &[&[1, 0], &[0, 1], &[-1, 2], &[0, -1]],
            &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]],
        )
        .unwrap();
        assert!(!is_fano(&f2).unwrap());
        assert!(is_fano(&s1()).unwrap());
    }

    #[test]
    fn non_collection_rejected() {
        assert!(primitive_relation(&p2(), &PrimitiveCollection::new(vec![0, 1])).is_err());
    }

    #[test]
    fn multiples() {
        let a = RelationClass::from_i64(&[1, -2, 0]);
        assert!(a.scaled(&Int::from(3)).is_positive_multiple_of(&a));
        assert!(!a.scaled(&Int::from(-1)).is_positive_multiple_of(&a));
        assert!(!RelationClass::from_i64(&[1, -1, 0]).is_positive_multiple_of(&a));
    }
}
