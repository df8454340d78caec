//! Curve classes: effectiveness, contractibility, extremality, projectivity
//! and decompositions into contractible classes.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fan::{mask_of, Fan};
use crate::linalg::{self, Int, Rat};
use crate::lp::{LpOutcome, LpProblem, Relation, VarKind};
use crate::primitive::{self, PrimitiveCollection, PrimitiveRelation, RelationClass};
use crate::surgery::for_each_subset;

fn require_class(fan: &Fan, c: &RelationClass) -> Result<()> {
    if c.entries.len() != fan.num_rays() {
        return Err(Error::structural(
            "class",
            format!("expected {} entries, got {}", fan.num_rays(), c.entries.len()),
        ));
    }
    if !c.is_relation_of(fan) {
        return Err(Error::Precondition("class is not a relation among the rays".into()));
    }
    Ok(())
}

/// Sufficient criterion for effectiveness: the rays with negative entries
/// span a cone. `false` only means the criterion is inconclusive.
pub fn effective_by_criterion(fan: &Fan, c: &RelationClass) -> Result<bool> {
    require_class(fan, c)?;
    Ok(fan.is_face(&c.negative_support()))
}

/// Contractibility of a primitive class: for every cone `F` containing the
/// focus and disjoint from the collection `P`, each `(P - x_i) + F` must be
/// a cone.
pub fn is_contractible(fan: &Fan, p: &PrimitiveCollection) -> Result<bool> {
    let r = primitive::primitive_relation(fan, p)?;
    Ok(contractible_relation(fan, &r))
}

pub(crate) fn contractible_relation(fan: &Fan, r: &PrimitiveRelation) -> bool {
    let pm = mask_of(&r.collection);
    let fm = mask_of(&r.focus);
    fan.faces()
        .iter()
        .filter(|&&f| f & fm == fm && f & pm == 0)
        .all(|&f| {
            r.collection
                .iter()
                .all(|&x| fan.is_face_mask((pm & !(1u128 << x)) | f))
        })
}

/// The projectivity LP: one free variable per ray (zero on the rays of the
/// first maximal cone) and, for every wall `a + b = sum(c_w w)`, the strict
/// convexity constraint `h_a + h_b - sum(c_w h_w) >= 1`. Identical rows are
/// merged.
pub fn projectivity_lp(fan: &Fan) -> Result<LpProblem> {
    let walls = fan.walls()?;
    let mut lp = LpProblem::new();
    let gauge = &fan.max_cones()[0];
    let mut var = vec![None; fan.num_rays()];
    for i in 0..fan.num_rays() {
        if !gauge.contains(&i) {
            var[i] = Some(lp.add_var(format!("h{i}"), VarKind::Free));
        }
    }
    let mut rows: BTreeSet<Vec<(usize, Rat)>> = BTreeSet::new();
    for w in &walls {
        let mut coeff: BTreeMap<usize, Int> = BTreeMap::new();
        *coeff.entry(w.a).or_default() += Int::one();
        *coeff.entry(w.b).or_default() += Int::one();
        for (r, c) in w.rays.iter().zip(&w.coeffs) {
            *coeff.entry(*r).or_default() -= c;
        }
        let row: Vec<(usize, Rat)> = coeff
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .filter_map(|(r, c)| var[r].map(|v| (v, linalg::to_rat(&c))))
            .collect();
        rows.insert(row);
    }
    for row in rows {
        lp.add_constraint(row, Relation::Ge, Rat::one());
    }
    Ok(lp)
}

/// Existence of a strictly convex piecewise-linear support function,
/// decided by exact LP. For complete simplicial fans local strict convexity
/// across every wall implies global strict convexity.
pub fn is_projective(fan: &Fan) -> Result<bool> {
    fan.require_smooth_complete()?;
    Ok(fan.cached_projective(|| {
        projectivity_lp(fan).is_ok_and(|lp| lp.solve().is_feasible())
    }))
}

/// Projectivity with the LP outcome (support function values or an
/// infeasibility certificate).
pub fn projectivity_certificate(fan: &Fan) -> Result<(LpProblem, LpOutcome)> {
    fan.require_smooth_complete()?;
    let lp = projectivity_lp(fan)?;
    let out = lp.solve();
    Ok((lp, out))
}

/// Distinct classes of all primitive relations, with the collection that
/// first produced each one.
pub fn primitive_classes(fan: &Fan) -> Result<Vec<(PrimitiveRelation, RelationClass)>> {
    let mut out: Vec<(PrimitiveRelation, RelationClass)> = Vec::new();
    for r in primitive::primitive_relations(fan)? {
        let c = primitive::relation_class(fan, &r)?;
        if !out.iter().any(|(_, d)| *d == c) {
            out.push((r, c));
        }
    }
    Ok(out)
}

/// Is `c` a nonnegative rational combination of `gens`?
pub fn in_cone(c: &RelationClass, gens: &[&RelationClass]) -> bool {
    let mut lp = LpProblem::new();
    let vars: Vec<usize> = (0..gens.len())
        .map(|j| lp.add_var(format!("l{j}"), VarKind::NonNeg))
        .collect();
    for i in 0..c.entries.len() {
        let row: Vec<(usize, Rat)> = gens
            .iter()
            .zip(&vars)
            .filter(|(g, _)| !g.entries[i].is_zero())
            .map(|(g, &v)| (v, linalg::to_rat(&g.entries[i])))
            .collect();
        if row.is_empty() {
            if !c.entries[i].is_zero() {
                return false;
            }
            continue;
        }
        lp.add_constraint(row, Relation::Eq, linalg::to_rat(&c.entries[i]));
    }
    lp.solve().is_feasible()
}

fn require_projective(fan: &Fan) -> Result<()> {
    if is_projective(fan)? {
        Ok(())
    } else {
        Err(Error::NotProjective)
    }
}

/// True iff `c` is not a nonnegative combination of the primitive classes
/// that are not positive multiples of it.
pub fn is_extremal(fan: &Fan, c: &RelationClass) -> Result<bool> {
    require_projective(fan)?;
    require_class(fan, c)?;
    if c.is_zero() {
        return Ok(false);
    }
    let classes = primitive_classes(fan)?;
    let others: Vec<&RelationClass> = classes
        .iter()
        .map(|(_, g)| g)
        .filter(|g| !g.is_positive_multiple_of(c))
        .collect();
    Ok(!in_cone(c, &others))
}

/// Membership in the cone spanned by all primitive classes.
pub fn is_effective(fan: &Fan, c: &RelationClass) -> Result<bool> {
    require_class(fan, c)?;
    let classes = primitive_classes(fan)?;
    let gens: Vec<&RelationClass> = classes.iter().map(|(_, g)| g).collect();
    Ok(c.is_zero() || in_cone(c, &gens))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecompositionTerm {
    pub relation: PrimitiveRelation,
    pub class: RelationClass,
    #[serde(serialize_with = "crate::io::ser_int")]
    pub multiplicity: Int,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub target: RelationClass,
    pub terms: Vec<DecompositionTerm>,
}

impl Decomposition {
    pub fn sum(&self) -> RelationClass {
        let zero = RelationClass::new(vec![Int::zero(); self.target.entries.len()]);
        self.terms
            .iter()
            .fold(zero, |acc, t| acc.add(&t.class.scaled(&t.multiplicity)))
    }
}

/// Extra multiplicity allowed beyond the absolute degree of the target.
pub const DECOMPOSITION_SLACK: i64 = 4;

/// Writes `c` as a positive integer combination of contractible primitive
/// classes.
///
/// Candidates are tried with the fewest distinct terms first and then
/// lexicographically by class index; the total multiplicity is bounded by
/// `|deg c| + DECOMPOSITION_SLACK`. Returns `None` if the bounded search is
/// exhausted.
pub fn decompose_into_contractibles(fan: &Fan, c: &RelationClass) -> Result<Option<Decomposition>> {
    require_projective(fan)?;
    require_class(fan, c)?;
    if !is_effective(fan, c)? {
        return Err(Error::Precondition("class is not effective".into()));
    }
    let classes: Vec<(PrimitiveRelation, RelationClass)> = primitive_classes(fan)?
        .into_iter()
        .filter(|(r, _)| contractible_relation(fan, r))
        .collect();
    let bound: Int = c.degree.abs() + Int::from(DECOMPOSITION_SLACK);
    let bound: usize = bound.try_into().unwrap_or(usize::MAX);
    for terms in 1..=bound.min(classes.len()) {
        let mut found: Option<Vec<(usize, Int)>> = None;
        for_each_subset(classes.len(), terms, &mut |sel| {
            if found.is_some() {
                return;
            }
            found = solve_terms(c, &classes, sel, bound);
        });
        if let Some(sol) = found {
            let terms = sol
                .into_iter()
                .map(|(j, m)| DecompositionTerm {
                    relation: classes[j].0.clone(),
                    class: classes[j].1.clone(),
                    multiplicity: m,
                })
                .collect();
            let d = Decomposition {
                target: c.clone(),
                terms,
            };
            if d.sum() != *c {
                return Err(Error::Internal("decomposition does not sum to target".into()));
            }
            return Ok(Some(d));
        }
    }
    Ok(None)
}

/// Positive integer multiplicities for the selected classes summing to `c`
/// with total at most `bound`.
fn solve_terms(
    c: &RelationClass,
    classes: &[(PrimitiveRelation, RelationClass)],
    sel: &[usize],
    bound: usize,
) -> Option<Vec<(usize, Int)>> {
    if sel.len() > bound {
        return None;
    }
    let cols: Vec<&[Int]> = sel.iter().map(|&j| classes[j].1.entries.as_slice()).collect();
    if linalg::rank(&cols) == sel.len() {
        let x = linalg::solve(&cols, &c.entries)?;
        if x.iter().any(|v| !v.is_integer() || !v.is_positive()) {
            return None;
        }
        let m: Vec<Int> = x.into_iter().map(|v| v.to_integer()).collect();
        let total: Int = m.iter().sum();
        if total > Int::from(bound) {
            return None;
        }
        return Some(sel.iter().copied().zip(m).collect());
    }
    // Dependent classes: enumerate multiplicity vectors by total.
    let k = sel.len();
    let mut m = vec![1usize; k];
    fn rec(
        pos: usize,
        left: usize,
        m: &mut Vec<usize>,
        check: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if pos == m.len() {
            return check(m);
        }
        for v in 1..=left + 1 {
            m[pos] = v;
            if rec(pos + 1, left + 1 - v, m, check) {
                return true;
            }
        }
        false
    }
    let mut hit: Option<Vec<usize>> = None;
    let mut check = |mm: &[usize]| {
        let mut s = vec![Int::zero(); c.entries.len()];
        for (&j, &mult) in sel.iter().zip(mm) {
            for (x, y) in s.iter_mut().zip(&classes[j].1.entries) {
                *x += y * Int::from(mult);
            }
        }
        if s == c.entries {
            hit = Some(mm.to_vec());
            true
        } else {
            false
        }
    };
    rec(0, bound - k, &mut m, &mut check);
    hit.map(|h| sel.iter().copied().zip(h.into_iter().map(Int::from)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Degree2Kind {
    Contractible,
    A,
    B,
    C,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Degree2Decomposition {
    pub kind: Degree2Kind,
    /// The two degree-one relations whose classes sum to the target; empty
    /// when contractible.
    pub witnesses: Vec<PrimitiveRelation>,
}

fn is_simple_focus(r: &PrimitiveRelation, focus: &[usize], coeffs: &[i64]) -> bool {
    let mut pairs: Vec<(usize, Int)> = r.focus.iter().copied().zip(r.coefficients.iter().cloned()).collect();
    pairs.sort();
    let mut want: Vec<(usize, Int)> = focus.iter().copied().zip(coeffs.iter().map(|&c| Int::from(c))).collect();
    want.sort();
    pairs == want
}

fn same_set(a: &[usize], b: &[usize]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    a == b
}

/// Matches the ordered pair `(r1, r2)` against the three decomposition
/// shapes of a relation `x1 + x2 + x3 = x`.
fn match_shape(members: &[usize], x: usize, r1: &PrimitiveRelation, r2: &PrimitiveRelation) -> Option<Degree2Kind> {
    for &xi in members {
        let rest: Vec<usize> = members.iter().copied().filter(|&m| m != xi).collect();
        // (A) xi + x = y, y + xj + xk = 2x
        if r1.order() == 2 && r1.collection.contains(&xi) && r1.collection.contains(&x) && r1.focus.len() == 1 {
            let y = r1.focus[0];
            if is_simple_focus(r1, &[y], &[1])
                && same_set(&r2.collection, &[y, rest[0], rest[1]])
                && is_simple_focus(r2, &[x], &[2])
            {
                return Some(Degree2Kind::A);
            }
        }
        // (B) xi + w = z, z + xj + xk = w + x
        if r1.order() == 2 && r1.collection.contains(&xi) && r1.focus.len() == 1 {
            let w = if r1.collection[0] == xi { r1.collection[1] } else { r1.collection[0] };
            let z = r1.focus[0];
            if w != x
                && !members.contains(&w)
                && is_simple_focus(r1, &[z], &[1])
                && same_set(&r2.collection, &[z, rest[0], rest[1]])
                && is_simple_focus(r2, &[w, x], &[1, 1])
            {
                return Some(Degree2Kind::B);
            }
        }
        // (C) xi + z + w = 2x, x + xj + xk = z + w
        if r1.order() == 3 && r1.collection.contains(&xi) && is_simple_focus(r1, &[x], &[2]) {
            let zw: Vec<usize> = r1.collection.iter().copied().filter(|&m| m != xi).collect();
            if same_set(&r2.collection, &[x, rest[0], rest[1]]) && is_simple_focus(r2, &zw, &[1, 1]) {
                return Some(Degree2Kind::C);
            }
        }
    }
    None
}

/// Classifies how a degree-two relation `x1 + x2 + x3 = x` on a Fano
/// 4-dimensional fan splits into degree-one relations.
pub fn classify_degree2_decomposition(fan: &Fan, p: &PrimitiveCollection) -> Result<Degree2Decomposition> {
    if fan.dim() != 4 {
        return Err(Error::Precondition("degree-two classification needs dimension 4".into()));
    }
    if !primitive::is_fano(fan)? {
        return Err(Error::Precondition("fan is not Fano".into()));
    }
    let r = primitive::primitive_relation(fan, p)?;
    if r.order() != 3 || r.focus.len() != 1 || !r.coefficients[0].is_one() {
        return Err(Error::Precondition(format!(
            "relation {} is not of the form x1+x2+x3=x",
            r.describe()
        )));
    }
    if contractible_relation(fan, &r) {
        return Ok(Degree2Decomposition {
            kind: Degree2Kind::Contractible,
            witnesses: Vec::new(),
        });
    }
    let x = r.focus[0];
    let target = r.class(fan.num_rays());
    let ones: Vec<(PrimitiveRelation, RelationClass)> = primitive::primitive_relations(fan)?
        .into_iter()
        .filter(|q| q.degree.is_one())
        .map(|q| {
            let c = q.class(fan.num_rays());
            (q, c)
        })
        .collect();
    let mut matches: Vec<(Degree2Kind, Vec<PrimitiveRelation>)> = Vec::new();
    for i in 0..ones.len() {
        for j in i + 1..ones.len() {
            if ones[i].1.add(&ones[j].1) != target {
                continue;
            }
            let (a, b) = (&ones[i].0, &ones[j].0);
            if let Some(k) = match_shape(&r.collection, x, a, b) {
                matches.push((k, vec![a.clone(), b.clone()]));
            } else if let Some(k) = match_shape(&r.collection, x, b, a) {
                matches.push((k, vec![b.clone(), a.clone()]));
            }
        }
    }
    let Some((kind, witnesses)) = matches.first().cloned() else {
        return Err(Error::CheckFailed(format!(
            "no decomposition of {} into two degree-one relations",
            r.describe()
        )));
    };
    if matches.iter().any(|(k, _)| *k != kind) {
        return Err(Error::CheckFailed(format!(
            "decompositions of {} match several shapes",
            r.describe()
        )));
    }
    Ok(Degree2Decomposition { kind, witnesses })
}
