//! Built-in fans with pinned coordinates and expected invariants.

use std::path::PathBuf;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::birational;
use crate::error::{Error, Result};
use crate::fan::{Cone, Fan, LatticePoint};
use crate::io;
use crate::linalg::{self, Int, Rat};
use crate::primitive;
use crate::surgery;

pub const CATALOG_DIR_VAR: &str = "TORFAN_CATALOG_DIR";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Expected {
    pub picard: usize,
    pub fano: bool,
    pub dim: usize,
    pub notes: String,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub fan: Fan,
    pub expected: Expected,
}

impl CatalogEntry {
    /// Recomputes the invariants and compares them with the pinned record.
    pub fn verify(&self) -> Result<()> {
        if !self.fan.validate().is_ok() {
            return Err(Error::CheckFailed(format!("{}: fan is not smooth and complete", self.name)));
        }
        let got = (self.fan.picard_number(), primitive::is_fano(&self.fan)?, self.fan.dim());
        let want = (self.expected.picard, self.expected.fano, self.expected.dim);
        if got != want {
            return Err(Error::CheckFailed(format!(
                "{}: recomputed (picard, fano, dim) = {got:?}, expected {want:?}",
                self.name
            )));
        }
        Ok(())
    }
}

/// Fixture names built from the seventeen subdivision types.
pub fn subdivision_names() -> Vec<String> {
    (1..=17).map(|k| format!("subdiv-{k}")).collect()
}

/// Every built-in name.
pub fn names() -> Vec<String> {
    let mut v: Vec<String> = [
        "P1", "P2", "P3", "P4", "P5", "P1xP1", "S1", "S2", "S3",
        "PP(O+O+O(1))/P1", "F", "S3xS3xP1", "S3xF", "V4", "Vtilde4",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    v.extend(subdivision_names());
    v.extend(extra_names().iter().map(|s| s.to_string()));
    v.extend(PRODUCTS.iter().map(|s| s.to_string()));
    v
}

/// Additional fixtures used by the test suites.
pub fn extra_names() -> &'static [&'static str] {
    &[
        "F-alt",
        "case-2b",
        "M",
        "hirzebruch-2",
        "nonprojective-3fold",
        "P4-types-2+5",
        "P4-types-2+5+10",
    ]
}

const PRODUCTS: &[&str] = &[
    "P1xP2", "P1xP1xP1", "S1xP1", "S2xP1", "S3xP1", "P1xP3", "P2xP2", "P1xP1xP2",
    "S2xS2", "S3xS2", "S3xS3", "S3xP1xP1", "P1xF", "S3xP2",
];

pub fn projective_space(n: usize) -> Fan {
    let mut rays: Vec<LatticePoint> = (0..n)
        .map(|i| (0..n).map(|j| Int::from((i == j) as i64)).collect())
        .collect();
    rays.push(vec![Int::from(-1); n]);
    let cones: Vec<Cone> = (0..=n)
        .map(|skip| (0..=n).filter(|&i| i != skip).collect())
        .collect();
    Fan::new(n, rays, cones).expect("projective space fan")
}

fn del_pezzo(k: usize) -> Fan {
    let mut f = projective_space(2);
    let centers: [[i64; 4]; 3] = [[1, 0, 0, 1], [0, 1, -1, -1], [-1, -1, 1, 0]];
    for c in centers.iter().take(k) {
        let a = f.ray_index(&[Int::from(c[0]), Int::from(c[1])]).unwrap();
        let b = f.ray_index(&[Int::from(c[2]), Int::from(c[3])]).unwrap();
        f = surgery::star_subdivide(&f, &[a, b]).unwrap();
    }
    f
}

fn pt(v: &[i64]) -> LatticePoint {
    v.iter().map(|&x| Int::from(x)).collect()
}

fn idx(f: &Fan, v: &[i64]) -> usize {
    f.ray_index(&pt(v)).expect("fixture ray present")
}

/// `P(O + O + O(1))` over `P1`: fiber rays `e1, e2, -e1-e2`, base rays `e3`
/// and `-e3 + twist`.
fn p2_bundle_over_p1(twist: &[i64; 3]) -> Fan {
    let rays = vec![
        pt(&[1, 0, 0]),
        pt(&[0, 1, 0]),
        pt(&[-1, -1, 0]),
        pt(&[0, 0, 1]),
        pt(&[twist[0], twist[1], -1]),
    ];
    let mut cones = Vec::new();
    for (a, b) in [(0, 1), (1, 2), (0, 2)] {
        cones.push(vec![a, b, 3]);
        cones.push(vec![a, b, 4]);
    }
    Fan::new(3, rays, cones).expect("bundle fan")
}

/// Blow-up of the bundle along its three invariant sections.
fn f_threefold(twist: &[i64; 3]) -> Fan {
    let mut f = p2_bundle_over_p1(twist);
    for pair in [[[1, 0, 0], [0, 1, 0]], [[0, 1, 0], [-1, -1, 0]], [[1, 0, 0], [-1, -1, 0]]] {
        let a = idx(&f, &pair[0]);
        let b = idx(&f, &pair[1]);
        f = surgery::star_subdivide(&f, &[a, b]).unwrap();
    }
    f
}

/// Face fan of the convex hull of `rays`, which must be simplicial with the
/// origin in its interior: the maximal cones are the `n`-subsets lying on a
/// supporting hyperplane `<u, v> = 1`.
pub fn face_fan(dim: usize, rays: Vec<LatticePoint>) -> Result<Fan> {
    let k = rays.len();
    let mut cones = Vec::new();
    let mut err = None;
    surgery::for_each_subset(k, dim, &mut |s| {
        if err.is_some() {
            return;
        }
        let cols: Vec<&[Int]> = s.iter().map(|&i| rays[i].as_slice()).collect();
        let Some(inv) = linalg::inverse_of_columns(&cols) else { return };
        // u = 1^T A^{-1}
        let u: Vec<Rat> = (0..dim)
            .map(|c| inv.iter().fold(Rat::zero(), |acc, row| acc + &row[c]))
            .collect();
        let mut on_facet = 0;
        for (i, r) in rays.iter().enumerate() {
            let val = u.iter().zip(r).fold(Rat::zero(), |acc, (a, b)| acc + a * Rat::from_integer(b.clone()));
            if val > Rat::one() {
                return;
            }
            if val == Rat::one() && !s.contains(&i) {
                on_facet += 1;
            }
        }
        if on_facet > 0 {
            err = Some(Error::Precondition(format!("face fan is not simplicial at {s:?}")));
            return;
        }
        cones.push(s.to_vec());
    });
    if let Some(e) = err {
        return Err(e);
    }
    Fan::new(dim, rays, cones)
}

fn v4_rays(with_positive_diagonal: bool) -> Vec<LatticePoint> {
    let mut rays = Vec::new();
    for i in 0..4 {
        let mut e = vec![0i64; 4];
        e[i] = 1;
        rays.push(pt(&e));
        e[i] = -1;
        rays.push(pt(&e));
    }
    rays.push(pt(&[-1, -1, -1, -1]));
    if with_positive_diagonal {
        rays.push(pt(&[1, 1, 1, 1]));
    }
    rays
}

/// Fixture for subdivision type `k`: its center list replayed on the cone
/// `<e1, e2, e3, e4>` of `P4`.
pub fn subdivision_fixture(k: u8) -> Result<Fan> {
    Ok(birational::replay_template(&projective_space(4), &[0, 1, 2, 3], k)?.0)
}

fn star_at(f: &Fan, vs: &[&[i64]]) -> Fan {
    let c: Vec<usize> = vs.iter().map(|v| idx(f, v)).collect();
    surgery::star_subdivide(f, &c).expect("fixture center is a cone")
}

/// Replays type 2 on the cone of `P4` missing ray 0, type 10 on the cone
/// missing ray 2 and type 5 on the cone missing ray 1, in that order. Each
/// labeling lists `y1..y4` as indices of `P4` rays, which keep their indices
/// under star subdivision. Every pair of maximal cones of `P4` shares a
/// facet, so the centers spill over into neighbouring cones; the result is
/// smooth and complete but not Fano.
pub fn types_2_5_10_fixture() -> Result<Fan> {
    let plan: [(&[usize], u8); 3] = [(&[1, 2, 3, 4], 2), (&[0, 1, 3, 4], 10), (&[0, 2, 3, 4], 5)];
    let mut f = projective_space(4);
    for (sigma, code) in plan {
        f = birational::replay_template(&f, sigma, code)?.0;
    }
    Ok(f)
}

fn atom(name: &str) -> Option<Fan> {
    Some(match name {
        "P1" | "P2" | "P3" | "P4" | "P5" => projective_space(name[1..].parse().ok()?),
        "S1" => del_pezzo(1),
        "S2" => del_pezzo(2),
        "S3" => del_pezzo(3),
        "F" => f_threefold(&[1, 0, 0]),
        _ => return None,
    })
}

fn build(name: &str) -> Result<(Fan, String)> {
    let note = |s: &str| s.to_string();
    Ok(match name {
        "PP(O+O+O(1))/P1" => (p2_bundle_over_p1(&[1, 0, 0]), note("P2-bundle over P1")),
        "F" => (f_threefold(&[1, 0, 0]), note("S3-bundle over P1, not a product")),
        "F-alt" => {
            // Twist on the second fiber ray, then a shear of the lattice.
            let m = vec![pt(&[1, 0, 0]), pt(&[1, 1, 0]), pt(&[0, 2, 1])];
            (f_threefold(&[0, 1, 0]).transformed(&m)?, note("second presentation of F"))
        }
        "V4" => (face_fan(4, v4_rays(true))?, note("del Pezzo 4-fold")),
        "Vtilde4" => (face_fan(4, v4_rays(false))?, note("pseudo del Pezzo 4-fold")),
        "case-2b" => {
            let f = projective_space(1).product(&projective_space(2));
            (star_at(&f, &[&[1, 0, 0], &[0, 1, 0]]), note("P1xP2 blown up along a fiber line"))
        }
        "M" => (m_fourfold()?, note("one flip in the basic construction at ray 0")),
        "hirzebruch-2" => (
            Fan::from_i64(2, &[&[1, 0], &[0, 1], &[-1, 2], &[0, -1]], &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]])?,
            note("not Fano"),
        ),
        "nonprojective-3fold" => (nonprojective_threefold()?, note("complete, smooth, not projective")),
        "P4-types-2+5" => {
            let f = projective_space(4);
            let f = star_at(&f, &[&[1, 0, 0, 0], &[0, 1, 0, 0]]);
            (star_at(&f, &[&[0, 0, 1, 0], &[0, 0, 0, 1]]), note("type 5 on one cone, type 2 on its neighbours"))
        }
        "P4-types-2+5+10" => (types_2_5_10_fixture()?, note("three subdivision types on distinct cones")),
        _ => {
            if let Some(k) = name.strip_prefix("subdiv-").and_then(|k| k.parse::<u8>().ok()) {
                if (1..=17).contains(&k) {
                    return Ok((subdivision_fixture(k)?, format!("subdivision type {k} of a cone of P4")));
                }
                return Err(Error::UnknownCatalog(name.to_string()));
            }
            let parts: Vec<&str> = name.split('x').collect();
            let mut fans = Vec::with_capacity(parts.len());
            for p in &parts {
                fans.push(atom(p).ok_or_else(|| Error::UnknownCatalog(name.to_string()))?);
            }
            let mut f = fans[0].clone();
            for g in &fans[1..] {
                f = f.product(g);
            }
            (f, if parts.len() > 1 { note("product") } else { String::new() })
        }
    })
}

fn pinned(name: &str) -> Option<(usize, bool)> {
    Some(match name {
        "P1" | "P2" | "P3" | "P4" | "P5" => (1, true),
        "P1xP1" => (2, true),
        "S1" => (2, true),
        "S2" => (3, true),
        "S3" => (4, true),
        "PP(O+O+O(1))/P1" => (2, true),
        "F" | "F-alt" => (5, true),
        "S3xS3xP1" | "S3xF" => (9, true),
        "V4" => (6, true),
        "Vtilde4" => (5, true),
        "case-2b" => (3, true),
        "M" => (4, true),
        "hirzebruch-2" => (2, false),
        "nonprojective-3fold" => (5, false),
        "P4-types-2+5" => (3, true),
        "P4-types-2+5+10" => (7, false),
        "P1xP2" => (2, true),
        "P1xP1xP1" => (3, true),
        "S1xP1" => (3, true),
        "S2xP1" => (4, true),
        "S3xP1" => (5, true),
        "P1xP3" => (2, true),
        "P2xP2" => (2, true),
        "P1xP1xP2" => (3, true),
        "S2xS2" => (6, true),
        "S3xS2" => (7, true),
        "S3xS3" => (8, true),
        "S3xP1xP1" => (6, true),
        "P1xF" => (6, true),
        "S3xP2" => (5, true),
        _ => return subdivision_pin(name),
    })
}

/// Picard number and Fano flag of the subdivision fixtures.
fn subdivision_pin(name: &str) -> Option<(usize, bool)> {
    let k: u8 = name.strip_prefix("subdiv-")?.parse().ok()?;
    let t = birational::template(k)?;
    Some((1 + t.new_rays.len(), true))
}

/// Built-in entry, or a fan file `NAME.json` from the directory named by
/// `TORFAN_CATALOG_DIR` when that file exists.
pub fn catalog(name: &str) -> Result<CatalogEntry> {
    if let Some(dir) = std::env::var_os(CATALOG_DIR_VAR) {
        let path = PathBuf::from(dir).join(format!("{name}.json"));
        if path.exists() {
            let fan = io::parse_fan(&path)?;
            let expected = match pinned(name) {
                Some((picard, fano)) => Expected {
                    picard,
                    fano,
                    dim: fan.dim(),
                    notes: format!("loaded from {}", path.display()),
                },
                None => Expected {
                    picard: fan.picard_number(),
                    fano: fan.validate().is_ok() && primitive::is_fano(&fan)?,
                    dim: fan.dim(),
                    notes: format!("loaded from {}", path.display()),
                },
            };
            return Ok(CatalogEntry {
                name: name.to_string(),
                fan,
                expected,
            });
        }
    }
    let (fan, notes) = build(name)?;
    let (picard, fano) = match pinned(name) {
        Some(p) => p,
        None => {
            let f = fan.validate().is_ok() && primitive::is_fano(&fan)?;
            (fan.picard_number(), f)
        }
    };
    Ok(CatalogEntry {
        name: name.to_string(),
        expected: Expected {
            picard,
            fano,
            dim: fan.dim(),
            notes,
        },
        fan,
    })
}

/// Fano 4-fold with Picard number 4 whose ray `e1` has the opposite ray
/// `-e1`, lies in no other order-2 collection, and lies in exactly one
/// collection of order 3.
fn m_fourfold() -> Result<Fan> {
    let rays = [
        [1, 0, 0, 0],
        [-1, 0, 0, 0],
        [0, 1, 0, 0],
        [0, 0, 1, 0],
        [0, 0, 0, 1],
        [-1, -1, -1, -1],
        [-1, -1, 0, 0],
        [-1, 0, -1, 0],
    ];
    face_fan(4, rays.iter().map(|r| pt(r)).collect())
}

/// Smooth complete 3-fold with eight rays and no strictly convex support
/// function; reached from a projective fan by two flops.
fn nonprojective_threefold() -> Result<Fan> {
    Fan::from_i64(
        3,
        &[
            &[1, 0, 0],
            &[-1, 0, 0],
            &[0, 1, 0],
            &[0, -1, 0],
            &[0, 0, 1],
            &[0, 0, -1],
            &[1, 1, -1],
            &[1, -1, -1],
        ],
        &[
            &[1, 3, 4],
            &[1, 2, 5],
            &[1, 2, 4],
            &[0, 5, 7],
            &[0, 3, 7],
            &[0, 3, 4],
            &[2, 5, 6],
            &[0, 5, 6],
            &[1, 3, 7],
            &[1, 5, 7],
            &[0, 4, 6],
            &[2, 4, 6],
        ],
    )
}
