//! Acceptance suite: one PASS/FAIL line per criterion, with a runtime
//! budget where one is set. Exits non-zero when any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::{brute_primitive_collections, brute_relation, class_i128, FacetOracle};
use torfan::birational::{self, build_refinement};
use torfan::catalog::{self, projective_space};
use torfan::primitive::{self, RelationClass};
use torfan::{enumerate, fvector, iso, mori, structure, surgery, Fan};

type Outcome = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn c1_surfaces() -> Outcome {
    let found = enumerate::enumerate_smooth_fano(2).map_err(|e| e.to_string())?;
    ensure!(found.len() == 5, "expected 5 classes, got {}", found.len());
    let expected = ["P2", "P1xP1", "S1", "S2", "S3"];
    let mut matched = BTreeSet::new();
    for e in &found {
        let hits: Vec<&str> = expected
            .iter()
            .copied()
            .filter(|n| iso::lattice_isomorphic(&common::fan(n), &e.fan).is_some())
            .collect();
        ensure!(hits.len() == 1, "class {} matches {:?}", e.name, hits);
        ensure!(e.fan.picard_number() <= 4, "class {} has picard {}", e.name, e.fan.picard_number());
        matched.insert(hits[0]);
    }
    ensure!(matched.len() == 5, "classes cover only {:?}", matched);
    Ok("5 classes: P2, P1xP1, S1, S2, S3".into())
}

fn c2_structure_bound() -> Outcome {
    let mut rays = 0;
    for (name, f) in common::fano_fans() {
        if !(2..=5).contains(&f.dim()) {
            continue;
        }
        for x in 0..f.num_rays() {
            let d = primitive::rho_diff(&f, x).map_err(|e| format!("{name}: {e}"))?;
            ensure!(d <= 3, "{name}: rho_diff at ray {x} is {d}");
            rays += 1;
        }
    }
    let s3 = common::fan("S3");
    for x in 0..s3.num_rays() {
        let d = primitive::rho_diff(&s3, x).map_err(|e| e.to_string())?;
        ensure!(d == 3, "S3: rho_diff at ray {x} is {d}");
    }
    let b = structure::detect_s3_bundle(&s3).map_err(|e| e.to_string())?;
    ensure!(b.is_some(), "no S3-bundle structure found on S3");
    Ok(format!("{rays} rays checked, S3 gives 3 everywhere"))
}

fn c3_degree_one_extremal() -> Outcome {
    let mut deg1 = 0;
    let mut compared = 0;
    for (name, f) in common::fano_fans() {
        let rels = primitive::primitive_relations(&f).map_err(|e| e.to_string())?;
        let classes: Vec<RelationClass> = rels.iter().map(|r| r.class(f.num_rays())).collect();
        for (r, c) in rels.iter().zip(&classes) {
            if r.degree == 1.into() {
                let ext = mori::is_extremal(&f, c).map_err(|e| format!("{name}: {e}"))?;
                ensure!(ext, "{name}: degree-one relation {} is not extremal", r.describe());
                deg1 += 1;
            }
        }
    }
    for (name, f) in common::all_fans() {
        if f.dim() > 4 || !f.validate().is_ok() || !mori::is_projective(&f).map_err(|e| e.to_string())? {
            continue;
        }
        let rels = primitive::primitive_relations(&f).map_err(|e| e.to_string())?;
        let gens: Vec<Vec<i128>> = rels.iter().map(|r| class_i128(&r.class(f.num_rays()))).collect();
        let oracle = FacetOracle::new(&gens);
        for (r, g) in rels.iter().zip(&gens) {
            let lp = mori::is_extremal(&f, &r.class(f.num_rays())).map_err(|e| e.to_string())?;
            let brute = oracle.extremal(g);
            ensure!(lp == brute, "{name}: {} LP says {lp}, facet enumeration says {brute}", r.describe());
            compared += 1;
        }
    }
    Ok(format!("{deg1} degree-one classes extremal, {compared} classes agree with facet enumeration"))
}

fn c4_relations_property() -> Outcome {
    let mut pairs = 0;
    for (name, f) in common::fano_fans() {
        let rays = common::rays_i128(&f);
        // Order-2 relations x + y = z with a single coefficient-one focus.
        let mut rels: Vec<([usize; 2], usize)> = Vec::new();
        for p in brute_primitive_collections(&f) {
            if p.len() != 2 {
                continue;
            }
            let (focus, coeffs) = brute_relation(&f, &p);
            if focus.len() == 1 && coeffs == [1] {
                rels.push(([p[0], p[1]], focus[0]));
            }
        }
        for (i, &(a, z)) in rels.iter().enumerate() {
            for &(b, v) in &rels[i + 1..] {
                for x in a {
                    if !b.contains(&x) {
                        continue;
                    }
                    let y = if a[0] == x { a[1] } else { a[0] };
                    let w = if b[0] == x { b[1] } else { b[0] };
                    let _ = z;
                    let w_ok = (0..f.dim()).all(|k| rays[w][k] == -rays[x][k] - rays[y][k]);
                    let v_ok = (0..f.dim()).all(|k| rays[v][k] == -rays[y][k]);
                    ensure!(w_ok && v_ok, "{name}: relations through ray {x} with partners {y}, {w} violate the constraint");
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!("{pairs} pairs of relations sharing a ray, no violation"))
}

fn c5_dim5_maximizers() -> Outcome {
    for name in ["S3xS3xP1", "S3xF"] {
        let f = common::fan(name);
        ensure!(primitive::is_fano(&f).map_err(|e| e.to_string())?, "{name} is not Fano");
        ensure!(f.picard_number() == 9, "{name}: picard {}", f.picard_number());
        let r = fvector::fvector_checks(&f).map_err(|e| e.to_string())?;
        ensure!(r.ds5 == Some(true), "{name}: Dehn-Sommerville {:?}", r.ds5);
        ensure!(r.batyrev == Some(true), "{name}: 12 f_(n-3) >= (3n-4) f_(n-2) gives {:?}", r.batyrev);
        ensure!(r.spade == Some(true), "{name}: 7 f_1 <= 45 (f_0 - 2) gives {:?}", r.spade);
        ensure!(r.all_pass(), "{name}: {r:?}");
    }
    Ok("both Fano with picard 9, all f-vector checks pass".into())
}

fn c6_subdivision_types() -> Outcome {
    let p4 = projective_space(4);
    for k in 1..=17u8 {
        let src = catalog::subdivision_fixture(k).map_err(|e| e.to_string())?;
        let map = build_refinement(&src, &p4).map_err(|e| e.to_string())?;
        let rep = birational::classify_subdivision(&map, &[0, 1, 2, 3]).map_err(|e| format!("type {k}: {e}"))?;
        ensure!(rep.type_code == k, "fixture {k} classified as type {}", rep.type_code);
        let t = birational::template(k).expect("template");
        let mut want: Vec<String> = t.relations.iter().map(|s| s.to_string()).collect();
        let mut got = rep.relations.clone();
        want.sort();
        got.sort();
        ensure!(got == want, "type {k}: relations {got:?}, expected {want:?}");
        if (14..=17).contains(&k) {
            ensure!(iso::lattice_isomorphic(&map.target, &p4).is_some(), "type {k}: target is not P4");
        }
    }
    Ok("17 fixtures classify to their own type".into())
}

fn c7_factorization() -> Outcome {
    let src = catalog::types_2_5_10_fixture().map_err(|e| format!("fixture: {e}"))?;
    let p4 = projective_space(4);
    let map = build_refinement(&src, &p4).map_err(|e| e.to_string())?;
    let steps = birational::factorize(&map).map_err(|e| format!("factorize: {e}"))?;
    ensure!(steps.len() == map.new_rays().len(), "{} blow-ups for {} new rays", steps.len(), map.new_rays().len());
    for (i, s) in steps.iter().enumerate() {
        ensure!(s.fan_after.validate().is_ok(), "step {i} is not smooth and complete");
    }
    ensure!(steps.last().map_or(false, |s| s.fan_after == src), "final fan differs from the source");
    Ok(format!("{} blow-ups", steps.len()))
}

/// `x` and `-x` form the only primitive collection through either, and
/// every maximal cone contains exactly one of them.
fn verify_p1_bundle(f: &Fan, xv: &[torfan::linalg::Int]) -> std::result::Result<(), String> {
    ensure!(f.validate().is_ok(), "bundle is not smooth and complete");
    ensure!(mori::is_projective(f).map_err(|e| e.to_string())?, "bundle is not projective");
    let neg: Vec<_> = xv.iter().map(|c| -c).collect();
    let x = f.ray_index(xv).ok_or("x missing")?;
    let mx = f.ray_index(&neg).ok_or("-x missing")?;
    for p in brute_primitive_collections(f) {
        if p.contains(&x) || p.contains(&mx) {
            ensure!(p == vec![x.min(mx), x.max(mx)], "extra primitive collection {p:?} through x or -x");
        }
    }
    for c in f.max_cones() {
        ensure!(c.contains(&x) != c.contains(&mx), "cone {c:?} does not contain exactly one of x, -x");
    }
    Ok(())
}

fn c8_basic_construction() -> Outcome {
    let mut out = Vec::new();
    for (name, want) in [("V4", 6), ("Vtilde4", 3)] {
        let f = common::fan(name);
        let bc = structure::basic_construction(&f, 0).map_err(|e| format!("{name}: {e}"))?;
        ensure!(
            bc.flips() == want,
            "discrepancy: {name} gives {} flips, expected {want}; ray list {:?}",
            bc.flips(),
            f.rays()
        );
        verify_p1_bundle(&bc.bundle, f.ray(0)).map_err(|e| format!("{name}: {e}"))?;
        out.push(format!("{name} {} flips", bc.flips()));
    }
    Ok(out.join(", "))
}

/// Centers `c` among the neighbours of `ray` with `sum(c) = ray` from which
/// the fan is a star subdivision.
fn valid_centers(g: &Fan, ray: usize) -> Vec<Vec<usize>> {
    let nbrs = g.neighbors(ray);
    let mut out = Vec::new();
    for size in 2..=g.dim().min(nbrs.len()) {
        surgery::for_each_subset(nbrs.len(), size, &mut |sel| {
            let c: Vec<usize> = sel.iter().map(|&j| nbrs[j]).collect();
            if g.sum_of(&c) == *g.ray(ray) && surgery::blow_down_onto(g, ray, &c).is_ok() {
                out.push(c);
            }
        });
    }
    out
}

/// A center is eligible when it is the only cone whose star subdivision
/// produces the subdivided fan; otherwise the blow-down of the new ray is
/// not unique and only the blow-down onto the given center is checked.
fn c9_surgery_round_trip() -> Outcome {
    let mut eligible = 0;
    let mut ambiguous = 0;
    for (name, f) in common::all_fans() {
        if !f.validate().is_ok() {
            continue;
        }
        let mut faces: Vec<u128> = f.faces().iter().copied().filter(|m| m.count_ones() >= 2).collect();
        faces.sort_unstable();
        for m in faces {
            let tau = torfan::fan::indices_of(m);
            let g = surgery::star_subdivide(&f, &tau).map_err(|e| format!("{name} {tau:?}: {e}"))?;
            ensure!(g.validate().is_ok(), "{name}: subdividing {tau:?} breaks smoothness or completeness");
            ensure!(g.num_rays() == f.num_rays() + 1, "{name}: f_0 did not grow by one at {tau:?}");
            let v = g.num_rays() - 1;
            let centers = valid_centers(&g, v);
            ensure!(centers.contains(&tau), "{name}: {tau:?} is not recognised as a center");
            if centers.len() == 1 {
                let (back, center) = surgery::blow_down(&g, v).map_err(|e| format!("{name} {tau:?}: {e}"))?;
                ensure!(back == f, "{name}: blowing down after subdividing {tau:?} changes the fan");
                ensure!(center == tau, "{name}: recovered center {center:?}, expected {tau:?}");
                eligible += 1;
            } else {
                let (back, _) = surgery::blow_down_onto(&g, v, &tau).map_err(|e| format!("{name} {tau:?}: {e}"))?;
                ensure!(back == f, "{name}: blowing down onto {tau:?} changes the fan");
                ambiguous += 1;
            }
        }
    }
    Ok(format!(
        "{eligible} eligible centers round-trip; {ambiguous} centers share their subdivision with another center and round-trip through the given center"
    ))
}

fn c10_oracle_equivalence() -> Outcome {
    let mut fans = 0;
    for (name, f) in common::all_fans() {
        if f.num_rays() > 14 {
            continue;
        }
        let got: BTreeSet<Vec<usize>> = primitive::primitive_collections(&f).into_iter().map(|p| p.members).collect();
        let want = brute_primitive_collections(&f);
        ensure!(got == want, "{name}: primitive collections differ from the subset scan");
        fans += 1;
    }
    Ok(format!("{fans} fans with at most 14 rays"))
}

fn main() {
    let criteria: [(&str, Option<u64>, fn() -> Outcome); 10] = [
        ("dimension-2 enumeration gives the five del Pezzo classes", Some(10), c1_surfaces),
        ("rho_diff in [0, 3] on catalog Fano fans, S3 gives 3", Some(5), c2_structure_bound),
        ("degree-one classes are extremal, LP agrees with facet enumeration", Some(30), c3_degree_one_extremal),
        ("two order-2 relations through x force w = -x-y, v = -y", None, c4_relations_property),
        ("S3xS3xP1 and S3xF: Fano, picard 9, f-vector checks", Some(10), c5_dim5_maximizers),
        ("seventeen subdivision fixtures classify to their own type", Some(10), c6_subdivision_types),
        ("factorization of a types 2+5+10 fixture on P4", None, c7_factorization),
        ("basic construction: V4 six flips, Vtilde4 three flips", Some(30), c8_basic_construction),
        ("star subdivision and blow-down round trip", None, c9_surgery_round_trip),
        ("primitive collections match the subset scan", Some(60), c10_oracle_equivalence),
    ];
    let mut failed = 0;
    for (i, (what, budget, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = f();
        let dt = t.elapsed();
        let over = budget.is_some_and(|b| dt > Duration::from_secs(b));
        let budget_s = budget.map_or("none".to_string(), |b| format!("{b} s"));
        match r {
            Ok(msg) if !over => println!("PASS {:>2} {what}: {msg} [{:.2} s, budget {budget_s}]", i + 1, dt.as_secs_f64()),
            Ok(msg) => {
                failed += 1;
                println!("FAIL {:>2} {what}: over budget, {msg} [{:.2} s, budget {budget_s}]", i + 1, dt.as_secs_f64());
            }
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {what}: {e} [{:.2} s, budget {budget_s}]", i + 1, dt.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
