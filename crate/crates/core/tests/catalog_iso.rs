mod common;

use torfan::catalog;
use torfan::fan::point;
use torfan::linalg::Int;
use torfan::{io, iso, structure, Error, Fan};

#[test]
fn s3_is_the_hexagon() {
    let e = catalog::catalog("S3").unwrap();
    assert_eq!(e.fan.num_rays(), 6);
    assert_eq!(e.fan.max_cones().len(), 6);
    assert_eq!((e.expected.picard, e.expected.fano), (4, true));
}

#[test]
fn f_is_an_s3_bundle_over_p1() {
    let e = catalog::catalog("F").unwrap();
    assert_eq!(e.fan.picard_number(), 5);
    let b = structure::detect_s3_bundle(&e.fan).unwrap().unwrap();
    assert_eq!(b.base.unwrap().num_rays(), 2);
    // F is not the product S3xP1.
    assert!(iso::lattice_isomorphic(&e.fan, &common::fan("S3xP1")).is_none());
}

#[test]
fn unknown_name() {
    assert!(matches!(catalog::catalog("P9x"), Err(Error::UnknownCatalog(_))));
    assert!(matches!(catalog::catalog("subdiv-18"), Err(Error::UnknownCatalog(_))));
}

#[test]
fn two_presentations_of_f() {
    let a = common::fan("F");
    let b = common::fan("F-alt");
    assert_ne!(a, b);
    let m = iso::lattice_isomorphic(&a, &b).expect("isomorphic");
    for r in a.rays() {
        assert!(b.ray_index(&torfan::linalg::int_mat_vec(&m, r)).is_some());
    }
}

#[test]
fn isomorphism_is_an_equivalence() {
    let names = ["P1xP2", "PP(O+O+O(1))/P1", "S1xP1", "S2xP1", "F", "F-alt", "S3xP1", "case-2b"];
    let fans: Vec<Fan> = names.iter().map(|n| common::fan(n)).collect();
    let rel = |i: usize, j: usize| iso::lattice_isomorphic(&fans[i], &fans[j]).is_some();
    for i in 0..fans.len() {
        assert!(rel(i, i), "{}", names[i]);
        for j in 0..fans.len() {
            assert_eq!(rel(i, j), rel(j, i), "{} {}", names[i], names[j]);
            for k in 0..fans.len() {
                if rel(i, j) && rel(j, k) {
                    assert!(rel(i, k));
                }
            }
        }
    }
    // F and F-alt are the only identified pair.
    let pairs = (0..fans.len())
        .flat_map(|i| (i + 1..fans.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| rel(i, j))
        .count();
    assert_eq!(pairs, 1);
}

#[test]
fn different_ray_counts() {
    assert!(iso::lattice_isomorphic(&common::fan("S2"), &common::fan("S1")).is_none());
}

#[test]
fn transformed_and_permuted() {
    let f = common::fan("S3xP1");
    let m: Vec<Vec<Int>> = vec![point(&[1, 2, 0]), point(&[0, 1, 0]), point(&[3, -1, 1])];
    let g = f.transformed(&m).unwrap().permuted(&(0..f.num_rays()).rev().collect::<Vec<_>>());
    assert!(iso::lattice_isomorphic(&f, &g).is_some());
}

#[test]
fn file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for n in ["S3", "V4", "F-alt", "subdiv-17"] {
        let f = common::fan(n);
        let p = dir.path().join("f.json");
        io::serialize_fan(&f, &p).unwrap();
        assert_eq!(io::parse_fan(&p).unwrap(), f, "{n}");
    }
}

#[test]
fn parse_errors() {
    let e = io::parse_fan_str(r#"{"dim": 2, "rays": [[2, 2], [0, 1], [-1, -1]], "max_cones": [[0, 1], [1, 2], [0, 2]]}"#)
        .unwrap_err();
    assert!(matches!(e, Error::NonPrimitiveRay { .. }), "{e}");
    assert!(e.to_string().contains("non-primitive ray"));
    let e = io::parse_fan_str(r#"{"dim": 2, "rays": [[1, 0]]}"#).unwrap_err();
    assert!(e.to_string().contains("max_cones"), "{e}");
    let e = io::parse_fan_str(r#"{"dim": 2, "rays": [], "max_cones": [], "extra": 1}"#).unwrap_err();
    assert!(e.to_string().contains("extra"), "{e}");
    let e = io::parse_fan_str(r#"{"dim": 3, "rays": [[1, 0]], "max_cones": [[0]]}"#).unwrap_err();
    assert!(e.is_input_error());
    let e = io::parse_fan_str(r#"{"dim": 2, "rays": [[1.5, 0]], "max_cones": [[0]]}"#).unwrap_err();
    assert!(matches!(e, Error::Parse(_)));
}

#[test]
fn huge_coordinates_stay_exact() {
    let s = r#"{"dim": 2, "rays": [[1, 0], [123456789012345678901234567890, 1], [-1, -1]], "max_cones": [[0, 1], [1, 2], [0, 2]]}"#;
    if let Ok(f) = io::parse_fan_str(s) {
        let back = io::fan_to_json(&f);
        assert!(back.contains("123456789012345678901234567890"));
    }
}

#[test]
fn serializer_sorts_cone_indices() {
    let f = Fan::from_i64(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[1, 0], &[2, 1], &[2, 0]]).unwrap();
    let v = io::fan_to_value(&f);
    assert_eq!(v["max_cones"][0], serde_json::json!([0, 1]));
}
