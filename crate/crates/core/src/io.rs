//! JSON fan files: `{"dim": n, "rays": [[...], ...], "max_cones": [[...], ...]}`.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};
use serde_json::Number;

use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::linalg::Int;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FanFile {
    dim: usize,
    rays: Vec<Vec<Number>>,
    max_cones: Vec<Vec<usize>>,
}

pub fn int_to_number(x: &Int) -> Number {
    Number::from_str(&x.to_string()).expect("integers are valid JSON numbers")
}

pub fn number_to_int(n: &Number) -> Option<Int> {
    Int::from_str(&n.to_string()).ok()
}

pub(crate) fn ser_int<S: Serializer>(x: &Int, s: S) -> std::result::Result<S::Ok, S::Error> {
    int_to_number(x).serialize(s)
}

pub(crate) fn ser_ints<S: Serializer>(xs: &[Int], s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<Number> = xs.iter().map(int_to_number).collect();
    v.serialize(s)
}

pub(crate) fn ser_points<S: Serializer>(xs: &[Vec<Int>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<Vec<Number>> = xs.iter().map(|p| p.iter().map(int_to_number).collect()).collect();
    v.serialize(s)
}

pub fn fan_to_value(fan: &Fan) -> serde_json::Value {
    let file = FanFile {
        dim: fan.dim(),
        rays: fan
            .rays()
            .iter()
            .map(|r| r.iter().map(int_to_number).collect())
            .collect(),
        max_cones: fan.max_cones().to_vec(),
    };
    serde_json::to_value(file).expect("fan serializes")
}

pub fn fan_to_json(fan: &Fan) -> String {
    serde_json::to_string(&fan_to_value(fan)).expect("fan serializes")
}

pub fn parse_fan_str(s: &str) -> Result<Fan> {
    let file: FanFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    let mut rays = Vec::with_capacity(file.rays.len());
    for (i, r) in file.rays.iter().enumerate() {
        let mut p = Vec::with_capacity(r.len());
        for x in r {
            p.push(number_to_int(x).ok_or_else(|| {
                Error::Parse(format!("rays[{i}]: coordinate {x} is not an integer"))
            })?);
        }
        rays.push(p);
    }
    Fan::new(file.dim, rays, file.max_cones)
}

pub fn parse_fan(path: &Path) -> Result<Fan> {
    let s = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_fan_str(&s)
}

pub fn serialize_fan(fan: &Fan, path: &Path) -> Result<()> {
    std::fs::write(path, fan_to_json(fan) + "\n")
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let f = Fan::from_i64(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[1, 2], &[0, 2]]).unwrap();
        let g = parse_fan_str(&fan_to_json(&f)).unwrap();
        assert_eq!(f, g);
        assert_eq!(g.rays(), f.rays());
    }

    #[test]
    fn big_coordinates_survive() {
        let s = r#"{"dim":2,"rays":[[1,0],[123456789012345678901234567890,1]],"max_cones":[[0,1]]}"#;
        let f = parse_fan_str(s).unwrap();
        assert_eq!(f.ray(1)[0].to_string(), "123456789012345678901234567890");
        assert!(fan_to_json(&f).contains("123456789012345678901234567890"));
    }

    #[test]
    fn errors() {
        let e = parse_fan_str(r#"{"dim":2,"rays":[[2,2],[0,1]],"max_cones":[[0,1]]}"#).unwrap_err();
        assert!(e.to_string().contains("non-primitive ray"));
        let e = parse_fan_str(r#"{"dim":2,"rays":[[1,0],[0,1]]}"#).unwrap_err();
        assert!(e.to_string().contains("max_cones"));
        let e = parse_fan_str(r#"{"dim":2,"rays":[[1,0],[0,1]],"max_cones":[[0,1]],"x":1}"#).unwrap_err();
        assert!(matches!(e, Error::Parse(_)));
        let e = parse_fan_str(r#"{"dim":2,"rays":[[1.5,0],[0,1]],"max_cones":[[0,1]]}"#).unwrap_err();
        assert!(matches!(e, Error::Parse(_)));
    }
}
