use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use torfan::birational::{self, RefinementMap};
use torfan::primitive::{self, PrimitiveCollection, RelationClass};
use torfan::{catalog, enumerate, fvector, io, iso, mori, structure, Error, Fan, Result};

/// Exact computations on smooth complete toric fans.
///
/// FILE arguments take a fan file or `catalog:NAME` for a built-in fan.
#[derive(Parser)]
#[command(name = "torfan", version)]
struct Cli {
    /// Print compact machine-readable JSON instead of the text report.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check smoothness and completeness.
    Validate { file: String },
    /// Primitive collections and their relations.
    Primcoll { file: String },
    /// Whether every primitive relation has positive degree.
    Fano { file: String },
    Picard { file: String },
    /// Picard number of the fan minus that of the divisor of a ray.
    Rhodiff {
        file: String,
        #[arg(long)]
        ray: usize,
    },
    /// Projectivity via the strict convexity LP, with a certificate.
    Projective { file: String },
    /// Whether a relation class spans an extremal ray of the Mori cone.
    Extremal {
        file: String,
        /// JSON array with one integer per ray.
        #[arg(long)]
        class: String,
    },
    /// Decomposes the class of a primitive collection into contractible ones.
    Decompose {
        file: String,
        #[arg(long, value_delimiter = ',')]
        collection: Vec<usize>,
    },
    /// Classifies the invariant divisor of a ray by its order-2 collections.
    Classify {
        file: String,
        #[arg(long)]
        ray: usize,
    },
    /// Looks for an S3-bundle structure.
    S3bundle { file: String },
    /// Flips and blow-downs turning the fan into a P1-bundle over a divisor.
    BasicConstruction {
        file: String,
        #[arg(long)]
        ray: usize,
        /// Write each intermediate fan as a numbered fan file.
        #[arg(long)]
        emit_steps: Option<PathBuf>,
    },
    /// Refinement map from the fan X onto the coarser fan Y.
    Refine { x: String, y: String },
    /// Subdivision type of every subdivided maximal cone of Y.
    ClassifySubdiv { x: String, y: String },
    /// Writes X -> Y as a sequence of star subdivisions of Y.
    Factorize {
        x: String,
        y: String,
        #[arg(long)]
        emit_steps: Option<PathBuf>,
    },
    /// f-vector inequalities.
    Fvector { file: String },
    /// Prints a built-in fan, or lists the names when none is given.
    Catalog { name: Option<String> },
    /// Smooth Fano fans up to lattice isomorphism (dimensions 2 and 3).
    Enumerate {
        #[arg(long)]
        dim: usize,
        /// Coordinate bound for candidate rays.
        #[arg(long)]
        bound: Option<i64>,
    },
    /// Lattice isomorphism, with a witness matrix.
    Iso { a: String, b: String },
    /// Runs the standard checks on every `*.json` fan file in a directory.
    BulkCheck { dir: PathBuf },
}

struct Report {
    value: Value,
    ok: bool,
}

impl Report {
    fn ok(value: Value) -> Self {
        Report { value, ok: true }
    }
}

fn load(spec: &str) -> Result<Fan> {
    match spec.strip_prefix("catalog:") {
        Some(name) => Ok(catalog::catalog(name)?.fan),
        None => io::parse_fan(Path::new(spec)),
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serializes")
}

fn relation_value(r: &primitive::PrimitiveRelation) -> Value {
    let mut v = to_value(r);
    v["relation"] = json!(r.describe());
    v
}

fn parse_class(fan: &Fan, s: &str) -> Result<RelationClass> {
    let v: Vec<serde_json::Number> = serde_json::from_str(s).map_err(|e| Error::Parse(format!("--class: {e}")))?;
    let entries = v
        .iter()
        .map(|n| io::number_to_int(n).ok_or_else(|| Error::Parse(format!("--class: {n} is not an integer"))))
        .collect::<Result<Vec<_>>>()?;
    if entries.len() != fan.num_rays() {
        return Err(Error::Parse(format!(
            "--class has {} entries, the fan has {} rays",
            entries.len(),
            fan.num_rays()
        )));
    }
    Ok(RelationClass::new(entries))
}

fn emit_steps<'a>(dir: &Path, first: &'a Fan, rest: impl Iterator<Item = &'a Fan>) -> Result<Vec<String>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut written = Vec::new();
    for (k, fan) in std::iter::once(first).chain(rest).enumerate() {
        let path = dir.join(format!("step-{k:03}.json"));
        io::serialize_fan(fan, &path)?;
        written.push(path.display().to_string());
    }
    Ok(written)
}

fn refinement(x: &str, y: &str) -> Result<RefinementMap> {
    birational::build_refinement(&load(x)?, &load(y)?)
}

fn subdivided_cones(map: &RefinementMap) -> Vec<usize> {
    (0..map.target.max_cones().len())
        .filter(|&k| {
            let sigma = &map.target.max_cones()[k];
            map.rays_in(sigma).len() > sigma.len()
        })
        .collect()
}

fn run(cmd: Command) -> Result<Report> {
    Ok(match cmd {
        Command::Validate { file } => {
            let fan = load(&file)?;
            let v = fan.validate();
            Report {
                value: json!({"smooth": v.smooth, "complete": v.complete, "defects": v.defects}),
                ok: v.is_ok(),
            }
        }
        Command::Primcoll { file } => {
            let fan = load(&file)?;
            let rels = primitive::primitive_relations(&fan)?;
            Report::ok(json!({"collections": rels.iter().map(relation_value).collect::<Vec<_>>()}))
        }
        Command::Fano { file } => {
            let fan = load(&file)?;
            let rels = primitive::primitive_relations(&fan)?;
            let bad: Vec<Value> = rels
                .iter()
                .filter(|r| r.degree <= 0.into())
                .map(relation_value)
                .collect();
            Report::ok(json!({"fano": bad.is_empty(), "nonpositive_relations": bad}))
        }
        Command::Picard { file } => {
            let fan = load(&file)?;
            fan.require_smooth_complete()?;
            Report::ok(json!({"picard": fan.picard_number()}))
        }
        Command::Rhodiff { file, ray } => {
            let fan = load(&file)?;
            Report::ok(json!({"ray": ray, "rho_diff": primitive::rho_diff(&fan, ray)?}))
        }
        Command::Projective { file } => {
            let fan = load(&file)?;
            let (lp, outcome) = mori::projectivity_certificate(&fan)?;
            let strs = |xs: &[torfan::linalg::Rat]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>();
            match outcome {
                torfan::lp::LpOutcome::Feasible(h) => Report::ok(json!({
                    "projective": true,
                    "support_function": strs(&h),
                    "verified": lp.is_solution(&h),
                })),
                torfan::lp::LpOutcome::Infeasible(y) => Report::ok(json!({
                    "projective": false,
                    "farkas_multipliers": strs(&y),
                    "verified": lp.verify_certificate(&y),
                })),
            }
        }
        Command::Extremal { file, class } => {
            let fan = load(&file)?;
            let c = parse_class(&fan, &class)?;
            let effective = mori::is_effective(&fan, &c)?;
            let extremal = effective && mori::is_extremal(&fan, &c)?;
            Report::ok(json!({"effective": effective, "extremal": extremal}))
        }
        Command::Decompose { file, collection } => {
            let fan = load(&file)?;
            let p = PrimitiveCollection::new(collection);
            let r = primitive::primitive_relation(&fan, &p)?;
            let class = r.class(fan.num_rays());
            let d = mori::decompose_into_contractibles(&fan, &class)?;
            Report {
                ok: d.is_some(),
                value: json!({
                    "relation": relation_value(&r),
                    "contractible": mori::is_contractible(&fan, &p)?,
                    "decomposition": d.as_ref().map(|d| d.terms.iter().map(|t| json!({
                        "relation": t.relation.describe(),
                        "multiplicity": io::int_to_number(&t.multiplicity),
                    })).collect::<Vec<_>>()),
                }),
            }
        }
        Command::Classify { file, ray } => {
            let fan = load(&file)?;
            if !primitive::is_fano(&fan)? {
                return Err(Error::Precondition("fan is not Fano".into()));
            }
            Report::ok(to_value(&structure::classify_divisor_case(&fan, ray)?))
        }
        Command::S3bundle { file } => {
            let fan = load(&file)?;
            let b = structure::detect_s3_bundle(&fan)?;
            Report::ok(json!({
                "s3_bundle": b.as_ref().map(|b| {
                    let mut v = to_value(b);
                    v["base"] = b.base.as_ref().map(io::fan_to_value).unwrap_or(Value::Null);
                    v
                }),
            }))
        }
        Command::BasicConstruction { file, ray, emit_steps: dir } => {
            let fan = load(&file)?;
            let bc = structure::basic_construction(&fan, ray)?;
            let written = match dir {
                Some(d) => emit_steps(&d, &fan, bc.steps.iter().map(|s| &s.fan_after))?,
                None => Vec::new(),
            };
            Report::ok(json!({
                "flips": bc.flips(),
                "blow_downs": bc.blow_downs(),
                "steps": to_value(&bc.steps),
                "bundle": io::fan_to_value(&bc.bundle),
                "base": io::fan_to_value(&bc.base),
                "written": written,
            }))
        }
        Command::Refine { x, y } => {
            let map = refinement(&x, &y)?;
            let puh = if primitive::is_fano(&map.source)? {
                Some(birational::check_puh(&map)?)
            } else {
                None
            };
            let ok = puh.as_ref().map_or(true, |es| es.iter().all(|e| e.ok));
            Report {
                ok,
                value: json!({
                    "new_rays": map.new_rays(),
                    "ray_to_cone": map.ray_to_cone,
                    "cone_to_cone": map.cone_to_cone,
                    "target_ray_in_source": map.target_ray_in_source,
                    "subdivided_cones": subdivided_cones(&map),
                    "picard_bounds": puh.map(|p| to_value(&p)),
                }),
            }
        }
        Command::ClassifySubdiv { x, y } => {
            let map = refinement(&x, &y)?;
            let mut out = Vec::new();
            for k in subdivided_cones(&map) {
                let sigma = map.target.max_cones()[k].clone();
                out.push(to_value(&birational::classify_subdivision(&map, &sigma)?));
            }
            Report::ok(json!({"cones": out}))
        }
        Command::Factorize { x, y, emit_steps: dir } => {
            let map = refinement(&x, &y)?;
            let steps = birational::factorize(&map)?;
            let written = match dir {
                Some(d) => emit_steps(&d, &map.target, steps.iter().map(|s| &s.fan_after))?,
                None => Vec::new(),
            };
            Report::ok(json!({"blow_ups": steps.len(), "steps": to_value(&steps), "written": written}))
        }
        Command::Fvector { file } => {
            let r = fvector::fvector_checks(&load(&file)?)?;
            Report {
                ok: r.all_pass(),
                value: to_value(&r),
            }
        }
        Command::Catalog { name: None } => Report::ok(json!({"names": catalog::names()})),
        Command::Catalog { name: Some(name) } => {
            let e = catalog::catalog(&name)?;
            let verified = e.verify();
            Report {
                ok: verified.is_ok(),
                value: json!({
                    "name": e.name,
                    "expected": to_value(&e.expected),
                    "verified": verified.is_ok(),
                    "error": verified.err().map(|e| e.to_string()),
                    "fan": io::fan_to_value(&e.fan),
                }),
            }
        }
        Command::Enumerate { dim, bound } => {
            let entries = match bound {
                Some(b) => enumerate::enumerate_with_bound(dim, b)?,
                None => enumerate::enumerate_smooth_fano(dim)?,
            };
            let list: Vec<Value> = entries
                .iter()
                .map(|e| json!({"name": e.name, "picard": e.expected.picard, "fan": io::fan_to_value(&e.fan)}))
                .collect();
            Report::ok(json!({"dim": dim, "count": list.len(), "fans": list}))
        }
        Command::Iso { a, b } => {
            let w = iso::lattice_isomorphic(&load(&a)?, &load(&b)?);
            let w = w.map(|m| {
                m.iter()
                    .map(|row| row.iter().map(io::int_to_number).collect::<Vec<_>>())
                    .collect::<Vec<_>>()
            });
            Report::ok(json!({"isomorphic": w.is_some(), "witness": w}))
        }
        Command::BulkCheck { dir } => bulk_check(&dir)?,
    })
}

fn check_one(fan: &Fan) -> Result<(Value, bool)> {
    let v = fan.validate();
    if !v.is_ok() {
        return Ok((json!({"valid": false, "defects": v.defects}), false));
    }
    let fano = primitive::is_fano(fan)?;
    let mut ok = true;
    let mut value = json!({
        "valid": true,
        "dim": fan.dim(),
        "picard": fan.picard_number(),
        "fano": fano,
        "projective": mori::is_projective(fan)?,
    });
    if fano {
        let mut max_rho = 0;
        let mut cases = Vec::new();
        for x in 0..fan.num_rays() {
            let c = structure::classify_divisor_case(fan, x)?;
            max_rho = max_rho.max(c.rho_diff);
            cases.push(to_value(&c.case));
        }
        let f = fvector::fvector_checks(fan)?;
        ok &= max_rho <= 3 && f.all_pass();
        value["max_rho_diff"] = json!(max_rho);
        value["divisor_cases"] = json!(cases);
        value["fvector"] = to_value(&f);
    }
    Ok((value, ok))
}

fn bulk_check(dir: &Path) -> Result<Report> {
    let rd = std::fs::read_dir(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = rd
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut all_ok = true;
    let mut files = Vec::new();
    for p in paths {
        let name = p.display().to_string();
        let (value, ok) = match io::parse_fan(&p).and_then(|f| check_one(&f)) {
            Ok(r) => r,
            Err(e) => (json!({"error": e.to_string()}), false),
        };
        all_ok &= ok;
        files.push(json!({"file": name, "ok": ok, "report": value}));
    }
    Ok(Report {
        ok: all_ok,
        value: json!({"files": files}),
    })
}

/// Indented `key: value` rendering for the text report.
fn render(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                if is_scalar(x) {
                    out.push_str(&format!("{pad}{k}: {}\n", scalar(x)));
                } else {
                    out.push_str(&format!("{pad}{k}:\n"));
                    render(x, indent + 1, out);
                }
            }
        }
        Value::Array(xs) => {
            for x in xs {
                if is_scalar(x) {
                    out.push_str(&format!("{pad}- {}\n", scalar(x)));
                } else {
                    out.push_str(&format!("{pad}-\n"));
                    render(x, indent + 1, out);
                }
            }
        }
        x => out.push_str(&format!("{pad}{}\n", scalar(x))),
    }
}

/// Scalars and flat arrays of scalars fit on one line.
fn is_scalar(v: &Value) -> bool {
    match v {
        Value::Object(_) => false,
        Value::Array(xs) => xs.iter().all(|x| !x.is_object() && !x.is_array())
            || xs.iter().all(|x| x.as_array().is_some_and(|r| r.iter().all(|y| !y.is_object() && !y.is_array()))),
        _ => true,
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(r) => {
            if cli.json {
                println!("{}", r.value);
            } else {
                let mut s = String::new();
                render(&r.value, 0, &mut s);
                print!("{s}");
            }
            if r.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("torfan: {e}");
            if is_failed_check(&e) {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

/// Errors meaning a mathematical check failed on well-formed input; all
/// others are reported as input errors.
fn is_failed_check(e: &Error) -> bool {
    !e.is_input_error() && matches!(e, Error::CheckFailed(_) | Error::Internal(_))
}
