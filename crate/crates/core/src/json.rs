//! JSON file formats. Exact values are written as `"p/q"` strings; readers
//! also accept JSON integers. Decimals are accepted only by
//! [`parse_real_form`]. Parse errors carry the path of the offending field,
//! e.g. `generators[1].linear[0][2]`.

use std::path::Path;

use num::BigInt;
use serde_json::{json, Map, Value};

use crate::bieberbach::{AffineMap, BieberbachGroup};
use crate::error::{Error, Result};
use crate::exactlin::{format_rational, parse_rational, Rational, RationalMatrix, SymmetricForm};
use crate::lorentz::{LorentzEmbedding, VerificationReport};
use crate::selberg::SelbergCertificate;
use crate::shapes::RealForm;

fn err(path: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        path: if path.is_empty() { "$".into() } else { path.into() },
        message: message.into(),
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

pub fn read_file(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| err(&path.display().to_string(), e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| err(&path.display().to_string(), format!("malformed JSON: {e}")))
}

fn field<'a>(v: &'a Value, key: &str, path: &str) -> Result<&'a Value> {
    v.as_object()
        .ok_or_else(|| err(path, "expected an object"))?
        .get(key)
        .ok_or_else(|| err(&join(path, key), "missing field"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| err(path, "expected an array"))
}

fn usize_field(v: &Value, key: &str, path: &str) -> Result<usize> {
    let f = field(v, key, path)?;
    f.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| err(&join(path, key), "expected a non-negative integer"))
}

pub fn parse_rational_value(v: &Value, path: &str) -> Result<Rational> {
    match v {
        Value::String(s) => {
            parse_rational(s.trim()).ok_or_else(|| err(path, format!("`{s}` is not an exact rational p/q")))
        }
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(Rational::from_integer(
            n.to_string().parse::<BigInt>().expect("integer literal"),
        )),
        Value::Number(n) => Err(err(path, format!("decimal {n} not allowed here; use \"p/q\""))),
        _ => Err(err(path, "expected a rational string \"p/q\"")),
    }
}

fn parse_real_value(v: &Value, path: &str) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| err(path, "number out of range")),
        Value::String(s) => {
            if let Some(r) = parse_rational(s.trim()) {
                return Ok(crate::exactlin::to_f64(&r));
            }
            s.trim()
                .parse::<f64>()
                .map_err(|_| err(path, format!("`{s}` is not a number")))
        }
        _ => Err(err(path, "expected a number")),
    }
}

pub fn parse_vector(v: &Value, path: &str) -> Result<Vec<Rational>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| parse_rational_value(x, &format!("{path}[{i}]")))
        .collect()
}

pub fn parse_matrix(v: &Value, path: &str) -> Result<RationalMatrix> {
    let rows = array(v, path)?;
    let parsed: Vec<Vec<Rational>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| parse_vector(r, &format!("{path}[{i}]")))
        .collect::<Result<_>>()?;
    let cols = parsed.first().map_or(0, Vec::len);
    if let Some(i) = parsed.iter().position(|r| r.len() != cols) {
        return Err(err(
            &format!("{path}[{i}]"),
            format!("expected {cols} entries, found {}", parsed[i].len()),
        ));
    }
    RationalMatrix::from_rows(parsed).map_err(|e| err(path, e.to_string()))
}

fn square(m: RationalMatrix, n: usize, path: &str) -> Result<RationalMatrix> {
    if m.rows() != n || m.cols() != n {
        return Err(err(
            path,
            format!("expected a {n}×{n} matrix, found {}×{}", m.rows(), m.cols()),
        ));
    }
    Ok(m)
}

pub fn vector_to_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(format_rational(x))).collect())
}

pub fn matrix_to_json(m: &RationalMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| vector_to_json(m.row(i))).collect())
}

/// `{"dim", "name"?, "generators": [{"linear", "translation"}]}`.
pub fn parse_group(v: &Value) -> Result<BieberbachGroup> {
    let dim = usize_field(v, "dim", "")?;
    if dim == 0 {
        return Err(err("dim", "dimension must be at least 1"));
    }
    let name = match v.get("name") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(err("name", "expected a string")),
    };
    let gens = array(field(v, "generators", "")?, "generators")?;
    let mut maps = Vec::with_capacity(gens.len());
    for (i, g) in gens.iter().enumerate() {
        let base = format!("generators[{i}]");
        let lpath = format!("{base}.linear");
        let linear = square(parse_matrix(field(g, "linear", &base)?, &lpath)?, dim, &lpath)?;
        let tpath = format!("{base}.translation");
        let translation = parse_vector(field(g, "translation", &base)?, &tpath)?;
        if translation.len() != dim {
            return Err(err(
                &tpath,
                format!("expected {dim} entries, found {}", translation.len()),
            ));
        }
        maps.push(AffineMap::new(linear, translation).map_err(|e| err(&lpath, e.to_string()))?);
    }
    BieberbachGroup::new(dim, maps, name).map_err(|e| err("generators", e.to_string()))
}

pub fn group_to_json(g: &BieberbachGroup) -> Value {
    let gens: Vec<Value> = g
        .generators()
        .iter()
        .map(|m| json!({"linear": matrix_to_json(m.linear()), "translation": vector_to_json(m.translation())}))
        .collect();
    let mut obj = Map::new();
    obj.insert("dim".into(), json!(g.dim()));
    if let Some(name) = g.name() {
        obj.insert("name".into(), json!(name));
    }
    obj.insert("generators".into(), Value::Array(gens));
    Value::Object(obj)
}

/// `{"form": [[...]]}` with exact entries.
pub fn parse_form(v: &Value) -> Result<SymmetricForm> {
    let m = parse_matrix(field(v, "form", "")?, "form")?;
    let n = m.rows();
    let m = square(m, n, "form")?;
    SymmetricForm::new(m).map_err(|e| err("form", e.to_string()))
}

/// `{"form": [[...]]}` with decimal or exact entries.
pub fn parse_real_form(v: &Value) -> Result<RealForm> {
    let rows = array(field(v, "form", "")?, "form")?;
    let n = rows.len();
    let mut entries = Vec::with_capacity(n * n);
    for (i, r) in rows.iter().enumerate() {
        let p = format!("form[{i}]");
        let r = array(r, &p)?;
        if r.len() != n {
            return Err(err(&p, format!("expected {n} entries, found {}", r.len())));
        }
        for (j, x) in r.iter().enumerate() {
            entries.push(parse_real_value(x, &format!("{p}[{j}]"))?);
        }
    }
    RealForm::new(n, entries).map_err(|e| err("form", e.to_string()))
}

pub fn form_to_json(f: &SymmetricForm) -> Value {
    json!({ "form": matrix_to_json(f.matrix()) })
}

/// `{"n", "generators": [matrix, ...]}` for the selberg inputs.
pub fn parse_matrix_list(v: &Value) -> Result<(usize, Vec<RationalMatrix>)> {
    let n = usize_field(v, "n", "")?;
    let gens = array(field(v, "generators", "")?, "generators")?;
    let mats = gens
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let p = format!("generators[{i}]");
            square(parse_matrix(g, &p)?, n, &p)
        })
        .collect::<Result<_>>()?;
    Ok((n, mats))
}

pub fn embedding_to_json(e: &LorentzEmbedding) -> Value {
    json!({
        "n": e.model.n(),
        "model_form": matrix_to_json(e.model.model_form().matrix()),
        "preserved_form": matrix_to_json(e.preserved_form.matrix()),
        "v_inf": vector_to_json(e.model.v_inf()),
        "v_0": vector_to_json(e.model.v_0()),
        "scale": e.scale.to_string(),
        "integral": e.is_integral(),
        "images": e.images.iter().map(matrix_to_json).collect::<Vec<_>>(),
    })
}

pub fn report_to_json(r: &VerificationReport) -> Value {
    serde_json::to_value(r).expect("report serializes")
}

pub fn certificate_to_json(c: &SelbergCertificate) -> Value {
    let bad: Map<String, Value> = c
        .bad_primes
        .iter()
        .map(|(p, reasons)| (p.to_string(), serde_json::to_value(reasons).expect("reasons serialize")))
        .collect();
    json!({
        "n": c.n,
        "prime": c.prime,
        "torsion_polynomials": c.torsion_polys.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "bad_primes": bad,
        "residues": serde_json::to_value(&c.residue_evidence).expect("evidence serializes"),
    })
}
