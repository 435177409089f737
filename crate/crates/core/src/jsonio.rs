//! Byte-stable JSON interfaces: fan description files, "p/q" rationals,
//! cohomology classes, Novikov-graded series, and class tags.
//!
//! Canonical form: every object is emitted with sorted keys, series terms
//! are ordered by z descending then t-exponent lexicographically, Novikov
//! entries ascend lexicographically, and rationals print in lowest terms
//! as "p" or "p/q". Fan files carry 1-based cone indices; everything
//! internal is 0-based.

use crate::cohomology::CohClass;
use crate::fan::{build_fan, Fan, FanError};
use crate::ifunction::{IFunctionSeries, MirrorMap, NovTPoly};
use crate::linalg::Rat;
use crate::picard::{CurveClass, DivisorClass};
use crate::series::ZSeries;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Deserialize;
use serde_json::{json, Map, Value};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReadFanError {
    /// Malformed JSON or field shapes; the message names the line or
    /// offending field.
    Parse(String),
    /// Structurally well-formed input describing an invalid fan.
    Invalid(FanError),
}

impl fmt::Display for ReadFanError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReadFanError::Parse(m) => write!(f, "cannot parse fan file: {m}"),
            ReadFanError::Invalid(e) => write!(f, "invalid fan: {e}"),
        }
    }
}

impl std::error::Error for ReadFanError {}

#[derive(Deserialize)]
struct FanFile {
    dim: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<i64>>,
    #[serde(default)]
    name: Option<String>,
}

/// Parses a fan description file. Cone indices are 1-based in the file.
/// `fallback_name` is used when the file has no "name" field.
pub fn parse_fan_json(text: &str, fallback_name: Option<&str>) -> Result<Fan, ReadFanError> {
    let file: FanFile =
        serde_json::from_str(text).map_err(|e| ReadFanError::Parse(e.to_string()))?;
    let l = file.rays.len() as i64;
    let mut cones = Vec::with_capacity(file.max_cones.len());
    for (ci, cone) in file.max_cones.iter().enumerate() {
        let mut zero_based = Vec::with_capacity(cone.len());
        for &idx in cone {
            if idx < 1 || idx > l {
                return Err(ReadFanError::Parse(format!(
                    "max_cones[{ci}]: ray index {idx} out of range 1..={l} (indices are 1-based)"
                )));
            }
            zero_based.push((idx - 1) as usize);
        }
        cones.push(zero_based);
    }
    let name = file.name.or_else(|| fallback_name.map(str::to_owned));
    build_fan(file.dim, file.rays, cones, name).map_err(ReadFanError::Invalid)
}

const BUILTIN_FANS: &[(&str, &str)] = &[
    ("p1", include_str!("../fans/p1.json")),
    ("p2", include_str!("../fans/p2.json")),
    ("p3", include_str!("../fans/p3.json")),
    ("p4", include_str!("../fans/p4.json")),
    ("p1xp1", include_str!("../fans/p1xp1.json")),
    ("f2", include_str!("../fans/f2.json")),
];

pub fn builtin_names() -> Vec<&'static str> {
    BUILTIN_FANS.iter().map(|(n, _)| *n).collect()
}

/// The shipped fan library; names match the data files under fans/.
pub fn builtin_fan(name: &str) -> Option<Fan> {
    BUILTIN_FANS.iter().find(|(n, _)| *n == name).map(|(n, text)| {
        parse_fan_json(text, Some(n)).expect("shipped fan files are valid")
    })
}

pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat_from_string(s: &str) -> Result<Rat, String> {
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let numer =
        BigInt::from_str(num_str.trim()).map_err(|e| format!("bad numerator {num_str:?}: {e}"))?;
    let denom = BigInt::from_str(den_str.trim())
        .map_err(|e| format!("bad denominator {den_str:?}: {e}"))?;
    if denom.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Rat::new(numer, denom))
}

/// { "k": ["p/q", ...] } per divisor degree, aligned with the ring's
/// basis monomial listing; all-zero degrees are omitted.
pub fn coh_class_json(class: &CohClass) -> Value {
    let mut obj = Map::new();
    for (d, row) in class.coeffs.iter().enumerate() {
        if row.iter().all(Zero::is_zero) {
            continue;
        }
        obj.insert(
            d.to_string(),
            Value::Array(row.iter().map(|c| Value::String(rat_to_string(c))).collect()),
        );
    }
    Value::Object(obj)
}

/// One Novikov summand: { "beta": [f], "terms": [{ "z", "t_exp",
/// "class" }] } with terms ordered z descending then t_exp ascending.
pub fn zseries_json(beta: &[i64], series: &ZSeries) -> Value {
    let mut keys: Vec<(&(i64, Vec<u32>), &CohClass)> = series.terms().collect();
    keys.sort_by(|a, b| b.0 .0.cmp(&a.0 .0).then_with(|| a.0 .1.cmp(&b.0 .1)));
    let terms: Vec<Value> = keys
        .into_iter()
        .map(|((z, t_exp), class)| {
            json!({
                "z": z,
                "t_exp": t_exp,
                "class": coh_class_json(class),
            })
        })
        .collect();
    json!({ "beta": beta, "terms": terms })
}

/// Series entries alone, ordered by polarization degree then
/// lexicographically by curve class.
pub fn series_entries_json(series: &IFunctionSeries) -> Value {
    let mut entries: Vec<(&Vec<i64>, &ZSeries)> = series.terms.iter().collect();
    let pol = &series.polarization.coords;
    let degree = |f: &[i64]| -> i64 { f.iter().zip(pol).map(|(&a, &b)| a * b).sum() };
    entries.sort_by(|a, b| degree(a.0).cmp(&degree(b.0)).then_with(|| a.0.cmp(b.0)));
    Value::Array(entries.into_iter().map(|(b, s)| zseries_json(b, s)).collect())
}

/// Full wrapped series output: metadata plus one entry per curve class.
pub fn ifunction_series_json(series: &IFunctionSeries, fan: &Fan, basis_cone: usize) -> Value {
    json!({
        "part": series.part.as_str(),
        "fan": fan.name().unwrap_or("unnamed"),
        "basis_cone": basis_cone,
        "polarization": series.polarization.coords,
        "degree_bound": series.degree_bound,
        "t_trunc": series.trunc.t_trunc,
        "z_floor": series.trunc.z_floor,
        "series": series_entries_json(series),
    })
}

/// A Novikov-graded scalar polynomial: [{ "beta", "coeffs": [{ "t_exp",
/// "coeff" }] }], both levels in ascending map order.
pub fn nov_tpoly_json(p: &NovTPoly) -> Value {
    let arr: Vec<Value> = p
        .terms
        .iter()
        .map(|(beta, poly)| {
            let coeffs: Vec<Value> = poly
                .terms()
                .map(|(t_exp, c)| json!({ "t_exp": t_exp, "coeff": rat_to_string(c) }))
                .collect();
            json!({ "beta": beta, "coeffs": coeffs })
        })
        .collect();
    Value::Array(arr)
}

/// Mirror-map components named tau_0, tau_1, ...
pub fn mirror_map_json(map: &MirrorMap) -> Value {
    let mut obj = Map::new();
    for (j, comp) in map.components.iter().enumerate() {
        obj.insert(format!("tau_{j}"), nov_tpoly_json(comp));
    }
    Value::Object(obj)
}

pub fn divisor_class_json(d: &DivisorClass, basis_cone: usize) -> Value {
    json!({ "basis_cone": basis_cone, "coords": d.coords })
}

pub fn curve_class_json(c: &CurveClass, basis_cone: usize) -> Value {
    json!({ "basis_cone": basis_cone, "f": c.f })
}

fn tagged_ints(
    v: &Value,
    field: &str,
    expected_basis_cone: usize,
) -> Result<Vec<i64>, String> {
    let obj = v.as_object().ok_or("expected an object")?;
    let tag = obj
        .get("basis_cone")
        .and_then(Value::as_u64)
        .ok_or("missing or non-integer basis_cone tag")?;
    if tag as usize != expected_basis_cone {
        return Err(format!(
            "basis_cone tag {tag} does not match the requested basis cone {expected_basis_cone}"
        ));
    }
    let arr = obj
        .get(field)
        .and_then(Value::as_array)
        .ok_or_else(|| format!("missing array field {field:?}"))?;
    arr.iter()
        .map(|x| x.as_i64().ok_or_else(|| format!("non-integer entry in {field:?}")))
        .collect()
}

pub fn parse_divisor_class(v: &Value, expected_basis_cone: usize) -> Result<DivisorClass, String> {
    Ok(DivisorClass { coords: tagged_ints(v, "coords", expected_basis_cone)? })
}

pub fn parse_curve_class(v: &Value, expected_basis_cone: usize) -> Result<CurveClass, String> {
    Ok(CurveClass { f: tagged_ints(v, "f", expected_basis_cone)? })
}

/// Canonical text form: pretty-printed with sorted keys and a trailing
/// newline, identical across runs and platforms.
pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}
