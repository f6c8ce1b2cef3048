//! JSON documents for the kinds of data the tool exchanges.
//!
//! Readers track a JSON pointer so schema errors name the exact location
//! of the offense. Writers produce `serde_json` values whose object keys
//! are sorted (the default map is ordered), so serialized output is
//! byte-identical across runs.
//!
//! Rationals are strings "p/q" with the "/q" omitted when the denominator
//! is one. Matrices are row-major flat arrays of rational strings; their
//! shape is pinned by the source and target piece dimensions. Every
//! document kind carries a versioned "schema" tag on output; on input the
//! tag may be omitted, but a present tag must match.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Map, Value};

use crate::bfunction::RootMultiset;
use crate::koszul::{CohomologyResult, ScanEntry};
use crate::linalg::QMat;
use crate::model::{GradedPiece, ModelError, MonodromicModel, Slope, ValidationReport};
use crate::poly::Polynomial;
use crate::rat::Rat;
use crate::spectra::{GradedJumpSpectrum, Jump, JumpSpectrum};
use crate::subspace::{Flag, Subspace};
use crate::whci::{ClassificationReport, WhciInput};

pub const MODEL_SCHEMA: &str = "hodge-vfilt/v1/model";
pub const SPECTRUM_SCHEMA: &str = "hodge-vfilt/v1/spectrum";
pub const GRADED_SPECTRUM_SCHEMA: &str = "hodge-vfilt/v1/graded-spectrum";
pub const BFUNCTION_SCHEMA: &str = "hodge-vfilt/v1/bfunction";
pub const CI_SCHEMA: &str = "hodge-vfilt/v1/ci";

/// A structural problem in an input document, located by JSON pointer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaError {
    pub pointer: String,
    pub message: String,
}

impl SchemaError {
    pub fn new(pointer: &str, message: impl Into<String>) -> SchemaError {
        let pointer = if pointer.is_empty() { "/".to_string() } else { pointer.to_string() };
        SchemaError { pointer, message: message.into() }
    }
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pointer, self.message)
    }
}

impl std::error::Error for SchemaError {}

pub fn rat_to_string(x: &Rat) -> String {
    crate::rat::format_rat(x)
}

pub fn rat_from_str(text: &str) -> Option<Rat> {
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let num = BigInt::from_str(num.trim()).ok()?;
    let den = BigInt::from_str(den.trim()).ok()?;
    if den <= BigInt::zero() {
        return None;
    }
    Some(Rat::new(num, den))
}

fn as_obj<'a>(v: &'a Value, p: &str) -> Result<&'a Map<String, Value>, SchemaError> {
    v.as_object().ok_or_else(|| SchemaError::new(p, "expected an object"))
}

fn as_arr<'a>(v: &'a Value, p: &str) -> Result<&'a Vec<Value>, SchemaError> {
    v.as_array().ok_or_else(|| SchemaError::new(p, "expected an array"))
}

fn as_str<'a>(v: &'a Value, p: &str) -> Result<&'a str, SchemaError> {
    v.as_str().ok_or_else(|| SchemaError::new(p, "expected a string"))
}

fn as_u64(v: &Value, p: &str) -> Result<u64, SchemaError> {
    v.as_u64().ok_or_else(|| SchemaError::new(p, "expected a non-negative integer"))
}

fn as_i64(v: &Value, p: &str) -> Result<i64, SchemaError> {
    v.as_i64().ok_or_else(|| SchemaError::new(p, "expected an integer"))
}

fn field<'a>(m: &'a Map<String, Value>, p: &str, name: &str) -> Result<&'a Value, SchemaError> {
    m.get(name).ok_or_else(|| SchemaError::new(p, format!("missing field \"{name}\"")))
}

fn rat_at(v: &Value, p: &str) -> Result<Rat, SchemaError> {
    let text = as_str(v, p)?;
    rat_from_str(text)
        .ok_or_else(|| SchemaError::new(p, format!("\"{text}\" is not a rational p/q")))
}

/// Checks the optional "schema" tag: absent is fine, anything present
/// must match the expected kind exactly.
fn check_schema(m: &Map<String, Value>, p: &str, expected: &str) -> Result<(), SchemaError> {
    if let Some(tag) = m.get("schema") {
        let tag = as_str(tag, &format!("{p}/schema"))?;
        if tag != expected {
            return Err(SchemaError::new(
                &format!("{p}/schema"),
                format!("unsupported schema \"{tag}\", expected \"{expected}\""),
            ));
        }
    }
    Ok(())
}

fn matrix_to_values(m: &QMat) -> Vec<Value> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(Value::String(rat_to_string(m.get(i, j))));
        }
    }
    out
}

fn matrix_from_values(v: &Value, p: &str, rows: usize, cols: usize) -> Result<QMat, SchemaError> {
    let entries = as_arr(v, p)?;
    if entries.len() != rows * cols {
        return Err(SchemaError::new(
            p,
            format!("expected {} entries for a {rows} x {cols} matrix, found {}", rows * cols, entries.len()),
        ));
    }
    let mut m = QMat::zero(rows, cols);
    for (n, e) in entries.iter().enumerate() {
        let x = rat_at(e, &format!("{p}/{n}"))?;
        m.set(n / cols, n % cols, x);
    }
    Ok(m)
}

fn flag_to_value(f: &Flag) -> Value {
    let steps: Vec<Value> = f
        .steps()
        .iter()
        .map(|(level, sub)| {
            let basis: Vec<Value> = sub
                .basis()
                .iter()
                .map(|v| Value::Array(v.iter().map(|x| Value::String(rat_to_string(x))).collect()))
                .collect();
            json!([level, basis])
        })
        .collect();
    Value::Array(steps)
}

fn flag_from_value(v: &Value, p: &str, dim: usize) -> Result<Flag, SchemaError> {
    let raw = as_arr(v, p)?;
    let mut steps = Vec::with_capacity(raw.len());
    for (n, step) in raw.iter().enumerate() {
        let sp = format!("{p}/{n}");
        let pair = as_arr(step, &sp)?;
        if pair.len() != 2 {
            return Err(SchemaError::new(&sp, "expected a [level, basis] pair"));
        }
        let level = as_i64(&pair[0], &format!("{sp}/0"))?;
        let rows = as_arr(&pair[1], &format!("{sp}/1"))?;
        let mut vectors = Vec::with_capacity(rows.len());
        for (rn, row) in rows.iter().enumerate() {
            let rp = format!("{sp}/1/{rn}");
            let entries = as_arr(row, &rp)?;
            if entries.len() != dim {
                return Err(SchemaError::new(
                    &rp,
                    format!("basis vector has length {}, expected {dim}", entries.len()),
                ));
            }
            let mut vec = Vec::with_capacity(dim);
            for (en, e) in entries.iter().enumerate() {
                vec.push(rat_at(e, &format!("{rp}/{en}"))?);
            }
            vectors.push(vec);
        }
        steps.push((level, Subspace::from_vectors(dim, vectors)));
    }
    Flag::from_steps(dim, steps)
        .map_err(|_| SchemaError::new(p, "flag steps must be strictly nested with increasing levels"))
}

pub fn model_to_json(m: &MonodromicModel) -> Value {
    let (lo, hi) = m.window();
    let pieces: Vec<Value> = m
        .grades()
        .iter()
        .map(|g| {
            let piece = m.piece(g).expect("grade listed");
            json!({
                "grade": rat_to_string(g),
                "dim": piece.dim,
                "hodge": flag_to_value(&piece.hodge),
                "weight": flag_to_value(&piece.weight),
            })
        })
        .collect();
    let actions = |entries: &BTreeMap<(usize, Rat), QMat>| -> Vec<Value> {
        entries
            .iter()
            .map(|((i, source), mat)| {
                json!({
                    "direction": i + 1,
                    "source": rat_to_string(source),
                    "matrix": matrix_to_values(mat),
                })
            })
            .collect()
    };
    json!({
        "schema": MODEL_SCHEMA,
        "slope": m.slope().coeffs(),
        "window": { "lo": rat_to_string(lo), "hi": rat_to_string(hi) },
        "pieces": pieces,
        "t_actions": actions(m.t_actions()),
        "d_actions": actions(m.d_actions()),
    })
}

pub fn model_from_json(v: &Value) -> Result<MonodromicModel, SchemaError> {
    let root = as_obj(v, "")?;
    check_schema(root, "", MODEL_SCHEMA)?;

    let slope_raw = as_arr(field(root, "", "slope")?, "/slope")?;
    let mut coeffs = Vec::with_capacity(slope_raw.len());
    for (n, c) in slope_raw.iter().enumerate() {
        coeffs.push(as_u64(c, &format!("/slope/{n}"))?);
    }
    let slope = Slope::new(coeffs)
        .map_err(|_| SchemaError::new("/slope", "slope coefficients must be positive and nonempty"))?;

    let window = as_obj(field(root, "", "window")?, "/window")?;
    let lo = rat_at(field(window, "/window", "lo")?, "/window/lo")?;
    let hi = rat_at(field(window, "/window", "hi")?, "/window/hi")?;
    let mut m = MonodromicModel::new(slope, (lo, hi))
        .map_err(|_| SchemaError::new("/window", "window must satisfy lo <= hi"))?;

    let pieces = as_arr(field(root, "", "pieces")?, "/pieces")?;
    for (n, piece) in pieces.iter().enumerate() {
        let pp = format!("/pieces/{n}");
        let po = as_obj(piece, &pp)?;
        let grade = rat_at(field(po, &pp, "grade")?, &format!("{pp}/grade"))?;
        let dim = as_u64(field(po, &pp, "dim")?, &format!("{pp}/dim"))? as usize;
        let hodge = flag_from_value(field(po, &pp, "hodge")?, &format!("{pp}/hodge"), dim)?;
        let weight = flag_from_value(field(po, &pp, "weight")?, &format!("{pp}/weight"), dim)?;
        m.add_piece(grade, GradedPiece::new(dim, hodge, weight)).map_err(|e| {
            let message = match e {
                ModelError::GradeOutsideWindow { grade } => {
                    format!("grade {} falls outside the window", rat_to_string(&grade))
                }
                ModelError::DuplicateGrade { grade } => {
                    format!("grade {} appears twice", rat_to_string(&grade))
                }
                _ => "piece is malformed".to_string(),
            };
            SchemaError::new(&format!("{pp}/grade"), message)
        })?;
    }

    for (name, is_t) in [("t_actions", true), ("d_actions", false)] {
        let list = as_arr(field(root, "", name)?, &format!("/{name}"))?;
        for (n, entry) in list.iter().enumerate() {
            let ep = format!("/{name}/{n}");
            let eo = as_obj(entry, &ep)?;
            let direction =
                as_u64(field(eo, &ep, "direction")?, &format!("{ep}/direction"))? as usize;
            if direction == 0 || direction > m.slope().r() {
                return Err(SchemaError::new(
                    &format!("{ep}/direction"),
                    format!("direction must lie in 1..={}", m.slope().r()),
                ));
            }
            let i = direction - 1;
            let source = rat_at(field(eo, &ep, "source")?, &format!("{ep}/source"))?;
            let step = Rat::from_integer(m.slope().coeff(i).into());
            let target = if is_t { &source + &step } else { &source - &step };
            let (sdim, tdim) = (m.piece_dim(&source), m.piece_dim(&target));
            if m.piece(&source).is_none() || m.piece(&target).is_none() {
                return Err(SchemaError::new(
                    &format!("{ep}/source"),
                    "action endpoints must be stored pieces",
                ));
            }
            let mat =
                matrix_from_values(field(eo, &ep, "matrix")?, &format!("{ep}/matrix"), tdim, sdim)?;
            let stored = if is_t {
                m.set_t_action(i, source, mat)
            } else {
                m.set_d_action(i, source, mat)
            };
            stored.map_err(|_| SchemaError::new(&ep, "action does not fit the model"))?;
        }
    }
    Ok(m)
}

fn spectrum_to_value(s: &JumpSpectrum, tag: bool) -> Value {
    let jumps: Vec<Value> = s
        .jumps()
        .iter()
        .map(|j| {
            json!({
                "index": rat_to_string(&j.index),
                "label": j.labels.clone(),
            })
        })
        .collect();
    let mut out = Map::new();
    if tag {
        out.insert("schema".into(), Value::String(SPECTRUM_SCHEMA.into()));
    }
    out.insert("jumps".into(), Value::Array(jumps));
    if let Some(t) = s.periodic_above() {
        out.insert("periodic_above".into(), Value::String(rat_to_string(t)));
    }
    Value::Object(out)
}

pub fn spectrum_to_json(s: &JumpSpectrum) -> Value {
    spectrum_to_value(s, true)
}

fn spectrum_from_value(v: &Value, p: &str) -> Result<JumpSpectrum, SchemaError> {
    let root = as_obj(v, p)?;
    check_schema(root, p, SPECTRUM_SCHEMA)?;
    let raw = as_arr(field(root, p, "jumps")?, &format!("{p}/jumps"))?;
    let mut jumps = Vec::with_capacity(raw.len());
    for (n, jump) in raw.iter().enumerate() {
        let jp = format!("{p}/jumps/{n}");
        let jo = as_obj(jump, &jp)?;
        let index = rat_at(field(jo, &jp, "index")?, &format!("{jp}/index"))?;
        let labels = match jo.get("label") {
            None | Some(Value::Null) => Vec::new(),
            Some(Value::Array(items)) => items.clone(),
            Some(other) => vec![other.clone()],
        };
        jumps.push(Jump { index, labels });
    }
    let mut s = JumpSpectrum::new(jumps).map_err(|e| {
        SchemaError::new(&format!("{p}/jumps"), format!("jump indices must strictly increase ({e})"))
    })?;
    if let Some(t) = root.get("periodic_above") {
        s = s.with_periodic_above(rat_at(t, &format!("{p}/periodic_above"))?);
    }
    Ok(s)
}

pub fn spectrum_from_json(v: &Value) -> Result<JumpSpectrum, SchemaError> {
    spectrum_from_value(v, "")
}

pub fn graded_spectrum_to_json(s: &GradedJumpSpectrum) -> Value {
    let components: Vec<Value> = s
        .components
        .iter()
        .map(|(beta, spectrum)| {
            json!({
                "beta": beta,
                "spectrum": spectrum_to_value(spectrum, false),
            })
        })
        .collect();
    json!({
        "schema": GRADED_SPECTRUM_SCHEMA,
        "components": components,
    })
}

pub fn graded_spectrum_from_json(v: &Value) -> Result<GradedJumpSpectrum, SchemaError> {
    let root = as_obj(v, "")?;
    check_schema(root, "", GRADED_SPECTRUM_SCHEMA)?;
    let raw = as_arr(field(root, "", "components")?, "/components")?;
    let mut components = Vec::with_capacity(raw.len());
    for (n, comp) in raw.iter().enumerate() {
        let cp = format!("/components/{n}");
        let co = as_obj(comp, &cp)?;
        let beta_raw = as_arr(field(co, &cp, "beta")?, &format!("{cp}/beta"))?;
        let mut beta = Vec::with_capacity(beta_raw.len());
        for (bn, b) in beta_raw.iter().enumerate() {
            beta.push(as_u64(b, &format!("{cp}/beta/{bn}"))?);
        }
        let spectrum = spectrum_from_value(field(co, &cp, "spectrum")?, &format!("{cp}/spectrum"))?;
        components.push((beta, spectrum));
    }
    Ok(GradedJumpSpectrum { components })
}

pub fn roots_to_json(r: &RootMultiset) -> Value {
    let mut roots = Map::new();
    for (root, mult) in r.roots() {
        roots.insert(rat_to_string(root), json!(mult));
    }
    json!({
        "schema": BFUNCTION_SCHEMA,
        "roots": Value::Object(roots),
    })
}

pub fn roots_from_json(v: &Value) -> Result<RootMultiset, SchemaError> {
    let root = as_obj(v, "")?;
    check_schema(root, "", BFUNCTION_SCHEMA)?;
    let raw = as_obj(field(root, "", "roots")?, "/roots")?;
    let mut pairs = Vec::with_capacity(raw.len());
    for (key, mult) in raw {
        let p = format!("/roots/{key}");
        let gamma = rat_from_str(key)
            .ok_or_else(|| SchemaError::new(&p, format!("\"{key}\" is not a rational p/q")))?;
        pairs.push((gamma, as_u64(mult, &p)?));
    }
    RootMultiset::from_pairs(pairs).map_err(|e| SchemaError::new("/roots", e.to_string()))
}

/// Input for the classifier: weights, degrees, and optionally the
/// defining polynomials (with their variable names) to be checked for
/// weighted homogeneity. "n" and "r" are accepted and validated against
/// the array lengths when present.
pub fn whci_input_from_json(v: &Value) -> Result<WhciInput, SchemaError> {
    let root = as_obj(v, "")?;
    check_schema(root, "", CI_SCHEMA)?;
    let weights_raw = as_arr(field(root, "", "weights")?, "/weights")?;
    let mut weights = Vec::with_capacity(weights_raw.len());
    for (n, w) in weights_raw.iter().enumerate() {
        weights.push(as_u64(w, &format!("/weights/{n}"))?);
    }
    let degrees_raw = as_arr(field(root, "", "degrees")?, "/degrees")?;
    let mut degrees = Vec::with_capacity(degrees_raw.len());
    for (n, d) in degrees_raw.iter().enumerate() {
        degrees.push(as_u64(d, &format!("/degrees/{n}"))?);
    }
    if let Some(n) = root.get("n") {
        if as_u64(n, "/n")? as usize != weights.len() {
            return Err(SchemaError::new("/n", "n must equal the number of weights"));
        }
    }
    if let Some(r) = root.get("r") {
        if as_u64(r, "/r")? as usize != degrees.len() {
            return Err(SchemaError::new("/r", "r must equal the number of degrees"));
        }
    }
    let polynomials = match root.get("polynomials") {
        None | Some(Value::Null) => None,
        Some(list) => {
            let items = as_arr(list, "/polynomials")?;
            let vars_raw = as_arr(field(root, "", "variables")?, "/variables")?;
            let mut variables = Vec::with_capacity(vars_raw.len());
            for (n, name) in vars_raw.iter().enumerate() {
                variables.push(as_str(name, &format!("/variables/{n}"))?.to_string());
            }
            let mut polys = Vec::with_capacity(items.len());
            for (n, item) in items.iter().enumerate() {
                let p = format!("/polynomials/{n}");
                let text = as_str(item, &p)?;
                let poly = Polynomial::parse(text, &variables)
                    .map_err(|e| SchemaError::new(&p, e.to_string()))?;
                polys.push(poly);
            }
            Some(polys)
        }
    };
    Ok(WhciInput { weights, degrees, polynomials })
}

fn u64_array(root: &Map<String, Value>, name: &str) -> Result<Vec<u64>, SchemaError> {
    let p = format!("/{name}");
    let raw = as_arr(field(root, "", name)?, &p)?;
    let mut out = Vec::with_capacity(raw.len());
    for (n, x) in raw.iter().enumerate() {
        out.push(as_u64(x, &format!("{p}/{n}"))?);
    }
    Ok(out)
}

/// Input for the monomial order bound: the monomial exponents and the
/// grading data, all arrays of nonnegative integers.
pub struct OrderBoundInput {
    pub alpha: Vec<u64>,
    pub beta: Vec<u64>,
    pub weights: Vec<u64>,
    pub degrees: Vec<u64>,
}

/// Reads `{alpha, beta, weights, degrees}` for the monomial order bound.
pub fn order_bound_input_from_json(v: &Value) -> Result<OrderBoundInput, SchemaError> {
    let root = as_obj(v, "")?;
    Ok(OrderBoundInput {
        alpha: u64_array(root, "alpha")?,
        beta: u64_array(root, "beta")?,
        weights: u64_array(root, "weights")?,
        degrees: u64_array(root, "degrees")?,
    })
}

/// Reads `{weights, variables, polynomials}` for the homogeneity check.
pub fn homog_input_from_json(v: &Value) -> Result<(Vec<u64>, Vec<Polynomial>), SchemaError> {
    let root = as_obj(v, "")?;
    let weights = u64_array(root, "weights")?;
    let vars_raw = as_arr(field(root, "", "variables")?, "/variables")?;
    let mut variables = Vec::with_capacity(vars_raw.len());
    for (n, name) in vars_raw.iter().enumerate() {
        variables.push(as_str(name, &format!("/variables/{n}"))?.to_string());
    }
    let items = as_arr(field(root, "", "polynomials")?, "/polynomials")?;
    let mut polys = Vec::with_capacity(items.len());
    for (n, item) in items.iter().enumerate() {
        let p = format!("/polynomials/{n}");
        let text = as_str(item, &p)?;
        let poly =
            Polynomial::parse(text, &variables).map_err(|e| SchemaError::new(&p, e.to_string()))?;
        polys.push(poly);
    }
    Ok((weights, polys))
}

/// Absent optional fields are omitted rather than serialized as null.
pub fn classification_to_json(r: &ClassificationReport) -> Value {
    let mut out = Map::new();
    out.insert("du_bois".into(), json!(r.du_bois));
    if let Some(v) = &r.exact_minexp {
        out.insert("exact_minexp".into(), Value::String(rat_to_string(v)));
    }
    out.insert("hypotheses_assumed".into(), json!(r.hypotheses_assumed));
    if let Some(k) = r.k {
        out.insert("k".into(), json!(k));
    }
    if let Some(v) = &r.lower_bound {
        out.insert("lower_bound".into(), Value::String(rat_to_string(v)));
    }
    if let Some(v) = &r.upper_bound {
        out.insert("upper_bound".into(), Value::String(rat_to_string(v)));
    }
    out.insert("verdict".into(), Value::String(r.verdict.to_string()));
    Value::Object(out)
}

pub fn validation_to_json(r: &ValidationReport) -> Value {
    let violations: Vec<Value> = r
        .violations
        .iter()
        .map(|v| {
            json!({
                "rule": v.rule.as_str(),
                "grade": rat_to_string(&v.grade),
                "detail": v.detail,
            })
        })
        .collect();
    let unchecked: Vec<Value> = r
        .unchecked
        .iter()
        .map(|u| json!({ "rule": u.rule.as_str(), "grade": rat_to_string(&u.grade) }))
        .collect();
    json!({ "ok": r.ok, "violations": violations, "unchecked": unchecked })
}

pub fn cohomology_to_json(h: &CohomologyResult) -> Value {
    let hodge: Vec<Value> =
        h.hodge.iter().map(|(&(i, p), &dim)| json!([i, p, dim])).collect();
    let weight: Vec<Value> =
        h.weight.iter().map(|(&(i, k), &dim)| json!([i, k, dim])).collect();
    json!({
        "hodge": hodge,
        "hodge_steps": h.hodge_steps,
        "strict": h.strict,
        "total": h.total,
        "weight": weight,
    })
}

pub fn scan_to_json(entries: &[ScanEntry]) -> Value {
    let rows: Vec<Value> = entries
        .iter()
        .map(|e| {
            json!({
                "lambda": rat_to_string(&e.lambda),
                "graded": e.graded.as_str(),
                "cumulative": e.cumulative.as_str(),
            })
        })
        .collect();
    Value::Array(rows)
}
