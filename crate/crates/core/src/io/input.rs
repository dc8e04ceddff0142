//! Job files: a single JSON document describing a fan or a decorated web.
//!
//! Every rational is either a JSON integer or a string such as `"3/2"`.
//! Floating point literals are refused.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Pow};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::fan::Ray;
use crate::lattice::{parse_rational, LatticeVec2, RatVec2, Rational};
use crate::web::{UserEdge, UserRay, UserVertex, UserWeb};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{path}: {message}")]
pub struct ParseError {
    pub path: String,
    pub message: String,
}

impl ParseError {
    fn new(path: &str, message: impl Into<String>) -> Self {
        ParseError {
            path: path.to_string(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Fan,
    Web,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Fan => "fan",
            Mode::Web => "web",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FanInput {
    pub rays: Vec<Ray>,
    pub triangles: Vec<[String; 3]>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BasepointSpec {
    pub triangle: Option<usize>,
    pub vertex: Option<String>,
    pub mu: Option<RatVec2>,
    pub lambda: Option<RatVec2>,
    pub nu3: Option<Rational>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Flags {
    pub allow_non_kaehler: bool,
    pub require_closed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    Fan {
        fan: FanInput,
        omega: BTreeMap<String, Rational>,
        f: BTreeMap<String, Rational>,
    },
    Web(UserWeb),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobSpec {
    pub payload: Payload,
    pub basepoint: BasepointSpec,
    pub flags: Flags,
}

impl JobSpec {
    pub fn mode(&self) -> Mode {
        match self.payload {
            Payload::Fan { .. } => Mode::Fan,
            Payload::Web(_) => Mode::Web,
        }
    }

    /// Serialises back to the input schema.
    pub fn to_json(&self) -> Value {
        let mut doc = Map::new();
        doc.insert("mode".into(), json!(self.mode().to_string()));
        match &self.payload {
            Payload::Fan { fan, omega, f } => {
                let rays: Vec<Value> = fan
                    .rays
                    .iter()
                    .map(|r| json!({"id": r.id, "u": [r.u.x, r.u.y]}))
                    .collect();
                doc.insert("fan".into(), json!({"rays": rays, "triangles": fan.triangles}));
                let coeffs = |m: &BTreeMap<String, Rational>| -> Value {
                    m.iter().map(|(k, v)| (k.clone(), json!(v.to_string()))).collect::<Map<_, _>>().into()
                };
                doc.insert("omega".into(), coeffs(omega));
                doc.insert("F".into(), coeffs(f));
            }
            Payload::Web(web) => {
                let vertices: Vec<Value> = web
                    .vertices
                    .iter()
                    .map(|v| {
                        let mut o = Map::new();
                        o.insert("id".into(), json!(v.id));
                        if let Some(mu) = &v.mu {
                            o.insert("mu".into(), rat_pair(mu));
                        }
                        o.into()
                    })
                    .collect();
                let edges: Vec<Value> = web
                    .edges
                    .iter()
                    .map(|e| {
                        let mut o = Map::new();
                        o.insert("from".into(), json!(e.from));
                        o.insert("to".into(), json!(e.to));
                        o.insert("r".into(), json!([e.r.x, e.r.y]));
                        o.insert("t".into(), json!(e.t.to_string()));
                        if let Some(s) = &e.s {
                            o.insert("s".into(), json!(s.to_string()));
                        }
                        o.into()
                    })
                    .collect();
                let rays: Vec<Value> = web
                    .rays
                    .iter()
                    .map(|r| {
                        let mut o = Map::new();
                        o.insert("at".into(), json!(r.at));
                        o.insert("direction".into(), json!([r.direction.x, r.direction.y]));
                        if let Some(st) = r.stabiliser {
                            o.insert("stabiliser".into(), json!([st.x, st.y]));
                        }
                        o.into()
                    })
                    .collect();
                doc.insert("web".into(), json!({"vertices": vertices, "edges": edges, "rays": rays}));
            }
        }
        let b = &self.basepoint;
        let mut base = Map::new();
        if let Some(t) = b.triangle {
            base.insert("triangle".into(), json!(t));
        }
        if let Some(v) = &b.vertex {
            base.insert("vertex".into(), json!(v));
        }
        if let Some(mu) = &b.mu {
            base.insert("mu".into(), rat_pair(mu));
        }
        if let Some(l) = &b.lambda {
            base.insert("lambda".into(), rat_pair(l));
        }
        if let Some(n) = &b.nu3 {
            base.insert("nu3".into(), json!(n.to_string()));
        }
        if !base.is_empty() {
            doc.insert("basepoint".into(), base.into());
        }
        doc.insert(
            "flags".into(),
            json!({
                "allow_non_kaehler": self.flags.allow_non_kaehler,
                "require_closed": self.flags.require_closed,
            }),
        );
        doc.into()
    }
}

fn rat_pair(v: &RatVec2) -> Value {
    json!([v.x.to_string(), v.y.to_string()])
}

/// Exact value of a decimal literal such as `1.5` or `2.5e-3`.
fn decimal_value(text: &str) -> Option<Rational> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Some(if scale >= 0 {
        Rational::from_integer(digits * Pow::pow(&ten, scale as u32))
    } else {
        Rational::new(digits, Pow::pow(&ten, (-scale) as u32))
    })
}

fn float_error(path: &str, n: &serde_json::Number) -> ParseError {
    let text = n.to_string();
    let hint = decimal_value(&text)
        .map(|q| {
            if q.denom().is_one() {
                format!("; write it as the integer {q}")
            } else {
                format!("; write it as the string \"{q}\"")
            }
        })
        .unwrap_or_default();
    ParseError::new(
        path,
        format!("floating point literal {text} is not accepted, use an exact rational such as \"3/2\"{hint}"),
    )
}

fn kind(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

fn object<'a>(v: &'a Value, path: &str, allowed: &[&str]) -> Result<&'a Map<String, Value>, ParseError> {
    let Value::Object(map) = v else {
        return Err(ParseError::new(path, format!("expected an object, found {}", kind(v))));
    };
    if let Some(key) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(ParseError::new(path, format!("unknown field `{key}`")));
    }
    Ok(map)
}

fn required<'a>(map: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value, ParseError> {
    map.get(key)
        .ok_or_else(|| ParseError::new(path, format!("missing required field `{key}`")))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, ParseError> {
    match v {
        Value::Array(a) => Ok(a),
        _ => Err(ParseError::new(path, format!("expected an array, found {}", kind(v)))),
    }
}

fn string(v: &Value, path: &str) -> Result<String, ParseError> {
    match v {
        Value::String(s) if !s.is_empty() => Ok(s.clone()),
        Value::String(_) => Err(ParseError::new(path, "empty identifier")),
        _ => Err(ParseError::new(path, format!("expected a string, found {}", kind(v)))),
    }
}

fn boolean(v: &Value, path: &str) -> Result<bool, ParseError> {
    v.as_bool()
        .ok_or_else(|| ParseError::new(path, format!("expected a boolean, found {}", kind(v))))
}

fn integer(v: &Value, path: &str) -> Result<i64, ParseError> {
    match v {
        Value::Number(n) if n.is_f64() => Err(ParseError::new(
            path,
            format!("floating point literal {n} is not accepted, expected an integer"),
        )),
        Value::Number(n) => n
            .as_i64()
            .ok_or_else(|| ParseError::new(path, format!("integer {n} is out of range"))),
        _ => Err(ParseError::new(path, format!("expected an integer, found {}", kind(v)))),
    }
}

fn rational(v: &Value, path: &str) -> Result<Rational, ParseError> {
    match v {
        Value::Number(n) if n.is_f64() => Err(float_error(path, n)),
        Value::Number(n) => n
            .as_i64()
            .map(|i| Rational::from_integer(i.into()))
            .ok_or_else(|| ParseError::new(path, format!("integer {n} is out of range; write it as a string"))),
        Value::String(s) => parse_rational(s.trim()).ok_or_else(|| {
            ParseError::new(path, format!("`{s}` is not an exact rational; expected forms like \"7\" or \"3/2\""))
        }),
        _ => Err(ParseError::new(
            path,
            format!("expected an integer or rational string, found {}", kind(v)),
        )),
    }
}

fn pair<'a>(v: &'a Value, path: &str) -> Result<[&'a Value; 2], ParseError> {
    match array(v, path)?.as_slice() {
        [a, b] => Ok([a, b]),
        other => Err(ParseError::new(path, format!("expected 2 entries, found {}", other.len()))),
    }
}

fn int_pair(v: &Value, path: &str) -> Result<LatticeVec2, ParseError> {
    let [a, b] = pair(v, path)?;
    Ok(LatticeVec2::new(integer(a, &format!("{path}[0]"))?, integer(b, &format!("{path}[1]"))?))
}

fn rational_pair(v: &Value, path: &str) -> Result<RatVec2, ParseError> {
    let [a, b] = pair(v, path)?;
    Ok(RatVec2::new(rational(a, &format!("{path}[0]"))?, rational(b, &format!("{path}[1]"))?))
}

fn parse_fan(v: &Value) -> Result<FanInput, ParseError> {
    let map = object(v, "$.fan", &["rays", "triangles"])?;
    let mut rays = Vec::new();
    for (i, r) in array(required(map, "rays", "$.fan")?, "$.fan.rays")?.iter().enumerate() {
        let path = format!("$.fan.rays[{i}]");
        let ray = object(r, &path, &["id", "u"])?;
        let id = string(required(ray, "id", &path)?, &format!("{path}.id"))?;
        let u = int_pair(required(ray, "u", &path)?, &format!("{path}.u"))?;
        rays.push(Ray { id, u });
    }
    let known: Vec<&str> = rays.iter().map(|r| r.id.as_str()).collect();
    let mut triangles = Vec::new();
    for (i, t) in array(required(map, "triangles", "$.fan")?, "$.fan.triangles")?.iter().enumerate() {
        let path = format!("$.fan.triangles[{i}]");
        let ids = array(t, &path)?;
        if ids.len() != 3 {
            return Err(ParseError::new(&path, format!("expected 3 ray ids, found {}", ids.len())));
        }
        let mut tri: [String; 3] = Default::default();
        for (k, id) in ids.iter().enumerate() {
            let p = format!("{path}[{k}]");
            let id = string(id, &p)?;
            if !known.contains(&id.as_str()) {
                return Err(ParseError::new(&p, format!("unknown ray `{id}`")));
            }
            tri[k] = id;
        }
        triangles.push(tri);
    }
    Ok(FanInput { rays, triangles })
}

fn parse_coefficients(v: &Value, path: &str, fan: &FanInput) -> Result<BTreeMap<String, Rational>, ParseError> {
    let Value::Object(map) = v else {
        return Err(ParseError::new(path, format!("expected an object, found {}", kind(v))));
    };
    let mut out = BTreeMap::new();
    for (id, value) in map {
        let p = format!("{path}.{id}");
        if !fan.rays.iter().any(|r| &r.id == id) {
            return Err(ParseError::new(&p, format!("unknown ray `{id}`")));
        }
        out.insert(id.clone(), rational(value, &p)?);
    }
    Ok(out)
}

fn parse_web(v: &Value) -> Result<UserWeb, ParseError> {
    let map = object(v, "$.web", &["vertices", "edges", "rays"])?;
    let mut web = UserWeb::default();
    for (i, x) in array(required(map, "vertices", "$.web")?, "$.web.vertices")?.iter().enumerate() {
        let path = format!("$.web.vertices[{i}]");
        let o = object(x, &path, &["id", "mu"])?;
        web.vertices.push(UserVertex {
            id: string(required(o, "id", &path)?, &format!("{path}.id"))?,
            mu: o.get("mu").map(|m| rational_pair(m, &format!("{path}.mu"))).transpose()?,
        });
    }
    if let Some(edges) = map.get("edges") {
        for (i, x) in array(edges, "$.web.edges")?.iter().enumerate() {
            let path = format!("$.web.edges[{i}]");
            let o = object(x, &path, &["from", "to", "r", "t", "s"])?;
            web.edges.push(UserEdge {
                from: string(required(o, "from", &path)?, &format!("{path}.from"))?,
                to: string(required(o, "to", &path)?, &format!("{path}.to"))?,
                r: int_pair(required(o, "r", &path)?, &format!("{path}.r"))?,
                t: rational(required(o, "t", &path)?, &format!("{path}.t"))?,
                s: o.get("s").map(|s| rational(s, &format!("{path}.s"))).transpose()?,
            });
        }
    }
    if let Some(rays) = map.get("rays") {
        for (i, x) in array(rays, "$.web.rays")?.iter().enumerate() {
            let path = format!("$.web.rays[{i}]");
            let o = object(x, &path, &["at", "direction", "stabiliser"])?;
            web.rays.push(UserRay {
                at: string(required(o, "at", &path)?, &format!("{path}.at"))?,
                direction: int_pair(required(o, "direction", &path)?, &format!("{path}.direction"))?,
                stabiliser: o
                    .get("stabiliser")
                    .map(|s| int_pair(s, &format!("{path}.stabiliser")))
                    .transpose()?,
            });
        }
    }
    Ok(web)
}

fn parse_basepoint(v: &Value, mode: Mode) -> Result<BasepointSpec, ParseError> {
    let map = object(v, "$.basepoint", &["triangle", "vertex", "mu", "lambda", "nu3"])?;
    let mut b = BasepointSpec::default();
    if let Some(t) = map.get("triangle") {
        if mode != Mode::Fan {
            return Err(ParseError::new("$.basepoint.triangle", "only valid in fan mode"));
        }
        let t = integer(t, "$.basepoint.triangle")?;
        b.triangle = Some(
            usize::try_from(t).map_err(|_| ParseError::new("$.basepoint.triangle", "must be non-negative"))?,
        );
    }
    if let Some(id) = map.get("vertex") {
        if mode != Mode::Web {
            return Err(ParseError::new("$.basepoint.vertex", "only valid in web mode"));
        }
        b.vertex = Some(string(id, "$.basepoint.vertex")?);
    }
    b.mu = map.get("mu").map(|x| rational_pair(x, "$.basepoint.mu")).transpose()?;
    b.lambda = map.get("lambda").map(|x| rational_pair(x, "$.basepoint.lambda")).transpose()?;
    b.nu3 = map.get("nu3").map(|x| rational(x, "$.basepoint.nu3")).transpose()?;
    Ok(b)
}

pub fn parse_input(text: &str) -> Result<JobSpec, ParseError> {
    let doc: Value = serde_json::from_str(text)
        .map_err(|e| ParseError::new(&format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    let root = object(&doc, "$", &["mode", "fan", "omega", "F", "web", "basepoint", "flags"])?;
    let mode = match string(required(root, "mode", "$")?, "$.mode")?.as_str() {
        "fan" => Mode::Fan,
        "web" => Mode::Web,
        other => return Err(ParseError::new("$.mode", format!("expected \"fan\" or \"web\", found \"{other}\""))),
    };
    let payload = match mode {
        Mode::Fan => {
            for key in ["web"] {
                if root.contains_key(key) {
                    return Err(ParseError::new("$", format!("field `{key}` is not allowed in fan mode")));
                }
            }
            let fan = parse_fan(required(root, "fan", "$")?)?;
            let omega = parse_coefficients(required(root, "omega", "$")?, "$.omega", &fan)?;
            let f = parse_coefficients(required(root, "F", "$")?, "$.F", &fan)?;
            Payload::Fan { fan, omega, f }
        }
        Mode::Web => {
            for key in ["fan", "omega", "F"] {
                if root.contains_key(key) {
                    return Err(ParseError::new("$", format!("field `{key}` is not allowed in web mode")));
                }
            }
            Payload::Web(parse_web(required(root, "web", "$")?)?)
        }
    };
    let basepoint = root
        .get("basepoint")
        .map(|b| parse_basepoint(b, mode))
        .transpose()?
        .unwrap_or_default();
    let mut flags = Flags::default();
    if let Some(v) = root.get("flags") {
        let map = object(v, "$.flags", &["allow_non_kaehler", "require_closed"])?;
        if let Some(b) = map.get("allow_non_kaehler") {
            flags.allow_non_kaehler = boolean(b, "$.flags.allow_non_kaehler")?;
        }
        if let Some(b) = map.get("require_closed") {
            flags.require_closed = boolean(b, "$.flags.require_closed")?;
        }
    }
    Ok(JobSpec {
        payload,
        basepoint,
        flags,
    })
}
