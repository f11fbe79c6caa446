//! JSON documents for cubic and dense matrices, simulation setups and
//! trajectories.
//!
//! A cubic matrix is written as
//! `{"m":2,"n":3,"s":4,"domain":"real" | {"mod":12},"slices":[[[…],…],…]}`
//! with slices listed in order and each slice row-major. Reals use the
//! shortest decimal that round-trips; modular entries are plain integers
//! and may be given negative on input.

use serde::de::DeserializeOwned;
use serde_json::{json, Map, Value};

use crate::analysis::{PowerSeries, TruncationPolicy};
use crate::cubic::{CubicMatrix, Dims};
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::products::ProductKind;
use crate::scalar::{Modular, Real, Ring, ScalarDomain};
use crate::systems::{
    InputMap, InputSignal, InputValue, NonlinearOutput, NonlinearSpec, SystemSpec, Time, Trajectory,
};

/// Rings whose elements have a JSON form.
pub trait JsonScalar: Ring {
    fn elem_to_json(&self, v: Self::Elem) -> Value;
    fn elem_from_json(&self, v: &Value) -> Result<Self::Elem>;
    /// The ring named by a document's domain tag.
    fn from_domain(domain: ScalarDomain) -> Result<Self>;
}

impl JsonScalar for Real {
    fn elem_to_json(&self, v: f64) -> Value {
        Value::from(v)
    }

    fn elem_from_json(&self, v: &Value) -> Result<f64> {
        let x = v.as_f64().ok_or_else(|| Error::Parse(format!("expected a real number, got {v}")))?;
        self.admit(x)
    }

    fn from_domain(domain: ScalarDomain) -> Result<Self> {
        match domain {
            ScalarDomain::Real => Ok(Real),
            other => Err(Error::DomainMismatch { op: "document", left: "real".into(), right: other.to_string() }),
        }
    }
}

impl JsonScalar for Modular {
    fn elem_to_json(&self, v: u64) -> Value {
        Value::from(v)
    }

    fn elem_from_json(&self, v: &Value) -> Result<u64> {
        if let Some(u) = v.as_u64() {
            return Ok(u % self.modulus());
        }
        if let Some(i) = v.as_i64() {
            return Ok(self.reduce(i as i128));
        }
        v.as_f64()
            .and_then(|x| self.from_f64_exact(x))
            .ok_or_else(|| Error::Parse(format!("expected an integer entry for {}, got {v}", self.domain())))
    }

    fn from_domain(domain: ScalarDomain) -> Result<Self> {
        match domain {
            ScalarDomain::Mod(m) => Modular::new(m),
            other => Err(Error::DomainMismatch { op: "document", left: "Z_m".into(), right: other.to_string() }),
        }
    }
}

pub fn domain_to_value(domain: ScalarDomain) -> Value {
    match domain {
        ScalarDomain::Real => json!("real"),
        ScalarDomain::Mod(m) => json!({ "mod": m }),
    }
}

pub fn domain_from_value(v: &Value) -> Result<ScalarDomain> {
    match v {
        Value::String(s) if s == "real" => Ok(ScalarDomain::Real),
        Value::Object(o) => match o.get("mod").and_then(Value::as_u64) {
            Some(m) if o.len() == 1 => {
                Modular::new(m)?;
                Ok(ScalarDomain::Mod(m))
            }
            _ => Err(Error::Parse(format!("domain must be \"real\" or {{\"mod\": m}}, got {v}"))),
        },
        _ => Err(Error::Parse(format!("domain must be \"real\" or {{\"mod\": m}}, got {v}"))),
    }
}

/// Pretty JSON with a trailing newline; key order is fixed, so equal
/// values always give equal bytes.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn parse_value(text: &str, what: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

fn field<'a>(v: &'a Value, key: &str, what: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Parse(format!("{what}: missing field {key:?}")))
}

fn optional<'a>(v: &'a Value, key: &str) -> Option<&'a Value> {
    v.get(key).filter(|x| !x.is_null())
}

fn usize_field(v: &Value, key: &str, what: &str) -> Result<usize> {
    field(v, key, what)?
        .as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::Parse(format!("{what}: field {key:?} must be a non-negative integer")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Parse(format!("{what}: expected an array")))
}

fn typed<T: DeserializeOwned>(v: &Value, what: &str) -> Result<T> {
    T::deserialize(v).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

/// Domain tag of a matrix document.
pub fn document_domain(v: &Value, what: &str) -> Result<ScalarDomain> {
    domain_from_value(field(v, "domain", what)?).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{what}: {msg}")),
        other => other,
    })
}

pub fn cubic_to_value<R: JsonScalar>(a: &CubicMatrix<R>) -> Value {
    let Dims { m, n, s } = a.dims();
    let ring = a.ring();
    let slices: Vec<Value> = (0..s)
        .map(|k| {
            (0..m)
                .map(|i| (0..n).map(|j| ring.elem_to_json(a.get(i, j, k))).collect::<Vec<_>>().into())
                .collect::<Vec<Value>>()
                .into()
        })
        .collect();
    json!({ "m": m, "n": n, "s": s, "domain": domain_to_value(ring.domain()), "slices": slices })
}

/// Reads a cubic document, taking the ring from its domain tag.
pub fn cubic_from_value<R: JsonScalar>(v: &Value, what: &str) -> Result<CubicMatrix<R>> {
    let ring = R::from_domain(document_domain(v, what)?).map_err(|e| name_operand(e, what))?;
    cubic_in(ring, v, what)
}

/// Reads a cubic document that must live in `ring`.
pub fn cubic_in<R: JsonScalar>(ring: R, v: &Value, what: &str) -> Result<CubicMatrix<R>> {
    let domain = document_domain(v, what)?;
    if domain != ring.domain() {
        return Err(Error::DomainMismatch { op: "document", left: ring.domain().to_string(), right: format!("{domain} ({what})") });
    }
    let dims = Dims::new(usize_field(v, "m", what)?, usize_field(v, "n", what)?, usize_field(v, "s", what)?)?;
    let slices = array(field(v, "slices", what)?, what)?;
    let bad = |detail: String| Error::Shape { op: "cubic document", detail: format!("{what} declares {dims}: {detail}") };
    if slices.len() != dims.s {
        return Err(bad(format!("{} slices given", slices.len())));
    }
    let mut data = Vec::with_capacity(dims.len());
    for (k, slice) in slices.iter().enumerate() {
        let rows = array(slice, what)?;
        if rows.len() != dims.m {
            return Err(bad(format!("slice {} has {} rows", k + 1, rows.len())));
        }
        for (i, row) in rows.iter().enumerate() {
            let row = array(row, what)?;
            if row.len() != dims.n {
                return Err(bad(format!("slice {} row {} has {} entries", k + 1, i + 1, row.len())));
            }
            for x in row {
                data.push(ring.elem_from_json(x).map_err(|e| name_operand(e, what))?);
            }
        }
    }
    CubicMatrix::new(ring, dims, data)
}

fn name_operand(e: Error, what: &str) -> Error {
    match e {
        Error::Parse(msg) => Error::Parse(format!("{what}: {msg}")),
        Error::InvalidValue(msg) => Error::InvalidValue(format!("{what}: {msg}")),
        Error::DomainMismatch { op, left, right } => Error::DomainMismatch { op, left, right: format!("{right} ({what})") },
        other => other,
    }
}

pub fn dense_to_value<R: JsonScalar>(a: &DenseMatrix<R>) -> Value {
    let ring = a.ring();
    let data: Vec<Value> =
        (0..a.rows()).map(|i| a.row(i).iter().map(|&x| ring.elem_to_json(x)).collect::<Vec<_>>().into()).collect();
    json!({ "rows": a.rows(), "cols": a.cols(), "domain": domain_to_value(ring.domain()), "data": data })
}

pub fn dense_from_value<R: JsonScalar>(v: &Value, what: &str) -> Result<DenseMatrix<R>> {
    let ring = R::from_domain(document_domain(v, what)?).map_err(|e| name_operand(e, what))?;
    let (rows, cols) = (usize_field(v, "rows", what)?, usize_field(v, "cols", what)?);
    let data = array(field(v, "data", what)?, what)?;
    let bad = |detail: String| Error::Shape { op: "dense document", detail: format!("{what} declares {rows}x{cols}: {detail}") };
    if data.len() != rows {
        return Err(bad(format!("{} rows given", data.len())));
    }
    let mut flat = Vec::with_capacity(rows * cols);
    for (i, row) in data.iter().enumerate() {
        let row = array(row, what)?;
        if row.len() != cols {
            return Err(bad(format!("row {} has {} entries", i + 1, row.len())));
        }
        for x in row {
            flat.push(ring.elem_from_json(x).map_err(|e| name_operand(e, what))?);
        }
    }
    DenseMatrix::new(ring, rows, cols, flat)
}

/// A cubic matrix over whichever domain its document declares.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyCubic {
    Real(CubicMatrix<Real>),
    Mod(CubicMatrix<Modular>),
}

impl AnyCubic {
    pub fn from_value(v: &Value, what: &str) -> Result<Self> {
        match document_domain(v, what)? {
            ScalarDomain::Real => cubic_from_value(v, what).map(AnyCubic::Real),
            ScalarDomain::Mod(_) => cubic_from_value(v, what).map(AnyCubic::Mod),
        }
    }

    pub fn parse(text: &str, what: &str) -> Result<Self> {
        Self::from_value(&parse_value(text, what)?, what)
    }

    pub fn to_value(&self) -> Value {
        match self {
            AnyCubic::Real(a) => cubic_to_value(a),
            AnyCubic::Mod(a) => cubic_to_value(a),
        }
    }

    pub fn dims(&self) -> Dims {
        match self {
            AnyCubic::Real(a) => a.dims(),
            AnyCubic::Mod(a) => a.dims(),
        }
    }

    pub fn domain(&self) -> ScalarDomain {
        match self {
            AnyCubic::Real(a) => a.ring().domain(),
            AnyCubic::Mod(a) => a.ring().domain(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnyDense {
    Real(DenseMatrix<Real>),
    Mod(DenseMatrix<Modular>),
}

impl AnyDense {
    pub fn from_value(v: &Value, what: &str) -> Result<Self> {
        match document_domain(v, what)? {
            ScalarDomain::Real => dense_from_value(v, what).map(AnyDense::Real),
            ScalarDomain::Mod(_) => dense_from_value(v, what).map(AnyDense::Mod),
        }
    }

    pub fn parse(text: &str, what: &str) -> Result<Self> {
        Self::from_value(&parse_value(text, what)?, what)
    }

    pub fn to_value(&self) -> Value {
        match self {
            AnyDense::Real(a) => dense_to_value(a),
            AnyDense::Mod(a) => dense_to_value(a),
        }
    }
}

pub fn series_from_value(v: &Value, what: &str) -> Result<PowerSeries> {
    let f: PowerSeries = typed(v, what)?;
    f.validate()?;
    Ok(f)
}

pub fn series_to_value(f: &PowerSeries) -> Value {
    serde_json::to_value(f).expect("series always serialize")
}

/// The dynamics of a simulation document.
#[derive(Debug, Clone, PartialEq)]
pub enum SystemDoc<R: Ring> {
    Linear(SystemSpec<R>),
    Nonlinear(NonlinearSpec<R>),
}

/// A system together with its initial state and input schedule.
///
/// Linear systems carry `a` and optionally `input`
/// (`{"directions":[…]}` or `{"operator":…,"input_dims":{…}}`), `c` and
/// `state_dims`; nonlinear ones carry a series `f`, optional `g`, `drift`
/// and `output` (`{"series":…}` or `{"operator":…}`). The schedule `u` is
/// `{"samples":[…]}` or `{"breakpoints":[…],"values":[…]}`, each value a
/// list of scalars or a cubic document.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationDoc<R: Ring> {
    pub system: SystemDoc<R>,
    pub x0: CubicMatrix<R>,
    pub input: InputSignal<R>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnySimulation {
    Real(SimulationDoc<Real>),
    Mod(SimulationDoc<Modular>),
}

impl AnySimulation {
    /// The ring is taken from `x0`; every other matrix must match it.
    pub fn from_value(v: &Value, what: &str) -> Result<Self> {
        let x0 = field(v, "x0", what)?;
        match document_domain(x0, &format!("{what} x0"))? {
            ScalarDomain::Real => simulation_from_value(Real, v, what).map(AnySimulation::Real),
            ScalarDomain::Mod(m) => simulation_from_value(Modular::new(m)?, v, what).map(AnySimulation::Mod),
        }
    }

    pub fn parse(text: &str, what: &str) -> Result<Self> {
        Self::from_value(&parse_value(text, what)?, what)
    }

    pub fn to_value(&self) -> Value {
        match self {
            AnySimulation::Real(d) => simulation_to_value(d),
            AnySimulation::Mod(d) => simulation_to_value(d),
        }
    }
}

fn input_value_from<R: JsonScalar>(ring: R, v: &Value, what: &str) -> Result<InputValue<R>> {
    match v {
        Value::Array(xs) => xs
            .iter()
            .map(|x| ring.elem_from_json(x).map_err(|e| name_operand(e, what)))
            .collect::<Result<Vec<_>>>()
            .map(InputValue::Scalars),
        Value::Object(_) => cubic_in(ring, v, what).map(InputValue::Cubic),
        _ => Err(Error::Parse(format!("{what}: input values are scalar lists or cubic documents"))),
    }
}

fn input_value_to<R: JsonScalar>(ring: R, v: &InputValue<R>) -> Value {
    match v {
        InputValue::Scalars(xs) => xs.iter().map(|&x| ring.elem_to_json(x)).collect::<Vec<_>>().into(),
        InputValue::Cubic(u) => cubic_to_value(u),
    }
}

fn signal_from<R: JsonScalar>(ring: R, v: Option<&Value>, what: &str) -> Result<InputSignal<R>> {
    let Some(v) = v else { return Ok(InputSignal::None) };
    let values = |key: &str| -> Result<Vec<InputValue<R>>> {
        array(field(v, key, what)?, what)?
            .iter()
            .enumerate()
            .map(|(k, x)| input_value_from(ring, x, &format!("{what} u.{key}[{k}]")))
            .collect()
    };
    if v.get("samples").is_some() {
        Ok(InputSignal::Samples(values("samples")?))
    } else if v.get("breakpoints").is_some() {
        let breakpoints: Vec<f64> = typed(field(v, "breakpoints", what)?, what)?;
        Ok(InputSignal::PiecewiseConstant { breakpoints, values: values("values")? })
    } else {
        Err(Error::Parse(format!("{what}: input u needs \"samples\" or \"breakpoints\" and \"values\"")))
    }
}

fn signal_to<R: JsonScalar>(ring: R, u: &InputSignal<R>) -> Value {
    let list = |vs: &[InputValue<R>]| Value::from(vs.iter().map(|v| input_value_to(ring, v)).collect::<Vec<_>>());
    match u {
        InputSignal::None => Value::Null,
        InputSignal::Samples(vs) => json!({ "samples": list(vs) }),
        InputSignal::PiecewiseConstant { breakpoints, values } => {
            json!({ "breakpoints": breakpoints, "values": list(values) })
        }
    }
}

pub fn simulation_from_value<R: JsonScalar>(ring: R, v: &Value, what: &str) -> Result<SimulationDoc<R>> {
    let sub = |key: &str| format!("{what} {key}");
    let x0 = cubic_in(ring, field(v, "x0", what)?, &sub("x0"))?;
    let kind: ProductKind = typed(field(v, "kind", what)?, &sub("kind"))?;
    let time: Time = typed(field(v, "time", what)?, &sub("time"))?;
    let cubic_opt = |key: &str| optional(v, key).map(|x| cubic_in(ring, x, &sub(key))).transpose();
    let system = if let Some(f) = optional(v, "f") {
        let g = match optional(v, "g") {
            Some(gs) => array(gs, what)?.iter().map(|x| series_from_value(x, &sub("g"))).collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        let output = match optional(v, "output") {
            None => None,
            Some(o) if o.get("series").is_some() => {
                Some(NonlinearOutput::Series(series_from_value(&o["series"], &sub("output"))?))
            }
            Some(o) if o.get("operator").is_some() => {
                Some(NonlinearOutput::Operator(cubic_in(ring, &o["operator"], &sub("output"))?))
            }
            Some(_) => return Err(Error::Parse(format!("{what}: output needs \"series\" or \"operator\""))),
        };
        SystemDoc::Nonlinear(NonlinearSpec {
            kind,
            time,
            f: series_from_value(f, &sub("f"))?,
            g,
            drift: cubic_opt("drift")?,
            output,
            policy: TruncationPolicy::default(),
        })
    } else {
        let a = cubic_in(ring, field(v, "a", what)?, &sub("a"))?;
        let input = match optional(v, "input") {
            None => InputMap::None,
            Some(i) if i.get("directions").is_some() => InputMap::Directions(
                array(&i["directions"], what)?
                    .iter()
                    .enumerate()
                    .map(|(k, b)| cubic_in(ring, b, &format!("{what} input.directions[{k}]")))
                    .collect::<Result<Vec<_>>>()?,
            ),
            Some(i) if i.get("operator").is_some() => InputMap::Operator {
                b: cubic_in(ring, &i["operator"], &sub("input.operator"))?,
                input_dims: dims_from(field(i, "input_dims", what)?, &sub("input_dims"))?,
            },
            Some(_) => return Err(Error::Parse(format!("{what}: input needs \"directions\" or \"operator\""))),
        };
        let state_dims = match optional(v, "state_dims") {
            Some(d) => dims_from(d, &sub("state_dims"))?,
            None => x0.dims(),
        };
        SystemDoc::Linear(SystemSpec { kind, time, a, input, c: cubic_opt("c")?, state_dims })
    };
    let input = signal_from(ring, optional(v, "u"), what)?;
    Ok(SimulationDoc { system, x0, input })
}

fn dims_from(v: &Value, what: &str) -> Result<Dims> {
    let d: Dims = typed(v, what)?;
    Dims::new(d.m, d.n, d.s)
}

pub fn simulation_to_value<R: JsonScalar>(doc: &SimulationDoc<R>) -> Value {
    let ring = doc.x0.ring();
    let mut out = Map::new();
    let kind_time = |out: &mut Map<String, Value>, kind: ProductKind, time: Time| {
        out.insert("kind".into(), serde_json::to_value(kind).expect("kind serializes"));
        out.insert("time".into(), serde_json::to_value(time).expect("time serializes"));
    };
    match &doc.system {
        SystemDoc::Linear(spec) => {
            kind_time(&mut out, spec.kind, spec.time);
            out.insert("a".into(), cubic_to_value(&spec.a));
            match &spec.input {
                InputMap::None => {}
                InputMap::Directions(bs) => {
                    out.insert("input".into(), json!({ "directions": bs.iter().map(cubic_to_value).collect::<Vec<_>>() }));
                }
                InputMap::Operator { b, input_dims } => {
                    out.insert("input".into(), json!({ "operator": cubic_to_value(b), "input_dims": input_dims }));
                }
            }
            if let Some(c) = &spec.c {
                out.insert("c".into(), cubic_to_value(c));
            }
            out.insert("state_dims".into(), json!(spec.state_dims));
        }
        SystemDoc::Nonlinear(spec) => {
            kind_time(&mut out, spec.kind, spec.time);
            out.insert("f".into(), series_to_value(&spec.f));
            if !spec.g.is_empty() {
                out.insert("g".into(), spec.g.iter().map(series_to_value).collect::<Vec<_>>().into());
            }
            if let Some(a) = &spec.drift {
                out.insert("drift".into(), cubic_to_value(a));
            }
            match &spec.output {
                None => {}
                Some(NonlinearOutput::Series(h)) => {
                    out.insert("output".into(), json!({ "series": series_to_value(h) }));
                }
                Some(NonlinearOutput::Operator(c)) => {
                    out.insert("output".into(), json!({ "operator": cubic_to_value(c) }));
                }
            }
        }
    }
    out.insert("x0".into(), cubic_to_value(&doc.x0));
    let u = signal_to(ring, &doc.input);
    if !u.is_null() {
        out.insert("u".into(), u);
    }
    Value::Object(out)
}

pub fn trajectory_to_value<R: JsonScalar>(t: &Trajectory<R>) -> Value {
    let mut out = json!({
        "times": t.times,
        "states": t.states.iter().map(cubic_to_value).collect::<Vec<_>>(),
    });
    if let Some(ys) = &t.outputs {
        out["outputs"] = ys.iter().map(cubic_to_value).collect::<Vec<_>>().into();
    }
    out
}

pub fn trajectory_from_value<R: JsonScalar>(v: &Value, what: &str) -> Result<Trajectory<R>> {
    let times: Vec<f64> = typed(field(v, "times", what)?, what)?;
    let list = |key: &str| -> Result<Vec<CubicMatrix<R>>> {
        array(field(v, key, what)?, what)?
            .iter()
            .enumerate()
            .map(|(k, x)| cubic_from_value(x, &format!("{what} {key}[{k}]")))
            .collect()
    };
    let outputs = optional(v, "outputs").map(|_| list("outputs")).transpose()?;
    Trajectory::new(times, list("states")?, outputs)
}
