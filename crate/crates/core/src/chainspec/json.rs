//! Chain-spec files.
//!
//! ```json
//! {
//!   "generators": ["s1", "s2"],
//!   "alphabet": ["0", "1"],
//!   "pi": {"0": "1/2", "1": "1/2"},
//!   "kernels": {"s1": [["1/2", "1/2"], ["1/2", "1/2"]], "s2": [["0/1", "1/1"], ["1/1", "0/1"]]}
//! }
//! ```

use serde_json::{Map, Value};

use super::{rational, Kernel, MarkovSpec};
use crate::error::Error;

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

fn object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>, Error> {
    v.as_object().ok_or_else(|| format_err(format!("{what} must be an object")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, Error> {
    v.as_array().ok_or_else(|| format_err(format!("{what} must be an array")))
}

fn rational_field(v: &Value, what: &str) -> Result<rational::Rational, Error> {
    match v {
        Value::String(s) => rational::parse(s),
        _ => Err(format_err(format!("{what} must be a \"p/q\" string"))),
    }
}

/// Reads a spec from its JSON value. Only shapes are checked here.
pub fn from_json(v: &Value) -> Result<MarkovSpec, Error> {
    let top = object(v, "chain spec")?;
    for key in top.keys() {
        if !matches!(key.as_str(), "generators" | "alphabet" | "pi" | "kernels") {
            return Err(format_err(format!("unknown field {key:?}")));
        }
    }
    let field = |k: &str| top.get(k).ok_or_else(|| format_err(format!("missing field {k:?}")));

    let generators = array(field("generators")?, "generators")?;
    for (i, g) in generators.iter().enumerate() {
        let expected = format!("s{}", i + 1);
        if g.as_str() != Some(expected.as_str()) {
            return Err(format_err(format!("generator {i} must be named {expected:?}")));
        }
    }

    let alphabet = array(field("alphabet")?, "alphabet")?
        .iter()
        .map(|a| a.as_str().map(str::to_owned).ok_or_else(|| format_err("alphabet symbols must be strings")))
        .collect::<Result<Vec<_>, _>>()?;

    let pi_obj = object(field("pi")?, "pi")?;
    if pi_obj.len() != alphabet.len() {
        return Err(format_err("pi must list every symbol exactly once"));
    }
    let pi = alphabet
        .iter()
        .map(|a| {
            let p = pi_obj.get(a).ok_or_else(|| format_err(format!("pi has no entry for {a:?}")))?;
            rational_field(p, &format!("pi[{a:?}]"))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let kernel_obj = object(field("kernels")?, "kernels")?;
    if kernel_obj.len() != generators.len() {
        return Err(format_err("kernels must list every generator exactly once"));
    }
    let kernels = (1..=generators.len())
        .map(|i| {
            let name = format!("s{i}");
            let rows = kernel_obj
                .get(&name)
                .ok_or_else(|| format_err(format!("no kernel for {name}")))?;
            let rows = array(rows, &name)?
                .iter()
                .map(|row| {
                    array(row, &format!("row of {name}"))?
                        .iter()
                        .map(|p| rational_field(p, &format!("entry of {name}")))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            if rows.len() != alphabet.len() || rows.iter().any(|r| r.len() != alphabet.len()) {
                return Err(format_err(format!("{name} must be {0}x{0}", alphabet.len())));
            }
            Kernel::new(rows)
        })
        .collect::<Result<Vec<_>, _>>()?;

    MarkovSpec::new(alphabet, pi, kernels).map_err(|e| match e {
        Error::InvalidSpec(m) => format_err(m),
        other => other,
    })
}

pub fn parse_spec(text: &str) -> Result<MarkovSpec, Error> {
    let v: Value = serde_json::from_str(text).map_err(|e| format_err(e.to_string()))?;
    from_json(&v)
}

pub fn to_json(spec: &MarkovSpec) -> Value {
    let generators: Vec<Value> = (1..=spec.rank()).map(|i| Value::String(format!("s{i}"))).collect();
    let pi: Map<String, Value> = spec
        .alphabet()
        .iter()
        .zip(spec.pi())
        .map(|(a, p)| (a.clone(), Value::String(rational::format(p))))
        .collect();
    let kernels: Map<String, Value> = spec
        .kernels()
        .iter()
        .enumerate()
        .map(|(s, k)| {
            let rows = k
                .rows()
                .iter()
                .map(|r| Value::Array(r.iter().map(|p| Value::String(rational::format(p))).collect()))
                .collect();
            (format!("s{}", s + 1), Value::Array(rows))
        })
        .collect();
    let mut top = Map::new();
    top.insert("generators".into(), Value::Array(generators));
    top.insert(
        "alphabet".into(),
        Value::Array(spec.alphabet().iter().cloned().map(Value::String).collect()),
    );
    top.insert("pi".into(), Value::Object(pi));
    top.insert("kernels".into(), Value::Object(kernels));
    Value::Object(top)
}

/// Canonical text: pretty-printed with a trailing newline.
pub fn write_spec(spec: &MarkovSpec) -> String {
    let mut s = serde_json::to_string_pretty(&to_json(spec)).expect("json values serialize");
    s.push('\n');
    s
}
