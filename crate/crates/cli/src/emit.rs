//! Artifact serialization.
//!
//! JSON objects have sorted keys, binary64 values carry 17 significant
//! digits and rationals are `"p/q"` strings. Every artifact starts with the
//! hash of the config that produced it.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{Number, Value};

use okounkov::filt::JumpMeasure;
use okounkov::rational;
use okounkov::transform::{DistributionTable, PiecewiseConcave};
use okounkov::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Plotdata,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Plotdata => "plotdata",
        }
    }
}

#[derive(Debug, Clone)]
pub enum Artifact {
    /// Any serializable record.
    Record(Value),
    Jumps(JumpMeasure),
    Function {
        g: PiecewiseConcave,
        steps: usize,
    },
    Distribution(DistributionTable),
    Table {
        header: Vec<String>,
        rows: Vec<Vec<String>>,
    },
}

impl Artifact {
    pub fn record<T: Serialize>(value: &T) -> Result<Self> {
        Ok(Artifact::Record(serde_json::to_value(value)?))
    }

    fn kind(&self) -> &'static str {
        match self {
            Artifact::Record(_) => "record",
            Artifact::Jumps(_) => "jump measure",
            Artifact::Function { .. } => "piecewise concave function",
            Artifact::Distribution(_) => "distribution table",
            Artifact::Table { .. } => "table",
        }
    }
}

/// Rewrites every non-integer number with 17 significant digits.
fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if !n.is_i64() && !n.is_u64() => match n.as_f64() {
            Some(x) if x.is_finite() => {
                Value::Number(Number::from_str(&rational::fmt_f64(x)).expect("valid number"))
            }
            _ => Value::Null,
        },
        Value::Array(a) => Value::Array(a.into_iter().map(normalize).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

fn json(name: &str, hash: &str, data: Value) -> String {
    let wrapped =
        serde_json::json!({ "artifact": name, "config_sha256": hash, "data": normalize(data) });
    let mut s = serde_json::to_string_pretty(&wrapped).expect("value serializes");
    s.push('\n');
    s
}

fn csv(hash: &str, header: &[String], rows: &[Vec<String>]) -> String {
    let mut s = format!("# config_sha256={hash}\n{}\n", header.join(","));
    for r in rows {
        let _ = writeln!(s, "{}", r.join(","));
    }
    s
}

fn unsupported(a: &Artifact, f: Format) -> Error {
    Error::Format {
        artifact: a.kind().into(),
        format: f.extension().into(),
    }
}

/// Serializes `artifact` as `format`, tagged with the config hash.
pub fn emit(name: &str, artifact: &Artifact, format: Format, hash: &str) -> Result<String> {
    match (artifact, format) {
        (Artifact::Record(v), Format::Json) => Ok(json(name, hash, v.clone())),
        (Artifact::Jumps(m), Format::Json) => Ok(json(name, hash, serde_json::to_value(m)?)),
        (Artifact::Jumps(m), Format::Csv) => {
            let rows: Vec<Vec<String>> = m
                .atoms
                .iter()
                .map(|a| {
                    vec![
                        m.k.to_string(),
                        rational::fmt_f64(*a),
                        rational::fmt_f64(m.weight),
                    ]
                })
                .collect();
            Ok(csv(
                hash,
                &["k".into(), "atom".into(), "weight".into()],
                &rows,
            ))
        }
        (Artifact::Function { g, .. }, Format::Json) => {
            Ok(json(name, hash, serde_json::to_value(g)?))
        }
        (Artifact::Function { g, steps }, Format::Plotdata) => {
            let mut s = format!(
                "# config_sha256={hash}\n# {}\n",
                if g.dim() == 1 {
                    "x value"
                } else {
                    "x... value"
                }
            );
            for (x, v) in g.plot_data(*steps) {
                let xs: Vec<String> = x.iter().map(|c| rational::fmt_f64(*c)).collect();
                let _ = writeln!(s, "{} {}", xs.join(" "), rational::fmt_f64(v));
            }
            Ok(s)
        }
        (Artifact::Distribution(d), Format::Json) => Ok(json(name, hash, serde_json::to_value(d)?)),
        (Artifact::Distribution(d), Format::Csv) => {
            let rows: Vec<Vec<String>> = d
                .levels
                .iter()
                .zip(&d.h)
                .map(|(t, h)| vec![rational::fmt(t), rational::fmt(h)])
                .collect();
            Ok(csv(hash, &["t".into(), "h_t".into()], &rows))
        }
        (Artifact::Table { header, rows }, Format::Csv) => Ok(csv(hash, header, rows)),
        (a, f) => Err(unsupported(a, f)),
    }
}
