use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::Format;
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    serde_json::to_string(&round12(x)).expect("finite float")
}

pub fn fmt_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn fmt_integer(k: &BigInt) -> String {
    k.to_string()
}

/// Applies [`round12`] to every float in `v`.
fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            serde_json::Number::from_f64(round12(x)).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_value).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        v => v,
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// What a subcommand produced.
#[derive(Debug)]
pub struct Output {
    pub command: &'static str,
    pub params: Value,
    pub results: Value,
    pub table: Table,
    /// False when a check performed by the command failed.
    pub verified: bool,
}

impl Output {
    pub fn new(command: &'static str, params: &impl Serialize, results: Value, table: Table) -> Self {
        Output {
            command,
            params: serde_json::to_value(params).unwrap_or(Value::Null),
            results,
            table,
            verified: true,
        }
    }

    pub fn verified(mut self, ok: bool) -> Self {
        self.verified = ok;
        self
    }

    pub fn to_json(&self) -> Value {
        round_value(json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "params": self.params,
            "results": self.results,
        }))
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_vec_pretty(&self.to_json()).map_err(|e| CliError::Io(e.to_string()))?;
                s.push(b'\n');
                Ok(s)
            }
            Format::Csv => {
                let mut w = csv::WriterBuilder::new()
                    .terminator(csv::Terminator::Any(b'\n'))
                    .from_writer(Vec::new());
                w.write_record(&self.table.header)
                    .map_err(|e| CliError::Io(e.to_string()))?;
                for r in &self.table.rows {
                    w.write_record(r).map_err(|e| CliError::Io(e.to_string()))?;
                }
                w.into_inner().map_err(|e| CliError::Io(e.to_string()))
            }
        }
    }

    pub fn write(&self, format: Format, path: Option<&std::path::Path>) -> Result<(), CliError> {
        let bytes = self.render(format)?;
        match path {
            Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
            None => std::io::stdout()
                .lock()
                .write_all(&bytes)
                .map_err(|e| CliError::Io(e.to_string())),
        }
    }
}
