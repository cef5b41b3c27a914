//! Report emission as JSON lines or CSV.

use serde::Serialize;
use serde_json::{Map, Value};
use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
}

pub struct Emitter {
    out: Box<dyn Write>,
    format: Format,
    columns: Option<Vec<String>>,
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Array(xs) => {
            let cells: Vec<String> = xs
                .iter()
                .map(|x| match x {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect();
            out.push((prefix.to_string(), cells.join(" ")));
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

impl Emitter {
    pub fn new(out: Box<dyn Write>, format: Format) -> Self {
        Emitter { out, format, columns: None }
    }

    /// The header line carries the timestamp and is outside the determinism contract.
    pub fn header(&mut self, command: &str, seed: u64) -> std::io::Result<()> {
        let ts = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        match self.format {
            Format::Jsonl => {
                let h = serde_json::json!({
                    "kind": "header",
                    "command": command,
                    "seed": seed,
                    "timestamp": ts,
                    "version": env!("CARGO_PKG_VERSION"),
                });
                writeln!(self.out, "{h}")
            }
            Format::Csv => writeln!(self.out, "# ggp {command} seed={seed} timestamp={ts}"),
        }
    }

    pub fn record<T: Serialize>(&mut self, kind: &str, value: &T) -> std::io::Result<()> {
        let mut obj = Map::new();
        obj.insert("kind".into(), Value::String(kind.into()));
        match serde_json::to_value(value).map_err(std::io::Error::other)? {
            Value::Object(m) => obj.extend(m),
            other => {
                obj.insert("value".into(), other);
            }
        }
        let v = Value::Object(obj);
        match self.format {
            Format::Jsonl => writeln!(self.out, "{v}"),
            Format::Csv => {
                let mut cells = Vec::new();
                flatten("", &v, &mut cells);
                let cols: Vec<String> = cells.iter().map(|(k, _)| k.clone()).collect();
                let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
                if self.columns.as_ref() != Some(&cols) {
                    w.write_record(&cols).map_err(std::io::Error::other)?;
                    self.columns = Some(cols);
                }
                w.write_record(cells.iter().map(|(_, c)| c)).map_err(std::io::Error::other)?;
                let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
                self.out.write_all(&bytes)
            }
        }
    }

    pub fn flush(&mut self) -> std::io::Result<()> {
        self.out.flush()
    }
}
