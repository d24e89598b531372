//! Uniform output envelope rendered as JSON or CSV.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};
use crate::CliError;

#[derive(Clone, Debug, Serialize)]
pub struct Envelope {
    pub command: String,
    pub params: Value,
    pub values: Value,
    pub bounds: Value,
    pub provenance: Value,
}

/// A rectangular table used for CSV output.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

pub fn provenance(cfg: &RunConfig, method: &str) -> Value {
    let mut p = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "precision_bits": cfg.precision,
        "method": method,
    });
    if let Some(s) = cfg.seed {
        p["seed"] = json!(s);
    }
    p
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<Vec<String>>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::String(s) => out.push(vec![prefix.to_string(), s.clone()]),
        other => out.push(vec![prefix.to_string(), other.to_string()]),
    }
}

/// `key,value` rows for every leaf of `values` and `bounds`.
pub fn flat_table(env: &Envelope) -> Table {
    let mut t = Table::new(&["key", "value"]);
    let mut both = Map::new();
    both.insert("values".into(), env.values.clone());
    both.insert("bounds".into(), env.bounds.clone());
    flatten("", &Value::Object(both), &mut t.rows);
    t
}

fn render_csv(t: &Table) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&t.header).map_err(|e| CliError::Io(e.to_string()))?;
    for r in &t.rows {
        w.write_record(r).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

pub fn emit(env: &Envelope, table: Option<Table>, cfg: &RunConfig) -> Result<(), CliError> {
    let text = match cfg.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(env).map_err(|e| CliError::Io(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => render_csv(&table.unwrap_or_else(|| flat_table(env)))?,
    };
    match &cfg.output {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flattening_paths() {
        let env = Envelope {
            command: "x".into(),
            params: json!({}),
            values: json!({"a": [1.5, 2], "b": {"c": "s"}}),
            bounds: json!({"e": null}),
            provenance: json!({}),
        };
        let t = flat_table(&env);
        let keys: Vec<&str> = t.rows.iter().map(|r| r[0].as_str()).collect();
        assert_eq!(keys, ["bounds.e", "values.a[0]", "values.a[1]", "values.b.c"]);
        let csv = render_csv(&t).unwrap();
        assert!(csv.starts_with("key,value\n"));
        assert!(csv.contains("values.b.c,s\n"));
    }
}
