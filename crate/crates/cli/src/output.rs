//! Tables with an embedded metadata header, written as CSV or JSON.

use std::io::Write;

use anyhow::Result;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const CODE_VERSION: &str = concat!("qbc5 ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Result of one subcommand.
#[derive(Debug)]
pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Value>,
    pub summary: Value,
    /// Scientific assertions that failed.
    pub failures: Vec<String>,
}

impl Report {
    pub fn new(command: &'static str, config: Value, columns: &[&'static str]) -> Self {
        Report {
            command,
            config,
            columns: columns.to_vec(),
            rows: Vec::new(),
            summary: json!({}),
            failures: Vec::new(),
        }
    }

    pub fn push<T: Serialize>(&mut self, row: &T) {
        self.rows.push(serde_json::to_value(row).expect("rows serialize"));
    }

    pub fn fail(&mut self, msg: impl Into<String>) {
        self.failures.push(msg.into());
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// `sha256(code version, command, config)`.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(CODE_VERSION.as_bytes());
        h.update(self.command.as_bytes());
        h.update(self.config.to_string().as_bytes());
        hex::encode(h.finalize())
    }

    fn meta(&self) -> Value {
        json!({
            "command": self.command,
            "code_version": CODE_VERSION,
            "digest": self.digest(),
            "config": self.config,
        })
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<()> {
        match format {
            Format::Json => {
                let doc = json!({
                    "meta": self.meta(),
                    "rows": self.rows,
                    "summary": self.summary,
                    "passed": self.passed(),
                    "failures": self.failures,
                });
                serde_json::to_writer_pretty(&mut *out, &doc)?;
                writeln!(out)?;
            }
            Format::Csv => {
                writeln!(out, "# {}", self.meta())?;
                if !self.summary.as_object().is_none_or(|m| m.is_empty()) {
                    writeln!(out, "# summary {}", self.summary)?;
                }
                let mut w = csv::Writer::from_writer(&mut *out);
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(self.columns.iter().map(|c| cell(row.get(*c))))?;
                }
                w.flush()?;
            }
        }
        Ok(())
    }
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn render(r: &Report, f: Format) -> String {
        let mut buf = Vec::new();
        r.write(f, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn empty_csv_has_header_only() {
        let r = Report::new("x", json!({"seed": 1}), &["a", "b"]);
        let s = render(&r, Format::Csv);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("# {"));
        assert_eq!(lines[1], "a,b");
    }

    #[test]
    fn csv_quotes_and_orders_columns() {
        let mut r = Report::new("x", json!({}), &["b", "a"]);
        r.push(&json!({"a": "x,y", "b": 2.5, "c": 0}));
        let s = render(&r, Format::Csv);
        assert_eq!(s.lines().last().unwrap(), "2.5,\"x,y\"");
    }

    #[test]
    fn json_is_one_object() {
        let mut r = Report::new("x", json!({"seed": 1}), &["a"]);
        r.push(&json!({"a": 1}));
        r.fail("bad");
        let v: Value = serde_json::from_str(&render(&r, Format::Json)).unwrap();
        assert_eq!(v["rows"][0]["a"], 1);
        assert_eq!(v["passed"], false);
        assert_eq!(v["meta"]["digest"].as_str().unwrap().len(), 64);
    }

    #[test]
    fn digest_depends_on_config() {
        let a = Report::new("x", json!({"seed": 1}), &[]);
        let b = Report::new("x", json!({"seed": 2}), &[]);
        assert_ne!(a.digest(), b.digest());
        assert_eq!(a.digest(), Report::new("x", json!({"seed": 1}), &[]).digest());
    }
}
