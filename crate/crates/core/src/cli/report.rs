//! Report records and their JSON/text serializations.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// One command run. `wall_time_ms` is the only field that may differ
/// between identical invocations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub command: Vec<String>,
    pub config_hash: String,
    pub input_digest: String,
    pub result: Value,
    pub version: String,
    pub seed: u64,
    pub wall_time_ms: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
}

/// A float with 17 significant digits, in JSON number syntax.
pub fn format_f64(v: f64) -> String {
    if !v.is_finite() {
        return "null".into();
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0.0".into() } else { "0.0".into() };
    }
    format!("{v:.16e}")
}

fn write_json(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_f64(n.as_f64().unwrap()));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).unwrap()),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_json(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k).unwrap());
                out.push(':');
                write_json(item, out);
            }
            out.push('}');
        }
    }
}

/// Single-line JSON object with a trailing newline.
pub fn to_json(record: &ReportRecord) -> String {
    let value = serde_json::to_value(record).expect("report serializes");
    let mut out = String::new();
    write_json(&value, &mut out);
    out.push('\n');
    out
}

pub fn parse_report(text: &str) -> serde_json::Result<ReportRecord> {
    serde_json::from_str(text)
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => format_f64(n.as_f64().unwrap()),
        Value::String(s) => s.clone(),
        other => {
            let mut s = String::new();
            write_json(other, &mut s);
            s
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, item) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, item, out);
            }
        }
        _ => out.push((prefix.to_string(), scalar(v))),
    }
}

/// `key: value` lines. The result's `verdict` comes first and appears once.
pub fn to_text(record: &ReportRecord) -> String {
    let mut out = String::new();
    out.push_str(&format!("command: {}\n", record.command.join(" ")));
    let empty = Map::new();
    let result = record.result.as_object().unwrap_or(&empty);
    if let Some(v) = result.get("verdict") {
        out.push_str(&format!("verdict: {}\n", scalar(v)));
    }
    let mut lines = Vec::new();
    for (k, v) in result {
        if k != "verdict" {
            flatten(k, v, &mut lines);
        }
    }
    for (k, v) in lines {
        out.push_str(&format!("  {k}: {v}\n"));
    }
    out.push_str(&format!(
        "config_hash: {}\ninput_digest: {}\nversion: {}\nseed: {}\nwall_time_ms: {}\n",
        record.config_hash, record.input_digest, record.version, record.seed, record.wall_time_ms
    ));
    out
}

pub fn render(record: &ReportRecord, format: Format) -> String {
    match format {
        Format::Json => to_json(record),
        Format::Text => to_text(record),
    }
}

pub fn emit_report<W: Write>(record: &ReportRecord, format: Format, out: &mut W) -> io::Result<()> {
    out.write_all(render(record, format).as_bytes())?;
    out.flush()
}
