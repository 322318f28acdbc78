use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};

use serde::Serialize;
use serde_json::Value;

use crate::args::{Format, Output};

/// Everything needed to regenerate a report: tool, version, subcommand and all parameters.
#[derive(Debug, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub parameters: Value,
}

impl Provenance {
    pub fn new(command: &'static str, parameters: Value) -> Self {
        Self { tool: "coorbit", version: coorbit_core::VERSION, command, parameters }
    }
}

/// Plot-ready rows mirroring the JSON results.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

pub struct Report {
    pub results: Value,
    pub table: Table,
    pub pass: bool,
}

#[derive(Serialize)]
struct Envelope<'a> {
    provenance: &'a Provenance,
    pass: bool,
    results: &'a Value,
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        Value::Array(items) => {
            let joined: Vec<String> = items.iter().map(|v| v.to_string()).collect();
            out.push((prefix.to_owned(), joined.join(";")));
        }
        Value::String(s) => out.push((prefix.to_owned(), s.clone())),
        other => out.push((prefix.to_owned(), other.to_string())),
    }
}

pub fn render(provenance: &Provenance, report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let envelope = Envelope { provenance, pass: report.pass, results: &report.results };
            let mut text = serde_json::to_string_pretty(&envelope).expect("report values are serializable");
            text.push('\n');
            text
        }
        Format::Csv => {
            let mut text = String::new();
            let mut header = Vec::new();
            flatten("", &serde_json::to_value(provenance).expect("provenance is serializable"), &mut header);
            for (key, value) in header {
                writeln!(text, "# {key}={value}").unwrap();
            }
            writeln!(text, "# pass={}", report.pass).unwrap();
            writeln!(text, "{}", report.table.header.join(",")).unwrap();
            for row in &report.table.rows {
                writeln!(text, "{}", row.join(",")).unwrap();
            }
            text
        }
    }
}

pub fn emit(text: &str, output: &Output) -> io::Result<()> {
    match &output.out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            fs::write(path, text)
        }
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}
