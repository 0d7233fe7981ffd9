//! Report bodies shared by every subcommand.
//!
//! A report is a config echo, a table of rows with named columns, and a
//! summary block. JSON and CSV renderings carry the same row data; neither
//! contains a timestamp, so identical configs render to identical bytes.

use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    pub summary: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str, config: Value, columns: &[&'static str]) -> Self {
        Report {
            command: command.to_string(),
            config,
            columns: columns.to_vec(),
            rows: Vec::new(),
            summary: Map::new(),
        }
    }

    /// Appends a row; panics if its width differs from the header.
    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_string(), value.into());
    }

    /// Values of one column, top to bottom.
    pub fn column<'a>(&'a self, name: &str) -> impl Iterator<Item = &'a Value> + 'a {
        let idx = self
            .columns
            .iter()
            .position(|c| *c == name)
            .unwrap_or_else(|| panic!("no column {name}"));
        self.rows.iter().map(move |r| &r[idx])
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.clone()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut body = Map::new();
        body.insert("schema_version".into(), SCHEMA_VERSION.into());
        body.insert("command".into(), self.command.clone().into());
        body.insert("config".into(), self.config.clone());
        body.insert(
            "columns".into(),
            Value::Array(self.columns.iter().map(|c| Value::from(*c)).collect()),
        );
        body.insert("rows".into(), Value::Array(rows));
        body.insert("summary".into(), Value::Object(self.summary.clone()));
        let mut out = serde_json::to_string_pretty(&Value::Object(body)).expect("json");
        out.push('\n');
        out
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(cell)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

/// CSV text of a JSON value: null is empty, strings are unquoted, numbers use
/// the JSON spelling.
pub fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// `x` as a JSON number, or null when absent.
pub fn opt<T: Into<Value>>(x: Option<T>) -> Value {
    x.map_or(Value::Null, Into::into)
}

/// Comma-joined integers, as used for witnesses and factor lists.
pub fn joined(xs: &[u64]) -> String {
    xs.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}
