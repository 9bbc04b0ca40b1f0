//! Output documents: a metadata header plus an ordered list of records,
//! rendered as JSON or as CSV with `#` comment lines.

use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Int(u64),
    Bool(bool),
    /// Numbers are carried as strings so they render identically everywhere.
    Text(String),
    List(Vec<String>),
    Null,
}

impl From<usize> for Field {
    fn from(v: usize) -> Self {
        Field::Int(v as u64)
    }
}

impl From<bool> for Field {
    fn from(v: bool) -> Self {
        Field::Bool(v)
    }
}

impl From<String> for Field {
    fn from(v: String) -> Self {
        Field::Text(v)
    }
}

impl From<&str> for Field {
    fn from(v: &str) -> Self {
        Field::Text(v.to_string())
    }
}

impl<T: Into<Field>> From<Option<T>> for Field {
    fn from(v: Option<T>) -> Self {
        v.map_or(Field::Null, Into::into)
    }
}

impl Field {
    fn to_json(&self) -> Value {
        match self {
            Field::Int(v) => json!(v),
            Field::Bool(v) => json!(v),
            Field::Text(v) => json!(v),
            Field::List(v) => json!(v),
            Field::Null => Value::Null,
        }
    }

    fn to_cell(&self) -> String {
        match self {
            Field::Int(v) => v.to_string(),
            Field::Bool(v) => v.to_string(),
            Field::Text(v) => v.clone(),
            Field::List(v) => v.join(";"),
            Field::Null => String::new(),
        }
    }
}

/// Ordered `(column, value)` pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record(pub Vec<(&'static str, Field)>);

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &'static str, value: impl Into<Field>) -> Self {
        self.0.push((key, value.into()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Field> {
        self.0.iter().find(|(k, _)| *k == key).map(|(_, v)| v)
    }
}

#[derive(Debug, Serialize)]
struct Meta<'a> {
    config: &'a RunConfig,
    version: &'static str,
    scalar_mode: &'static str,
}

#[derive(Debug)]
pub struct Document<'a> {
    pub config: &'a RunConfig,
    pub scalar_mode: &'static str,
    pub records: Vec<Record>,
}

impl Document<'_> {
    fn meta(&self) -> Meta<'_> {
        Meta {
            config: self.config,
            version: env!("CARGO_PKG_VERSION"),
            scalar_mode: self.scalar_mode,
        }
    }

    pub fn to_json(&self) -> String {
        let series: Vec<Value> = self
            .records
            .iter()
            .map(|r| {
                let obj: Map<String, Value> = r.0.iter().map(|(k, v)| (k.to_string(), v.to_json())).collect();
                Value::Object(obj)
            })
            .collect();
        let doc = json!({
            "meta": serde_json::to_value(self.meta()).expect("serializable config"),
            "series": series,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable document");
        s.push('\n');
        s
    }

    /// Columns are the union of record keys in first-seen order.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# gramheight {}\n", env!("CARGO_PKG_VERSION")));
        out.push_str(&format!("# scalar_mode: {}\n", self.scalar_mode));
        let config = serde_json::to_string(self.config).expect("serializable config");
        out.push_str(&format!("# config: {config}\n"));

        let mut columns: Vec<&'static str> = Vec::new();
        for r in &self.records {
            for (k, _) in &r.0 {
                if !columns.contains(k) {
                    columns.push(k);
                }
            }
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&columns).expect("in-memory write");
        for r in &self.records {
            let row: Vec<String> = columns
                .iter()
                .map(|c| r.get(c).map_or_else(String::new, Field::to_cell))
                .collect();
            w.write_record(&row).expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("utf-8"));
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            context: "cannot create output directory",
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        context: "cannot write output",
        path: path.to_path_buf(),
        source,
    })
}
