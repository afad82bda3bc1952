//! Tabular output shared by every subcommand.

use std::io::{self, Write};

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
    Bool(bool),
    Null,
}

impl Cell {
    /// Reals carry 17 significant digits so they parse back to the same bits.
    pub fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => format_real(*v),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Null => String::new(),
        }
    }
}

pub fn format_real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Null, Cell::Real)
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Int(v) => serializer.serialize_i64(*v),
            Cell::Real(v) if v.is_finite() => {
                let raw = RawValue::from_string(format_real(*v)).map_err(serde::ser::Error::custom)?;
                raw.serialize(serializer)
            }
            Cell::Real(_) | Cell::Null => serializer.serialize_none(),
            Cell::Text(s) => serializer.serialize_str(s),
            Cell::Bool(b) => serializer.serialize_bool(*b),
        }
    }
}

/// Ordered key/value pairs, serialized as a JSON object in insertion order.
struct Ordered<'a>(&'a [(&'a str, Cell)]);

impl Serialize for Ordered<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

struct Rows<'a> {
    columns: &'a [&'static str],
    rows: &'a [Vec<Cell>],
}

impl Serialize for Rows<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.rows.len()))?;
        for row in self.rows {
            let pairs: Vec<(&str, Cell)> = self.columns.iter().copied().zip(row.iter().cloned()).collect();
            seq.serialize_element(&Ordered(&pairs))?;
        }
        seq.end()
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub command: &'static str,
    pub parameters: Vec<(&'static str, Cell)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &'static str, columns: Vec<&'static str>) -> Self {
        Table { command, parameters: Vec::new(), columns, rows: Vec::new() }
    }

    pub fn parameter(mut self, key: &'static str, value: impl Into<Cell>) -> Self {
        self.parameters.push((key, value.into()));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, out: impl Write) -> io::Result<()> {
        let mut out = out;
        writeln!(out, "# schema={SCHEMA_VERSION}")?;
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(&self.columns)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(Cell::render))?;
        }
        writer.flush()
    }

    pub fn write_json(&self, mut out: impl Write) -> io::Result<()> {
        let record = Record {
            schema_version: SCHEMA_VERSION,
            command: self.command,
            parameters: Ordered(&self.parameters),
            rows: Rows { columns: &self.columns, rows: &self.rows },
        };
        serde_json::to_writer_pretty(&mut out, &record)?;
        writeln!(out)
    }
}

#[derive(Serialize)]
struct Record<'a> {
    schema_version: &'static str,
    command: &'static str,
    parameters: Ordered<'a>,
    rows: Rows<'a>,
}
