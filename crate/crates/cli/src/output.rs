//! CSV and JSON writers. Missing or non-finite numbers become an empty CSV
//! field or JSON `null`; row order is kept as given.

use std::fs::File;
use std::io::{self, BufWriter, Write};

use serde_json::{json, Map, Value};

use crate::job::{Format, JobSpec};

pub const SCHEMA: &str = "pseudoanalytic/1";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Null,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        if v.is_finite() {
            Cell::Num(v)
        } else {
            Cell::Null
        }
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Null, Cell::from)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Null => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Null => Value::Null,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, out: &mut impl Write) -> io::Result<()> {
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn to_json(&self, spec: &JobSpec) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> =
                    self.columns.iter().zip(row).map(|(k, v)| (k.to_string(), v.json())).collect();
                Value::Object(obj)
            })
            .collect();
        json!({ "schema": SCHEMA, "spec": spec, "rows": rows })
    }

    /// Writes to the job's output path, or stdout.
    pub fn emit(&self, spec: &JobSpec) -> io::Result<()> {
        match &spec.output.path {
            Some(path) => {
                let mut w = BufWriter::new(File::create(path)?);
                self.write(spec, &mut w)?;
                w.flush()
            }
            None => {
                let stdout = io::stdout();
                let mut w = stdout.lock();
                self.write(spec, &mut w)?;
                w.flush()
            }
        }
    }

    fn write(&self, spec: &JobSpec, w: &mut impl Write) -> io::Result<()> {
        match spec.output.format {
            Format::Csv => self.write_csv(w),
            Format::Json => {
                serde_json::to_writer_pretty(&mut *w, &self.to_json(spec))?;
                writeln!(w)
            }
        }
    }
}
