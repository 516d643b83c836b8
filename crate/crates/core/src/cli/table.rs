//! Tabular output shared by the subcommands, with CSV and JSON encodings.
//!
//! CSV floats use 17 significant digits in scientific notation; JSON floats
//! use the shortest representation that parses back to the same `f64`.
//! Both are exact round trips.

use std::io::Write;

use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Empty,
    Text(String),
    Int(i64),
    Float(f64),
    Ints(Vec<i64>),
    Floats(Vec<f64>),
}

/// Formats a float with 17 significant digits, independent of locale.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

impl Cell {
    fn csv_field(&self) -> String {
        match self {
            Cell::Empty => String::new(),
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Ints(v) => v.iter().map(i64::to_string).collect::<Vec<_>>().join(";"),
            Cell::Floats(v) => v.iter().map(|x| format_float(*x)).collect::<Vec<_>>().join(";"),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Empty => Value::Null,
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Int(i) => Value::from(*i),
            Cell::Float(v) => float_json(*v),
            Cell::Ints(v) => Value::Array(v.iter().map(|i| Value::from(*i)).collect()),
            Cell::Floats(v) => Value::Array(v.iter().map(|x| float_json(*x)).collect()),
        }
    }

    fn from_json(v: &Value) -> Option<Cell> {
        Some(match v {
            Value::Null => Cell::Empty,
            Value::String(s) => Cell::Text(s.clone()),
            Value::Number(n) => number_cell(n)?,
            Value::Array(items) => {
                if items.iter().all(|i| i.as_number().is_some_and(|n| !n.is_f64())) {
                    Cell::Ints(items.iter().map(Value::as_i64).collect::<Option<_>>()?)
                } else {
                    Cell::Floats(items.iter().map(Value::as_f64).collect::<Option<_>>()?)
                }
            }
            Value::Bool(_) | Value::Object(_) => return None,
        })
    }
}

fn number_cell(n: &Number) -> Option<Cell> {
    if n.is_f64() {
        n.as_f64().map(Cell::Float)
    } else {
        n.as_i64().map(Cell::Int)
    }
}

fn float_json(v: f64) -> Value {
    Number::from_f64(v).map_or(Value::Null, Value::Number)
}

/// A header plus rows of cells, one cell per column.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

/// A table with the configuration that produced it and optional summary
/// values.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub config: Value,
    pub table: Table,
    pub summary: Vec<(String, Cell)>,
}

impl Report {
    /// Header row, records, then one `# key=value` line per summary entry.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.table.columns)?;
        for row in &self.table.rows {
            w.write_record(row.iter().map(Cell::csv_field))?;
        }
        w.flush()?;
        let mut out = w.into_inner().map_err(|e| e.into_error())?;
        for (key, value) in &self.summary {
            writeln!(out, "# {key}={}", value.csv_field())?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let rows = self
            .table
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .table
                    .columns
                    .iter()
                    .cloned()
                    .zip(row.iter().map(Cell::to_json))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let summary: Map<String, Value> = self
            .summary
            .iter()
            .map(|(k, v)| (k.clone(), v.to_json()))
            .collect();
        let mut doc = Map::new();
        doc.insert("config".into(), self.config.clone());
        doc.insert(
            "columns".into(),
            Value::Array(self.table.columns.iter().cloned().map(Value::String).collect()),
        );
        doc.insert("rows".into(), Value::Array(rows));
        doc.insert("summary".into(), Value::Object(summary));
        Value::Object(doc)
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut out, &self.to_json())?;
        writeln!(out)
    }

    /// Rebuilds a report from the JSON produced by [`Report::to_json`].
    pub fn from_json(doc: &Value) -> Option<Report> {
        let columns: Vec<String> = doc
            .get("columns")?
            .as_array()?
            .iter()
            .map(|c| c.as_str().map(String::from))
            .collect::<Option<_>>()?;
        let mut table = Table::new(columns.clone());
        for row in doc.get("rows")?.as_array()? {
            let obj = row.as_object()?;
            let cells = columns
                .iter()
                .map(|c| Cell::from_json(obj.get(c)?))
                .collect::<Option<Vec<_>>>()?;
            table.push(cells);
        }
        let summary = doc
            .get("summary")?
            .as_object()?
            .iter()
            .map(|(k, v)| Some((k.clone(), Cell::from_json(v)?)))
            .collect::<Option<_>>()?;
        Some(Report {
            config: doc.get("config")?.clone(),
            table,
            summary,
        })
    }
}
