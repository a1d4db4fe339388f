//! Tables with a metadata record, written as CSV or JSON.
//!
//! CSV starts with one `# {...}` comment line holding the metadata as
//! compact JSON, then a header row. Floats use the shortest representation
//! that round-trips, so output is byte-stable for a given build.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::args::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::F(x) => format!("{x:?}"),
            Cell::I(i) => i.to_string(),
            Cell::S(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::F(x) => json!(x),
            Cell::I(i) => json!(i),
            Cell::S(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::I(i as i64)
    }
}

impl From<u32> for Cell {
    fn from(i: u32) -> Self {
        Cell::I(i64::from(i))
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::I(i64::from(b))
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::S(s.to_owned())
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::F)
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Resolved configuration of a run: the command path plus every flag.
pub fn meta(command: &str, parts: &[&dyn erased::Part]) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("toolkit".into(), json!("varmotion"));
    m.insert("version".into(), json!(varmotion::VERSION));
    m.insert("command".into(), json!(command));
    for part in parts {
        if let Value::Object(fields) = part.to_value() {
            m.extend(fields);
        }
    }
    m
}

pub mod erased {
    use super::*;

    /// Object-safe view of a serializable flag group.
    pub trait Part {
        fn to_value(&self) -> Value;
    }

    impl<T: Serialize> Part for T {
        fn to_value(&self) -> Value {
            serde_json::to_value(self).unwrap_or(Value::Null)
        }
    }
}

pub fn render(meta: &Map<String, Value>, table: &Table, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut s = format!("# {}\n", Value::Object(meta.clone()));
            s.push_str(&table.columns.join(","));
            s.push('\n');
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                s.push_str(&cells.join(","));
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
                .collect();
            let doc = json!({ "meta": meta, "columns": table.columns, "rows": rows });
            format!("{doc}\n")
        }
    }
}

pub fn write(text: &str, out: Option<&Path>) -> io::Result<()> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            w.write_all(text.as_bytes())?;
            w.flush()
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
            lock.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["z", "f"]);
        t.push(vec![Cell::F(-0.5), Cell::F(1e-20)]);
        t.push(vec![Cell::I(3), Cell::Empty]);
        let m = meta("telegraph density", &[&json!({"lambda": 1.0})]);
        let s = render(&m, &t, Format::Csv);
        let lines: Vec<&str> = s.lines().collect();
        assert!(lines[0].starts_with("# {") && lines[0].contains("\"lambda\":1.0"));
        assert!(lines[0].contains(varmotion::VERSION));
        assert_eq!(&lines[1..], ["z,f", "-0.5,1e-20", "3,"]);
    }

    #[test]
    fn json_layout() {
        let mut t = Table::new(&["x"]);
        t.push(vec![Cell::F(f64::NAN)]);
        t.push(vec![Cell::F(0.1)]);
        let v: Value = serde_json::from_str(&render(&meta("x", &[]), &t, Format::Json)).unwrap();
        assert_eq!(v["rows"], json!([[null], [0.1]]));
        assert_eq!(v["meta"]["command"], "x");
    }

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 6.02e23, -2.5e-300] {
            assert_eq!(Cell::F(x).csv().parse::<f64>().unwrap(), x);
        }
    }
}
