//! Rendering of results as an aligned table, CSV or JSON.

use std::fmt::Write as _;

use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
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

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl Cell {
    /// 17 significant digits, enough to reproduce every `f64` exactly.
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => {
                format!("\"{}\"", s.replace('"', "\"\""))
            }
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn human(&self) -> String {
        match self {
            Cell::Num(v) if *v != 0.0 && (v.abs() < 1e-4 || v.abs() >= 1e16) => format!("{v:e}"),
            Cell::Num(v) => format!("{v}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => "-".to_string(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn human(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(Cell::human).collect())
            .collect();
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.len()).collect();
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, row: &[String]| {
            let padded: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            let _ = writeln!(out, "{}", padded.join("  ").trim_end());
        };
        line(&mut out, &self.columns);
        for row in &cells {
            line(&mut out, row);
        }
        out
    }
}

/// A single record shown as `key  value` lines in table mode and as a header
/// plus one line in CSV mode.
#[derive(Debug, Clone, Default)]
pub struct Record(pub Vec<(String, Cell)>);

impl Record {
    pub fn add(&mut self, key: &str, value: impl Into<Cell>) -> &mut Self {
        self.0.push((key.to_string(), value.into()));
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Table => {
                let width = self.0.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                self.0
                    .iter()
                    .map(|(k, v)| format!("{k:<width$}  {}\n", v.human()))
                    .collect()
            }
            Format::Csv => {
                let mut t = Table {
                    columns: self.0.iter().map(|(k, _)| k.clone()).collect(),
                    rows: Vec::new(),
                };
                t.rows.push(self.0.iter().map(|(_, v)| v.clone()).collect());
                t.csv()
            }
            Format::Json => {
                let mut map = serde_json::Map::new();
                for (k, v) in &self.0 {
                    let value = match v {
                        Cell::Num(x) => serde_json::Value::from(*x),
                        Cell::Int(x) => serde_json::Value::from(*x),
                        Cell::Text(s) => serde_json::Value::from(s.clone()),
                        Cell::Empty => serde_json::Value::Null,
                    };
                    map.insert(k.clone(), value);
                }
                let mut s = serde_json::Value::Object(map).to_string();
                s.push('\n');
                s
            }
        }
    }
}
