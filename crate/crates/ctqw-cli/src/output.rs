//! Deterministic CSV and JSON rendering. CSV numbers use fixed
//! 12-significant-digit scientific notation; JSON carries the same rows as
//! `{ "spec": {...}, "results": [...] }` with native numbers.

use std::io::Write;

use serde_json::{json, Map, Value as Json};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub enum Cell {
    Int(usize),
    Num(f64),
    Bool(bool),
    /// Rendered as an empty CSV field / JSON null.
    Missing,
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Num)
    }
}

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

fn fmt_num(v: f64) -> String {
    format!("{v:.11e}")
}

fn csv_cell(c: &Cell) -> String {
    match c {
        Cell::Int(v) => v.to_string(),
        Cell::Num(v) => fmt_num(*v),
        Cell::Bool(v) => v.to_string(),
        Cell::Missing => String::new(),
    }
}

fn json_cell(c: &Cell) -> Json {
    match c {
        Cell::Int(v) => json!(v),
        Cell::Num(v) => json!(v),
        Cell::Bool(v) => json!(v),
        Cell::Missing => Json::Null,
    }
}

pub fn render(table: &Table, format: Format, spec: &Map<String, Json>, w: &mut dyn Write) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(w, "{}", table.columns.join(","))?;
            for row in &table.rows {
                debug_assert_eq!(row.len(), table.columns.len());
                let cells: Vec<String> = row.iter().map(csv_cell).collect();
                writeln!(w, "{}", cells.join(","))?;
            }
        }
        Format::Json => {
            let results: Vec<Json> = table
                .rows
                .iter()
                .map(|row| {
                    let mut obj = Map::new();
                    for (name, cell) in table.columns.iter().zip(row) {
                        obj.insert((*name).to_string(), json_cell(cell));
                    }
                    Json::Object(obj)
                })
                .collect();
            let doc = json!({ "spec": spec, "results": results });
            writeln!(w, "{}", serde_json::to_string_pretty(&doc)?)?;
        }
    }
    Ok(())
}
