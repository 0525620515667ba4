//! Tabular output shared by every command: CSV with a fixed header, or JSON as
//! an array of objects keyed by the same column names.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::ValueEnum;
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Rounds to 12 significant digits and prints the shortest decimal that
/// reads back to the rounded value.
pub fn format_number(x: f64) -> String {
    round_sig12(x).to_string()
}

fn round_sig12(x: f64) -> f64 {
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    // no negative zeros in the output
    if rounded == 0.0 {
        0.0
    } else {
        rounded
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
}

impl Cell {
    fn csv(self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => format_number(v),
        }
    }

    fn json(self) -> Value {
        match self {
            Cell::Int(v) => Value::from(v),
            Cell::Real(v) => Number::from_f64(round_sig12(v)).map_or(Value::Null, Value::Number),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: &'static [&'static str],
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &'static [&'static str]) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width must match the header"
        );
        self.rows.push(row);
    }

    pub fn write_to(&self, format: Format, out: &mut dyn Write) -> io::Result<()> {
        match format {
            Format::Csv => {
                writeln!(out, "{}", self.columns.join(","))?;
                for row in &self.rows {
                    let fields: Vec<String> = row.iter().map(|c| c.csv()).collect();
                    writeln!(out, "{}", fields.join(","))?;
                }
            }
            Format::Json => {
                let records: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let object: Map<String, Value> = self
                            .columns
                            .iter()
                            .zip(row)
                            .map(|(k, c)| (k.to_string(), c.json()))
                            .collect();
                        Value::Object(object)
                    })
                    .collect();
                serde_json::to_writer_pretty(&mut *out, &records)?;
                writeln!(out)?;
            }
        }
        Ok(())
    }
}

/// Opens the destination: the file at `path`, or standard output.
pub fn open_sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(path) => {
            let file = File::create(path).map_err(|e| {
                io::Error::new(e.kind(), format!("cannot write {}: {e}", path.display()))
            })?;
            Box::new(BufWriter::new(file))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}
