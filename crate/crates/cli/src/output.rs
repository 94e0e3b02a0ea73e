//! Tables, number formatting and output sinks.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use qbc_core::capacity::RateBound;
use serde_json::{Map, Value};

use crate::CliError;

/// Formats `x` with `digits` significant digits in fixed notation, switching
/// to scientific notation outside `[1e-5, 1e15)`. Trailing zeros are
/// dropped; negative zero prints as `0`.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    // Round in scientific form first so the exponent reflects any carry.
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exponent: i32 = exp.parse().expect("exponent is an integer");
    let s = if (-5..15).contains(&exponent) {
        let rounded: f64 = sci.parse().expect("formatted float parses");
        let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
        trim_zeros(&format!("{rounded:.decimals$}"))
    } else {
        format!("{}e{exponent}", trim_zeros(mantissa))
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<RateBound> for Cell {
    fn from(b: RateBound) -> Self {
        match b {
            RateBound::Finite(v) => Cell::Num(v),
            RateBound::Unbounded => Cell::Text("inf".into()),
        }
    }
}

/// Named table, written as `<name>.csv` or `<name>.json`.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: Vec<&'static str>) -> Self {
        Self { name: name.into(), columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_csv(&self, digits: usize) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(x) => format_sig(*x, digits),
                    Cell::Int(k) => k.to_string(),
                    Cell::Text(s) if s.contains(',') || s.contains('"') => format!("\"{}\"", s.replace('"', "\"\"")),
                    Cell::Text(s) => s.clone(),
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    fn to_json(&self, digits: usize) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (col, cell) in self.columns.iter().zip(row) {
                    let v = match cell {
                        Cell::Num(x) => number(*x, digits),
                        Cell::Int(k) => Value::from(*k),
                        Cell::Text(s) => Value::from(s.clone()),
                    };
                    obj.insert(col.to_string(), v);
                }
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }
}

/// JSON number rounded to `digits` significant digits; non-finite values
/// become strings.
pub fn number(x: f64, digits: usize) -> Value {
    let s = format_sig(x, digits);
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Value::from(v),
        _ => Value::from(s),
    }
}

/// Rounds every number inside a JSON value.
pub fn round_json(v: Value, digits: usize) -> Value {
    match v {
        Value::Number(n) => match n.as_i64() {
            Some(_) => Value::Number(n),
            None => number(n.as_f64().unwrap_or(f64::NAN), digits),
        },
        Value::Array(items) => Value::Array(items.into_iter().map(|x| round_json(x, digits)).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, x)| (k, round_json(x, digits))).collect()),
        other => other,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// A rendered output file.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub file_name: String,
    pub contents: String,
}

pub fn render_table(table: &Table, format: Format, digits: usize) -> Artifact {
    match format {
        Format::Csv => Artifact { file_name: format!("{}.csv", table.name), contents: table.to_csv(digits) },
        Format::Json => Artifact {
            file_name: format!("{}.json", table.name),
            contents: pretty(&table.to_json(digits)),
        },
    }
}

pub fn render_json(name: &str, value: Value, digits: usize) -> Artifact {
    Artifact { file_name: format!("{name}.json"), contents: pretty(&round_json(value, digits)) }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Writes artifacts into `dir`, or to stdout with a `# file:` header line
/// before each one.
pub fn emit(artifacts: &[Artifact], dir: Option<&PathBuf>) -> Result<(), CliError> {
    match dir {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
            for a in artifacts {
                let path = dir.join(&a.file_name);
                fs::write(&path, &a.contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                eprintln!("wrote {}", path.display());
            }
        }
        None => {
            let stdout = io::stdout();
            let mut out = stdout.lock();
            for a in artifacts {
                write!(out, "# file: {}\n{}", a.file_name, a.contents).map_err(|e| CliError::Io(e.to_string()))?;
            }
        }
    }
    Ok(())
}
