//! CSV tables and gnuplot scripts.
//!
//! Floats are written as `{:.16e}` (17 significant digits, round-trippable);
//! booleans as `true`/`false`. Rows end in a bare LF.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

pub enum Cell {
    Num(f64),
    Int(usize),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self {
            header: header.iter().map(|s| s.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name).map(|i| i + 1)
    }

    pub fn render(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn into_file(self, name: &str) -> Result<OutputFile> {
        Ok(OutputFile {
            name: name.to_string(),
            contents: self.render()?,
        })
    }
}

/// One `plot` of several columns of a CSV against column 1.
pub struct Plot<'a> {
    pub csv: &'a str,
    pub title: &'a str,
    pub xlabel: &'a str,
    pub ylabel: &'a str,
    pub columns: Vec<(usize, String)>,
    pub logscale_y: bool,
}

pub fn gnuplot_script(plot: &Plot<'_>) -> String {
    let stem = plot.csv.trim_end_matches(".csv");
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set key autotitle columnhead\n");
    s.push_str("set terminal pngcairo size 900,600\n");
    s.push_str(&format!("set output '{stem}.png'\n"));
    s.push_str(&format!("set title '{}'\n", plot.title));
    s.push_str(&format!("set xlabel '{}'\n", plot.xlabel));
    s.push_str(&format!("set ylabel '{}'\n", plot.ylabel));
    if plot.logscale_y {
        s.push_str("set logscale y\n");
    }
    s.push_str("set grid\n");
    let parts: Vec<String> = plot
        .columns
        .iter()
        .map(|(col, title)| format!("'{}' using 1:{col} with lines lw 2 title '{title}'", plot.csv))
        .collect();
    s.push_str(&format!("plot {}\n", parts.join(", \\\n     ")));
    s
}
