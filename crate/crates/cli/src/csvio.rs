//! Generic CSV output: integers verbatim, reals in scientific notation with
//! 12 significant digits, anything else as text.

use std::path::Path;

use magneumann::harness::fmt_sci;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => fmt_sci(*v),
            Cell::Text(s) => s.clone(),
        }
    }

    fn parse(s: &str) -> Self {
        if let Ok(v) = s.parse::<i64>() {
            Cell::Int(v)
        } else if let Ok(v) = s.parse::<f64>() {
            Cell::Real(v)
        } else {
            Cell::Text(s.to_string())
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_string(&self) -> anyhow::Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render))?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let header = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            rows.push(rec?.iter().map(Cell::parse).collect());
        }
        Ok(Self { header, rows })
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        std::fs::write(path, self.to_string()?)?;
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join("  ");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.iter().map(Cell::render).collect::<Vec<_>>().join("  "));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let mut t = CsvTable::new(&["index", "eigenvalue", "m", "note"]);
        t.push(vec![1usize.into(), 0.0061234567890123.into(), (-3i64).into(), "ok".into()]);
        t.push(vec![2usize.into(), 1.0.into(), 12i64.into(), true.into()]);
        let text = t.to_string().unwrap();
        assert!(text.contains("6.12345678901e-3"));
        let back = CsvTable::parse(&text).unwrap();
        assert_eq!(back.to_string().unwrap(), text);
    }
}
