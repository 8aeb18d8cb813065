//! Convergence tables and their CSV form.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "h,lhs,rhs,ratio,abs_err";

/// A named truncation or resolution bound attached to a row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub name: String,
    pub value: f64,
}

impl Certificate {
    pub fn new(name: &str, value: f64) -> Self {
        Self { name: name.to_string(), value }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub h: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// lhs/rhs, NaN when rhs = 0.
    pub ratio: f64,
    pub abs_err: f64,
    pub certificates: Vec<Certificate>,
}

impl ConvergenceRow {
    pub fn new(h: f64, lhs: f64, rhs: f64, certificates: Vec<Certificate>) -> Self {
        Self {
            h,
            lhs,
            rhs,
            ratio: if rhs != 0.0 { lhs / rhs } else { f64::NAN },
            abs_err: (lhs - rhs).abs(),
            certificates,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub experiment: String,
    pub rows: Vec<ConvergenceRow>,
    pub metadata: BTreeMap<String, String>,
    /// Non-fatal findings such as a non-monotone error trend.
    pub flags: Vec<String>,
}

impl ConvergenceTable {
    pub fn new(experiment: &str) -> Self {
        Self {
            experiment: experiment.to_string(),
            rows: Vec::new(),
            metadata: BTreeMap::new(),
            flags: Vec::new(),
        }
    }

    /// Appends a row; h must decrease and the row must carry certificates.
    pub fn push(&mut self, row: ConvergenceRow) -> Result<()> {
        if row.certificates.is_empty() {
            return Err(Error::Precondition(format!("row at h = {} has no certificates", row.h)));
        }
        self.push_unchecked(row)
    }

    fn push_unchecked(&mut self, row: ConvergenceRow) -> Result<()> {
        if let Some(last) = self.rows.last() {
            if !(row.h < last.h) {
                return Err(Error::Config(format!("h must decrease across rows ({} after {})", row.h, last.h)));
            }
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn last(&self) -> Option<&ConvergenceRow> {
        self.rows.last()
    }

    /// Flags every step where |lhs − rhs| grows by more than `noise_floor`.
    /// Returns whether the trend is monotone.
    pub fn check_error_trend(&mut self, noise_floor: f64) -> bool {
        let mut monotone = true;
        for w in 1..self.rows.len() {
            let (a, b) = (&self.rows[w - 1], &self.rows[w]);
            if b.abs_err > a.abs_err + noise_floor {
                monotone = false;
                self.flags.push(format!(
                    "error grows from {:.3e} at h = {} to {:.3e} at h = {}",
                    a.abs_err, a.h, b.abs_err, b.h
                ));
            }
        }
        monotone
    }

    /// Rows without certificates (only possible for tables read back from CSV).
    pub fn uncertified_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.certificates.is_empty()).count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_sci(r.h),
                fmt_sci(r.lhs),
                fmt_sci(r.rhs),
                fmt_sci(r.ratio),
                fmt_sci(r.abs_err)
            ));
        }
        out
    }

    /// Reads the CSV written by [`to_csv`](Self::to_csv). Certificates and
    /// metadata travel separately (see [`TableMetadata`]).
    pub fn from_csv(experiment: &str, text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        match lines.next() {
            Some(h) if h.trim() == CSV_HEADER => {}
            other => {
                return Err(Error::Parse(format!("expected header `{CSV_HEADER}`, found {other:?}")));
            }
        }
        let mut table = Self::new(experiment);
        for (k, line) in lines.enumerate() {
            let fields: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("row {}: {e}", k + 1)))?;
            if fields.len() != 5 {
                return Err(Error::Parse(format!("row {} has {} fields, expected 5", k + 1, fields.len())));
            }
            table.push_unchecked(ConvergenceRow {
                h: fields[0],
                lhs: fields[1],
                rhs: fields[2],
                ratio: fields[3],
                abs_err: fields[4],
                certificates: Vec::new(),
            })?;
        }
        Ok(table)
    }

    pub fn metadata(&self) -> TableMetadata {
        TableMetadata {
            experiment: self.experiment.clone(),
            metadata: self.metadata.clone(),
            flags: self.flags.clone(),
            certificates: self.rows.iter().map(|r| r.certificates.clone()).collect(),
        }
    }

    /// Re-attaches metadata read from the sidecar file.
    pub fn attach(&mut self, meta: TableMetadata) -> Result<()> {
        if meta.certificates.len() != self.rows.len() {
            return Err(Error::Parse(format!(
                "metadata lists {} rows, table has {}",
                meta.certificates.len(),
                self.rows.len()
            )));
        }
        self.experiment = meta.experiment;
        self.metadata = meta.metadata;
        self.flags = meta.flags;
        for (r, c) in self.rows.iter_mut().zip(meta.certificates) {
            r.certificates = c;
        }
        Ok(())
    }
}

/// Everything in a table that the five CSV columns do not carry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableMetadata {
    pub experiment: String,
    pub metadata: BTreeMap<String, String>,
    pub flags: Vec<String>,
    pub certificates: Vec<Vec<Certificate>>,
}

/// Scientific notation with 12 significant digits.
pub fn fmt_sci(x: f64) -> String {
    format!("{x:.11e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ConvergenceTable {
        let mut t = ConvergenceTable::new("demo");
        for (h, lhs) in [(0.02, 0.55), (0.01, 0.53), (0.005, 0.5234567890123456)] {
            t.push(ConvergenceRow::new(h, lhs, 0.523, vec![Certificate::new("m_cutoff", 3.0)]))
                .unwrap();
        }
        t
    }

    #[test]
    fn csv_round_trip() {
        let t = sample();
        let csv = t.to_csv();
        assert!(csv.starts_with("h,lhs,rhs,ratio,abs_err\n"));
        assert!(csv.contains("5.23456789012e-1"));
        let mut back = ConvergenceTable::from_csv("demo", &csv).unwrap();
        assert_eq!(back.to_csv(), csv);
        for (a, b) in back.rows.iter().zip(&t.rows) {
            assert!((a.lhs - b.lhs).abs() <= 1e-11 * b.lhs.abs());
        }
        back.attach(t.metadata()).unwrap();
        assert_eq!(back.uncertified_rows(), 0);
    }

    #[test]
    fn ratio_undefined_for_zero_rhs() {
        let r = ConvergenceRow::new(0.1, 0.0, 0.0, vec![Certificate::new("x", 0.0)]);
        assert!(r.ratio.is_nan());
        let mut t = ConvergenceTable::new("zero");
        t.push(r).unwrap();
        let back = ConvergenceTable::from_csv("zero", &t.to_csv()).unwrap();
        assert!(back.rows[0].ratio.is_nan());
    }

    #[test]
    fn rows_must_decrease_and_be_certified() {
        let mut t = sample();
        assert!(t.push(ConvergenceRow::new(0.01, 1.0, 1.0, vec![Certificate::new("x", 0.0)])).is_err());
        assert!(t.push(ConvergenceRow::new(0.001, 1.0, 1.0, vec![])).is_err());
    }

    #[test]
    fn error_trend_flags() {
        let mut t = sample();
        assert!(t.check_error_trend(0.0));
        t.push(ConvergenceRow::new(0.001, 0.6, 0.523, vec![Certificate::new("x", 0.0)])).unwrap();
        assert!(!t.check_error_trend(1e-3));
        assert_eq!(t.flags.len(), 1);
    }

    #[test]
    fn malformed_csv_rejected() {
        assert!(ConvergenceTable::from_csv("x", "a,b\n1,2\n").is_err());
        assert!(ConvergenceTable::from_csv("x", "h,lhs,rhs,ratio,abs_err\n1,2,3\n").is_err());
        assert!(ConvergenceTable::from_csv("x", "h,lhs,rhs,ratio,abs_err\n1,2,3,4,zz\n").is_err());
    }
}
