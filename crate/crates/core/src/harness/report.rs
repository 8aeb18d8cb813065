//! Plain-text rendering of convergence tables.

use std::fmt::Write;

use super::extrapolate::extrapolate;
use super::table::ConvergenceTable;

/// One section per table: rows, extrapolation (when there are enough
/// rows), certificates of the last row and flags.
pub fn render_report(tables: &[ConvergenceTable]) -> String {
    let mut out = String::new();
    for t in tables {
        let _ = writeln!(out, "== {} ({} rows)", t.experiment, t.rows.len());
        for (k, v) in &t.metadata {
            let _ = writeln!(out, "   {k} = {v}");
        }
        let _ = writeln!(out, "   {:>12} {:>16} {:>16} {:>12} {:>12}", "h", "lhs", "rhs", "ratio", "abs_err");
        for r in &t.rows {
            let _ = writeln!(
                out,
                "   {:>12.6e} {:>16.10} {:>16.10} {:>12.6} {:>12.4e}",
                r.h, r.lhs, r.rhs, r.ratio, r.abs_err
            );
        }
        match extrapolate(t) {
            Ok(e) => {
                let rate = e.fitted_rate.map_or("unavailable".to_string(), |p| format!("{p:.4}"));
                let _ = writeln!(
                    out,
                    "   extrapolated limit {:.10} (rate {rate}, residual {:.3e})",
                    e.limit_estimate, e.residual
                );
            }
            Err(_) => {
                let _ = writeln!(out, "   extrapolation: too few rows");
            }
        }
        if let Some(last) = t.rows.last() {
            if last.certificates.is_empty() {
                let _ = writeln!(out, "   certificates: missing");
            } else {
                let list: Vec<String> = last.certificates.iter().map(|c| format!("{}={:.4e}", c.name, c.value)).collect();
                let _ = writeln!(out, "   certificates (last row): {}", list.join(", "));
            }
        }
        for f in &t.flags {
            let _ = writeln!(out, "   flag: {f}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::table::{Certificate, ConvergenceRow};

    #[test]
    fn report_lists_rows_and_limit() {
        let mut t = ConvergenceTable::new("theorem1");
        for h in [0.02, 0.01, 0.005] {
            t.push(ConvergenceRow::new(h, 0.5 + h, 0.5, vec![Certificate::new("m_min", -5.0)])).unwrap();
        }
        let text = render_report(&[t]);
        assert!(text.contains("== theorem1 (3 rows)"));
        assert!(text.contains("extrapolated limit 0.5000000000"));
        assert!(text.contains("m_min=-5.0000e0"));
    }
}
