//! Fits lhs(h) = L + C·h^p to the last rows of a convergence table.

use serde::{Deserialize, Serialize};

use super::table::ConvergenceTable;
use crate::error::{Error, Result};

/// Rows used by the fit.
pub const FIT_WINDOW: usize = 3;
const RATE_RANGE: (f64, f64) = (1e-3, 8.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolationResult {
    pub limit_estimate: f64,
    /// None when the fit is ill-conditioned; the limit is then the last lhs.
    pub fitted_rate: Option<f64>,
    /// RMS misfit of the model over every row of the table.
    pub residual: f64,
}

/// Exact fit of L + C hᵖ through three points; p solves
/// (y₁−y₂)/(h₁ᵖ−h₂ᵖ) = (y₂−y₃)/(h₂ᵖ−h₃ᵖ).
fn three_point_fit(h: [f64; 3], y: [f64; 3]) -> Option<(f64, f64, f64)> {
    let d1 = y[0] - y[1];
    let d2 = y[1] - y[2];
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    if d1.abs() <= 1e-13 * scale || d2.abs() <= 1e-13 * scale || d1 * d2 <= 0.0 {
        return None;
    }
    // g(p) = d1(h₂ᵖ−h₃ᵖ) − d2(h₁ᵖ−h₂ᵖ), sign change bracketed by bisection.
    let g = |p: f64| d1 * (h[1].powf(p) - h[2].powf(p)) - d2 * (h[0].powf(p) - h[1].powf(p));
    let (mut a, mut b) = RATE_RANGE;
    let (mut ga, gb) = (g(a), g(b));
    if ga * gb > 0.0 {
        return None;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let gm = g(m);
        if gm == 0.0 || (b - a) < 1e-15 * m {
            a = m;
            b = m;
            break;
        }
        if ga * gm < 0.0 {
            b = m;
        } else {
            a = m;
            ga = gm;
        }
    }
    let p = 0.5 * (a + b);
    let c = d1 / (h[0].powf(p) - h[1].powf(p));
    let l = y[2] - c * h[2].powf(p);
    l.is_finite().then_some((l, c, p))
}

pub fn extrapolate(table: &ConvergenceTable) -> Result<ExtrapolationResult> {
    let n = table.rows.len();
    if n < FIT_WINDOW {
        return Err(Error::Config(format!("extrapolation needs at least {FIT_WINDOW} rows, got {n}")));
    }
    let last = &table.rows[n - FIT_WINDOW..];
    let h = [last[0].h, last[1].h, last[2].h];
    let y = [last[0].lhs, last[1].lhs, last[2].lhs];
    let Some((l, c, p)) = three_point_fit(h, y) else {
        let last = table.rows[n - 1].lhs;
        let residual = rms(table.rows.iter().map(|r| r.lhs - last));
        return Ok(ExtrapolationResult { limit_estimate: last, fitted_rate: None, residual });
    };
    let residual = rms(table.rows.iter().map(|r| r.lhs - (l + c * r.h.powf(p))));
    Ok(ExtrapolationResult { limit_estimate: l, fitted_rate: Some(p), residual })
}

fn rms(values: impl Iterator<Item = f64>) -> f64 {
    let (s, k) = values.fold((0.0, 0usize), |(s, k), v| (s + v * v, k + 1));
    (s / k.max(1) as f64).sqrt()
}
