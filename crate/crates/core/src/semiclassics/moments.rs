//! Edge moments m(c) = ∫ [c − μ₁(ξ)]₊ dξ and sub-level sets {μ₁ < c}.

use serde::{Deserialize, Serialize};

use crate::degennes::Mu1Table;
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Step of the fallback counting grid used when μ₁ fails the unimodality scan.
pub const FALLBACK_STEP: f64 = 1e-3;

/// {ξ : μ₁(ξ) < c} as an interval; `upper = None` means unbounded above.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelSet {
    pub lower: f64,
    pub upper: Option<f64>,
    /// Length of the set, or `f64::INFINITY`.
    pub measure: f64,
}

impl LevelSet {
    pub fn empty() -> Self {
        Self {
            lower: 0.0,
            upper: Some(0.0),
            measure: 0.0,
        }
    }
}

fn bisect_crossing(table: &Mu1Table, c: f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    // μ₁ − c changes sign on [lo, hi]
    let f_lo = table.eval(lo)? - c;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-14 {
            break;
        }
        let f_mid = table.eval(mid)? - c;
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The sub-level set {ξ : μ₁(ξ) < c}. Uses the two monotone branches
/// around ξ* when the table is unimodal, fine-grid counting otherwise.
pub fn level_set(c: f64, table: &Mu1Table) -> Result<LevelSet> {
    if !c.is_finite() {
        return Err(Error::Domain(format!("level {c} is not finite")));
    }
    if c <= table.theta0 {
        return Ok(LevelSet::empty());
    }
    if !table.is_unimodal() {
        return Ok(level_set_by_counting(c, table));
    }
    let left = table.xi_min;
    let right = table.xi_max();
    let lower = if table.eval(left)? < c {
        left
    } else {
        bisect_crossing(table, c, left, table.xi_star)?
    };
    if c >= 1.0 || table.eval(right)? < c {
        return Ok(LevelSet {
            lower,
            upper: None,
            measure: f64::INFINITY,
        });
    }
    let upper = bisect_crossing(table, c, table.xi_star, right)?;
    Ok(LevelSet {
        lower,
        upper: Some(upper),
        measure: upper - lower,
    })
}

fn level_set_by_counting(c: f64, table: &Mu1Table) -> LevelSet {
    let count = ((table.xi_max() - table.xi_min) / FALLBACK_STEP).round() as usize;
    let mut inside = 0usize;
    let mut first = None;
    let mut last_inside = false;
    for i in 0..count {
        let x = table.xi_min + (i as f64 + 0.5) * FALLBACK_STEP;
        let below = table.eval(x).map(|v| v < c).unwrap_or(false);
        if below {
            inside += 1;
            first.get_or_insert(x - 0.5 * FALLBACK_STEP);
        }
        last_inside = below;
    }
    let measure = inside as f64 * FALLBACK_STEP;
    LevelSet {
        lower: first.unwrap_or(0.0),
        upper: if last_inside && c >= 1.0 { None } else { first.map(|f| f + measure) },
        measure: if last_inside && c >= 1.0 { f64::INFINITY } else { measure },
    }
}

/// Value of m(c) with its error budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeMoment {
    pub value: f64,
    pub level_set: LevelSet,
    /// Bound on the part of the integral beyond the table (ξ > 6).
    pub tail_bound: f64,
}

/// m(c) = ∫_ℝ [c − μ₁(ξ)]₊ dξ for c ∈ (0, 1].
pub fn edge_moment(c: f64, table: &Mu1Table) -> Result<f64> {
    Ok(edge_moment_detailed(c, table)?.value)
}

pub fn edge_moment_detailed(c: f64, table: &Mu1Table) -> Result<EdgeMoment> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::Domain(format!(
            "edge moment needs c in (0, 1], got {c} (c = b/B(x) never exceeds 1)"
        )));
    }
    let set = level_set(c, table)?;
    if set.measure == 0.0 {
        return Ok(EdgeMoment {
            value: 0.0,
            level_set: set,
            tail_bound: 0.0,
        });
    }
    let (upper, tail) = match set.upper {
        Some(u) => (u, 0.0),
        None => (table.xi_max(), table.tail_bound()),
    };
    let value = integrate_on_cells(table, set.lower, upper, |x| (c - table.eval(x).unwrap_or(c)).max(0.0));
    Ok(EdgeMoment {
        value,
        level_set: set,
        tail_bound: tail,
    })
}

/// Integrates over [a, b] with panels aligned to the table cells, where the
/// interpolant is a single cubic; three Gauss nodes per panel.
pub(crate) fn integrate_on_cells<F: Fn(f64) -> f64>(table: &Mu1Table, a: f64, b: f64, f: F) -> f64 {
    if b <= a {
        return 0.0;
    }
    let rule = GaussLegendre::new(3);
    let first = ((a - table.xi_min) / table.xi_step).floor() as i64 + 1;
    let last = ((b - table.xi_min) / table.xi_step).ceil() as i64 - 1;
    let mut edges = vec![a];
    for i in first..=last {
        let x = table.xi_min + table.xi_step * i as f64;
        if x > a && x < b {
            edges.push(x);
        }
    }
    edges.push(b);
    edges.windows(2).map(|w| rule.integrate(w[0], w[1], &f)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::OnceLock;

    fn table() -> &'static Mu1Table {
        static T: OnceLock<Mu1Table> = OnceLock::new();
        T.get_or_init(|| Mu1Table::build(6.0, 0.01, 1000).unwrap())
    }

    #[test]
    fn moment_vanishes_at_theta0() {
        let t = table();
        assert_eq!(edge_moment(t.theta0, t).unwrap(), 0.0);
        assert_eq!(edge_moment(0.3, t).unwrap(), 0.0);
    }

    #[test]
    fn moment_at_one_is_half_line_integral() {
        let t = table();
        let m1 = edge_moment(1.0, t).unwrap();
        // independent: fine midpoint rule of 1 − μ₁ over (0, 6)
        let n = 120_000;
        let direct: f64 = (0..n)
            .map(|i| 6.0 * (i as f64 + 0.5) / n as f64)
            .map(|x| (1.0 - t.eval(x).unwrap()).max(0.0))
            .sum::<f64>()
            * 6.0
            / n as f64;
        assert!((m1 - direct).abs() < 1e-6, "{m1} vs {direct}");
    }

    #[test]
    fn rejects_c_above_one() {
        assert!(matches!(edge_moment(1.01, table()), Err(Error::Domain(_))));
        assert!(matches!(edge_moment(0.0, table()), Err(Error::Domain(_))));
    }

    #[test]
    fn level_set_endpoints_hit_the_level() {
        let t = table();
        let set = level_set(0.8, t).unwrap();
        let up = set.upper.unwrap();
        assert!((t.eval(set.lower).unwrap() - 0.8).abs() < 1e-10);
        assert!((t.eval(up).unwrap() - 0.8).abs() < 1e-10);
        assert!(set.lower < t.xi_star && t.xi_star < up);
        assert!(level_set(1.0, t).unwrap().upper.is_none());
        assert_eq!(level_set(0.5, t).unwrap().measure, 0.0);
    }

    #[test]
    fn counting_fallback_agrees() {
        let t = table();
        let exact = level_set(0.8, t).unwrap().measure;
        let counted = level_set_by_counting(0.8, t).measure;
        assert!((exact - counted).abs() <= 2.0 * FALLBACK_STEP);
    }

    #[test]
    fn moment_monotone_convex_and_derivative() {
        let t = table();
        let cs: Vec<f64> = (0..=40).map(|i| 0.6 + 0.01 * i as f64).collect();
        let ms: Vec<f64> = cs.iter().map(|&c| edge_moment(c, t).unwrap()).collect();
        for w in ms.windows(2) {
            assert!(w[1] >= w[0] - 1e-8);
        }
        for w in ms.windows(3) {
            assert!(w[0] + w[2] - 2.0 * w[1] >= -1e-8);
        }
        for c in [0.65, 0.75, 0.85, 0.95] {
            let d = 1e-4;
            let fd = (edge_moment(c + d, t).unwrap() - edge_moment(c - d, t).unwrap()) / (2.0 * d);
            let measure = level_set(c, t).unwrap().measure;
            assert!((fd - measure).abs() < 1e-4, "c={c}: {fd} vs {measure}");
        }
    }
}
