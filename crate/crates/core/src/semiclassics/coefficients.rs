//! Leading-order coefficients of the boundary energy, the counting function
//! and the boundary + bulk split for a constant field.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::geometry::{BoundaryCurve, Point};
use super::moments::{edge_moment, level_set};
use crate::degennes::Mu1Table;
use crate::error::{Error, Result};

/// Field strength along the boundary plus the two infima b (over Ω̄) and
/// b′ (over ∂Ω).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldProfile {
    pub boundary_values: Vec<f64>,
    pub b: f64,
    pub b_prime: f64,
}

impl FieldProfile {
    /// `interior_inf` is inf B over the closure of Ω, which the boundary
    /// samples alone cannot determine.
    pub fn new(boundary_values: Vec<f64>, interior_inf: f64) -> Result<Self> {
        if boundary_values.is_empty() {
            return Err(Error::Config("no boundary field values".into()));
        }
        if let Some(bad) = boundary_values.iter().find(|&&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::Config(format!("field value {bad} is not positive")));
        }
        if !(interior_inf > 0.0) {
            return Err(Error::Config(format!("b = {interior_inf} must be positive")));
        }
        let b_prime = boundary_values.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(Self {
            boundary_values,
            b: interior_inf,
            b_prime,
        })
    }

    pub fn constant(curve: &BoundaryCurve, b: f64) -> Result<Self> {
        Self::new(vec![b; curve.len()], b)
    }

    pub fn from_fn<F: Fn(Point) -> f64>(curve: &BoundaryCurve, field: F, interior_inf: f64) -> Result<Self> {
        Self::new(curve.samples.iter().map(|p| field(p.position)).collect(), interior_inf)
    }

    /// b > Θ₀ b′ > 0.
    pub fn hyp_ok(&self, theta0: f64) -> bool {
        self.b > theta0 * self.b_prime && theta0 * self.b_prime > 0.0
    }

    fn check_matches(&self, curve: &BoundaryCurve) -> Result<()> {
        if self.boundary_values.len() != curve.len() {
            return Err(Error::Config(format!(
                "field has {} samples, curve has {}",
                self.boundary_values.len(),
                curve.len()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticCoefficients {
    pub boundary_energy: f64,
    pub counting: f64,
    pub bulk: f64,
}

/// (1/2π) ∮ B^{3/2} m(b/B) ds.
pub fn boundary_energy_coefficient(curve: &BoundaryCurve, field: &FieldProfile, table: &Mu1Table) -> Result<f64> {
    field.check_matches(curve)?;
    if !field.hyp_ok(table.theta0) {
        return Err(Error::Precondition(format!(
            "field hypothesis b > Theta0*b' > 0 fails (b = {}, b' = {}, Theta0 = {})",
            field.b, field.b_prime, table.theta0
        )));
    }
    let mut total = 0.0;
    for (p, &bx) in curve.samples.iter().zip(&field.boundary_values) {
        let c = (field.b / bx).min(1.0);
        total += bx.powf(1.5) * edge_moment(c, table)? * p.ds;
    }
    Ok(total / (2.0 * PI))
}

/// (1/2π) ∮ B^{1/2} |{ξ : B μ₁(ξ) < λ}| ds for 0 < λ < b.
pub fn counting_coefficient(curve: &BoundaryCurve, field: &FieldProfile, lambda: f64, table: &Mu1Table) -> Result<f64> {
    field.check_matches(curve)?;
    if !(lambda > 0.0 && lambda < field.b) {
        return Err(Error::Precondition(format!(
            "counting coefficient needs 0 < lambda < b, got lambda = {lambda}, b = {}",
            field.b
        )));
    }
    let mut total = 0.0;
    for (p, &bx) in curve.samples.iter().zip(&field.boundary_values) {
        let set = level_set(lambda / bx, table)?;
        if !set.measure.is_finite() {
            return Err(Error::Numerical(format!(
                "unbounded level set at lambda/B = {}",
                lambda / bx
            )));
        }
        total += bx.sqrt() * set.measure * p.ds;
    }
    Ok(total / (2.0 * PI))
}

/// Both terms of the boundary + bulk limit for a constant field on a
/// bounded domain: (|∂Ω| b^{3/2}/2π) m(1) and (|Ω| b/2π)[a]₊.
pub fn bulk_boundary_split(curve: &BoundaryCurve, b: f64, a: f64, table: &Mu1Table) -> Result<(f64, f64)> {
    let area = match (curve.closed, curve.enclosed_area) {
        (true, Some(area)) => area,
        _ => {
            return Err(Error::Precondition(
                "boundary + bulk split needs a closed curve bounding an interior domain".into(),
            ))
        }
    };
    if !(b > 0.0) {
        return Err(Error::Config(format!("b = {b} must be positive")));
    }
    let boundary = curve.length * b.powf(1.5) / (2.0 * PI) * edge_moment(1.0, table)?;
    let bulk = area * b / (2.0 * PI) * a.max(0.0);
    Ok((boundary, bulk))
}

/// All three coefficients for a constant field b on a closed curve.
pub fn constant_field_coefficients(
    curve: &BoundaryCurve,
    b: f64,
    lambda: f64,
    a: f64,
    table: &Mu1Table,
) -> Result<AsymptoticCoefficients> {
    let field = FieldProfile::constant(curve, b)?;
    let (_, bulk) = bulk_boundary_split(curve, b, a, table)?;
    Ok(AsymptoticCoefficients {
        boundary_energy: boundary_energy_coefficient(curve, &field, table)?,
        counting: counting_coefficient(curve, &field, lambda, table)?,
        bulk,
    })
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
    fn circle_constant_field_energy() {
        let t = table();
        let r = 1.3;
        let b = 2.0;
        let c = BoundaryCurve::circle(r, 128).unwrap();
        let f = FieldProfile::constant(&c, b).unwrap();
        let got = boundary_energy_coefficient(&c, &f, t).unwrap();
        let expect = r * b.powf(1.5) * edge_moment(1.0, t).unwrap();
        assert!((got - expect).abs() < 1e-10 * expect);
    }

    #[test]
    fn hypothesis_violation_is_reported() {
        let t = table();
        let c = BoundaryCurve::circle(1.0, 64).unwrap();
        // b far below Θ₀·b′
        let f = FieldProfile::new(vec![2.0; 64], 1.0).unwrap();
        assert!(matches!(
            boundary_energy_coefficient(&c, &f, t),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn counting_coefficient_cases() {
        let t = table();
        let c = BoundaryCurve::circle(1.0, 64).unwrap();
        let f = FieldProfile::constant(&c, 1.0).unwrap();
        assert_eq!(counting_coefficient(&c, &f, 0.5, t).unwrap(), 0.0);
        assert!(counting_coefficient(&c, &f, 1.0, t).is_err());
        let got = counting_coefficient(&c, &f, 0.8, t).unwrap();
        let set = level_set(0.8, t).unwrap();
        assert!((got - set.measure).abs() < 1e-10);
    }

    #[test]
    fn split_on_unit_disk() {
        let t = table();
        let c = BoundaryCurve::circle(1.0, 128).unwrap();
        let (bd, bulk) = bulk_boundary_split(&c, 1.0, -1.0, t).unwrap();
        assert_eq!(bulk, 0.0);
        assert!((bd - edge_moment(1.0, t).unwrap()).abs() < 1e-10);
        let (_, bulk) = bulk_boundary_split(&c, 1.0, 1.0, t).unwrap();
        assert!((bulk - 0.5).abs() < 1e-10);
    }

    #[test]
    fn ellipse_variable_field_converges_in_resolution() {
        let t = table();
        let field = |p: Point| 1.0 + 0.1 * p[0] * p[0];
        let value = |n| {
            let c = BoundaryCurve::ellipse(2.0, 1.0, n).unwrap();
            let f = FieldProfile::from_fn(&c, field, 1.0).unwrap();
            boundary_energy_coefficient(&c, &f, t).unwrap()
        };
        let (a, b) = (value(128), value(256));
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        assert!(a > 0.0);
    }

    #[test]
    fn degenerate_ratio_gives_small_coefficient() {
        let t = table();
        let c = BoundaryCurve::circle(1.0, 64).unwrap();
        // b/B close to Θ₀ on the whole boundary
        let bval = 1.0;
        let bnd = bval / (t.theta0 + 1e-6);
        let f = FieldProfile::new(vec![bnd; 64], bval).unwrap();
        let v = boundary_energy_coefficient(&c, &f, t).unwrap();
        assert!(v >= 0.0 && v < 1e-6, "{v}");
    }
}
