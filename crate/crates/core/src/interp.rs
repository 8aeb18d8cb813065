//! Cubic (four-point Lagrange) interpolation on uniform grids.

use crate::error::{Error, Result};

/// Samples of a function on the uniform grid `origin + i * step`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformSamples {
    pub origin: f64,
    pub step: f64,
    pub values: Vec<f64>,
}

impl UniformSamples {
    pub fn new(origin: f64, step: f64, values: Vec<f64>) -> Self {
        Self { origin, step, values }
    }

    pub fn end(&self) -> f64 {
        self.origin + self.step * (self.values.len() - 1) as f64
    }

    /// Cubic interpolant; refuses to extrapolate.
    pub fn eval(&self, x: f64) -> Result<f64> {
        cubic_eval(self.origin, self.step, &self.values, x)
    }
}

/// Four-point Lagrange interpolation of `values` sampled at
/// `origin + i * step`; refuses to extrapolate.
pub fn cubic_eval(origin: f64, step: f64, values: &[f64], x: f64) -> Result<f64> {
    let n = values.len();
    let pos = (x - origin) / step;
    let last = (n - 1) as f64;
    let slack = 1e-9;
    if !(pos >= -slack && pos <= last + slack) {
        return Err(Error::Extrapolation(format!(
            "x = {x} outside [{}, {}]",
            origin,
            origin + step * (n - 1) as f64
        )));
    }
    let pos = pos.clamp(0.0, last);
    if n < 4 {
        // linear fallback for tiny tables
        let i = (pos.floor() as usize).min(n.saturating_sub(2));
        let f = pos - i as f64;
        return Ok(values[i] * (1.0 - f) + values[(i + 1).min(n - 1)] * f);
    }
    let i = (pos.floor() as usize).clamp(1, n - 3);
    let start = i - 1;
    let u = pos - start as f64;
    let y = &values[start..start + 4];
    // Lagrange basis on nodes 0,1,2,3.
    let l0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
    let l1 = u * (u - 2.0) * (u - 3.0) / 2.0;
    let l2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
    let l3 = u * (u - 1.0) * (u - 2.0) / 6.0;
    Ok(y[0] * l0 + y[1] * l1 + y[2] * l2 + y[3] * l3)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubics_exactly() {
        let f = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x - 0.25 * x * x * x;
        let vals = (0..20).map(|i| f(-1.0 + 0.1 * i as f64)).collect();
        let s = UniformSamples::new(-1.0, 0.1, vals);
        for x in [-1.0, -0.97, 0.0, 0.333, 0.9] {
            assert!((s.eval(x).unwrap() - f(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn refuses_extrapolation() {
        let s = UniformSamples::new(0.0, 0.5, vec![0.0; 10]);
        assert!(matches!(s.eval(-0.1), Err(Error::Extrapolation(_))));
        assert!(matches!(s.eval(4.6), Err(Error::Extrapolation(_))));
        assert!(s.eval(4.5).is_ok());
    }
}
