//! Reference two-dimensional discretization of the magnetic Neumann
//! operator on a disk in an arbitrary gauge.
//!
//! Finite volumes on a polar grid with Peierls phases: the edge from node a
//! to node b carries exp(i/h ∫ A·dl) along the straight chord, so a gauge
//! change A → A + ∇φ multiplies every nodal value by exp(iφ/h) and leaves
//! the spectrum unchanged exactly. Meant for small grids and dense
//! diagonalization; the sector solver in `disk` is the production path.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type VectorPotential<'a> = &'a (dyn Fn([f64; 2]) -> [f64; 2] + Sync);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarGrid {
    pub radius: f64,
    pub n_r: usize,
    pub n_theta: usize,
}

impl PolarGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0) || self.n_r < 2 || self.n_theta < 4 {
            return Err(Error::Config(format!("invalid polar grid {self:?}")));
        }
        Ok(())
    }

    fn dr(&self) -> f64 {
        self.radius / self.n_r as f64
    }

    fn dtheta(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.n_theta as f64
    }

    fn ring(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dr()
    }

    fn node(&self, i: usize, k: usize) -> [f64; 2] {
        let (r, th) = (self.ring(i), k as f64 * self.dtheta());
        [r * th.cos(), r * th.sin()]
    }

    fn index(&self, i: usize, k: usize) -> usize {
        i * self.n_theta + k
    }
}

/// ∫ A·dl along the segment from `a` to `b` by Simpson's rule, exact for
/// vector potentials of degree ≤ 3.
fn chord_integral(potential: VectorPotential, a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let m = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
    let dot = |p: [f64; 2]| {
        let v = potential(p);
        v[0] * d[0] + v[1] * d[1]
    };
    (dot(a) + 4.0 * dot(m) + dot(b)) / 6.0
}

/// Hermitian matrix W^{−1/2} Q W^{−1/2} of the discrete form, with W the
/// cell areas.
pub fn polar_matrix(grid: &PolarGrid, h: f64, potential: VectorPotential) -> Result<DMatrix<Complex64>> {
    grid.validate()?;
    if !(h > 0.0) {
        return Err(Error::Config(format!("h = {h} must be positive")));
    }
    let n = grid.n_r * grid.n_theta;
    let (dr, dth) = (grid.dr(), grid.dtheta());
    let mut q = DMatrix::<Complex64>::zeros(n, n);
    let mut add_edge = |a: usize, b: usize, pa: [f64; 2], pb: [f64; 2], c: f64| {
        let phase = Complex64::from_polar(1.0, chord_integral(potential, pa, pb) / h);
        q[(a, a)] += c;
        q[(b, b)] += c;
        q[(b, a)] -= phase * c;
        q[(a, b)] -= phase.conj() * c;
    };
    for i in 0..grid.n_r {
        let r = grid.ring(i);
        for k in 0..grid.n_theta {
            let k1 = (k + 1) % grid.n_theta;
            add_edge(
                grid.index(i, k),
                grid.index(i, k1),
                grid.node(i, k),
                grid.node(i, k1),
                h * h * dr / (r * dth),
            );
            if i + 1 < grid.n_r {
                let face = (i as f64 + 1.0) * dr;
                add_edge(
                    grid.index(i, k),
                    grid.index(i + 1, k),
                    grid.node(i, k),
                    grid.node(i + 1, k),
                    h * h * face * dth / dr,
                );
            }
        }
    }
    let scale: Vec<f64> = (0..n)
        .map(|idx| 1.0 / (grid.ring(idx / grid.n_theta) * dr * dth).sqrt())
        .collect();
    for a in 0..n {
        for b in 0..n {
            q[(a, b)] *= scale[a] * scale[b];
        }
    }
    Ok(q)
}

/// The `count` lowest eigenvalues of the reference discretization.
pub fn polar_eigenvalues(grid: &PolarGrid, h: f64, potential: VectorPotential, count: usize) -> Result<Vec<f64>> {
    let m = polar_matrix(grid, h, potential)?;
    let mut values: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|a, b| a.total_cmp(b));
    if count > values.len() {
        return Err(Error::Config(format!("{count} eigenvalues requested from {} unknowns", values.len())));
    }
    values.truncate(count);
    Ok(values)
}

/// Symmetric gauge (b/2)(−(x₂−c₂), x₁−c₁) centred at `center`.
pub fn symmetric_gauge(b: f64, center: [f64; 2]) -> impl Fn([f64; 2]) -> [f64; 2] + Sync {
    move |p| [-0.5 * b * (p[1] - center[1]), 0.5 * b * (p[0] - center[0])]
}

/// Landau gauge (−b x₂, 0).
pub fn landau_gauge(b: f64) -> impl Fn([f64; 2]) -> [f64; 2] + Sync {
    move |p| [-b * p[1], 0.0]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> PolarGrid {
        PolarGrid { radius: 1.0, n_r: 8, n_theta: 16 }
    }

    #[test]
    fn matrix_is_hermitian() {
        let a = symmetric_gauge(1.0, [0.2, -0.1]);
        let m = polar_matrix(&grid(), 0.2, &a).unwrap();
        let diff = (&m - m.adjoint()).norm();
        assert!(diff < 1e-12 * m.norm());
    }

    #[test]
    fn gauge_change_preserves_spectrum() {
        let (b, h) = (1.0, 0.2);
        let sym = symmetric_gauge(b, [0.0, 0.0]);
        let shifted = symmetric_gauge(b, [0.3, -0.45]);
        let landau = landau_gauge(b);
        let e0 = polar_eigenvalues(&grid(), h, &sym, 10).unwrap();
        for other in [polar_eigenvalues(&grid(), h, &shifted, 10).unwrap(), polar_eigenvalues(&grid(), h, &landau, 10).unwrap()] {
            for (x, y) in e0.iter().zip(&other) {
                assert!((x - y).abs() < 1e-10 * x.abs().max(1e-3), "{x} vs {y}");
            }
        }
    }

    #[test]
    fn zero_field_has_constant_ground_state() {
        let zero = |_: [f64; 2]| [0.0, 0.0];
        let e = polar_eigenvalues(&grid(), 0.3, &zero, 1).unwrap();
        assert!(e[0].abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_grid() {
        let zero = |_: [f64; 2]| [0.0, 0.0];
        let g = PolarGrid { radius: 1.0, n_r: 1, n_theta: 16 };
        assert!(polar_matrix(&g, 0.1, &zero).is_err());
    }
}
