//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use magneumann::models2d::CylinderSpec;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Eigenvalues below `level` of the unscaled cylinder operator
/// −(h∂ₛ + ibx₂)² − h²∂₂² on [0,S) × (0, h^{1/2}T): Fourier collocation in s
/// with `ns` (odd) points, cell-centred differences in x₂ with `nt` cells,
/// Neumann at 0 and Dirichlet at the top, dense diagonalization.
pub fn cylinder_dense_eigenvalues(spec: &CylinderSpec, ns: usize, nt: usize, level: f64) -> Vec<f64> {
    assert!(ns % 2 == 1);
    let (h, b) = (spec.h, spec.b);
    let height = h.sqrt() * spec.t;
    let dy = height / nt as f64;
    let half = (ns as i64 - 1) / 2;
    let n = ns * nt;
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    let idx = |p: usize, j: usize| p * nt + j;
    for j in 0..nt {
        let y = (j as f64 + 0.5) * dy;
        for p in 0..ns {
            for q in 0..ns {
                let ds = (p as f64 - q as f64) * spec.s / ns as f64;
                let mut v = Complex64::new(0.0, 0.0);
                for kk in -half..=half {
                    let k = 2.0 * PI * kk as f64 / spec.s;
                    v += Complex64::from_polar((h * k + b * y).powi(2), k * ds);
                }
                m[(idx(p, j), idx(q, j))] += v / ns as f64;
            }
        }
    }
    let c = h * h / (dy * dy);
    for p in 0..ns {
        for j in 0..nt {
            let diag = if j == 0 {
                1.0
            } else if j == nt - 1 {
                3.0
            } else {
                2.0
            };
            m[(idx(p, j), idx(p, j))] += c * diag;
            if j + 1 < nt {
                m[(idx(p, j), idx(p, j + 1))] -= c;
                m[(idx(p, j + 1), idx(p, j))] -= c;
            }
        }
    }
    let mut values: Vec<f64> = m.symmetric_eigenvalues().iter().copied().filter(|&e| e < level).collect();
    values.sort_by(|a, b| a.total_cmp(b));
    values
}

/// Cylinder energy from the dense operator at `nt` and `2nt` cells,
/// Richardson-extrapolating matched eigenvalues.
pub fn cylinder_dense_energy(spec: &CylinderSpec, ns: usize, nt: usize) -> f64 {
    let hb = spec.h * spec.b;
    let level = hb * (1.0 + spec.lambda);
    let margin = 0.2 * hb;
    let coarse = cylinder_dense_eigenvalues(spec, ns, nt, level + margin);
    let fine = cylinder_dense_eigenvalues(spec, ns, 2 * nt, level + margin);
    let count = coarse.len().min(fine.len());
    (0..count)
        .map(|i| (4.0 * fine[i] - coarse[i]) / 3.0)
        .map(|e| (level - e).max(0.0))
        .sum()
}
