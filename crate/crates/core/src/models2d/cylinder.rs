//! Magnetic Neumann operator on the cylinder [0,S) × (0, h^{1/2}T) with a
//! Dirichlet top, solved exactly by separating the periodic variable.
//!
//! The Fourier mode n contributes the eigenvalues hb·μⱼ(ξₙ; T√b) with
//! ξₙ = 2πn h^{1/2} b^{−1/2} / S, where μⱼ(ξ; 𝒯) belongs to the de Gennes
//! operator on (0, 𝒯) with Neumann at 0 and Dirichlet at 𝒯.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::degennes::truncated_eigenvalues_below;
use crate::error::{Error, Result};

/// Extra ξ-range kept beyond 2𝒯.
pub const XI_MARGIN: f64 = 2.0;
/// Target step of the 1D grid in scaled units.
pub const TARGET_STEP: f64 = 0.002;
pub const MIN_POINTS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderSpec {
    /// Circumference.
    pub s: f64,
    /// Height in units of h^{1/2}.
    pub t: f64,
    pub b: f64,
    pub lambda: f64,
    pub h: f64,
}

impl CylinderSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("S", self.s), ("T", self.t), ("b", self.b), ("lambda", self.lambda), ("h", self.h)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} = {v} must be positive")));
            }
        }
        if self.lambda >= 1.0 {
            return Err(Error::Config(format!("lambda = {} must be below 1", self.lambda)));
        }
        Ok(())
    }

    /// Height of the strip after scaling to unit field and unit h.
    pub fn scaled_height(&self) -> f64 {
        self.t * self.b.sqrt()
    }

    pub fn xi_step(&self) -> f64 {
        2.0 * PI * (self.h / self.b).sqrt() / self.s
    }

    pub fn xi(&self, n: i64) -> f64 {
        n as f64 * self.xi_step()
    }

    /// (1+λ)hb(ST/(2π√h) + 1).
    pub fn upper_bound(&self) -> f64 {
        (1.0 + self.lambda) * self.h * self.b * (self.s * self.t / (2.0 * PI * self.h.sqrt()) + 1.0)
    }
}

/// Lower bound for μ₁(ξ; 𝒯): lowest kinetic energy on (0, 𝒯) plus the
/// minimum of the potential, and 𝒯² once |ξ| ≥ 2𝒯.
pub fn band_lower_bound(xi: f64, height: f64) -> f64 {
    let kinetic = (PI / (2.0 * height)).powi(2);
    let dist = if xi < 0.0 {
        -xi
    } else if xi > height {
        xi - height
    } else {
        0.0
    };
    let mut bound = kinetic + dist * dist;
    if xi.abs() >= 2.0 * height {
        bound = bound.max(height * height);
    }
    bound
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderCertificate {
    pub n_min: i64,
    pub n_max: i64,
    /// Smallest proven value of μ₁ over the excluded modes; at least 1+λ.
    pub excluded_lower_bound: f64,
    /// Largest number of bands below 1+λ in any mode. A value of 1 means
    /// only the first band contributes.
    pub max_bands: usize,
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderEnergy {
    pub energy: f64,
    pub upper_bound: f64,
    /// Contributing eigenvalues divided by hb, as (n, μ) sorted by n then μ.
    pub levels: Vec<(i64, f64)>,
    pub certificate: CylinderCertificate,
}

/// E = hb Σ_{n,j} [1+λ − μⱼ(ξₙ; T√b)]₊ with a 1D grid of `n_points` nodes.
pub fn cylinder_energy_with_grid(spec: &CylinderSpec, n_points: usize) -> Result<CylinderEnergy> {
    spec.validate()?;
    let height = spec.scaled_height();
    let level = 1.0 + spec.lambda;
    let step = spec.xi_step();
    let reach = 2.0 * height + XI_MARGIN;
    // Extend the window until both neighbouring modes are certified empty.
    let mut n_max = (reach / step).floor() as i64;
    while band_lower_bound(spec.xi(n_max + 1), height) < level {
        n_max += 1;
    }
    let mut n_min = -n_max;
    while band_lower_bound(spec.xi(n_min - 1), height) < level {
        n_min -= 1;
    }
    let excluded_lower_bound =
        band_lower_bound(spec.xi(n_max + 1), height).min(band_lower_bound(spec.xi(n_min - 1), height));
    if !(excluded_lower_bound >= level) {
        return Err(Error::Numerical("mode cutoff could not be certified".into()));
    }

    let per_mode: Vec<(i64, Vec<f64>)> = (n_min..=n_max)
        .into_par_iter()
        .map(|n| {
            let xi = spec.xi(n);
            if band_lower_bound(xi, height) >= level {
                return Ok((n, Vec::new()));
            }
            Ok((n, truncated_eigenvalues_below(xi, height, n_points, level)?))
        })
        .collect::<Result<_>>()?;

    let mut levels = Vec::new();
    let mut max_bands = 0;
    for (n, mus) in per_mode {
        max_bands = max_bands.max(mus.len());
        levels.extend(mus.into_iter().map(|mu| (n, mu)));
    }
    let hb = spec.h * spec.b;
    let energy = hb * levels.iter().fold(0.0, |acc, &(_, mu)| acc + (level - mu).max(0.0));
    Ok(CylinderEnergy {
        energy,
        upper_bound: spec.upper_bound(),
        levels,
        certificate: CylinderCertificate {
            n_min,
            n_max,
            excluded_lower_bound,
            max_bands,
            n_points,
        },
    })
}

/// As [`cylinder_energy_with_grid`] with a grid step near [`TARGET_STEP`].
pub fn cylinder_energy_exact(spec: &CylinderSpec) -> Result<CylinderEnergy> {
    spec.validate()?;
    let n = ((spec.scaled_height() / TARGET_STEP).ceil() as usize).max(MIN_POINTS);
    cylinder_energy_with_grid(spec, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degennes::mu1_truncated;

    fn spec(s: f64, t: f64, lambda: f64, h: f64) -> CylinderSpec {
        CylinderSpec { s, t, b: 1.0, lambda, h }
    }

    #[test]
    fn short_cylinder_has_no_energy() {
        let e = cylinder_energy_exact(&spec(1.0, 1.0, 0.05, 0.01)).unwrap();
        assert_eq!(e.energy, 0.0);
        assert!(e.levels.is_empty());
    }

    #[test]
    fn tall_cylinder_respects_bound() {
        let e = cylinder_energy_exact(&spec(1.0, 5.0, 0.05, 0.01)).unwrap();
        assert!(e.energy > 0.0);
        assert!((e.upper_bound - 0.0940563).abs() < 1e-6);
        assert!(e.energy <= e.upper_bound, "{} > {}", e.energy, e.upper_bound);
        assert!(e.certificate.excluded_lower_bound >= 1.05);
    }

    #[test]
    fn lower_bound_is_below_true_value() {
        for &height in &[0.8, 2.0, 4.0] {
            for i in -20..=40 {
                let xi = i as f64 * 0.25;
                let mu = mu1_truncated(xi, height, 800).unwrap();
                assert!(band_lower_bound(xi, height) <= mu + 1e-9, "xi {xi}, T {height}");
            }
        }
    }

    #[test]
    fn energy_scales_with_field() {
        // (h, b, T) → (4h, 4b, T/2) keeps 𝒯 and the ξ-lattice; E scales by 16.
        let a = CylinderSpec { s: 1.0, t: 4.0, b: 1.0, lambda: 0.1, h: 0.01 };
        let c = CylinderSpec { s: 1.0, t: 2.0, b: 4.0, lambda: 0.1, h: 0.04 };
        assert_eq!(a.scaled_height(), c.scaled_height());
        assert!((a.xi_step() - c.xi_step()).abs() < 1e-15);
        let ea = cylinder_energy_exact(&a).unwrap();
        let ec = cylinder_energy_exact(&c).unwrap();
        assert!((ec.energy - 16.0 * ea.energy).abs() < 1e-12 * ec.energy);
    }

    #[test]
    fn rejects_large_lambda() {
        assert!(cylinder_energy_exact(&spec(1.0, 2.0, 1.0, 0.01)).is_err());
        assert!(cylinder_energy_exact(&spec(-1.0, 2.0, 0.1, 0.01)).is_err());
    }
}
