//! Magnetic Neumann operator on a disk (or the exterior of a disk) with a
//! constant field, through the angular-momentum decomposition.
//!
//! In the symmetric gauge A = (b/2)(−x₂, x₁) the sector with angular
//! momentum m carries the radial form
//!
//! ```text
//! q_m(u) = ∫ [h²|u′|² + (mh/r − br/2)²|u|²] r dr
//! ```
//!
//! which is discretized with linear elements and a lumped (trapezoid) mass
//! on the measure r dr. Both r = 0 and the Neumann edge r = R are natural
//! boundaries of the form. Work is done in the scaled variable
//! ρ = r·√(b/h), where every eigenvalue is hb times a number depending only
//! on R√(b/h).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spectrum::SpectrumResult;
use crate::error::{Error, Result};
use crate::tridiag::SymTridiag;

pub const MIN_RADIAL: usize = 200;
pub const DEFAULT_M_MARGIN: i64 = 5;
/// Default exterior truncation in units of the magnetic length √(h/b).
pub const DEFAULT_OUTER_LENGTHS: f64 = 12.0;
/// Minimal exterior truncation in magnetic lengths.
pub const MIN_OUTER_LENGTHS: f64 = 10.0;
/// Thresholds above (1 + this)·bh are refused for interior disks.
pub const THRESHOLD_MARGIN: f64 = 0.5;
/// Relative (to bh) disagreement tolerated by the grid-doubling check.
pub const RESOLUTION_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskSpec {
    pub radius: f64,
    pub b: f64,
    pub h: f64,
    pub m_margin: i64,
    pub n_radial: usize,
    /// `Some(R_out)`: exterior of the disk, truncated with a Dirichlet
    /// condition at R_out.
    pub exterior: Option<f64>,
}

impl DiskSpec {
    /// Interior disk with a radial grid of ~200 nodes per unit of R√(b/h)
    /// (at least 2000).
    pub fn interior(radius: f64, b: f64, h: f64) -> Self {
        let scaled = radius * (b / h).sqrt();
        Self {
            radius,
            b,
            h,
            m_margin: DEFAULT_M_MARGIN,
            n_radial: ((200.0 * scaled).ceil() as usize).max(2000),
            exterior: None,
        }
    }

    /// Exterior of the disk truncated at R + 12√(h/b).
    pub fn exterior(radius: f64, b: f64, h: f64) -> Self {
        let outer = radius + DEFAULT_OUTER_LENGTHS * (h / b).sqrt();
        Self {
            radius,
            b,
            h,
            m_margin: DEFAULT_M_MARGIN,
            n_radial: 4000,
            exterior: Some(outer),
        }
    }

    pub fn with_h(&self, h: f64) -> Self {
        let mut s = match self.exterior {
            None => Self::interior(self.radius, self.b, h),
            Some(_) => Self::exterior(self.radius, self.b, h),
        };
        s.m_margin = self.m_margin;
        s
    }

    pub fn magnetic_length(&self) -> f64 {
        (self.h / self.b).sqrt()
    }

    /// R√(b/h): the only parameter of the scaled problem (besides R_out).
    pub fn scaled_radius(&self) -> f64 {
        self.radius / self.magnetic_length()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("R", self.radius), ("b", self.b), ("h", self.h)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} = {v} must be positive")));
            }
        }
        if self.n_radial < MIN_RADIAL {
            return Err(Error::Config(format!(
                "n_radial = {} is below the minimum {MIN_RADIAL}",
                self.n_radial
            )));
        }
        if self.m_margin < 0 {
            return Err(Error::Config("m_margin must be non-negative".into()));
        }
        if let Some(outer) = self.exterior {
            let need = self.radius + MIN_OUTER_LENGTHS * self.magnetic_length();
            if outer < need {
                return Err(Error::Config(format!(
                    "R_out = {outer} is below R + 10*sqrt(h/b) = {need}"
                )));
            }
        }
        Ok(())
    }

    /// Scaled radial interval [ρ_in, ρ_out].
    fn scaled_interval(&self) -> (f64, f64) {
        let l = self.magnetic_length();
        match self.exterior {
            None => (0.0, self.radius / l),
            Some(outer) => (self.radius / l, outer / l),
        }
    }
}

/// Scaled sector potential (m/ρ − ρ/2)².
fn sector_potential(m: i64, rho: f64) -> f64 {
    let m = m as f64;
    (m / rho - 0.5 * rho).powi(2)
}

/// Certified lower bound of the scaled sector operator: the minimum of its
/// potential over [a, b] (the kinetic part is non-negative).
pub fn sector_lower_bound(m: i64, a: f64, b: f64) -> f64 {
    let mf = m as f64;
    if mf > 0.0 {
        let zero = (2.0 * mf).sqrt();
        if zero >= a && zero <= b {
            return 0.0;
        }
    }
    if a <= 0.0 {
        if m == 0 {
            return 0.0;
        }
        // m < 0: |m|/ρ + ρ/2 is minimized at √(2|m|)
        let crit = (2.0 * mf.abs()).sqrt();
        return if crit <= b { 2.0 * mf.abs() } else { sector_potential(m, b) };
    }
    let mut lb = sector_potential(m, a).min(sector_potential(m, b));
    if mf < 0.0 {
        let crit = (2.0 * mf.abs()).sqrt();
        if crit > a && crit < b {
            lb = lb.min(2.0 * mf.abs());
        }
    }
    lb
}

/// Symmetric tridiagonal form of the scaled sector-m operator
/// M^{-1/2} K M^{-1/2}, together with the node radii it acts on.
pub fn sector_matrix(spec: &DiskSpec, m: i64, n_radial: usize) -> Result<(SymTridiag, Vec<f64>)> {
    let (a, b) = spec.scaled_interval();
    let step = (b - a) / n_radial as f64;
    let nodes: Vec<f64> = (0..=n_radial).map(|i| a + step * i as f64).collect();
    // Lumped mass ∫φᵢ ρ dρ and stiffness weights ρ_{i+1/2}/Δ.
    let mut mass = vec![0.0; n_radial + 1];
    for i in 0..n_radial {
        let (r0, r1) = (nodes[i], nodes[i + 1]);
        mass[i] += step * (2.0 * r0 + r1) / 6.0;
        mass[i + 1] += step * (r0 + 2.0 * r1) / 6.0;
    }
    let stiff: Vec<f64> = (0..n_radial).map(|i| 0.5 * (nodes[i] + nodes[i + 1]) / step).collect();

    let mut diag = vec![0.0; n_radial + 1];
    let mut off = vec![0.0; n_radial];
    for i in 0..n_radial {
        diag[i] += stiff[i];
        diag[i + 1] += stiff[i];
        off[i] = -stiff[i];
    }
    for i in 0..=n_radial {
        if nodes[i] > 0.0 {
            diag[i] += sector_potential(m, nodes[i]) * mass[i];
        }
    }
    // Active nodes: drop ρ = 0 when m ≠ 0 (the form forces u(0) = 0 there),
    // drop the outer node for the exterior Dirichlet truncation.
    let first = if a == 0.0 && m != 0 { 1 } else { 0 };
    let last = if spec.exterior.is_some() { n_radial - 1 } else { n_radial };
    let d: Vec<f64> = (first..=last).map(|i| diag[i] / mass[i]).collect();
    let o: Vec<f64> = (first..last)
        .map(|i| off[i] / (mass[i] * mass[i + 1]).sqrt())
        .collect();
    Ok((SymTridiag::new(d, o)?, nodes[first..=last].to_vec()))
}

/// Scaled eigenvalues of sector m below `level` (units of hb).
pub fn sector_eigenvalues(spec: &DiskSpec, m: i64, level: f64, n_radial: usize) -> Result<Vec<f64>> {
    let (matrix, _) = sector_matrix(spec, m, n_radial)?;
    Ok(matrix.eigenvalues_below(level))
}

/// Truncation bookkeeping attached to a disk spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskCertificate {
    pub m_min: i64,
    pub m_max: i64,
    /// Smallest certified lower bound (units of hb) among the sectors just
    /// outside [m_min, m_max]; at or above the scaled threshold.
    pub excluded_sector_bound: f64,
    /// max |ε(n) − ε(2n)| over the probed sectors, units of hb.
    pub resolution_discrepancy: f64,
    pub n_radial: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskSpectrum {
    pub spectrum: SpectrumResult,
    pub certificate: DiskCertificate,
}

/// All eigenvalues of the magnetic Neumann operator on the disk below
/// `threshold` (energy units), with their angular momenta.
pub fn disk_spectrum(spec: &DiskSpec, threshold: f64) -> Result<DiskSpectrum> {
    spec.validate()?;
    let hb = spec.h * spec.b;
    let level = threshold / hb;
    if !(level > 0.0) {
        return Err(Error::Config(format!("threshold {threshold} must be positive")));
    }
    match spec.exterior {
        None if level > 1.0 + THRESHOLD_MARGIN => {
            return Err(Error::Config(format!(
                "threshold {threshold:e} exceeds (1 + {THRESHOLD_MARGIN})·bh"
            )))
        }
        Some(_) if level > 1.0 => {
            return Err(Error::Config(format!(
                "threshold {threshold:e} reaches the essential spectrum bh = {hb:e} of the exterior problem"
            )))
        }
        _ => {}
    }
    let (a, b) = spec.scaled_interval();
    let (m_lo, m_hi) = sector_range(a, b, level);
    let m_lo = m_lo - spec.m_margin;
    let m_hi = m_hi + spec.m_margin;
    let excluded = sector_lower_bound(m_lo - 1, a, b).min(sector_lower_bound(m_hi + 1, a, b));
    debug_assert!(excluded >= level);

    let n = spec.n_radial;
    let per_sector = (m_lo..=m_hi)
        .into_par_iter()
        .map(|m| sector_eigenvalues(spec, m, level, n).map(|v| (m, v)))
        .collect::<Result<Vec<_>>>()?;

    let mut pairs = Vec::new();
    let mut best: Option<(f64, i64)> = None;
    for (m, values) in &per_sector {
        for &v in values {
            pairs.push((v * hb, *m));
            if best.map_or(true, |(e, _)| v < e) {
                best = Some((v, *m));
            }
        }
    }

    // Grid-doubling probe on the ground-state sector and the sector at the
    // edge of the Landau filling, ρ = R√(b/h).
    let mut probes = vec![(b * b / 2.0).round() as i64];
    if let Some((_, m)) = best {
        probes.push(m);
    }
    let mut discrepancy: f64 = 0.0;
    for m in probes {
        let coarse = sector_matrix(spec, m, n)?.0.eigenvalue(0)?;
        let fine = sector_matrix(spec, m, 2 * n)?.0.eigenvalue(0)?;
        discrepancy = discrepancy.max((coarse - fine).abs());
    }
    if discrepancy > RESOLUTION_TOLERANCE {
        return Err(Error::Numerical(format!(
            "radial grid under-resolved: eigenvalues at n = {n} and 2n differ by {discrepancy:e} (units of bh)"
        )));
    }

    Ok(DiskSpectrum {
        spectrum: SpectrumResult::from_pairs(pairs, threshold, spec.h, spec.b),
        certificate: DiskCertificate {
            m_min: m_lo,
            m_max: m_hi,
            excluded_sector_bound: excluded,
            resolution_discrepancy: discrepancy,
            n_radial: n,
        },
    })
}

/// Smallest interval of m outside which every sector's potential stays at or
/// above `level` on [a, b]. Bounds are monotone in |m − ρ²/2| beyond it.
fn sector_range(a: f64, b: f64, level: f64) -> (i64, i64) {
    // Upward from the largest zero-crossing sector.
    let mut hi = (b * b / 2.0).floor() as i64;
    while sector_lower_bound(hi + 1, a, b) < level {
        hi += 1;
    }
    let mut lo = if a > 0.0 { (a * a / 2.0).ceil() as i64 } else { 0 };
    while sector_lower_bound(lo - 1, a, b) < level {
        lo -= 1;
    }
    (lo, hi)
}
