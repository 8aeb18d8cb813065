//! Half-line harmonic oscillator family −∂ₜ² + (t−ξ)² with a Neumann
//! condition at t = 0, its Dirichlet-truncated variant, and the de Gennes
//! constant Θ₀ = inf_ξ μ₁(ξ).
//!
//! Discretization: uniform vertex grid tᵢ = i·δ on [0, L], three-point
//! stencil, Neumann at 0 through a mirror ghost node, Dirichlet at L by
//! deleting the end node. The Neumann row is symmetrized with trapezoid
//! weights, so the discrete operator is a symmetric tridiagonal matrix and
//! eigenvectors are orthonormal in the trapezoid-weighted ℓ².

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::{cubic_eval, UniformSamples};
use crate::tridiag::SymTridiag;

/// Smallest accepted grid.
pub const MIN_POINTS: usize = 16;
/// Localization margin beyond ξ for the "infinite" half-line.
pub const LOCALIZATION_MARGIN: f64 = 8.0;
/// Default numerical infinity.
pub const DEFAULT_T_MAX: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RightEnd {
    /// Half-line, truncated at `t_max` far beyond the turning point.
    Infinite { t_max: f64 },
    /// Model truncation with a Dirichlet condition at `t_end`.
    Dirichlet { t_end: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeGennesConfig {
    pub xi: f64,
    pub right_end: RightEnd,
    pub n_points: usize,
}

impl DeGennesConfig {
    /// Half-line problem with t_max = max(12, ξ + 8).
    pub fn half_line(xi: f64, n_points: usize) -> Self {
        Self {
            xi,
            right_end: RightEnd::Infinite {
                t_max: default_t_max(xi),
            },
            n_points,
        }
    }

    pub fn truncated(xi: f64, t_end: f64, n_points: usize) -> Self {
        Self {
            xi,
            right_end: RightEnd::Dirichlet { t_end },
            n_points,
        }
    }

    pub fn length(&self) -> f64 {
        match self.right_end {
            RightEnd::Infinite { t_max } => t_max,
            RightEnd::Dirichlet { t_end } => t_end,
        }
    }

    pub fn grid_step(&self) -> f64 {
        self.length() / self.n_points as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points < MIN_POINTS {
            return Err(Error::Config(format!(
                "n_points = {} is below the minimum {MIN_POINTS}",
                self.n_points
            )));
        }
        if !self.xi.is_finite() {
            return Err(Error::Config(format!("xi = {} is not finite", self.xi)));
        }
        match self.right_end {
            RightEnd::Infinite { t_max } => {
                if !(t_max > 0.0) {
                    return Err(Error::Config(format!("t_max = {t_max} must be positive")));
                }
                if t_max < self.xi + LOCALIZATION_MARGIN {
                    return Err(Error::Config(format!(
                        "t_max = {t_max} violates t_max >= xi + {LOCALIZATION_MARGIN} (xi = {})",
                        self.xi
                    )));
                }
            }
            RightEnd::Dirichlet { t_end } => {
                if !(t_end > 0.0 && t_end.is_finite()) {
                    return Err(Error::Config(format!("T = {t_end} must be positive")));
                }
            }
        }
        Ok(())
    }

    /// Symmetrized finite-difference matrix of the operator.
    pub fn matrix(&self) -> Result<SymTridiag> {
        self.validate()?;
        let n = self.n_points;
        let step = self.grid_step();
        let inv = 1.0 / (step * step);
        let diag = (0..n)
            .map(|i| {
                let t = i as f64 * step;
                2.0 * inv + (t - self.xi).powi(2)
            })
            .collect();
        let mut off = vec![-inv; n - 1];
        off[0] = -std::f64::consts::SQRT_2 * inv;
        SymTridiag::new(diag, off)
    }
}

pub fn default_t_max(xi: f64) -> f64 {
    DEFAULT_T_MAX.max(xi + LOCALIZATION_MARGIN)
}

/// One eigenpair (μⱼ(ξ), uⱼ(·; ξ)) on the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mode1D {
    /// 1-based mode index j.
    pub index: usize,
    pub xi: f64,
    pub eigenvalue: f64,
    /// uⱼ(tᵢ) for tᵢ = i·grid_step, i = 0..=n (the last node is the
    /// Dirichlet/truncation node and holds 0).
    pub samples: Vec<f64>,
    pub grid_step: f64,
}

impl Mode1D {
    pub fn t_max(&self) -> f64 {
        self.grid_step * (self.samples.len() - 1) as f64
    }

    /// Trapezoid-rule L² norm of the samples.
    pub fn l2_norm(&self) -> f64 {
        trapezoid_inner(&self.samples, &self.samples, self.grid_step).sqrt()
    }

    pub fn inner(&self, other: &Mode1D) -> f64 {
        trapezoid_inner(&self.samples, &other.samples, self.grid_step)
    }

    /// Cubic interpolation of uⱼ; refuses t outside [0, t_max].
    pub fn eval(&self, t: f64) -> Result<f64> {
        cubic_eval(0.0, self.grid_step, &self.samples, t)
    }

    pub fn interpolant(&self) -> UniformSamples {
        UniformSamples::new(0.0, self.grid_step, self.samples.clone())
    }
}

fn trapezoid_inner(a: &[f64], b: &[f64], step: f64) -> f64 {
    let n = a.len();
    let mut s: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    s -= 0.5 * (a[0] * b[0] + a[n - 1] * b[n - 1]);
    s * step
}

/// The `num_modes` lowest eigenpairs, ascending, with uⱼ(0) > 0.
pub fn solve_de_gennes(config: &DeGennesConfig, num_modes: usize) -> Result<Vec<Mode1D>> {
    config.validate()?;
    if num_modes == 0 || num_modes > config.n_points / 4 {
        return Err(Error::Config(format!(
            "num_modes = {num_modes} must be in 1..={}",
            config.n_points / 4
        )));
    }
    let matrix = config.matrix()?;
    let values = matrix.lowest_eigenvalues(num_modes)?;
    for w in values.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Numerical(format!(
                "eigenvalues not strictly increasing ({} then {}) at xi = {}",
                w[0], w[1], config.xi
            )));
        }
    }
    let step = config.grid_step();
    let mut raw: Vec<Vec<f64>> = Vec::with_capacity(num_modes);
    let mut modes = Vec::with_capacity(num_modes);
    for (k, &mu) in values.iter().enumerate() {
        let y = matrix.eigenvector(mu, &raw)?;
        let residual = matrix.residual(mu, &y);
        if residual > 1e-6 * mu.abs().max(1.0) {
            return Err(Error::Numerical(format!(
                "mode {} at xi = {}: residual {residual:e} after inverse iteration",
                k + 1,
                config.xi
            )));
        }
        // Undo the symmetrizing scaling: u₀ = y₀·√2, then scale to unit
        // trapezoid norm.
        let sign = if y[0] < 0.0 { -1.0 } else { 1.0 };
        let scale = sign / step.sqrt();
        let mut samples: Vec<f64> = y.iter().map(|v| v * scale).collect();
        samples[0] *= std::f64::consts::SQRT_2;
        samples.push(0.0);
        raw.push(y);
        modes.push(Mode1D {
            index: k + 1,
            xi: config.xi,
            eigenvalue: mu,
            samples,
            grid_step: step,
        });
    }
    Ok(modes)
}

/// Lowest `count` eigenvalues only (no eigenvectors).
pub fn eigenvalues(config: &DeGennesConfig, count: usize) -> Result<Vec<f64>> {
    config.matrix()?.lowest_eigenvalues(count)
}

/// μ₁(ξ) on the half-line grid with `n_points` nodes.
pub fn mu1(xi: f64, n_points: usize) -> Result<f64> {
    Ok(eigenvalues(&DeGennesConfig::half_line(xi, n_points), 1)?[0])
}

/// μ₁(ξ) Richardson-extrapolated from grids with n and 2n nodes; the
/// three-point stencil has an even error expansion in the step.
pub fn mu1_extrapolated(xi: f64, n_points: usize) -> Result<f64> {
    let coarse = mu1(xi, n_points)?;
    let fine = mu1(xi, 2 * n_points)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// μ₁(ξ; T): Neumann at 0, Dirichlet at T.
pub fn mu1_truncated(xi: f64, t_end: f64, n_points: usize) -> Result<f64> {
    if !(t_end > 0.0) {
        return Err(Error::Config(format!("T = {t_end} must be positive")));
    }
    Ok(eigenvalues(&DeGennesConfig::truncated(xi, t_end, n_points), 1)?[0])
}

/// All eigenvalues μⱼ(ξ; T) strictly below `level`.
pub fn truncated_eigenvalues_below(xi: f64, t_end: f64, n_points: usize, level: f64) -> Result<Vec<f64>> {
    let m = DeGennesConfig::truncated(xi, t_end, n_points).matrix()?;
    Ok(m.eigenvalues_below(level))
}

/// Outcome of the Θ₀ search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theta0 {
    pub theta0: f64,
    pub xi_star: f64,
    /// Base grid size (extrapolated against twice this).
    pub n_points: usize,
    /// Golden-section bracket width at termination.
    pub xi_tolerance: f64,
}

pub const THETA0_SCAN: (f64, f64, f64) = (0.0, 3.0, 0.05);
/// Default base grid for Θ₀ and tables.
pub const DEFAULT_POINTS: usize = 2000;

/// Θ₀ with the default grid.
pub fn theta0(tolerance: f64) -> Result<Theta0> {
    theta0_with_grid(tolerance, DEFAULT_POINTS)
}

/// Coarse scan of ξ ∈ [0, 3] (step 0.05) to bracket the minimum of μ₁,
/// followed by golden-section search to `tolerance` in ξ. μ₁ is evaluated
/// with Richardson extrapolation from n and 2n nodes.
pub fn theta0_with_grid(tolerance: f64, n_points: usize) -> Result<Theta0> {
    if !(tolerance > 0.0) {
        return Err(Error::Config(format!("tolerance = {tolerance} must be positive")));
    }
    let (lo, hi, step) = THETA0_SCAN;
    let count = ((hi - lo) / step).round() as usize + 1;
    let xs: Vec<f64> = (0..count).map(|i| lo + step * i as f64).collect();
    let values = xs
        .par_iter()
        .map(|&x| mu1_extrapolated(x, n_points))
        .collect::<Result<Vec<f64>>>()?;
    let imin = argmin(&values);
    check_unimodal_within(&values, 0.0)?;
    if imin == 0 || imin == count - 1 {
        return Err(Error::Numerical(format!(
            "minimum of mu1 not bracketed on [{lo}, {hi}] (argmin at the scan edge xi = {})",
            xs[imin]
        )));
    }
    let f = |x: f64| mu1_extrapolated(x, n_points);
    let (xi_star, theta0, width) = golden_section(f, xs[imin - 1], xs[imin + 1], tolerance)?;
    Ok(Theta0 {
        theta0,
        xi_star,
        n_points,
        xi_tolerance: width,
    })
}

fn argmin(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// Scan values must decrease to a single minimum and then increase, up to
/// `slack` (rounding noise where μ₁ is flat).
pub(crate) fn check_unimodal_within(values: &[f64], slack: f64) -> Result<()> {
    let imin = argmin(values);
    let falls = values[..=imin].windows(2).all(|w| w[1] <= w[0] + slack);
    let rises = values[imin..].windows(2).all(|w| w[1] >= w[0] - slack);
    if falls && rises {
        Ok(())
    } else {
        Err(Error::Numerical(
            "mu1 is not unimodal on the scan grid; minimizer is not isolated".into(),
        ))
    }
}

/// Golden-section minimization on [a, b]; returns (argmin, min, bracket).
pub fn golden_section<F>(f: F, mut a: f64, mut b: f64, tolerance: f64) -> Result<(f64, f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tolerance {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d)?;
        }
    }
    let (x, fx) = if fc < fd { (c, fc) } else { (d, fd) };
    Ok((x, fx, b - a))
}

/// Minimum of μ₂ over the given ξ values.
pub fn mu2_gap(xi_grid: &[f64]) -> Result<f64> {
    mu2_gap_with_grid(xi_grid, DEFAULT_POINTS)
}

pub fn mu2_gap_with_grid(xi_grid: &[f64], n_points: usize) -> Result<f64> {
    if xi_grid.is_empty() {
        return Err(Error::Config("empty xi grid".into()));
    }
    let values = xi_grid
        .par_iter()
        .map(|&xi| eigenvalues(&DeGennesConfig::half_line(xi, n_points), 2).map(|v| v[1]))
        .collect::<Result<Vec<f64>>>()?;
    Ok(values.into_iter().fold(f64::INFINITY, f64::min))
}

/// μ₁ tabulated on a uniform ξ grid (default step 0.01 on [−6, 6]) with
/// cubic interpolation, plus Θ₀ and its minimizer on the table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mu1Table {
    pub xi_min: f64,
    pub xi_step: f64,
    pub values: Vec<f64>,
    pub n_points: usize,
    pub theta0: f64,
    pub xi_star: f64,
}

pub const TABLE_RANGE: f64 = 6.0;
pub const TABLE_STEP: f64 = 0.01;

impl Mu1Table {
    /// Default table: [−6, 6], step 0.01, base grid 2000 extrapolated with 4000.
    pub fn standard() -> Result<Self> {
        Self::build(TABLE_RANGE, TABLE_STEP, DEFAULT_POINTS)
    }

    pub fn build(range: f64, step: f64, n_points: usize) -> Result<Self> {
        let count = (2.0 * range / step).round() as usize + 1;
        let xs: Vec<f64> = (0..count).map(|i| -range + step * i as f64).collect();
        let values = xs
            .par_iter()
            .map(|&x| mu1_extrapolated(x, n_points))
            .collect::<Result<Vec<f64>>>()?;
        let mut table = Self {
            xi_min: -range,
            xi_step: step,
            values,
            n_points,
            theta0: f64::NAN,
            xi_star: f64::NAN,
        };
        let i = argmin(&table.values);
        if i == 0 || i + 1 == count {
            return Err(Error::Numerical("mu1 table minimum at the table edge".into()));
        }
        let f = |x: f64| table.eval(x);
        let (xs_, th, _) = golden_section(f, xs[i - 1], xs[i + 1], 1e-9)?;
        table.theta0 = th;
        table.xi_star = xs_;
        Ok(table)
    }

    pub fn xi_max(&self) -> f64 {
        self.xi_min + self.xi_step * (self.values.len() - 1) as f64
    }

    pub fn samples(&self) -> UniformSamples {
        UniformSamples::new(self.xi_min, self.xi_step, self.values.clone())
    }

    /// Whether the tabulated μ₁ falls to one minimum and then rises.
    pub fn is_unimodal(&self) -> bool {
        check_unimodal_within(&self.values, 1e-9).is_ok()
    }

    pub fn node(&self, i: usize) -> f64 {
        self.xi_min + self.xi_step * i as f64
    }

    /// Interpolated μ₁(ξ); beyond +range uses μ₁ → 1 (error below
    /// exp(−ξ²/2)), below −range uses the bound μ₁ ≥ ξ².
    pub fn eval(&self, xi: f64) -> Result<f64> {
        if xi > self.xi_max() {
            return Ok(1.0);
        }
        if xi < self.xi_min {
            return Ok(xi * xi);
        }
        cubic_eval(self.xi_min, self.xi_step, &self.values, xi)
    }

    /// Bound on ∫_{ξ > range} |1 − μ₁| dξ from the exp(−ξ²/2) envelope.
    pub fn tail_bound(&self) -> f64 {
        let x = self.xi_max();
        // ∫ₓ^∞ e^{−ξ²/2} ≤ e^{−x²/2}/x
        (-(x * x) / 2.0).exp() / x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchor_mu1_at_zero() {
        let m = solve_de_gennes(&DeGennesConfig::half_line(0.0, 4000), 3).unwrap();
        assert!((m[0].eigenvalue - 1.0).abs() < 1e-5, "{}", m[0].eigenvalue);
        // Neumann half-oscillator at ξ = 0 has the odd Hermite levels 1, 5, 9.
        assert!((m[1].eigenvalue - 5.0).abs() < 1e-4);
        assert!((m[2].eigenvalue - 9.0).abs() < 1e-4);
    }

    #[test]
    fn negative_xi_lower_bound() {
        let mu = mu1(-2.0, 4000).unwrap();
        assert!(mu >= 4.0);
    }

    #[test]
    fn near_minimizer_value() {
        // oracle: the same scheme at two resolutions must agree to 1e-6
        // after extrapolation; the raw value sits within 1e-4 of 0.5901.
        let a = mu1_extrapolated(0.7682, 2000).unwrap();
        let b = mu1_extrapolated(0.7682, 4000).unwrap();
        assert!((a - b).abs() < 1e-6);
        let raw = mu1(0.7682, 4000).unwrap();
        assert!((raw - 0.5901).abs() < 1e-4, "{raw}");
    }

    #[test]
    fn modes_are_orthonormal_and_signed() {
        let modes = solve_de_gennes(&DeGennesConfig::half_line(0.9, 3000), 6).unwrap();
        for (i, a) in modes.iter().enumerate() {
            assert!(a.samples[0] > 0.0);
            assert_eq!(a.index, i + 1);
            for (j, b) in modes.iter().enumerate() {
                let d = a.inner(b);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((d - expect).abs() < 1e-8, "<u{i},u{j}> = {d}");
            }
            assert!((a.l2_norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn config_errors() {
        assert!(matches!(
            solve_de_gennes(&DeGennesConfig::half_line(0.0, 8), 1),
            Err(Error::Config(_))
        ));
        let bad = DeGennesConfig {
            xi: 10.0,
            right_end: RightEnd::Infinite { t_max: 12.0 },
            n_points: 1000,
        };
        assert!(bad.validate().is_err());
        assert!(solve_de_gennes(&DeGennesConfig::half_line(0.0, 100), 26).is_err());
        assert!(mu1_truncated(0.0, -1.0, 100).is_err());
        assert!(mu2_gap(&[]).is_err());
        assert!(theta0(0.0).is_err());
    }

    #[test]
    fn truncated_examples() {
        let full = mu1(1.0, 4000).unwrap();
        let trunc = mu1_truncated(1.0, 8.0, 4000).unwrap();
        assert!((full - trunc).abs() < 1e-6, "{full} vs {trunc}");
        // |ξ| ≥ 2T ⇒ μ₁(ξ;T) ≥ T²
        assert!(mu1_truncated(5.0, 2.0, 2000).unwrap() >= 4.0);
        // kinetic bound (π/2T)² on (0, 0.5)
        let pi2 = std::f64::consts::PI.powi(2);
        assert!(mu1_truncated(0.0, 0.5, 2000).unwrap() >= pi2 * (1.0 - 1e-6));
    }

    #[test]
    fn eigenvalue_orders_strictly() {
        let g = mu2_gap(&[0.0]).unwrap();
        assert!(g > 1.0);
    }

    #[test]
    fn golden_section_on_parabola() {
        let (x, fx, w) = golden_section(|x| Ok((x - 0.3).powi(2) + 2.0), 0.0, 1.0, 1e-9).unwrap();
        // the argmin is only determined to about sqrt(eps)
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 2.0).abs() < 1e-14);
        assert!(w <= 1e-9);
    }

    #[test]
    fn unimodality_check() {
        assert!(check_unimodal_within(&[3.0, 2.0, 1.0, 2.0, 5.0], 0.0).is_ok());
        assert!(check_unimodal_within(&[3.0, 1.0, 2.0, 0.5, 5.0], 0.0).is_err());
        assert!(check_unimodal_within(&[3.0, 1.0, 2.0, 2.0 - 1e-12, 5.0], 1e-9).is_ok());
    }
}
