//! Landau-level projectors in the plane and the generalized eigenprojectors
//! of the half-plane, with quadrature checks of their operator identities.
//!
//! Both use the vector potential A₀ = (−x₂, 0), so the operator is
//! P = −(h∂₁ + ibx₂)² − h²∂₂².

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::degennes::{solve_de_gennes, DeGennesConfig, Mode1D};
use crate::error::{Error, Result};
use crate::quadrature::composite;

pub type Point = [f64; 2];

/// Grid size of the 1D solves behind half-plane kernels.
pub const MODE_POINTS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    Landau,
    HalfPlane,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectorKernel {
    pub kind: KernelKind,
    pub level: usize,
    pub h: f64,
    pub b: f64,
    pub xi: f64,
}

impl ProjectorKernel {
    pub fn landau(level: usize, h: f64, b: f64) -> Result<Self> {
        let p = Self { kind: KernelKind::Landau, level, h, b, xi: 0.0 };
        p.validate()?;
        Ok(p)
    }

    pub fn half_plane(level: usize, h: f64, b: f64, xi: f64) -> Result<Self> {
        let p = Self { kind: KernelKind::HalfPlane, level, h, b, xi };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.level == 0 {
            return Err(Error::Config("level must be at least 1".into()));
        }
        if !(self.h > 0.0 && self.b > 0.0) {
            return Err(Error::Config(format!("h = {} and b = {} must be positive", self.h, self.b)));
        }
        if !self.xi.is_finite() {
            return Err(Error::Config("xi must be finite".into()));
        }
        Ok(())
    }

    /// √(b/h), the inverse magnetic length.
    pub fn scale(&self) -> f64 {
        (self.b / self.h).sqrt()
    }

    fn expect(&self, kind: KernelKind) -> Result<()> {
        self.validate()?;
        if self.kind != kind {
            return Err(Error::Config(format!("expected a {kind:?} kernel, got {:?}", self.kind)));
        }
        Ok(())
    }
}

/// Lₙ(x) by the three-term recurrence, Lₙ(0) = 1.
pub fn laguerre(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 1.0 - x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Kernel of the projector on the j-th Landau level of P (vector
/// potential A₀).
pub fn landau_kernel_eval(p: &ProjectorKernel, x: Point, y: Point) -> Result<Complex64> {
    p.expect(KernelKind::Landau)?;
    Ok(landau_kernel(p.level, p.h, p.b, x, y))
}

fn landau_kernel(level: usize, h: f64, b: f64, x: Point, y: Point) -> Complex64 {
    let r2 = (x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2);
    let phase = b * (y[0] * y[1] - x[0] * x[1]) / (2.0 * h) - b * (x[0] * y[1] - x[1] * y[0]) / (2.0 * h);
    let modulus = b / (2.0 * PI * h) * (-b * r2 / (4.0 * h)).exp() * laguerre(level - 1, b * r2 / (2.0 * h));
    Complex64::from_polar(1.0, phase) * modulus
}

/// Largest |K(x,x) − b/2πh|/(b/2πh) over `count` seeded random points in
/// the square [−radius, radius]².
pub fn landau_diagonal_defect(p: &ProjectorKernel, seed: u64, count: usize, radius: f64) -> Result<f64> {
    p.expect(KernelKind::Landau)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target = p.b / (2.0 * PI * p.h);
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let x = [rng.gen_range(-radius..=radius), rng.gen_range(-radius..=radius)];
        let v = landau_kernel(p.level, p.h, p.b, x, x);
        worst = worst.max((v - target).norm() / target);
    }
    Ok(worst)
}

/// (b/h) e^{−i√(b/h)ξ(x₁−y₁)} uⱼ(√(b/h)x₂) uⱼ(√(b/h)y₂) with uⱼ from `mode`.
pub fn halfplane_kernel_eval(p: &ProjectorKernel, x: Point, y: Point, mode: &Mode1D) -> Result<Complex64> {
    p.expect(KernelKind::HalfPlane)?;
    if mode.index != p.level || mode.xi != p.xi {
        return Err(Error::Config(format!(
            "mode (j = {}, xi = {}) does not match kernel (j = {}, xi = {})",
            mode.index, mode.xi, p.level, p.xi
        )));
    }
    if x[1] < 0.0 || y[1] < 0.0 {
        return Err(Error::Domain("half-plane kernel needs x2, y2 >= 0".into()));
    }
    let s = p.scale();
    let ux = mode.eval(s * x[1])?;
    let uy = mode.eval(s * y[1])?;
    Ok(Complex64::from_polar(p.b / p.h * ux * uy, -s * p.xi * (x[0] - y[0])))
}

/// The j-th de Gennes mode at ξ on the default half-line grid.
pub fn fiber_mode(level: usize, xi: f64, n_points: usize) -> Result<Mode1D> {
    let modes = solve_de_gennes(&DeGennesConfig::half_line(xi, n_points), level)?;
    Ok(modes.into_iter().nth(level - 1).expect("solver returns the requested count"))
}

/// Smooth, rapidly decaying probe together with the box and tensor
/// Gauss–Legendre rule that resolve it.
#[derive(Clone)]
pub struct TestFunction {
    pub f: Arc<dyn Fn(Point) -> Complex64 + Send + Sync>,
    pub x1: (f64, f64),
    pub x2: (f64, f64),
    pub panels: (usize, usize),
    pub order: usize,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunction")
            .field("x1", &self.x1)
            .field("x2", &self.x2)
            .field("panels", &self.panels)
            .field("order", &self.order)
            .finish()
    }
}

/// Decay radius of Gaussian probes in widths.
pub const GAUSSIAN_RADIUS: f64 = 8.0;

impl TestFunction {
    /// exp(−|y−c|²/2σ²)·e^{iky₁}; the box is clipped to x₂ ≥ 0 when
    /// `half_plane` is set.
    pub fn gaussian(center: Point, width: f64, frequency: f64, half_plane: bool) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::Config(format!("width = {width} must be positive")));
        }
        let r = GAUSSIAN_RADIUS * width;
        let lo2 = if half_plane { (center[1] - r).max(0.0) } else { center[1] - r };
        let panels_for = |len: f64| ((2.0 * len / width).ceil() as usize).max(4);
        let x1 = (center[0] - r, center[0] + r);
        let x2 = (lo2, center[1] + r);
        Ok(Self {
            f: Arc::new(move |y: Point| {
                let r2 = (y[0] - center[0]).powi(2) + (y[1] - center[1]).powi(2);
                Complex64::from_polar((-r2 / (2.0 * width * width)).exp(), frequency * y[0])
            }),
            x1,
            x2,
            panels: (panels_for(x1.1 - x1.0), panels_for(x2.1 - x2.0)),
            order: 6,
        })
    }

    pub fn zero_like(other: &TestFunction) -> Self {
        Self { f: Arc::new(|_| Complex64::new(0.0, 0.0)), ..other.clone() }
    }

    pub fn eval(&self, y: Point) -> Complex64 {
        (self.f)(y)
    }

    /// Nodes and weights in each direction.
    pub fn rules(&self) -> ((Vec<f64>, Vec<f64>), (Vec<f64>, Vec<f64>)) {
        (
            composite(self.x1.0, self.x1.1, self.panels.0, self.order),
            composite(self.x2.0, self.x2.1, self.panels.1, self.order),
        )
    }

    /// The same probe with every panel count doubled.
    pub fn refined(&self) -> Self {
        Self { panels: (2 * self.panels.0, 2 * self.panels.1), ..self.clone() }
    }

    pub fn l2_norm(&self) -> f64 {
        let ((x1, w1), (x2, w2)) = self.rules();
        let mut s = 0.0;
        for (a, wa) in x1.iter().zip(&w1) {
            for (c, wc) in x2.iter().zip(&w2) {
                s += wa * wc * self.eval([*a, *c]).norm_sqr();
            }
        }
        s.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolutionReport {
    pub defect_norm: f64,
    pub f_norm: f64,
    /// defect_norm / f_norm, absent for f = 0.
    pub residual: Option<f64>,
    /// Change of the reconstruction under doubled ξ panels, relative to ‖f‖.
    pub refinement_change: f64,
}

/// Panels of the ξ-integral per unit length.
const XI_PANELS_PER_UNIT: f64 = 2.0;
const XI_ORDER: usize = 8;
/// Tolerated change of the reconstruction under ξ-refinement.
pub const REFINEMENT_TOLERANCE: f64 = 1e-4;

/// (1/2π) Σ_{j≤j_max} ∫_{|ξ|≤xi_cut} Πⱼ(h,b;ξ) f dξ at the probe's nodes.
fn reconstruct(h: f64, b: f64, f: &TestFunction, xi_cut: f64, j_max: usize, xi_panels: usize) -> Result<Vec<Complex64>> {
    let s = (b / h).sqrt();
    let ((y1, w1), (y2, w2)) = f.rules();
    let values: Vec<Complex64> = y1
        .iter()
        .flat_map(|&a| y2.iter().map(move |&c| [a, c]))
        .map(|p| f.eval(p))
        .collect();
    let n2 = y2.len();
    let (xis, wxi) = composite(-xi_cut, xi_cut, xi_panels, XI_ORDER);
    let n_points = MODE_POINTS.max(4 * j_max);
    let contributions: Vec<Vec<Complex64>> = xis
        .par_iter()
        .zip(wxi.par_iter())
        .map(|(&xi, &wx)| -> Result<Vec<Complex64>> {
            let kappa = s * xi;
            let modes = solve_de_gennes(&DeGennesConfig::half_line(xi, n_points), j_max)?;
            // G(y₂) = ∫ e^{iκy₁} f(y₁, y₂) dy₁
            let mut g = vec![Complex64::new(0.0, 0.0); n2];
            for (i, (&a, &wa)) in y1.iter().zip(&w1).enumerate() {
                let e = Complex64::from_polar(wa, kappa * a);
                for k in 0..n2 {
                    g[k] += e * values[i * n2 + k];
                }
            }
            let u: Vec<Vec<f64>> = modes
                .iter()
                .map(|m| y2.iter().map(|&c| m.eval(s * c)).collect::<Result<Vec<f64>>>())
                .collect::<Result<_>>()?;
            // Σⱼ uⱼ(x₂) Fⱼ with Fⱼ = ∫ uⱼ(y₂) G(y₂) dy₂
            let mut column = vec![Complex64::new(0.0, 0.0); n2];
            for uj in &u {
                let fj: Complex64 = (0..n2).map(|k| g[k] * (w2[k] * uj[k])).sum();
                for k in 0..n2 {
                    column[k] += fj * uj[k];
                }
            }
            let pref = wx * b / h / (2.0 * PI);
            let mut out = Vec::with_capacity(values.len());
            for &a in &y1 {
                let e = Complex64::from_polar(pref, -kappa * a);
                out.extend(column.iter().map(|c| e * c));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut total = vec![Complex64::new(0.0, 0.0); values.len()];
    for c in &contributions {
        for (t, v) in total.iter_mut().zip(c) {
            *t += v;
        }
    }
    Ok(total)
}

fn weighted_norm(f: &TestFunction, values: &[Complex64]) -> f64 {
    let ((_, w1), (_, w2)) = f.rules();
    let n2 = w2.len();
    let mut s = 0.0;
    for (i, wa) in w1.iter().enumerate() {
        for (k, wc) in w2.iter().enumerate() {
            s += wa * wc * values[i * n2 + k].norm_sqr();
        }
    }
    s.sqrt()
}

/// Relative defect of the truncated resolution of the identity on `f`.
pub fn verify_resolution_identity(h: f64, b: f64, f: &TestFunction, xi_cut: f64, j_max: usize) -> Result<ResolutionReport> {
    ProjectorKernel::half_plane(1, h, b, 0.0)?;
    if !(xi_cut > 0.0) || j_max == 0 {
        return Err(Error::Config(format!("need xi_cut > 0 and j_max >= 1, got {xi_cut}, {j_max}")));
    }
    let panels = ((2.0 * xi_cut * XI_PANELS_PER_UNIT).ceil() as usize).max(1);
    let coarse = reconstruct(h, b, f, xi_cut, j_max, panels)?;
    let fine = reconstruct(h, b, f, xi_cut, j_max, 2 * panels)?;
    let ((y1, _), (y2, _)) = f.rules();
    let exact: Vec<Complex64> = y1.iter().flat_map(|&a| y2.iter().map(move |&c| f.eval([a, c]))).collect();
    let f_norm = weighted_norm(f, &exact);
    let diff: Vec<Complex64> = fine.iter().zip(&exact).map(|(r, e)| r - e).collect();
    let change: Vec<Complex64> = fine.iter().zip(&coarse).map(|(a, c)| a - c).collect();
    let defect_norm = weighted_norm(f, &diff);
    let refinement_change = if f_norm > 0.0 { weighted_norm(f, &change) / f_norm } else { 0.0 };
    if refinement_change > REFINEMENT_TOLERANCE {
        return Err(Error::Numerical(format!(
            "xi quadrature under-resolved: doubling changes the reconstruction by {refinement_change:e}"
        )));
    }
    Ok(ResolutionReport {
        defect_norm,
        f_norm,
        residual: (f_norm > 0.0).then(|| defect_norm / f_norm),
        refinement_change,
    })
}

/// Values of a function on a uniform grid with two ghost layers on each
/// side, indexed [i₁][i₂].
struct GridValues {
    x1: Vec<f64>,
    x2: Vec<f64>,
    values: Vec<Vec<Complex64>>,
    d: f64,
}

/// Uniform grid with spacing `d` covering `x1 × x2`, plus two ghost layers.
fn padded_grid(x1: (f64, f64), x2: (f64, f64), d: f64) -> (Vec<f64>, Vec<f64>) {
    let axis = |(a, b): (f64, f64)| {
        let n = ((b - a) / d).round() as i64;
        (-2..=n + 2).map(|i| a + i as f64 * d).collect::<Vec<f64>>()
    };
    (axis(x1), axis(x2))
}

/// P g − target·g at interior (non-ghost) nodes, by fourth-order central
/// differences. Returns (‖Pg − target g‖, ‖target g‖) in the discrete ℓ² sense.
fn magnetic_residual(grid: &GridValues, h: f64, b: f64, target: f64) -> (f64, f64) {
    let d = grid.d;
    let g = &grid.values;
    let (n1, n2) = (grid.x1.len(), grid.x2.len());
    let mut num = 0.0;
    let mut den = 0.0;
    let i = Complex64::i();
    for a in 2..n1 - 2 {
        for c in 2..n2 - 2 {
            let x2 = grid.x2[c];
            let d1 = (-g[a + 2][c] + 8.0 * g[a + 1][c] - 8.0 * g[a - 1][c] + g[a - 2][c]) / (12.0 * d);
            let dd1 = (-g[a + 2][c] + 16.0 * g[a + 1][c] - 30.0 * g[a][c] + 16.0 * g[a - 1][c] - g[a - 2][c])
                / (12.0 * d * d);
            let dd2 = (-g[a][c + 2] + 16.0 * g[a][c + 1] - 30.0 * g[a][c] + 16.0 * g[a][c - 1] - g[a][c - 2])
                / (12.0 * d * d);
            let pg = -h * h * dd1 - 2.0 * i * b * h * x2 * d1 + b * b * x2 * x2 * g[a][c] - h * h * dd2;
            num += (pg - target * g[a][c]).norm_sqr();
            den += (target * g[a][c]).norm_sqr();
        }
    }
    (num.sqrt(), den.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntertwiningReport {
    /// ‖PΠf − λΠf‖/‖λΠf‖, absent when Πf vanishes.
    pub residual: Option<f64>,
    /// ‖Πf‖/‖f‖ on the probe's box.
    pub applied_norm: f64,
    pub eigenvalue: f64,
}

/// Below this applied norm the projection counts as zero.
pub const DEGENERATE_NORM: f64 = 1e-10;

/// P Πⱼ(h,b;ξ) f against hb μⱼ(ξ) Πⱼ(h,b;ξ) f on the strip
/// [x₁-box] × [0, x₂ where uⱼ has decayed], with grid spacing `d`.
pub fn verify_intertwining(p: &ProjectorKernel, f: &TestFunction, d: f64) -> Result<IntertwiningReport> {
    p.expect(KernelKind::HalfPlane)?;
    if !(d > 0.0) {
        return Err(Error::Config(format!("grid spacing {d} must be positive")));
    }
    let mode = fiber_mode(p.level, p.xi, MODE_POINTS)?;
    let s = p.scale();
    let kappa = s * p.xi;
    // Πf = (b/h) e^{−iκx₁} uⱼ(s x₂) F with F = ∫ e^{iκy₁} uⱼ(s y₂) f(y) dy.
    let ((y1, w1), (y2, w2)) = f.rules();
    let mut coefficient = Complex64::new(0.0, 0.0);
    for (&a, &wa) in y1.iter().zip(&w1) {
        for (&c, &wc) in y2.iter().zip(&w2) {
            coefficient += Complex64::from_polar(wa * wc * mode.eval(s * c)?, kappa * a) * f.eval([a, c]);
        }
    }
    let amplitude = coefficient * (p.b / p.h);
    let eigenvalue = p.h * p.b * mode.eigenvalue;
    // ‖Πf‖ on the box: |amplitude|·‖u(s·)‖·√(box width)
    let u_norm2: f64 = y2.iter().zip(&w2).map(|(&c, &w)| Ok(w * mode.eval(s * c)?.powi(2))).sum::<Result<f64>>()?;
    let f_norm = f.l2_norm();
    let applied_norm = if f_norm > 0.0 {
        amplitude.norm() * (u_norm2 * (f.x1.1 - f.x1.0)).sqrt() / f_norm
    } else {
        0.0
    };
    if applied_norm < DEGENERATE_NORM {
        return Ok(IntertwiningReport { residual: None, applied_norm, eigenvalue });
    }
    let top = (mode.t_max() - 2.0) / s;
    let (x1, x2) = padded_grid(f.x1, (0.0, top), d);
    let values: Vec<Vec<Complex64>> = x1
        .iter()
        .map(|&a| {
            x2.iter()
                .map(|&c| {
                    // even reflection across x₂ = 0 carries the Neumann condition
                    Ok(amplitude * Complex64::from_polar(mode.eval(s * c.abs())?, -kappa * a))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let (num, den) = magnetic_residual(&GridValues { x1, x2, values, d }, p.h, p.b, eigenvalue);
    Ok(IntertwiningReport { residual: Some(num / den), applied_norm, eigenvalue })
}

/// P Πⱼᴸ f against (2j−1)hb Πⱼᴸ f on `window`, with Πⱼᴸ f evaluated by
/// quadrature on the probe's box.
pub fn verify_landau_intertwining(
    p: &ProjectorKernel,
    f: &TestFunction,
    window: ((f64, f64), (f64, f64)),
    d: f64,
) -> Result<IntertwiningReport> {
    p.expect(KernelKind::Landau)?;
    let ((y1, w1), (y2, w2)) = f.rules();
    let nodes: Vec<(Point, Complex64)> = y1
        .iter()
        .zip(&w1)
        .flat_map(|(&a, &wa)| y2.iter().zip(&w2).map(move |(&c, &wc)| ([a, c], wa * wc)))
        .map(|(y, w)| (y, f.eval(y) * w))
        .collect();
    let apply = |x: Point| -> Complex64 { nodes.iter().map(|&(y, fw)| landau_kernel(p.level, p.h, p.b, x, y) * fw).sum() };
    let (x1, x2) = padded_grid(window.0, window.1, d);
    let values: Vec<Vec<Complex64>> = x1.par_iter().map(|&a| x2.iter().map(|&c| apply([a, c])).collect()).collect();
    let eigenvalue = (2 * p.level - 1) as f64 * p.h * p.b;
    let grid = GridValues { x1, x2, values, d };
    let (num, den) = magnetic_residual(&grid, p.h, p.b, eigenvalue);
    let f_norm = f.l2_norm();
    let applied_norm = if f_norm > 0.0 { den / eigenvalue * d / f_norm } else { 0.0 };
    if applied_norm < DEGENERATE_NORM {
        return Ok(IntertwiningReport { residual: None, applied_norm, eigenvalue });
    }
    Ok(IntertwiningReport { residual: Some(num / den), applied_norm, eigenvalue })
}

/// Applies the half-plane kernel restricted to the probe's box twice and
/// returns (‖A(Af) − c·Af‖/‖c·Af‖, c) with c = ∫_box K(y,y) dy.
pub fn idempotence_defect(p: &ProjectorKernel, f: &TestFunction) -> Result<(f64, f64)> {
    p.expect(KernelKind::HalfPlane)?;
    let mode = fiber_mode(p.level, p.xi, MODE_POINTS)?;
    let ((y1, w1), (y2, w2)) = f.rules();
    let pts: Vec<(Point, f64)> = y1
        .iter()
        .zip(&w1)
        .flat_map(|(&a, &wa)| y2.iter().zip(&w2).map(move |(&c, &wc)| ([a, c], wa * wc)))
        .collect();
    let kernel = |x: Point, y: Point| halfplane_kernel_eval(p, x, y, &mode);
    let apply = |g: &[Complex64]| -> Result<Vec<Complex64>> {
        pts.par_iter()
            .map(|&(x, _)| {
                pts.iter()
                    .zip(g)
                    .map(|(&(y, w), gy)| Ok(kernel(x, y)? * gy * w))
                    .sum::<Result<Complex64>>()
            })
            .collect()
    };
    let f0: Vec<Complex64> = pts.iter().map(|&(y, _)| f.eval(y)).collect();
    let once = apply(&f0)?;
    let twice = apply(&once)?;
    let trace: f64 = pts.iter().map(|&(y, w)| Ok(kernel(y, y)?.re * w)).sum::<Result<f64>>()?;
    let mut num = 0.0;
    let mut den = 0.0;
    for ((t, o), &(_, w)) in twice.iter().zip(&once).zip(&pts) {
        num += w * (t - trace * o).norm_sqr();
        den += w * (trace * o).norm_sqr();
    }
    if den == 0.0 {
        return Err(Error::Numerical("projection of the probe vanishes".into()));
    }
    Ok(((num / den).sqrt(), trace))
}
