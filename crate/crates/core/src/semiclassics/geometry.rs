//! Sampled boundary curves: arclength, curvature, enclosed area, and the
//! tubular (s, t) coordinates near the boundary.
//!
//! Closed curves are treated as periodic functions of the sample index and
//! differentiated spectrally (trigonometric interpolation), so lengths,
//! areas and ∮k ds converge exponentially for smooth boundaries. Open
//! curves use chord lengths and three-point curvature.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

pub type Point = [f64; 2];

pub const MIN_CURVE_POINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub position: Point,
    /// Arclength from the first sample.
    pub s: f64,
    /// Signed curvature; positive on a counterclockwise convex boundary.
    pub k: f64,
    /// Quadrature weight for ∮ · ds at this sample.
    pub ds: f64,
    /// Unit normal pointing into the domain (left of the traversal).
    pub normal: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve {
    pub samples: Vec<CurveSample>,
    pub length: f64,
    /// |Ω| for closed curves.
    pub enclosed_area: Option<f64>,
    pub closed: bool,
    /// True when the input was clockwise and has been reversed.
    pub reversed: bool,
}

impl BoundaryCurve {
    pub fn circle(radius: f64, n: usize) -> Result<Self> {
        let pts = (0..n)
            .map(|j| {
                let th = 2.0 * PI * j as f64 / n as f64;
                [radius * th.cos(), radius * th.sin()]
            })
            .collect::<Vec<_>>();
        curve_from_parametrization(&pts, true)
    }

    pub fn ellipse(semi_x: f64, semi_y: f64, n: usize) -> Result<Self> {
        let pts = (0..n)
            .map(|j| {
                let th = 2.0 * PI * j as f64 / n as f64;
                [semi_x * th.cos(), semi_y * th.sin()]
            })
            .collect::<Vec<_>>();
        curve_from_parametrization(&pts, true)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// ∮ g ds over the sampled curve.
    pub fn integrate<F: Fn(&CurveSample) -> f64>(&self, g: F) -> f64 {
        self.samples.iter().map(|p| g(p) * p.ds).sum()
    }

    /// ∮ k ds; 2π for a simple closed counterclockwise curve.
    pub fn total_curvature(&self) -> f64 {
        self.integrate(|p| p.k)
    }

    /// ∫₀^{|∂Ω|} ∫₀^{t₀} f(s, t)(1 − t k(s)) dt ds, the area element of the
    /// tubular coordinates x = γ(s) + t ν(s).
    pub fn tubular_integral<F: Fn(f64, f64) -> f64>(&self, t0: f64, nodes: usize, f: F) -> f64 {
        let (ts, ws) = GaussLegendre::new(nodes).on_interval(0.0, t0);
        self.samples
            .iter()
            .map(|p| {
                let inner: f64 = ts
                    .iter()
                    .zip(&ws)
                    .map(|(&t, &w)| w * f(p.s, t) * (1.0 - t * p.k))
                    .sum();
                inner * p.ds
            })
            .sum()
    }

    /// γ(sᵢ) + t ν(sᵢ) for sample i.
    pub fn tubular_point(&self, i: usize, t: f64) -> Point {
        let p = &self.samples[i];
        [p.position[0] + t * p.normal[0], p.position[1] + t * p.normal[1]]
    }
}

/// Builds a [`BoundaryCurve`] from ordered points. Closed curves are
/// reoriented counterclockwise.
pub fn curve_from_parametrization(points: &[Point], closed: bool) -> Result<BoundaryCurve> {
    if points.len() < MIN_CURVE_POINTS {
        return Err(Error::Geometry(format!(
            "need at least {MIN_CURVE_POINTS} points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
        return Err(Error::Geometry("non-finite coordinate".into()));
    }
    if let Some((i, j)) = find_self_intersection(points, closed) {
        return Err(Error::Geometry(format!(
            "curve self-intersects (segments {i} and {j})"
        )));
    }
    if closed {
        closed_curve(points)
    } else {
        open_curve(points)
    }
}

fn closed_curve(points: &[Point]) -> Result<BoundaryCurve> {
    let mut pts = points.to_vec();
    let shoelace: f64 = (0..pts.len())
        .map(|j| {
            let (a, b) = (pts[j], pts[(j + 1) % pts.len()]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
        * 0.5;
    let reversed = shoelace < 0.0;
    if reversed {
        pts.reverse();
    }
    let n = pts.len();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);

    let mut z: Vec<Complex64> = pts.iter().map(|p| Complex64::new(p[0], p[1])).collect();
    fwd.process(&mut z);
    let wave = |j: usize| -> f64 {
        if 2 * j == n {
            0.0
        } else if 2 * j < n {
            j as f64
        } else {
            j as f64 - n as f64
        }
    };
    let scale = 1.0 / n as f64;
    let mut d1: Vec<Complex64> = z
        .iter()
        .enumerate()
        .map(|(j, c)| c * Complex64::new(0.0, wave(j)) * scale)
        .collect();
    let mut d2: Vec<Complex64> = z
        .iter()
        .enumerate()
        .map(|(j, c)| c * (-wave(j) * wave(j)) * scale)
        .collect();
    inv.process(&mut d1);
    inv.process(&mut d2);

    let speed: Vec<f64> = d1.iter().map(|c| c.norm()).collect();
    if speed.iter().any(|&s| s <= 0.0) {
        return Err(Error::Geometry("degenerate parametrization (zero speed)".into()));
    }
    let curvature: Vec<f64> = d1
        .iter()
        .zip(&d2)
        .zip(&speed)
        .map(|((a, b), s)| (a.re * b.im - a.im * b.re) / s.powi(3))
        .collect();

    // Arclength by spectral integration of the speed.
    let mut sp: Vec<Complex64> = speed.iter().map(|&s| Complex64::new(s, 0.0)).collect();
    fwd.process(&mut sp);
    let mean = sp[0].re * scale;
    let mut anti: Vec<Complex64> = sp
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let k = wave(j);
            if k == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                c / Complex64::new(0.0, k) * scale
            }
        })
        .collect();
    inv.process(&mut anti);
    let dtheta = 2.0 * PI / n as f64;
    let length = mean * 2.0 * PI;
    let area = 0.5
        * pts
            .iter()
            .zip(&d1)
            .map(|(p, d)| p[0] * d.im - p[1] * d.re)
            .sum::<f64>()
        * dtheta;

    let samples = (0..n)
        .map(|j| {
            let t = d1[j] / speed[j];
            CurveSample {
                position: pts[j],
                s: mean * dtheta * j as f64 + anti[j].re - anti[0].re,
                k: curvature[j],
                ds: speed[j] * dtheta,
                normal: [-t.im, t.re],
            }
        })
        .collect();
    Ok(BoundaryCurve {
        samples,
        length,
        enclosed_area: Some(area),
        closed: true,
        reversed,
    })
}

fn open_curve(points: &[Point]) -> Result<BoundaryCurve> {
    let n = points.len();
    let chord = |a: Point, b: Point| ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
    let mut s = vec![0.0; n];
    for j in 1..n {
        let c = chord(points[j - 1], points[j]);
        if c == 0.0 {
            return Err(Error::Geometry(format!("repeated point at index {j}")));
        }
        s[j] = s[j - 1] + c;
    }
    let mut k = vec![0.0; n];
    for j in 1..n - 1 {
        let (a, b, c) = (points[j - 1], points[j], points[j + 1]);
        let cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
        k[j] = 2.0 * cross / (chord(a, b) * chord(b, c) * chord(a, c));
    }
    k[0] = k[1];
    k[n - 1] = k[n - 2];
    let samples = (0..n)
        .map(|j| {
            let (a, b) = (points[j.saturating_sub(1)], points[(j + 1).min(n - 1)]);
            let len = chord(a, b);
            let tangent = [(b[0] - a[0]) / len, (b[1] - a[1]) / len];
            let left = if j == 0 { 0.0 } else { s[j] - s[j - 1] };
            let right = if j == n - 1 { 0.0 } else { s[j + 1] - s[j] };
            CurveSample {
                position: points[j],
                s: s[j],
                k: k[j],
                ds: 0.5 * (left + right),
                normal: [-tangent[1], tangent[0]],
            }
        })
        .collect();
    Ok(BoundaryCurve {
        samples,
        length: s[n - 1],
        enclosed_area: None,
        closed: false,
        reversed: false,
    })
}

fn find_self_intersection(points: &[Point], closed: bool) -> Option<(usize, usize)> {
    let n = points.len();
    let segs = if closed { n } else { n - 1 };
    let seg = |i: usize| (points[i], points[(i + 1) % n]);
    for i in 0..segs {
        for j in (i + 2)..segs {
            if closed && i == 0 && j == segs - 1 {
                continue;
            }
            let (a, b) = seg(i);
            let (c, d) = seg(j);
            if segments_cross(a, b, c, d) {
                return Some((i, j));
            }
        }
    }
    None
}

fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let orient = |p: Point, q: Point, r: Point| (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    (d1 * d2 < 0.0) && (d3 * d4 < 0.0)
}

/// Reads "x y" pairs, one per line. Blank lines and `#` comments are skipped.
pub fn parse_points(text: &str) -> Result<Vec<Point>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse(format!(
                "line {}: expected two numbers, found {}",
                lineno + 1,
                fields.len()
            )));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {}: {s:?}: {e}", lineno + 1)))
        };
        out.push([parse(fields[0])?, parse(fields[1])?]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_closed_forms() {
        let r = 1.7;
        let c = BoundaryCurve::circle(r, 256).unwrap();
        assert!((c.length - 2.0 * PI * r).abs() < 1e-6);
        assert!((c.enclosed_area.unwrap() - PI * r * r).abs() < 1e-6);
        for p in &c.samples {
            assert!((p.k - 1.0 / r).abs() < 1e-4);
        }
        assert!((c.total_curvature() - 2.0 * PI).abs() < 1e-6);
        assert!(!c.reversed);
    }

    #[test]
    fn ellipse_curvature_at_vertex() {
        let c = BoundaryCurve::ellipse(2.0, 1.0, 256).unwrap();
        assert!((c.samples[0].k - 2.0).abs() < 1e-3);
        assert!((c.total_curvature() - 2.0 * PI).abs() < 1e-6);
    }

    #[test]
    fn clockwise_input_is_reversed() {
        let mut pts: Vec<Point> = (0..64)
            .map(|j| {
                let th = 2.0 * PI * j as f64 / 64.0;
                [th.cos(), th.sin()]
            })
            .collect();
        pts.reverse();
        let c = curve_from_parametrization(&pts, true).unwrap();
        assert!(c.reversed);
        assert!(c.samples[3].k > 0.0);
        assert!(c.enclosed_area.unwrap() > 0.0);
        // inward normal at (1,0)-ish points toward the center
        let p = &c.samples[0];
        assert!(p.normal[0] * p.position[0] + p.normal[1] * p.position[1] < 0.0);
    }

    #[test]
    fn arclength_is_monotone() {
        let c = BoundaryCurve::ellipse(3.0, 0.5, 128).unwrap();
        assert!(c.samples.windows(2).all(|w| w[1].s > w[0].s));
        assert!(c.samples.last().unwrap().s < c.length);
    }

    #[test]
    fn figure_eight_rejected() {
        let pts: Vec<Point> = (0..64)
            .map(|j| {
                let th = 2.0 * PI * j as f64 / 64.0;
                [th.sin(), (2.0 * th).sin()]
            })
            .collect();
        assert!(matches!(curve_from_parametrization(&pts, true), Err(Error::Geometry(_))));
    }

    #[test]
    fn too_few_points_rejected() {
        let pts = vec![[0.0, 0.0]; 5];
        assert!(curve_from_parametrization(&pts, true).is_err());
    }

    #[test]
    fn open_arc() {
        let pts: Vec<Point> = (0..=200)
            .map(|j| {
                let th = PI * j as f64 / 200.0;
                [th.cos(), th.sin()]
            })
            .collect();
        let c = curve_from_parametrization(&pts, false).unwrap();
        assert!((c.length - PI).abs() < 1e-4);
        assert!((c.samples[100].k - 1.0).abs() < 1e-4);
        assert!(c.enclosed_area.is_none());
    }

    #[test]
    fn parses_point_tables() {
        let pts = parse_points("# x y\n1.0 2.0\n\n-3e-1   4\n").unwrap();
        assert_eq!(pts, vec![[1.0, 2.0], [-0.3, 4.0]]);
        assert!(parse_points("1.0\n").is_err());
        assert!(parse_points("1.0 abc\n").is_err());
    }
}
