//! Symmetric tridiagonal eigensolver.
//!
//! Eigenvalues are located by Sturm-sequence bisection, eigenvectors by
//! inverse iteration on the shifted matrix. Every discretized 1D operator in
//! the crate (half-line oscillators, radial disk sectors) reduces to this form.

use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix stored as its diagonal and off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::Config("empty tridiagonal matrix".into()));
        }
        if off.len() + 1 != diag.len() {
            return Err(Error::Config(format!(
                "off-diagonal length {} does not match diagonal length {}",
                off.len(),
                diag.len()
            )));
        }
        Ok(Self { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x` (negative LDLᵀ pivots).
    pub fn count_below(&self, x: f64) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.diag.len() {
            if q.abs() < tiny {
                q = if q < 0.0 { -tiny } else { tiny };
            }
            q = (self.diag[i] - x) - self.off[i - 1] * self.off[i - 1] / q;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> Result<f64> {
        if k >= self.len() {
            return Err(Error::Config(format!(
                "eigenvalue index {k} out of range for size {}",
                self.len()
            )));
        }
        let (lo, hi) = self.gershgorin();
        Ok(self.bisect(k, lo, hi))
    }

    fn bisect(&self, k: usize, mut lo: f64, mut hi: f64) -> f64 {
        let scale = lo.abs().max(hi.abs()).max(1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let tol = (2.0 * f64::EPSILON * lo.abs().max(hi.abs())).max(1e-3 * f64::EPSILON * scale);
            if hi - lo <= tol {
                break;
            }
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// The `count` smallest eigenvalues in ascending order.
    pub fn lowest_eigenvalues(&self, count: usize) -> Result<Vec<f64>> {
        if count > self.len() {
            return Err(Error::Config(format!(
                "requested {count} eigenvalues of a {}x{} matrix",
                self.len(),
                self.len()
            )));
        }
        let (lo, hi) = self.gershgorin();
        let mut out = Vec::with_capacity(count);
        let mut floor = lo;
        for k in 0..count {
            let value = self.bisect(k, floor, hi);
            out.push(value);
            floor = value.min(hi);
            // The next eigenvalue is at or above this one; back off a hair so
            // that a repeated value is still bracketed.
            floor -= 8.0 * f64::EPSILON * value.abs().max(1.0);
        }
        Ok(out)
    }

    /// All eigenvalues strictly below `threshold`, ascending.
    pub fn eigenvalues_below(&self, threshold: f64) -> Vec<f64> {
        let count = self.count_below(threshold);
        if count == 0 {
            return Vec::new();
        }
        let (lo, _) = self.gershgorin();
        let mut out = Vec::with_capacity(count);
        let mut floor = lo;
        for k in 0..count {
            let value = self.bisect(k, floor, threshold);
            out.push(value);
            floor = value - 8.0 * f64::EPSILON * value.abs().max(1.0);
        }
        out
    }

    /// Unit eigenvector for an (accurately known) eigenvalue by inverse
    /// iteration. `previous` vectors are projected out, which keeps clustered
    /// eigenvectors orthogonal.
    pub fn eigenvector(&self, eigenvalue: f64, previous: &[Vec<f64>]) -> Result<Vec<f64>> {
        let n = self.len();
        let scale = self.gershgorin().1.abs().max(self.gershgorin().0.abs()).max(1.0);
        let shift = eigenvalue + 64.0 * f64::EPSILON * scale;
        // Deterministic, non-degenerate start vector.
        let mut x: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * 0.618_033_988_749_895).fract())
            .collect();
        normalize(&mut x);
        let mut converged = false;
        for _ in 0..8 {
            let mut y = self.solve_shifted(shift, &x)?;
            for v in previous {
                let d = dot(&y, v);
                for (yi, vi) in y.iter_mut().zip(v) {
                    *yi -= d * vi;
                }
            }
            let norm = normalize(&mut y);
            if !norm.is_finite() || norm == 0.0 {
                return Err(Error::Numerical(format!(
                    "inverse iteration broke down at eigenvalue {eigenvalue:e}"
                )));
            }
            let change = dot(&x, &y).abs();
            x = y;
            if (1.0 - change).abs() < 1e-15 {
                converged = true;
                break;
            }
        }
        if !converged {
            let residual = self.residual(eigenvalue, &x);
            if residual > 1e-8 * scale {
                return Err(Error::Numerical(format!(
                    "inverse iteration did not converge at eigenvalue {eigenvalue:e} (residual {residual:e})"
                )));
            }
        }
        Ok(x)
    }

    /// ‖(A − λ)x‖₂.
    pub fn residual(&self, eigenvalue: f64, x: &[f64]) -> f64 {
        let y = self.matvec(x);
        y.iter()
            .zip(x)
            .map(|(yi, xi)| (yi - eigenvalue * xi).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * x[i + 1];
            }
            y[i] = s;
        }
        y
    }

    /// Solve (A − σ)y = r with partial pivoting (Gaussian elimination on
    /// the tridiagonal band, which may fill one extra superdiagonal).
    fn solve_shifted(&self, sigma: f64, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        if n == 1 {
            let d = self.diag[0] - sigma;
            let d = if d == 0.0 { f64::EPSILON } else { d };
            return Ok(vec![rhs[0] / d]);
        }
        let tiny = f64::EPSILON * self.gershgorin().1.abs().max(1.0);
        // Row i holds a[i] (diag), b[i] (first super), c[i] (second super).
        let mut a: Vec<f64> = self.diag.iter().map(|d| d - sigma).collect();
        let mut b: Vec<f64> = self.off.clone();
        b.push(0.0);
        let mut c = vec![0.0; n];
        let mut sub: Vec<f64> = self.off.clone();
        let mut r = rhs.to_vec();
        for i in 0..n - 1 {
            if sub[i].abs() > a[i].abs() {
                // swap rows i and i+1
                std::mem::swap(&mut a[i], &mut sub[i]);
                let (bi, ai1) = (b[i], a[i + 1]);
                b[i] = ai1;
                a[i + 1] = bi;
                let (ci, bi1) = (c[i], b[i + 1]);
                c[i] = bi1;
                b[i + 1] = ci;
                r.swap(i, i + 1);
            }
            if a[i] == 0.0 {
                a[i] = tiny;
            }
            let factor = sub[i] / a[i];
            a[i + 1] -= factor * b[i];
            if i + 1 < n - 1 {
                b[i + 1] -= factor * c[i];
            }
            r[i + 1] -= factor * r[i];
        }
        if a[n - 1] == 0.0 {
            a[n - 1] = tiny;
        }
        let mut y = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = r[i];
            if i + 1 < n {
                s -= b[i] * y[i + 1];
            }
            if i + 2 < n {
                s -= c[i] * y[i + 2];
            }
            y[i] = s / a[i];
        }
        Ok(y)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(x: &mut [f64]) -> f64 {
    let norm = dot(x, x).sqrt();
    if norm > 0.0 {
        for v in x.iter_mut() {
            *v /= norm;
        }
    }
    norm
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn chain(n: usize) -> SymTridiag {
        SymTridiag::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap()
    }

    #[test]
    fn dirichlet_chain_eigenvalues() {
        let n = 64;
        let m = chain(n);
        let evs = m.lowest_eigenvalues(n).unwrap();
        for (k, ev) in evs.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k as f64 + 1.0) * PI / (n as f64 + 1.0)).cos();
            assert!((ev - exact).abs() < 1e-13, "k={k}: {ev} vs {exact}");
        }
    }

    #[test]
    fn eigenvalues_below_matches_count() {
        let m = chain(40);
        let below = m.eigenvalues_below(1.0);
        assert_eq!(below.len(), m.count_below(1.0));
        assert!(below.windows(2).all(|w| w[0] < w[1]));
        assert!(below.iter().all(|&v| v < 1.0));
    }

    #[test]
    fn eigenvectors_are_orthonormal() {
        let n = 200;
        let diag: Vec<f64> = (0..n).map(|i| 2.0 + (i as f64 * 0.05).powi(2)).collect();
        let m = SymTridiag::new(diag, vec![-1.0; n - 1]).unwrap();
        let evs = m.lowest_eigenvalues(5).unwrap();
        let mut vecs: Vec<Vec<f64>> = Vec::new();
        for &ev in &evs {
            let v = m.eigenvector(ev, &vecs).unwrap();
            assert!(m.residual(ev, &v) < 1e-10);
            vecs.push(v);
        }
        for i in 0..vecs.len() {
            for j in 0..vecs.len() {
                let d = dot(&vecs[i], &vecs[j]);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((d - expect).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(SymTridiag::new(vec![], vec![]).is_err());
        assert!(SymTridiag::new(vec![1.0, 2.0], vec![]).is_err());
        assert!(chain(4).eigenvalue(4).is_err());
    }

    #[test]
    fn one_by_one() {
        let m = SymTridiag::new(vec![3.5], vec![]).unwrap();
        assert!((m.eigenvalue(0).unwrap() - 3.5).abs() < 1e-14);
        let v = m.eigenvector(3.5, &[]).unwrap();
        assert!((v[0].abs() - 1.0).abs() < 1e-14);
    }
}
