//! Spectra below a threshold, Riesz means and counting functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sorted eigenvalues of a model operator strictly below `threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    pub threshold: f64,
    pub h: f64,
    pub b: f64,
    /// Angular momentum of each eigenvalue (same order).
    pub sector_labels: Vec<i64>,
    /// Eigenvalues within 1e-10·bh of the threshold; they are *not* in
    /// `eigenvalues`.
    pub flagged_near_threshold: Vec<f64>,
}

impl SpectrumResult {
    /// Builds a result from unsorted (eigenvalue, sector) pairs, dropping and
    /// flagging values too close to the threshold.
    pub fn from_pairs(mut pairs: Vec<(f64, i64)>, threshold: f64, h: f64, b: f64) -> Self {
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let guard = 1e-10 * b * h;
        let mut eigenvalues = Vec::with_capacity(pairs.len());
        let mut sector_labels = Vec::with_capacity(pairs.len());
        let mut flagged = Vec::new();
        for (e, m) in pairs {
            if e >= threshold {
                continue;
            }
            if threshold - e <= guard {
                flagged.push(e);
                continue;
            }
            eigenvalues.push(e);
            sector_labels.push(m);
        }
        Self {
            eigenvalues,
            threshold,
            h,
            b,
            sector_labels,
            flagged_near_threshold: flagged,
        }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Ground state e₁, if any eigenvalue lies below the threshold.
    pub fn ground_state(&self) -> Option<f64> {
        self.eigenvalues.first().copied()
    }

    fn check_complete(&self, level: f64) -> Result<()> {
        if level > self.threshold {
            return Err(Error::Incomplete(format!(
                "level {level:e} exceeds the threshold {:e} up to which the spectrum is known",
                self.threshold
            )));
        }
        Ok(())
    }
}

/// Σⱼ [eⱼ − shift]₋, summed in ascending eigenvalue order.
pub fn riesz_mean(spectrum: &SpectrumResult, shift: f64) -> Result<f64> {
    spectrum.check_complete(shift)?;
    Ok(spectrum
        .eigenvalues
        .iter()
        .take_while(|&&e| e < shift)
        .fold(0.0, |acc, &e| acc + (shift - e)))
}

/// Number of eigenvalues strictly below `level`.
pub fn counting_function(spectrum: &SpectrumResult, level: f64) -> Result<usize> {
    spectrum.check_complete(level)?;
    Ok(spectrum.eigenvalues.partition_point(|&e| e < level))
}

/// ∫_{−∞}^{level} N(τ) dτ evaluated exactly for the step function N.
pub fn integrated_counting(spectrum: &SpectrumResult, level: f64) -> Result<f64> {
    spectrum.check_complete(level)?;
    let mut total = 0.0;
    let below: Vec<f64> = spectrum.eigenvalues.iter().copied().filter(|&e| e < level).collect();
    for (k, pair) in below.iter().zip(below.iter().skip(1).chain(std::iter::once(&level))).enumerate() {
        // N = k + 1 on [eₖ, eₖ₊₁)
        total += (k as f64 + 1.0) * (pair.1 - pair.0);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_levels() -> SpectrumResult {
        SpectrumResult::from_pairs(vec![(0.9, 1), (0.5, 0)], 1.0, 1.0, 1.0)
    }

    #[test]
    fn riesz_examples() {
        let empty = SpectrumResult::from_pairs(vec![], 1.0, 1.0, 1.0);
        assert_eq!(riesz_mean(&empty, 0.3).unwrap(), 0.0);
        assert!((riesz_mean(&two_levels(), 1.0).unwrap() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn counting_examples() {
        let empty = SpectrumResult::from_pairs(vec![], 1.0, 1.0, 1.0);
        assert_eq!(counting_function(&empty, 0.7).unwrap(), 0);
        assert_eq!(counting_function(&two_levels(), 0.8).unwrap(), 1);
    }

    #[test]
    fn incomplete_level_rejected() {
        assert!(matches!(riesz_mean(&two_levels(), 1.5), Err(Error::Incomplete(_))));
        assert!(matches!(counting_function(&two_levels(), 1.01), Err(Error::Incomplete(_))));
    }

    #[test]
    fn near_threshold_values_are_flagged() {
        let s = SpectrumResult::from_pairs(vec![(1.0 - 1e-14, 3), (0.2, 0)], 1.0, 1.0, 1.0);
        assert_eq!(s.eigenvalues, vec![0.2]);
        assert_eq!(s.flagged_near_threshold.len(), 1);
        assert_eq!(s.sector_labels, vec![0]);
    }

    #[test]
    fn riesz_equals_integrated_counting() {
        let s = SpectrumResult::from_pairs(
            vec![(0.1, 0), (0.35, 1), (0.35, 2), (0.7, 3), (0.95, 4)],
            1.0,
            1.0,
            1.0,
        );
        for level in [0.05, 0.2, 0.35, 0.5, 0.99, 1.0] {
            let a = riesz_mean(&s, level).unwrap();
            let b = integrated_counting(&s, level).unwrap();
            assert!((a - b).abs() < 1e-14, "level {level}: {a} vs {b}");
        }
    }
}
