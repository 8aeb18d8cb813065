//! Finite-dimensional checks of the two variational principles: for a
//! Hermitian H and any 0 ≤ γ ≤ 1, tr(Hγ) ≥ Σ(negative eigenvalues of H),
//! and no orthonormal family beats that sum.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_SIZE: usize = 2;
pub const MAX_SIZE: usize = 12;
/// Tolerance for the equality at the spectral projector, relative to Σ|λ|.
pub const EQUALITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub trial: usize,
    pub check: String,
    /// Row-major real and imaginary parts of H.
    pub h_re: Vec<f64>,
    pub h_im: Vec<f64>,
    pub size: usize,
    pub trace: f64,
    pub negative_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationalOutcome {
    pub seed: u64,
    pub trials: usize,
    pub violations: usize,
    pub max_equality_error: f64,
    /// First violation found, if any.
    pub counterexample: Option<Counterexample>,
}

impl VariationalOutcome {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn counterexample_json(&self) -> Option<String> {
        self.counterexample
            .as_ref()
            .map(|c| serde_json::to_string(c).expect("plain data serializes"))
    }
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(n, n, |_, _| random_complex(rng));
    (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
}

fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |_, _| random_complex(rng)).qr().q()
}

fn trace_product(h: &DMatrix<Complex64>, gamma: &DMatrix<Complex64>) -> f64 {
    (h * gamma).trace().re
}

/// Σ⟨fₖ, H fₖ⟩ over the columns of `family`.
fn family_energy(h: &DMatrix<Complex64>, family: &DMatrix<Complex64>) -> f64 {
    (family.adjoint() * h * family).trace().re
}

/// Runs `trials` random cases (sizes 2–12) from `seed`.
pub fn variational_check(seed: u64, trials: usize) -> Result<VariationalOutcome> {
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut outcome = VariationalOutcome {
        seed,
        trials,
        violations: 0,
        max_equality_error: 0.0,
        counterexample: None,
    };
    for trial in 0..trials {
        let n = rng.gen_range(MIN_SIZE..=MAX_SIZE);
        let h = random_hermitian(&mut rng, n);
        let eig = h.clone().symmetric_eigen();
        let negative_sum: f64 = eig.eigenvalues.iter().filter(|&&l| l < 0.0).sum();
        let scale: f64 = eig.eigenvalues.iter().map(|l| l.abs()).sum::<f64>().max(1.0);
        let tol = 1e-12 * scale;

        let record = |check: &str, trace: f64, outcome: &mut VariationalOutcome| {
            outcome.violations += 1;
            if outcome.counterexample.is_none() {
                outcome.counterexample = Some(Counterexample {
                    trial,
                    check: check.to_string(),
                    h_re: h.transpose().iter().map(|z| z.re).collect(),
                    h_im: h.transpose().iter().map(|z| z.im).collect(),
                    size: n,
                    trace,
                    negative_sum,
                });
            }
        };

        // random contraction 0 ≤ γ ≤ 1
        let u = random_unitary(&mut rng, n);
        let g = DVector::from_fn(n, |_, _| Complex64::new(rng.gen_range(0.0..=1.0), 0.0));
        let gamma = &u * DMatrix::from_diagonal(&g) * u.adjoint();
        let t = trace_product(&h, &gamma);
        if t < negative_sum - tol {
            record("contraction", t, &mut outcome);
        }

        // γ = 0
        if 0.0 < negative_sum - tol {
            record("zero", 0.0, &mut outcome);
        }

        // spectral projector on the negative part saturates the bound
        let mut projector = DMatrix::<Complex64>::zeros(n, n);
        for (k, &l) in eig.eigenvalues.iter().enumerate() {
            if l < 0.0 {
                let v = eig.eigenvectors.column(k);
                projector += &v * v.adjoint();
            }
        }
        let t = trace_product(&h, &projector);
        let err = (t - negative_sum).abs() / scale;
        outcome.max_equality_error = outcome.max_equality_error.max(err);
        if err > EQUALITY_TOLERANCE {
            record("spectral_projector", t, &mut outcome);
        }

        // random orthonormal family of random length
        let k = rng.gen_range(1..=n);
        let family = random_unitary(&mut rng, n).columns(0, k).into_owned();
        let t = family_energy(&h, &family);
        if t < negative_sum - tol {
            record("orthonormal_family", t, &mut outcome);
        }
    }
    Ok(outcome)
}
