use std::sync::OnceLock;

use magneumann::degennes::Mu1Table;
use magneumann::harness::verify_theorem2;
use magneumann::models2d::disk::{sector_eigenvalues, sector_matrix};
use magneumann::models2d::*;
use proptest::prelude::*;

#[test]
fn polar_reference_agrees_with_sectors() {
    let (b, h) = (1.0, 0.1);
    let spec = DiskSpec::interior(1.0, b, h);
    let sectors = disk_spectrum(&spec, 1.4 * b * h).unwrap().spectrum;
    let gauge = symmetric_gauge(b, [0.0, 0.0]);
    let mut previous = f64::INFINITY;
    for n_r in [16, 32] {
        let grid = PolarGrid { radius: 1.0, n_r, n_theta: 2 * n_r };
        let fv = polar_eigenvalues(&grid, h, &gauge, sectors.len()).unwrap();
        let err = fv.iter().zip(&sectors.eigenvalues).map(|(x, y)| (x - y).abs() / y).fold(0.0, f64::max);
        assert!(err < previous / 3.0, "n_r {n_r}: {err:e} after {previous:e}");
        previous = err;
    }
    assert!(previous < 0.02, "{previous}");
}

#[test]
fn exterior_dirichlet_truncation_is_monotone() {
    // R_out grows by whole grid steps, so each problem is a principal
    // submatrix of the next
    let base = DiskSpec::exterior(1.0, 1.0, 0.01);
    let ell = base.magnetic_length();
    for m in [8i64, 12, 20] {
        let mut previous: Option<Vec<f64>> = None;
        for lengths in [10usize, 12, 15, 20] {
            let spec = DiskSpec { exterior: Some(base.radius + lengths as f64 * ell), ..base };
            let values = sector_eigenvalues(&spec, m, 3.0, 200 * lengths).unwrap();
            if let Some(prev) = &previous {
                assert!(values.len() >= prev.len());
                for (x, y) in values.iter().zip(prev) {
                    assert!(*x <= y + 1e-8, "m {m}, R_out {lengths}ℓ: {x} > {y}");
                }
            }
            previous = Some(values);
        }
    }
}

#[test]
fn radial_discretization_is_second_order() {
    for spec in [DiskSpec::interior(1.0, 1.0, 0.02), DiskSpec::exterior(1.0, 1.0, 0.02)] {
        for m in [0i64, 25, 40] {
            let e = |n| sector_matrix(&spec, m, n).unwrap().0.eigenvalue(0).unwrap();
            let (a, b, c) = (e(400), e(800), e(1600));
            let ratio = (a - b) / (b - c);
            assert!((ratio - 4.0).abs() < 0.3, "m {m}: ratio {ratio}");
        }
    }
}

#[test]
fn polar_spectrum_is_gauge_invariant() {
    let grid = PolarGrid { radius: 1.5, n_r: 10, n_theta: 24 };
    let (b, h) = (2.0, 0.15);
    let reference = polar_eigenvalues(&grid, h, &symmetric_gauge(b, [0.0, 0.0]), 12).unwrap();
    // symmetric gauge plus the gradient of x₁²x₂ − x₂³/3
    let twisted = move |p: [f64; 2]| {
        let [x, y] = p;
        [-0.5 * b * y + 2.0 * x * y, 0.5 * b * x + x * x - y * y]
    };
    for other in [
        polar_eigenvalues(&grid, h, &landau_gauge(b), 12).unwrap(),
        polar_eigenvalues(&grid, h, &symmetric_gauge(b, [0.7, -0.2]), 12).unwrap(),
        polar_eigenvalues(&grid, h, &twisted, 12).unwrap(),
    ] {
        for (x, y) in reference.iter().zip(&other) {
            assert!((x - y).abs() < 1e-10 * x.abs(), "{x} vs {y}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn cylinder_energy_within_bound(s in 0.3f64..3.0, t in 0.5f64..7.0, lambda in 0.01f64..0.9, h in 0.002f64..0.05, b in 0.5f64..2.0) {
        let spec = CylinderSpec { s, t, b, lambda, h };
        let e = cylinder_energy_exact(&spec).unwrap();
        prop_assert!(e.energy >= 0.0);
        prop_assert!(e.energy <= e.upper_bound, "{} > {}", e.energy, e.upper_bound);
        prop_assert!(e.certificate.excluded_lower_bound >= 1.0 + lambda);
        let wider = cylinder_energy_exact(&CylinderSpec { lambda: (lambda + 0.05).min(0.95), ..spec }).unwrap();
        prop_assert!(wider.energy >= e.energy - 1e-14);
    }

    #[test]
    fn riesz_mean_integrates_the_counting_function(h in 0.01f64..0.05, frac in 0.6f64..1.0) {
        let spec = DiskSpec::interior(1.0, 1.0, h);
        let spectrum = disk_spectrum(&spec, spec.h * spec.b).unwrap().spectrum;
        let level = frac * h;
        let riesz = riesz_mean(&spectrum, level).unwrap();
        let integral = integrated_counting(&spectrum, level).unwrap();
        prop_assert!((riesz - integral).abs() <= 1e-12 * riesz.max(h));
        prop_assert_eq!(counting_function(&spectrum, level).unwrap(), spectrum.eigenvalues.iter().filter(|&&e| e < level).count());
        // the Riesz mean is nondecreasing and convex in the shift
        let (lo, hi) = (riesz_mean(&spectrum, 0.99 * level).unwrap(), riesz_mean(&spectrum, (1.01 * level).min(h)).unwrap());
        prop_assert!(lo <= riesz && riesz <= hi);
        prop_assert!(riesz_mean(&spectrum, 1.1 * h).is_err());
    }
}

fn table() -> &'static Mu1Table {
    static T: OnceLock<Mu1Table> = OnceLock::new();
    T.get_or_init(|| Mu1Table::build(6.0, 0.05, 400).unwrap())
}

/// Several minutes in release mode.
#[test]
#[ignore]
fn negative_shift_difference_vanishes_at_small_h() {
    let tables = verify_theorem2(&DiskSpec::interior(1.0, 1.0, 0.02), -1.0, &[3.90625e-5], table()).unwrap();
    let row = tables.differenced.last().unwrap();
    assert!(row.lhs <= 0.0 && row.lhs.abs() < 0.02, "{}", row.lhs);
}
