use magneumann::degennes::*;
use proptest::prelude::*;

const STEP: f64 = 0.005;

fn truncated_on_common_grid(xi: f64, t_end_steps: usize) -> f64 {
    mu1_truncated(xi, t_end_steps as f64 * STEP, t_end_steps).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn below_one_for_positive_xi(xi in 0.05f64..6.0) {
        prop_assert!(mu1_extrapolated(xi, 2000).unwrap() < 1.0 + 1e-5);
    }

    #[test]
    fn above_one_for_negative_xi(xi in -3.0f64..-0.05) {
        let mu = mu1_extrapolated(xi, 2000).unwrap();
        prop_assert!(mu > 1.0 - 1e-5);
        prop_assert!(mu >= xi * xi - 1e-8);
    }

    #[test]
    fn gaussian_envelope_beyond_three(xi in 3.0f64..6.0) {
        let mu = mu1_extrapolated(xi, 4000).unwrap();
        prop_assert!((mu - 1.0).abs() <= (-xi * xi / 2.0).exp() + 1e-9, "xi {xi}: {mu}");
    }

    #[test]
    fn domain_monotonicity(xi in -2.0f64..4.0, short in 100usize..1200, extra in 1usize..1200) {
        // a common step makes the shorter problem a principal submatrix
        let a = truncated_on_common_grid(xi, short);
        let b = truncated_on_common_grid(xi, short + extra);
        prop_assert!(a >= b - 1e-8, "T = {}: {a} < {b}", short as f64 * STEP);
        let t_max = default_t_max(xi);
        let n = (t_max / STEP).round() as usize;
        let config = DeGennesConfig { xi, right_end: RightEnd::Infinite { t_max: n as f64 * STEP }, n_points: n };
        let full = eigenvalues(&config, 1).unwrap()[0];
        prop_assert!(b >= full - 1e-8);
    }

    #[test]
    fn second_order_convergence(xi in -1.0f64..3.0) {
        let m = |n| mu1(xi, n).unwrap();
        let (a, b, c) = (m(500), m(1000), m(2000));
        let ratio = (a - b) / (b - c);
        prop_assert!((ratio - 4.0).abs() < 0.5, "xi {xi}: ratio {ratio}");
    }

    #[test]
    fn modes_orthonormal_and_simple(xi in -2.0f64..4.0) {
        let modes = solve_de_gennes(&DeGennesConfig::half_line(xi, 2000), 4).unwrap();
        for (i, a) in modes.iter().enumerate() {
            prop_assert!(a.samples[0] > 0.0);
            for (j, b) in modes.iter().enumerate().skip(i) {
                let expect = if i == j { 1.0 } else { 0.0 };
                prop_assert!((a.inner(b) - expect).abs() < 1e-8);
            }
        }
        prop_assert!(modes.windows(2).all(|w| w[1].eigenvalue > w[0].eigenvalue));
    }

    #[test]
    fn theta0_is_a_lower_bound(xi in -3.0f64..6.0) {
        prop_assert!(mu1_extrapolated(xi, 1000).unwrap() >= 0.5901061 - 1e-7);
    }
}

#[test]
fn minimizer_values() {
    // frozen from base grids 2000 and 4000, which agree to 4e-11
    let t = theta0(1e-8).unwrap();
    assert!((t.theta0 - 0.5901061250).abs() < 1e-9, "{t:?}");
    // μ₁'(ξ) = (ξ² − μ₁)u₁(0)² vanishes at ξ* = √Θ₀; the flat minimum
    // only pins ξ* to about the square root of the eigenvalue noise
    assert!((t.xi_star - t.theta0.sqrt()).abs() < 1e-5, "{t:?}");
    assert!(t.theta0 > 0.0 && t.theta0 < 1.0);
}

#[test]
fn mu2_gap_is_resolution_stable() {
    let grid: Vec<f64> = (0..=120).map(|i| -3.0 + 0.05 * i as f64).collect();
    let coarse = mu2_gap_with_grid(&grid, 2000).unwrap();
    let fine = mu2_gap_with_grid(&grid, 4000).unwrap();
    assert!(coarse > 1.0 && fine > 1.0);
    assert!((coarse - fine).abs() < 1e-4, "{coarse} vs {fine}");
}

#[test]
fn table_matches_direct_solves() {
    let table = Mu1Table::build(6.0, 0.05, 1000).unwrap();
    assert!(table.is_unimodal());
    for xi in [-2.37, -0.4, 0.3, 0.77, 1.91, 4.4] {
        let direct = mu1_extrapolated(xi, 1000).unwrap();
        assert!((table.eval(xi).unwrap() - direct).abs() < 1e-5, "xi {xi}");
    }
    assert_eq!(table.eval(7.0).unwrap(), 1.0);
    assert_eq!(table.eval(-7.0).unwrap(), 49.0);
}
