use magneumann::projectors::*;

#[test]
fn resolution_of_identity_on_gaussian_probe() {
    let f = TestFunction::gaussian([0.0, 3.0], 1.0, 0.0, true).unwrap();
    let at8 = verify_resolution_identity(1.0, 1.0, &f, 8.0, 12).unwrap();
    let at10 = verify_resolution_identity(1.0, 1.0, &f, 10.0, 12).unwrap();
    let r8 = at8.residual.unwrap();
    let r10 = at10.residual.unwrap();
    assert!(r8 < 1e-3, "{at8:?}");
    assert!(r10 <= r8 + 1e-8, "{r10} > {r8}");
    let few = verify_resolution_identity(1.0, 1.0, &f, 8.0, 6).unwrap().residual.unwrap();
    assert!(few > r8);
}

#[test]
fn resolution_of_identity_is_dilation_covariant() {
    // the same probe seen at (h, b) = (0.25, 1) after dilation by √(b/h) = 2
    let unit = TestFunction::gaussian([0.5, 2.0], 0.8, 1.0, true).unwrap();
    let scaled = TestFunction::gaussian([0.25, 1.0], 0.4, 2.0, true).unwrap();
    let a = verify_resolution_identity(1.0, 1.0, &unit, 6.0, 8).unwrap().residual.unwrap();
    let b = verify_resolution_identity(0.25, 1.0, &scaled, 6.0, 8).unwrap().residual.unwrap();
    assert!((a - b).abs() < 1e-8 * a.max(1e-6), "{a} vs {b}");
}

#[test]
fn landau_diagonal_is_constant() {
    for j in 1..=5 {
        let p = ProjectorKernel::landau(j, 0.3, 1.7).unwrap();
        for k in 0..20 {
            let x = [(k as f64 * 1.37).sin() * 5.0, (k as f64 * 0.91).cos() * 5.0];
            let v = landau_kernel_eval(&p, x, x).unwrap();
            assert_eq!(v.im, 0.0);
            assert!((v.re - 1.7 / (2.0 * std::f64::consts::PI * 0.3)).abs() <= 4.0 * f64::EPSILON * v.re);
        }
    }
}
