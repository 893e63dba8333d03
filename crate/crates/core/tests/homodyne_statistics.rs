use cvcomp::{
    estimate_complementarity, estimate_vm, iconcurrence_from_vm, sample, vm_tmss, VmEstimate,
};

#[test]
fn error_scales_as_inverse_root_shots() {
    let v = vm_tmss(1.0_f64);
    let truth = v.get(0, 0);
    // Plug-in variance estimator: SE = sqrt(2) V11 / sqrt(n).
    let expected = std::f64::consts::SQRT_2 * truth;
    for &shots in &[1_000usize, 10_000, 100_000, 1_000_000] {
        let mse = (0..100u64)
            .map(|seed| {
                let est = estimate_vm(&sample(&v, shots, 7_000 + seed).unwrap()).unwrap();
                (est.v_hat.get(0, 0) - truth).powi(2)
            })
            .sum::<f64>()
            / 100.0;
        let ratio = (mse * shots as f64).sqrt() / expected;
        assert!(ratio > 0.5 && ratio < 2.0, "shots = {shots}: ratio {ratio}");
    }
}

#[test]
fn cross_mode_correlation_approaches_tanh_two() {
    let v = vm_tmss(1.0_f64);
    let batch = sample(&v, 1_000_000, 77).unwrap();
    let est = estimate_vm(&batch).unwrap();
    let corr = est.v_hat.get(0, 2) / (est.v_hat.get(0, 0) * est.v_hat.get(2, 2)).sqrt();
    // Delta method for a sample correlation: SE = (1 - rho^2) / sqrt(n).
    let rho = 2.0_f64.tanh();
    let se = (1.0 - rho * rho) / (1_000_000f64).sqrt();
    assert!(
        (corr - rho).abs() < 3.0 * se,
        "corr = {corr}, expected {rho}"
    );
}

#[test]
fn iconcurrence_interval_coverage() {
    let v = vm_tmss(1.0_f64);
    let truth = iconcurrence_from_vm(v.get(0, 0)).unwrap();
    let covered = (0..100u64)
        .filter(|&seed| {
            let est = estimate_vm(&sample(&v, 1_000_000, 90_000 + seed).unwrap()).unwrap();
            estimate_complementarity(&est).covers(truth)
        })
        .count();
    assert!(covered >= 99, "covered {covered}/100");
}

#[test]
fn exact_vm_reproduces_closed_form() {
    for &r in &[0.0, 0.3, 1.0, 2.5] {
        let v = vm_tmss(r);
        let e = estimate_complementarity(&VmEstimate::exact(v));
        assert_eq!(e.c_i_sq, iconcurrence_from_vm(v.get(0, 0)).unwrap());
        assert_eq!(e.c_i_sq + e.p_context, 2.0);
    }
}

#[test]
fn near_vacuum_estimates_flag_clamping() {
    let v = vm_tmss(0.0_f64);
    let clamped = (0..40u64)
        .filter(|&seed| {
            let est = estimate_vm(&sample(&v, 1_000, seed).unwrap()).unwrap();
            let e = estimate_complementarity(&est);
            assert!(e.c_i_sq >= 0.0);
            e.clamped
        })
        .count();
    // About half the runs fall below the vacuum variance.
    assert!((5..=35).contains(&clamped), "{clamped}");
}
