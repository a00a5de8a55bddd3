use approx::assert_relative_eq;
use sbrsma_core::exec::Execution;
use sbrsma_core::foxh::{
    elementary_identity_errors, foxh_bivariate, foxh_uni, log_grid, BivariateFoxHSpec, ContourSettings, FoxHSpec,
};
use sbrsma_core::quadrature::{integrate, QuadOptions};
use sbrsma_core::Error;

#[test]
fn elementary_identities_hold_over_four_decades() {
    let checks = elementary_identity_errors(&log_grid(1e-2, 1e2, 41), &ContourSettings::default()).unwrap();
    assert_eq!(checks.len(), 12);
    for c in checks {
        assert!(c.max_rel_error < 1e-8, "{} at z = {}: {:e}", c.name, c.worst_argument, c.max_rel_error);
    }
}

/// `H^{2,0}_{0,2}[z | (0,1),(nu,1)] = \int_0^inf t^{nu-1} e^{-t - z/t} dt`.
#[test]
fn two_gamma_kernel_matches_direct_integral() {
    for &nu in &[0.5, 1.0, 2.0, 3.5] {
        for &z in &[0.05, 1.0, 9.0] {
            let spec = FoxHSpec::new(vec![], vec![(0.0, 1.0), (nu, 1.0)], 2, 0).unwrap();
            let got = foxh_uni(&spec, z, &ContourSettings::default()).unwrap().value;
            // t = u / (1 - u)
            let want = integrate(
                |u: f64| {
                    if u <= 0.0 || u >= 1.0 {
                        return 0.0;
                    }
                    let t = u / (1.0 - u);
                    t.powf(nu - 1.0) * (-t - z / t).exp() / ((1.0 - u) * (1.0 - u))
                },
                0.0,
                1.0,
                QuadOptions { abs_tol: 1e-15, rel_tol: 1e-12, max_intervals: 4000 },
            )
            .unwrap()
            .value;
            assert_relative_eq!(got, want, max_relative = 1e-9);
        }
    }
}

#[test]
fn doubling_nodes_leaves_value_unchanged() {
    let spec = FoxHSpec::binomial(3.0);
    let base = ContourSettings { abscissa: Some(0.4), half_length: Some(50.0), nodes: Some(2001), ..Default::default() };
    let a = foxh_uni(&spec, 2.0, &base).unwrap();
    let b = foxh_uni(&spec, 2.0, &ContourSettings { nodes: Some(4001), ..base }).unwrap();
    assert_relative_eq!(a.value, b.value, max_relative = 1e-12);
    assert_relative_eq!(a.value, 2.0 / 27.0, max_relative = 1e-12);
}

#[test]
fn abscissa_choice_does_not_matter_inside_the_strip() {
    let spec = FoxHSpec::binomial(2.0);
    let want = 0.25 * (1.0f64 + 3.0).powi(-2) * 4.0;
    for c in [0.2, 0.5, 1.0, 1.7] {
        let v = foxh_uni(&spec, 3.0, &ContourSettings { abscissa: Some(c), ..Default::default() }).unwrap();
        assert_relative_eq!(v.value, want, max_relative = 1e-10);
    }
}

#[test]
fn bivariate_is_symmetric_in_execution_mode() {
    let spec = BivariateFoxHSpec::outage_kernel(2, 3, 1);
    let par = foxh_bivariate(&spec, 4.0, 9.0, &ContourSettings::default()).unwrap();
    let seq = foxh_bivariate(&spec, 4.0, 9.0, &ContourSettings { execution: Execution::Sequential, ..Default::default() }).unwrap();
    assert_eq!(par.value.to_bits(), seq.value.to_bits());
}

#[test]
fn bivariate_explicit_abscissas() {
    let spec = BivariateFoxHSpec::outage_kernel(1, 2, 0);
    let auto = foxh_bivariate(&spec, 2.0, 5.0, &ContourSettings::default()).unwrap();
    let fixed = ContourSettings { abscissa: Some(1.5), second_abscissa: Some(-1.0), ..Default::default() };
    let v = foxh_bivariate(&spec, 2.0, 5.0, &fixed).unwrap();
    assert_relative_eq!(auto.value, v.value, max_relative = 1e-9);
    // 2 - m - c_s - c_u = 1 - 1.5 + 0.2 < 0
    let bad = ContourSettings { abscissa: Some(1.5), second_abscissa: Some(-0.2), ..fixed };
    assert!(foxh_bivariate(&spec, 2.0, 5.0, &bad).is_err());
    let on_pole = ContourSettings { abscissa: Some(0.0), ..fixed };
    assert!(matches!(foxh_bivariate(&spec, 2.0, 5.0, &on_pole), Err(Error::ContourOnPole { .. })));
}

#[test]
fn arguments_must_be_positive() {
    assert!(foxh_uni(&FoxHSpec::exp_neg(), 0.0, &ContourSettings::default()).is_err());
    assert!(foxh_bivariate(&BivariateFoxHSpec::outage_kernel(0, 0, 0), -1.0, 1.0, &ContourSettings::default()).is_err());
}
