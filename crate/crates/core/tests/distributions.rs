use approx::assert_relative_eq;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sbrsma_core::distributions::{
    complex_gaussian, exp_pdf, sample_channel, sample_erlang, tau_ccdf, tau_cdf, upper_gamma_int, FadingParams,
};
use sbrsma_core::quadrature::{integrate, QuadOptions};
use sbrsma_core::User;

fn ks_distance(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn channel_norms_follow_erlang_law() {
    let params = FadingParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 100_000;
    let (mut t1, mut t2, mut g1) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for _ in 0..n {
        let ch = sample_channel(&params, 4, &mut rng).unwrap();
        t1.push(ch.tau(User::One));
        t2.push(ch.tau(User::Two));
        g1.push(ch.g_sq(User::One));
    }
    assert!(ks_distance(t1, |x| tau_cdf(x, 4, 0.5)) < 0.01);
    assert!(ks_distance(t2, |x| tau_cdf(x, 4, 0.75)) < 0.01);
    // |g_1|^2 ~ Exp(Omega_1)
    assert!(ks_distance(g1, |x| 1.0 - (-0.5 * x).exp()) < 0.01);
}

#[test]
fn erlang_sampler_matches_cdf() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let s: Vec<f64> = (0..100_000).map(|_| sample_erlang(3, 0.25, &mut rng)).collect();
    let mean = s.iter().sum::<f64>() / s.len() as f64;
    assert!((mean - 12.0).abs() < 0.1, "{mean}");
    assert!(ks_distance(s, |x| tau_cdf(x, 3, 0.25)) < 0.01);
}

#[test]
fn complex_gaussian_second_moment() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 200_000;
    let (mut m, mut p) = (0.0, 0.0);
    for _ in 0..n {
        let z = complex_gaussian(0.25, &mut rng);
        m += z.norm_sqr();
        p += z.re * z.im;
    }
    assert!((m / n as f64 - 4.0).abs() < 0.05);
    assert!((p / n as f64).abs() < 0.05);
}

#[test]
fn upper_gamma_matches_numerical_integral() {
    for shape in 1..=8u32 {
        for &x in &[0.0, 0.1, 1.0, 2.5, 7.0, 20.0] {
            let tail = integrate(
                |t: f64| t.powi(shape as i32 - 1) * (-t).exp(),
                x,
                x + 200.0,
                QuadOptions { abs_tol: 1e-15, rel_tol: 1e-13, max_intervals: 4000 },
            )
            .unwrap()
            .value;
            assert_relative_eq!(upper_gamma_int(shape, x).unwrap(), tail, max_relative = 1e-10);
        }
    }
}

#[test]
fn ccdf_and_pdf_edge_cases() {
    assert_eq!(tau_ccdf(0.0, 4, 0.5), 1.0);
    assert_eq!(tau_ccdf(-1.0, 4, 0.5), 1.0);
    assert!(tau_ccdf(1e4, 4, 0.5) < 1e-300);
    assert!(exp_pdf(-1.0, 0.5).is_err());
    assert!(exp_pdf(1.0, 0.0).is_err());
}
