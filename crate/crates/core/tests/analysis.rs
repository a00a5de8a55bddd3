use approx::assert_relative_eq;
use sbrsma_core::analysis::{i1, i2, sop_closed_form, theorem_constants, XiPath};
use sbrsma_core::distributions::tau_ccdf;
use sbrsma_core::foxh::ContourSettings;
use sbrsma_core::quadrature::{integrate, QuadOptions};
use sbrsma_core::{ScenarioConfig, User};

/// `I1(k)` straight from its defining expectation over the two tag links:
/// `E[ 1{g_j < g_k} P(theta^2 > gbar_b / (eta Psi g_j)) P(tau_k > pi_k (1 + gbar_b g_k / g_j) / Psi) ]`
/// with `theta^2 ~ Gamma(L, lambda0)`.
fn i1_oracle(cfg: &ScenarioConfig, k: User) -> f64 {
    let tc = theorem_constants(cfg).unwrap();
    let j = k.other();
    let (oj, ok) = (cfg.fading.omega(j), cfg.fading.omega(k));
    let l = cfg.antennas as u32;
    let opts = QuadOptions { abs_tol: 1e-13, rel_tol: 1e-10, max_intervals: 4000 };
    let outer = |gj: f64| {
        if gj <= 0.0 {
            return 0.0;
        }
        let tag = tau_ccdf(tc.gbar_b / (cfg.eta * cfg.psi * gj), l, cfg.fading.lambda0);
        // g_k = g_j (1 + w); the user-k tail is negligible beyond w_max
        let (pk, lk) = (tc.pi[k.index()], cfg.fading.lambda(k));
        let w_max = (80.0 / (ok * gj)).min((60.0 + 10.0 * l as f64) * cfg.psi / (lk * pk * tc.gbar_b));
        let inner = integrate(
            |w: f64| {
                let gk = gj * (1.0 + w);
                gj * ok * (-ok * gk).exp() * tau_ccdf(pk * (1.0 + tc.gbar_b * gk / gj) / cfg.psi, l, lk)
            },
            0.0,
            w_max,
            opts,
        )
        .unwrap()
        .value;
        oj * (-oj * gj).exp() * tag * inner
    };
    integrate(outer, 0.0, 80.0 / oj, opts).unwrap().value
}

#[test]
fn i1_matches_direct_expectation() {
    for db in [5.0, 15.0, 30.0] {
        for l in [3, 5] {
            let cfg = ScenarioConfig::default().with_psi_db(db).with_antennas(l);
            for k in User::BOTH {
                let got = i1(&cfg, k, XiPath::Quadrature, &ContourSettings::default()).unwrap();
                assert_relative_eq!(got, i1_oracle(&cfg, k), max_relative = 1e-6, epsilon = 1e-12);
            }
        }
    }
}

#[test]
fn i2_is_an_erlang_tail() {
    let cfg = ScenarioConfig::default().with_psi_db(10.0);
    // gbar_b = 1, pi_1 = 10/3, Psi = 10
    assert_relative_eq!(i2(&cfg, User::One).unwrap(), tau_ccdf(2.0 / 3.0, 4, 0.5), max_relative = 1e-12);
}

#[test]
fn xi_paths_agree_on_the_sop() {
    let cs = ContourSettings::default();
    for db in [0.0, 10.0, 25.0, 40.0] {
        let cfg = ScenarioConfig::default().with_psi_db(db);
        let q = sop_closed_form(&cfg, XiPath::Quadrature, &cs).unwrap();
        let f = sop_closed_form(&cfg, XiPath::FoxH, &cs).unwrap();
        assert!((q - f).abs() <= 1e-5 * q.max(1e-3), "{db} dB: {q} vs {f}");
    }
}

#[test]
fn reference_curve_values() {
    // Independent Monte Carlo with the Erlang law for |theta|^2, 1e7 trials.
    let cs = ContourSettings::default();
    for (db, want) in [(10.0, 0.389), (20.0, 0.0471), (30.0, 0.0048)] {
        let got = sop_closed_form(&ScenarioConfig::default().with_psi_db(db), XiPath::Quadrature, &cs).unwrap();
        assert_relative_eq!(got, want, max_relative = 0.03);
    }
}

#[test]
fn sop_falls_with_more_antennas() {
    let cs = ContourSettings::default();
    let mut prev = 1.0;
    for l in 3..=7 {
        let v = sop_closed_form(&ScenarioConfig::default().with_psi_db(25.0).with_antennas(l), XiPath::Quadrature, &cs).unwrap();
        assert!(v < prev, "L = {l}: {v} >= {prev}");
        prev = v;
    }
}

#[test]
fn relabelling_users_leaves_sop_unchanged() {
    let cs = ContourSettings::default();
    for db in [5.0, 20.0] {
        let cfg = ScenarioConfig::default().with_psi_db(db);
        let a = sop_closed_form(&cfg, XiPath::Quadrature, &cs).unwrap();
        let b = sop_closed_form(&cfg.swap_users(), XiPath::Quadrature, &cs).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-10);
    }
}
