//! Closed-form secrecy outage probability for the CCS strategy.
//!
//! The SOP decomposes over which tag link is weaker. With `j` the user whose
//! `|g_j|^2` is smaller,
//!
//! ```text
//! SOP = 1 - I1(k=2) I2(j=1) - I1(k=1) I2(j=2)
//! I2(j) = P(tau_j > (gbar_b + 1) pi_j / Psi)
//! I1(k) = sum_{m,n=0}^{L-1} sum_{q=0}^{n} Omega_j beta0^m beta_k^{n-q} chi_k^q e^{-chi_k} / (m! q!) Xi(m, n, q)
//! Xi    = \int_0^inf x^{1-m} (x + beta_k)^{-(n-q+1)} exp(-beta0/x - (Omega_j + Omega_k) x) dx
//! ```
//!
//! `|theta|^2` is modelled as `Gamma(L, lambda0)` here. `Xi` is evaluated
//! either by direct quadrature or through its bivariate Fox-H form.

use crate::distributions::tau_ccdf;
use crate::error::{Error, Result};
use crate::foxh::{foxh_bivariate, BivariateFoxHSpec, ContourSettings};
use crate::linklevel::{pi_factor, rho_common, rho_private};
use crate::quadrature::{integrate, QuadOptions};
use crate::scenario::ScenarioConfig;
use crate::special::{factorial, ln_gamma_abs, CompensatedSum};
use crate::User;
use serde::{Deserialize, Serialize};

/// Per-user constants of the closed form, indexed by user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremConstants {
    pub gbar_b: f64,
    /// `gbar_b lambda0 / (eta Psi)`.
    pub beta0: f64,
    /// `lambda_k pi_k gbar_b / (Psi Omega_k)`.
    pub beta: [f64; 2],
    /// `Omega_1 + Omega_2`.
    pub beta_jk: f64,
    /// `beta_k Omega_k (gbar_b + 1) / gbar_b`.
    pub chi: [f64; 2],
    pub pi: [f64; 2],
    pub rho_c: [f64; 2],
    pub rho: [f64; 2],
}

/// Constants of the closed form. Fails with [`Error::StaticInfeasible`] when
/// some `rho_{c,k} <= 0`, in which case the common stream can never be
/// decoded and the SOP is 1.
pub fn theorem_constants(cfg: &ScenarioConfig) -> Result<TheoremConstants> {
    cfg.validate()?;
    let (ps, rt, f) = (&cfg.power, &cfg.rates, &cfg.fading);
    let gbar_b = rt.gbar_b();
    let mut out = TheoremConstants {
        gbar_b,
        beta0: gbar_b * f.lambda0 / (cfg.eta * cfg.psi),
        beta: [0.0; 2],
        beta_jk: f.omega1 + f.omega2,
        chi: [0.0; 2],
        pi: [0.0; 2],
        rho_c: [0.0; 2],
        rho: [0.0; 2],
    };
    for user in User::BOTH {
        let i = user.index();
        let rho_c = rho_common(ps, rt, user);
        if rho_c <= 0.0 {
            return Err(Error::StaticInfeasible { user: user.number(), rho_c });
        }
        out.rho_c[i] = rho_c;
        out.rho[i] = rho_private(ps, rt, user);
        out.pi[i] = pi_factor(ps, rt, user);
        out.beta[i] = f.lambda(user) * out.pi[i] * gbar_b / (cfg.psi * f.omega(user));
        out.chi[i] = out.beta[i] * f.omega(user) * (gbar_b + 1.0) / gbar_b;
    }
    Ok(out)
}

/// How `Xi(m, n, q)` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum XiPath {
    #[default]
    Quadrature,
    FoxH,
}

impl std::fmt::Display for XiPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            XiPath::Quadrature => "quadrature",
            XiPath::FoxH => "foxh",
        })
    }
}

impl std::str::FromStr for XiPath {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quadrature" => Ok(XiPath::Quadrature),
            "foxh" => Ok(XiPath::FoxH),
            _ => Err(Error::Config(format!("unknown Xi path '{s}' (quadrature|foxh)"))),
        }
    }
}

/// `\int_0^inf x^{1-m} (x + beta_k)^{-a} exp(-beta0/x - beta_jk x) dx` by
/// adaptive Gauss–Kronrod after `x = e^t`.
///
/// In `t` the log-integrand is strictly concave, so the integral is
/// restricted to where it lies within 60 of its maximum and scaled by the
/// peak to stay in range.
pub fn xi_quadrature(m: u32, a: u32, beta0: f64, beta_k: f64, beta_jk: f64) -> Result<f64> {
    if !(beta0 > 0.0 && beta_k > 0.0 && beta_jk > 0.0) || a == 0 {
        return Err(Error::Domain(format!("Xi needs positive constants, got ({beta0}, {beta_k}, {beta_jk}, a={a})")));
    }
    let (m, a) = (m as f64, a as f64);
    // ln(e^t + beta_k) without overflow
    let ln_shift = |t: f64| if t > beta_k.ln() { t + (beta_k * (-t).exp()).ln_1p() } else { beta_k.ln() + (t - beta_k.ln()).exp().ln_1p() };
    let g = |t: f64| (2.0 - m) * t - a * ln_shift(t) - beta0 * (-t).exp() - beta_jk * t.exp();
    let dg = |t: f64| (2.0 - m) - a / (1.0 + beta_k * (-t).exp()) + beta0 * (-t).exp() - beta_jk * t.exp();

    let mut lo = -1.0;
    while dg(lo) <= 0.0 {
        lo = 2.0 * lo - 1.0;
    }
    let mut hi = 1.0;
    while dg(hi) >= 0.0 {
        hi = 2.0 * hi + 1.0;
    }
    let peak_t = bisect(dg, lo, hi);
    let peak = g(peak_t);
    let level = |t: f64| g(t) - (peak - 60.0);
    let mut step = 1.0;
    while level(peak_t - step) > 0.0 {
        step *= 2.0;
    }
    let t_lo = bisect(|t| -level(t), peak_t - step, peak_t);
    let mut step = 1.0;
    while level(peak_t + step) > 0.0 {
        step *= 2.0;
    }
    let t_hi = bisect(level, peak_t, peak_t + step);
    let r = integrate(|t| (g(t) - peak).exp(), t_lo, t_hi, QuadOptions { abs_tol: 0.0, rel_tol: 1e-11, max_intervals: 4000 })?;
    Ok(r.value * peak.exp())
}

/// Root of `f` on `[lo, hi]` given `f(lo) > 0 >= f(hi)`.
fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * (1.0 + mid.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `Xi(m, n, q)` through
/// `beta_k^{-a} beta_jk^{m-2} / Gamma(a) H[1/(beta_k beta_jk); 1/(beta0 beta_jk)]`
/// with `a = n - q + 1`.
pub fn xi_foxh(m: u32, n: u32, q: u32, beta0: f64, beta_k: f64, beta_jk: f64, cs: &ContourSettings) -> Result<f64> {
    let a = n - q + 1;
    let spec = BivariateFoxHSpec::outage_kernel(m, n, q);
    let h = foxh_bivariate(&spec, 1.0 / (beta_k * beta_jk), 1.0 / (beta0 * beta_jk), cs)?;
    let log_prefactor = -(a as f64) * beta_k.ln() + (m as f64 - 2.0) * beta_jk.ln() - ln_gamma_abs(a as f64);
    Ok(log_prefactor.exp() * h.value)
}

/// `I1(k)`: probability that user `j` (the other one) has the weaker tag link
/// and the tag and user `k` conditions hold.
pub fn i1(cfg: &ScenarioConfig, k: User, path: XiPath, cs: &ContourSettings) -> Result<f64> {
    let tc = theorem_constants(cfg)?;
    let j = k.other();
    let (ki, l) = (k.index(), cfg.antennas as u32);
    let (beta_k, chi_k) = (tc.beta[ki], tc.chi[ki]);
    let omega_j = cfg.fading.omega(j);

    // largest indices first: those terms are the smallest
    let mut acc = CompensatedSum::default();
    for m in (0..l).rev() {
        for n in (0..l).rev() {
            for q in (0..=n).rev() {
                let xi = match path {
                    XiPath::Quadrature => xi_quadrature(m, n - q + 1, tc.beta0, beta_k, tc.beta_jk)?,
                    XiPath::FoxH => xi_foxh(m, n, q, tc.beta0, beta_k, tc.beta_jk, cs)?,
                };
                let coeff = omega_j * tc.beta0.powi(m as i32) * beta_k.powi((n - q) as i32) * chi_k.powi(q as i32)
                    / (factorial(m) * factorial(q))
                    * (-chi_k).exp();
                acc.add(coeff * xi);
            }
        }
    }
    Ok(acc.value())
}

/// `I2(j) = P(tau_j > (gbar_b + 1) pi_j / Psi)`.
pub fn i2(cfg: &ScenarioConfig, j: User) -> Result<f64> {
    let tc = theorem_constants(cfg)?;
    let z = (tc.gbar_b + 1.0) * tc.pi[j.index()] / cfg.psi;
    Ok(tau_ccdf(z, cfg.antennas as u32, cfg.fading.lambda(j)))
}

/// Closed-form CCS secrecy outage probability, clipped to `[0, 1]`.
pub fn sop_closed_form(cfg: &ScenarioConfig, path: XiPath, cs: &ContourSettings) -> Result<f64> {
    let raw = match theorem_constants(cfg) {
        Err(Error::StaticInfeasible { .. }) => return Ok(1.0),
        Err(e) => return Err(e),
        Ok(_) => {
            let t2 = i1(cfg, User::Two, path, cs)? * i2(cfg, User::One)?;
            let t1 = i1(cfg, User::One, path, cs)? * i2(cfg, User::Two)?;
            1.0 - t2 - t1
        }
    };
    if !(-1e-6..=1.0 + 1e-6).contains(&raw) {
        log::warn!("closed-form SOP {raw} outside [0, 1] at Psi = {:.2} dB, L = {}", cfg.psi_db(), cfg.antennas);
    }
    Ok(raw.clamp(0.0, 1.0))
}
