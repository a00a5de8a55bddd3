//! Per-block SINRs, decoding thresholds, the reflection-coefficient
//! feasibility interval and the SIC outage rule.
//!
//! Two SINR paths are provided. [`general_sinrs`] evaluates the quadratic
//! forms `v_c, v_k, v_j, v_{0,k}` from arbitrary beamformers.
//! [`simplified_sinrs`] is the closed form obtained after substituting the
//! ZF/MRT design, in which the backscatter term is `eta delta Psi |theta|^2 |g_k|^2`.
//! With the designed weights the general path gives `alpha_c |theta|^2`
//! there instead; passing `alpha_c * |theta|^2` as `theta_sq` to the
//! simplified path reproduces the general one.

use crate::beamforming::BeamformerSet;
use crate::distributions::ChannelRealization;
use crate::error::{Error, Result};
use crate::User;
use serde::{Deserialize, Serialize};

/// Power-allocation fractions of the common and private streams.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSplit {
    pub alpha_c: f64,
    pub alpha_1: f64,
    pub alpha_2: f64,
}

impl Default for PowerSplit {
    fn default() -> Self {
        Self { alpha_c: 0.5, alpha_1: 0.3, alpha_2: 0.2 }
    }
}

impl PowerSplit {
    pub fn new(alpha_c: f64, alpha_1: f64, alpha_2: f64) -> Result<Self> {
        let ps = Self { alpha_c, alpha_1, alpha_2 };
        ps.validate()?;
        Ok(ps)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha_c", self.alpha_c), ("alpha_1", self.alpha_1), ("alpha_2", self.alpha_2)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        let total = self.alpha_c + self.alpha_1 + self.alpha_2;
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!("power split must sum to 1, got {total}")));
        }
        Ok(())
    }

    pub fn alpha(&self, user: User) -> f64 {
        match user {
            User::One => self.alpha_1,
            User::Two => self.alpha_2,
        }
    }
}

/// Target rates in bps/Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateTargets {
    pub rc: f64,
    pub r1: f64,
    pub r2: f64,
    pub rb: f64,
}

impl Default for RateTargets {
    fn default() -> Self {
        Self { rc: 0.5, r1: 1.0, r2: 1.5, rb: 1.0 }
    }
}

fn threshold(rate: f64) -> f64 {
    rate.exp2() - 1.0
}

impl RateTargets {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("Rc", self.rc), ("R1", self.r1), ("R2", self.r2), ("Rb", self.rb)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("rate target {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// `2^{R_c} - 1`.
    pub fn gbar_c(&self) -> f64 {
        threshold(self.rc)
    }

    /// `2^{R_k} - 1`.
    pub fn gbar_k(&self, user: User) -> f64 {
        threshold(match user {
            User::One => self.r1,
            User::Two => self.r2,
        })
    }

    /// `2^{R_b} - 1`.
    pub fn gbar_b(&self) -> f64 {
        threshold(self.rb)
    }
}

/// Backscatter efficiency, reflection coefficient and average SNR (linear).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BackscatterParams {
    pub eta: f64,
    pub delta: f64,
    pub psi: f64,
}

impl BackscatterParams {
    pub fn new(eta: f64, delta: f64, psi: f64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::Config(format!("eta must lie in (0, 1], got {eta}")));
        }
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::Config(format!("delta must lie in (0, 1], got {delta}")));
        }
        if !(psi > 0.0 && psi.is_finite()) {
            return Err(Error::Config(format!("Psi must be positive, got {psi}")));
        }
        Ok(Self { eta, delta, psi })
    }
}

/// SINRs for decoding the common stream, the private stream and the
/// backscatter symbol at one user.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinrTriple {
    pub gamma_c: f64,
    pub gamma_k: f64,
    pub gamma_b: f64,
}

/// Quadratic forms of the general SINR expressions for user `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticForms {
    pub v_c: f64,
    pub v_k: f64,
    pub v_j: f64,
    pub v_0: f64,
}

pub fn quadratic_forms(ch: &ChannelRealization, bf: &BeamformerSet, ps: &PowerSplit, user: User) -> QuadraticForms {
    let hk = ch.h(user);
    let other = user.other();
    let v_c = ps.alpha_c * hk.dotc(&bf.wc).norm_sqr();
    let v_k = ps.alpha(user) * hk.dotc(bf.w(user)).norm_sqr();
    let v_j = ps.alpha(other) * hk.dotc(bf.w(other)).norm_sqr();
    let v_0 = ps.alpha_c * ch.h0.dotc(&bf.wc).norm_sqr()
        + User::BOTH.iter().map(|&u| ps.alpha(u) * ch.h0.dotc(bf.w(u)).norm_sqr()).sum::<f64>();
    QuadraticForms { v_c, v_k, v_j, v_0 }
}

/// SINRs from arbitrary beamformers, normalized by the noise power
/// (`p / sigma^2 = Psi`).
pub fn general_sinrs(ch: &ChannelRealization, bf: &BeamformerSet, ps: &PowerSplit, bp: &BackscatterParams, user: User) -> SinrTriple {
    let q = quadratic_forms(ch, bf, ps, user);
    let psi = bp.psi;
    let bs = bp.eta * bp.delta * q.v_0 * ch.g_sq(user);
    SinrTriple {
        gamma_c: psi * q.v_c / (psi * (q.v_k + q.v_j + bs) + 1.0),
        gamma_k: psi * q.v_k / (psi * (q.v_j + bs) + 1.0),
        gamma_b: psi * bs / (psi * q.v_j + 1.0),
    }
}

/// SINRs after substituting the ZF/MRT design.
pub fn simplified_sinrs(tau_k: f64, theta_sq: f64, g_abs_sq: f64, ps: &PowerSplit, bp: &BackscatterParams, user: User) -> SinrTriple {
    let psi = bp.psi;
    let bs = bp.eta * bp.delta * psi * theta_sq * g_abs_sq;
    let direct = psi * tau_k;
    SinrTriple {
        gamma_c: ps.alpha_c * direct / (ps.alpha(user) * direct + bs + 1.0),
        gamma_k: ps.alpha(user) * direct / (bs + 1.0),
        gamma_b: bs,
    }
}

/// `rho_{c,k} = (alpha_c - gbar_c alpha_k) / gbar_c`.
pub fn rho_common(ps: &PowerSplit, rt: &RateTargets, user: User) -> f64 {
    let g = rt.gbar_c();
    (ps.alpha_c - g * ps.alpha(user)) / g
}

/// `rho_k = alpha_k / gbar_k`.
pub fn rho_private(ps: &PowerSplit, rt: &RateTargets, user: User) -> f64 {
    ps.alpha(user) / rt.gbar_k(user)
}

/// `pi_k = max{1/rho_k, 1/rho_{c,k}}`; infinite when `rho_{c,k} <= 0`.
pub fn pi_factor(ps: &PowerSplit, rt: &RateTargets, user: User) -> f64 {
    let rc = rho_common(ps, rt, user);
    if rc <= 0.0 {
        return f64::INFINITY;
    }
    (1.0 / rho_private(ps, rt, user)).max(1.0 / rc)
}

/// Channel gains of one block entering the feasibility interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockGains {
    /// `tau_k = ||h_k||^2`, indexed by user.
    pub tau: [f64; 2],
    /// `|theta|^2` as it enters the SINRs.
    pub theta_sq: f64,
    /// `|g_k|^2`, indexed by user.
    pub g_sq: [f64; 2],
}

/// Open interval of admissible reflection coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaInterval {
    pub lo: f64,
    pub hi: f64,
}

impl DeltaInterval {
    pub fn contains(&self, delta: f64) -> bool {
        delta > self.lo && delta < self.hi
    }
}

/// The reflection-coefficient range for which every SIC inequality holds at
/// both users: `max delta_low < delta < min{1, delta_up}`.
///
/// Returns `None` (outage) when the interval is empty, when a `rho_{c,k}` is
/// nonpositive, or when `|theta|^2 |g_k|^2 = 0`. The upper end is capped at 1.
pub fn delta_range(gains: &BlockGains, ps: &PowerSplit, rt: &RateTargets, eta: f64, psi: f64) -> Option<DeltaInterval> {
    let gbar_b = rt.gbar_b();
    let mut lo: f64 = 0.0;
    let mut hi: f64 = 1.0;
    for user in User::BOTH {
        let i = user.index();
        let cascade = eta * psi * gains.theta_sq * gains.g_sq[i];
        if !(cascade > 0.0) {
            return None;
        }
        let rc = rho_common(ps, rt, user);
        if rc <= 0.0 {
            return None;
        }
        let common = rc * psi * gains.tau[i] - 1.0;
        if common <= 0.0 {
            return None;
        }
        let private = rho_private(ps, rt, user) * psi * gains.tau[i] - 1.0;
        lo = lo.max(gbar_b / cascade);
        hi = hi.min(common / cascade).min(private / cascade);
    }
    (lo < hi).then_some(DeltaInterval { lo, hi })
}

/// True when user `user` decodes all three signals (strict thresholds).
pub fn sic_success(t: &SinrTriple, rt: &RateTargets, user: User) -> bool {
    t.gamma_c > rt.gbar_c() && t.gamma_k > rt.gbar_k(user) && t.gamma_b > rt.gbar_b()
}

/// True (outage) iff any of the six SIC inequalities fails.
pub fn sic_outage_indicator(triples: &[SinrTriple; 2], rt: &RateTargets) -> bool {
    !User::BOTH.iter().all(|&u| sic_success(&triples[u.index()], rt, u))
}

/// How a reflection coefficient is chosen from a feasible interval.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum DeltaPolicy {
    #[default]
    Midpoint,
    /// `lo + eps`, pulled back to the midpoint for narrow intervals.
    AboveLow(f64),
    /// `hi - eps`, pulled back to the midpoint for narrow intervals.
    BelowHigh(f64),
}

impl std::fmt::Display for DeltaPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DeltaPolicy::Midpoint => write!(f, "midpoint"),
            DeltaPolicy::AboveLow(e) => write!(f, "lo+{e}"),
            DeltaPolicy::BelowHigh(e) => write!(f, "hi-{e}"),
        }
    }
}

/// Picks a reflection coefficient inside `(lo, min(1, hi))`.
pub fn pick_delta(interval: Option<DeltaInterval>, policy: DeltaPolicy) -> Result<f64> {
    let iv = interval.ok_or(Error::Infeasible)?;
    let hi = iv.hi.min(1.0);
    if !(iv.lo < hi) {
        return Err(Error::Infeasible);
    }
    let half = 0.5 * (hi - iv.lo);
    Ok(match policy {
        DeltaPolicy::Midpoint => iv.lo + half,
        DeltaPolicy::AboveLow(eps) => iv.lo + eps.abs().min(half),
        DeltaPolicy::BelowHigh(eps) => hi - eps.abs().min(half),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn bp(delta: f64, psi: f64) -> BackscatterParams {
        BackscatterParams { eta: 0.8, delta, psi }
    }

    #[test]
    fn power_split_validation() {
        assert!(PowerSplit::new(0.5, 0.3, 0.2).is_ok());
        assert!(PowerSplit::new(0.5, 0.3, 0.3).is_err());
        assert!(PowerSplit::new(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn hand_evaluated_common_sinr() {
        // alpha_c=0.5, alpha_k=0.3, Psi=10, tau=1, eta delta |theta|^2 |g|^2 Psi = 1
        let ps = PowerSplit::default();
        let b = BackscatterParams { eta: 1.0, delta: 0.1, psi: 10.0 };
        let t = simplified_sinrs(1.0, 1.0, 1.0, &ps, &b, User::One);
        assert_relative_eq!(t.gamma_c, 1.0, max_relative = 1e-15);
        assert_relative_eq!(t.gamma_k, 1.5, max_relative = 1e-15);
        assert_relative_eq!(t.gamma_b, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn zero_gain_control_is_conventional_rsma() {
        let ps = PowerSplit::default();
        let t = simplified_sinrs(2.0, 0.0, 3.0, &ps, &bp(0.5, 10.0), User::Two);
        assert_eq!(t.gamma_b, 0.0);
        assert_relative_eq!(t.gamma_k, 0.2 * 10.0 * 2.0);
        assert_relative_eq!(t.gamma_c, 0.5 * 20.0 / (0.2 * 20.0 + 1.0));
    }

    #[test]
    fn paper_parameter_rhos() {
        let ps = PowerSplit::default();
        let rt = RateTargets::default();
        assert_relative_eq!(rho_common(&ps, &rt, User::One), 0.907_106_781_186_547_5, max_relative = 1e-12);
        assert_relative_eq!(rho_private(&ps, &rt, User::One), 0.3, max_relative = 1e-15);
        assert_relative_eq!(rho_private(&ps, &rt, User::Two), 0.109_383_632_135_605_4, max_relative = 1e-12);
        assert_relative_eq!(pi_factor(&ps, &rt, User::One), 10.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn vanishing_backscatter_demand_opens_interval() {
        let ps = PowerSplit::default();
        let rt = RateTargets { rb: 1e-12, ..RateTargets::default() };
        let g = BlockGains { tau: [1e6, 1e6], theta_sq: 1.0, g_sq: [1.0, 1.0] };
        let iv = delta_range(&g, &ps, &rt, 0.8, 10.0).unwrap();
        assert!(iv.lo < 1e-12);
        assert_eq!(iv.hi, 1.0);
    }

    #[test]
    fn nonpositive_rho_c_is_outage() {
        // alpha_c <= gbar_c alpha_k
        let ps = PowerSplit::new(0.2, 0.5, 0.3).unwrap();
        let rt = RateTargets { rc: 1.0, ..RateTargets::default() };
        assert!(rho_common(&ps, &rt, User::One) <= 0.0);
        let g = BlockGains { tau: [1e9, 1e9], theta_sq: 1e3, g_sq: [1e3, 1e3] };
        assert!(delta_range(&g, &ps, &rt, 0.8, 1e3).is_none());
    }

    #[test]
    fn zero_cascade_is_outage() {
        let g = BlockGains { tau: [5.0, 5.0], theta_sq: 0.0, g_sq: [1.0, 1.0] };
        assert!(delta_range(&g, &PowerSplit::default(), &RateTargets::default(), 0.8, 100.0).is_none());
        let g = BlockGains { tau: [5.0, 5.0], theta_sq: 1.0, g_sq: [0.0, 1.0] };
        assert!(delta_range(&g, &PowerSplit::default(), &RateTargets::default(), 0.8, 100.0).is_none());
    }

    #[test]
    fn strict_thresholds() {
        let rt = RateTargets::default();
        let ok = SinrTriple { gamma_c: 1e9, gamma_k: 1e9, gamma_b: 1e9 };
        assert!(!sic_outage_indicator(&[ok, ok], &rt));
        let edge = SinrTriple { gamma_b: rt.gbar_b(), ..ok };
        assert!(sic_outage_indicator(&[ok, edge], &rt));
    }

    #[test]
    fn delta_policies() {
        let iv = Some(DeltaInterval { lo: 0.2, hi: 0.8 });
        assert_relative_eq!(pick_delta(iv, DeltaPolicy::Midpoint).unwrap(), 0.5);
        assert_relative_eq!(pick_delta(iv, DeltaPolicy::AboveLow(1e-3)).unwrap(), 0.201);
        assert_relative_eq!(pick_delta(iv, DeltaPolicy::BelowHigh(1e-3)).unwrap(), 0.799);
        let wide = Some(DeltaInterval { lo: 0.2, hi: 3.0 });
        assert_relative_eq!(pick_delta(wide, DeltaPolicy::Midpoint).unwrap(), 0.6);
        assert!(matches!(pick_delta(None, DeltaPolicy::Midpoint), Err(Error::Infeasible)));
    }
}
