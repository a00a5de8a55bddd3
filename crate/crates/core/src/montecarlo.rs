//! Monte Carlo estimation of the symbiotic outage probability (SOP).
//!
//! Trials are grouped into fixed-size batches. Batch `b` draws from a ChaCha8
//! stream seeded by `seed` with stream id `tag | b`, so every trial's random
//! numbers depend only on `(seed, tag, b)` and never on scheduling. Batch
//! outcomes are integer counts reduced in batch order, which makes estimates
//! bit-identical for any worker count.

use crate::beamforming::{build_weights, gain_control, zf_weight_matrix, GcStrategy, DEFAULT_CONDITION_CAP};
use crate::distributions::{sample_channel, sample_erlang, ChannelRealization};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linklevel::{
    delta_range, general_sinrs, quadratic_forms, sic_success, simplified_sinrs, BackscatterParams, BlockGains,
};
use crate::scenario::ScenarioConfig;
use crate::User;
use nalgebra::MatrixXx3;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub const DEFAULT_BATCH_SIZE: u64 = 4096;

const STREAM_ADAPTIVE: u64 = 0;
const STREAM_FIXED_JOINT: u64 = 3 << 48;

fn fixed_delta_stream(user: User) -> u64 {
    (user.number() as u64) << 48
}

/// How `|theta|^2` is formed under composite channel selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CcsMode {
    /// `|theta|^2 := sum_l |h_{0,l}|`, the analysis variable `tau_0`.
    #[default]
    PaperLiteral,
    /// `|theta|^2 := (sum_l |h_{0,l}|)^2`.
    Physical,
    /// `|theta|^2` drawn from the Erlang(L, lambda0) law that the closed form
    /// assumes for `tau_0`. Diagnostic only: isolates the moment-matching
    /// error from the rest of the derivation.
    ErlangSurrogate,
}

impl fmt::Display for CcsMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CcsMode::PaperLiteral => "paper-literal",
            CcsMode::Physical => "physical",
            CcsMode::ErlangSurrogate => "erlang-surrogate",
        })
    }
}

impl FromStr for CcsMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper-literal" | "literal" => Ok(CcsMode::PaperLiteral),
            "physical" => Ok(CcsMode::Physical),
            "erlang-surrogate" | "surrogate" => Ok(CcsMode::ErlangSurrogate),
            other => Err(Error::Config(format!("unknown CCS mode '{other}'"))),
        }
    }
}

/// Which SINR expressions decide outage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SinrPath {
    /// Closed-form SINRs after substituting the beamformer design.
    #[default]
    Simplified,
    /// Quadratic forms of the built beamformers (carries the `alpha_c`
    /// factor on the backscatter term).
    FirstPrinciples,
}

/// How the two per-user success probabilities of the fixed-delta benchmark
/// are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FixedDeltaCombine {
    /// `1 - prod_k Pr[user k succeeds]`, each factor on its own substream.
    #[default]
    Product,
    /// `1 - Pr[both users succeed]` on shared draws.
    Joint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    pub ccs_mode: CcsMode,
    pub sinr_path: SinrPath,
    pub execution: Execution,
    pub batch_size: u64,
    pub condition_cap: f64,
    /// Multiplies `theta`; zero switches the backscatter link off.
    pub theta_scale: f64,
    /// Largest tolerated fraction of rejected (singular) fading blocks.
    pub max_rejection_rate: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            ccs_mode: CcsMode::PaperLiteral,
            sinr_path: SinrPath::Simplified,
            execution: Execution::Parallel,
            batch_size: DEFAULT_BATCH_SIZE,
            condition_cap: DEFAULT_CONDITION_CAP,
            theta_scale: 1.0,
            max_rejection_rate: 0.01,
        }
    }
}

/// Outage probability with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SopEstimate {
    pub value: f64,
    pub trials: u64,
    pub std_error: f64,
    pub ci95: (f64, f64),
    pub rejected_blocks: u64,
}

impl SopEstimate {
    pub fn from_probability(value: f64, trials: u64, rejected_blocks: u64) -> Self {
        let value = value.clamp(0.0, 1.0);
        let std_error = if trials > 0 { (value * (1.0 - value) / trials as f64).sqrt() } else { 0.0 };
        let half = 1.959_963_984_540_054 * std_error;
        Self {
            value,
            trials,
            std_error,
            ci95: ((value - half).max(0.0), (value + half).min(1.0)),
            rejected_blocks,
        }
    }

    pub fn from_counts(outages: u64, trials: u64, rejected_blocks: u64) -> Self {
        Self::from_probability(outages as f64 / trials as f64, trials, rejected_blocks)
    }
}

/// One fading block after rejection sampling, with the GC factor applied.
struct Block {
    ch: ChannelRealization,
    wtilde: MatrixXx3<Complex64>,
    gains: BlockGains,
    theta: f64,
}

struct Simulator<'a> {
    cfg: &'a ScenarioConfig,
    strategy: GcStrategy,
    opts: &'a SimOptions,
}

impl Simulator<'_> {
    fn draw(&self, rng: &mut ChaCha8Rng, rejected: &mut u64) -> Result<Block> {
        let cfg = self.cfg;
        let (ch, wtilde) = loop {
            let ch = sample_channel(&cfg.fading, cfg.antennas, rng)?;
            match zf_weight_matrix(&ch.h0, &ch.h1, &ch.h2, self.opts.condition_cap) {
                Ok(w) => break (ch, w),
                Err(Error::SingularChannel { .. }) => *rejected += 1,
                Err(e) => return Err(e),
            }
        };
        let theta = gain_control(&ch.h0, self.strategy, rng)?;
        let theta_sq = match (self.strategy, self.opts.ccs_mode) {
            (GcStrategy::Ccs, CcsMode::PaperLiteral) => theta,
            (GcStrategy::Ccs, CcsMode::ErlangSurrogate) => sample_erlang(cfg.antennas, cfg.fading.lambda0, rng),
            _ => theta * theta,
        } * self.opts.theta_scale
            * self.opts.theta_scale;
        let g_sq = [ch.g_sq(User::One), ch.g_sq(User::Two)];
        let gains = match self.opts.sinr_path {
            SinrPath::Simplified => BlockGains { tau: [ch.tau(User::One), ch.tau(User::Two)], theta_sq, g_sq },
            SinrPath::FirstPrinciples => {
                // theta enters the weights so that |theta|^2 equals theta_sq
                let bf = build_weights(&wtilde, &ch.h1, &ch.h2, Complex64::from(theta_sq.sqrt()));
                let q1 = quadratic_forms(&ch, &bf, &cfg.power, User::One);
                let q2 = quadratic_forms(&ch, &bf, &cfg.power, User::Two);
                BlockGains {
                    tau: [q1.v_k / cfg.power.alpha_1, q2.v_k / cfg.power.alpha_2],
                    theta_sq: q1.v_0,
                    g_sq,
                }
            }
        };
        Ok(Block { ch, wtilde, gains, theta: theta_sq.sqrt() })
    }

    fn adaptive_outage(&self, rng: &mut ChaCha8Rng, rejected: &mut u64) -> Result<bool> {
        let b = self.draw(rng, rejected)?;
        Ok(delta_range(&b.gains, &self.cfg.power, &self.cfg.rates, self.cfg.eta, self.cfg.psi).is_none())
    }

    fn fixed_success(&self, block: &Block, delta: f64, user: User) -> bool {
        let cfg = self.cfg;
        let bp = BackscatterParams { eta: cfg.eta, delta, psi: cfg.psi };
        let t = match self.opts.sinr_path {
            SinrPath::Simplified => {
                let i = user.index();
                simplified_sinrs(block.gains.tau[i], block.gains.theta_sq, block.gains.g_sq[i], &cfg.power, &bp, user)
            }
            SinrPath::FirstPrinciples => {
                let bf = build_weights(&block.wtilde, &block.ch.h1, &block.ch.h2, Complex64::from(block.theta));
                general_sinrs(&block.ch, &bf, &cfg.power, &bp, user)
            }
        };
        sic_success(&t, &cfg.rates, user)
    }
}

/// Runs `trials` Bernoulli trials in deterministic batches and returns
/// `(hits, rejected_blocks)`.
fn run_batches<F>(trials: u64, seed: u64, stream_tag: u64, opts: &SimOptions, trial: F) -> Result<(u64, u64)>
where
    F: Fn(&mut ChaCha8Rng, &mut u64) -> Result<bool> + Sync + Send,
{
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let batch = opts.batch_size.max(1);
    let batches = trials.div_ceil(batch);
    let per_batch = opts.execution.map(batches as usize, |b| -> Result<(u64, u64)> {
        let b = b as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_tag | b);
        let n = batch.min(trials - b * batch);
        let mut hits = 0;
        let mut rejected = 0;
        for _ in 0..n {
            if trial(&mut rng, &mut rejected)? {
                hits += 1;
            }
        }
        Ok((hits, rejected))
    });
    let mut hits = 0;
    let mut rejected = 0;
    for r in per_batch {
        let (h, j) = r?;
        hits += h;
        rejected += j;
    }
    if rejected as f64 > opts.max_rejection_rate * trials as f64 {
        return Err(Error::Rejections { rejected, trials });
    }
    Ok((hits, rejected))
}

/// SOP with the reflection coefficient adapted per block: a trial is in
/// outage iff the feasible `delta` interval is empty.
pub fn estimate_sop(cfg: &ScenarioConfig, strategy: GcStrategy, trials: u64, seed: u64, opts: &SimOptions) -> Result<SopEstimate> {
    cfg.validate()?;
    let sim = Simulator { cfg, strategy, opts };
    let (outages, rejected) = run_batches(trials, seed, STREAM_ADAPTIVE, opts, |rng, rej| sim.adaptive_outage(rng, rej))?;
    Ok(SopEstimate::from_counts(outages, trials, rejected))
}

/// SOP of the fixed-reflection-coefficient benchmark.
pub fn estimate_fixed_delta_sop(
    cfg: &ScenarioConfig,
    strategy: GcStrategy,
    delta: f64,
    trials: u64,
    seed: u64,
    opts: &SimOptions,
    combine: FixedDeltaCombine,
) -> Result<SopEstimate> {
    cfg.validate()?;
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Config(format!("fixed delta must lie in (0, 1], got {delta}")));
    }
    let sim = Simulator { cfg, strategy, opts };
    match combine {
        FixedDeltaCombine::Product => {
            let mut success = 1.0;
            let mut rejected = 0;
            for user in User::BOTH {
                let (ok, rej) = run_batches(trials, seed, fixed_delta_stream(user), opts, |rng, rej| {
                    let b = sim.draw(rng, rej)?;
                    Ok(sim.fixed_success(&b, delta, user))
                })?;
                success *= ok as f64 / trials as f64;
                rejected += rej;
            }
            Ok(SopEstimate::from_probability(1.0 - success, trials, rejected))
        }
        FixedDeltaCombine::Joint => {
            let (outages, rejected) = run_batches(trials, seed, STREAM_FIXED_JOINT, opts, |rng, rej| {
                let b = sim.draw(rng, rej)?;
                Ok(!User::BOTH.iter().all(|&u| sim.fixed_success(&b, delta, u)))
            })?;
            Ok(SopEstimate::from_counts(outages, trials, rejected))
        }
    }
}

/// Parameter varied along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    /// Average SNR in dB.
    PsiDb,
    /// Antenna count `L` (integer grid values).
    Antennas,
    /// Backscatter rate target `R_b` in bps/Hz.
    BackscatterRate,
}

impl FromStr for SweepAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "psi_db" | "Psi_dB" | "psi" => Ok(SweepAxis::PsiDb),
            "L" | "antennas" => Ok(SweepAxis::Antennas),
            "rates" | "Rb" | "rb" => Ok(SweepAxis::BackscatterRate),
            other => Err(Error::Config(format!("unknown sweep axis '{other}' (expected psi_db|L|rates)"))),
        }
    }
}

impl SweepAxis {
    pub fn apply(self, cfg: &ScenarioConfig, value: f64) -> Result<ScenarioConfig> {
        let out = match self {
            SweepAxis::PsiDb => cfg.with_psi_db(value),
            SweepAxis::Antennas => {
                if value.fract() != 0.0 || value < 3.0 {
                    return Err(Error::Config(format!("antenna grid values must be integers >= 3, got {value}")));
                }
                cfg.with_antennas(value as usize)
            }
            SweepAxis::BackscatterRate => {
                let mut c = *cfg;
                c.rates.rb = value;
                c
            }
        };
        out.validate()?;
        Ok(out)
    }
}

/// Which estimator a sweep row came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Estimator {
    Adaptive,
    FixedDelta(f64),
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Estimator::Adaptive => f.write_str("adaptive"),
            Estimator::FixedDelta(d) => write!(f, "fixed-{d}"),
        }
    }
}

/// One grid point of a sweep, carrying every input needed to reproduce it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub strategy: GcStrategy,
    pub scenario: ScenarioConfig,
    pub estimator: Estimator,
    pub seed: u64,
    pub estimate: SopEstimate,
}

/// One estimate per `(strategy, grid point)`, strategy-major.
#[allow(clippy::too_many_arguments)]
pub fn sweep(
    cfg: &ScenarioConfig,
    strategies: &[GcStrategy],
    axis: SweepAxis,
    grid: &[f64],
    estimator: Estimator,
    trials: u64,
    seed: u64,
    opts: &SimOptions,
) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::Config("sweep grid is empty".into()));
    }
    let points = grid.iter().map(|&v| axis.apply(cfg, v)).collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(strategies.len() * points.len());
    for &strategy in strategies {
        for scenario in &points {
            let estimate = match estimator {
                Estimator::Adaptive => estimate_sop(scenario, strategy, trials, seed, opts)?,
                Estimator::FixedDelta(d) => {
                    estimate_fixed_delta_sop(scenario, strategy, d, trials, seed, opts, FixedDeltaCombine::Product)?
                }
            };
            rows.push(SweepRow { strategy, scenario: *scenario, estimator, seed, estimate });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ScenarioConfig {
        ScenarioConfig::default()
    }

    #[test]
    fn estimate_invariants() {
        let e = SopEstimate::from_counts(25, 100, 0);
        assert_eq!(e.value, 0.25);
        assert!((e.std_error - (0.25f64 * 0.75 / 100.0).sqrt()).abs() < 1e-15);
        assert!(e.ci95.0 >= 0.0 && e.ci95.1 <= 1.0 && e.ci95.0 < e.value && e.value < e.ci95.1);
        let zero = SopEstimate::from_counts(0, 10, 0);
        assert_eq!(zero.ci95, (0.0, 0.0));
    }

    #[test]
    fn tiny_rate_targets_never_outage() {
        let mut c = cfg().with_psi_db(20.0);
        c.rates = crate::linklevel::RateTargets { rc: 1e-9, r1: 1e-9, r2: 1e-9, rb: 1e-9 };
        let e = estimate_sop(&c, GcStrategy::Ccs, 20_000, 1, &SimOptions::default()).unwrap();
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn vanishing_snr_always_outage() {
        let c = cfg().with_psi_db(-60.0);
        let e = estimate_sop(&c, GcStrategy::Mcs, 5_000, 1, &SimOptions::default()).unwrap();
        assert_eq!(e.value, 1.0);
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(estimate_sop(&cfg(), GcStrategy::Ccs, 0, 1, &SimOptions::default()).is_err());
    }

    #[test]
    fn sequential_and_parallel_match() {
        let seq = SimOptions { execution: Execution::Sequential, batch_size: 100, ..SimOptions::default() };
        let par = SimOptions { execution: Execution::Parallel, ..seq };
        let a = estimate_sop(&cfg(), GcStrategy::Rcs, 2_345, 77, &seq).unwrap();
        let b = estimate_sop(&cfg(), GcStrategy::Rcs, 2_345, 77, &par).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn backscatter_off_means_certain_outage() {
        let opts = SimOptions { theta_scale: 0.0, ..SimOptions::default() };
        let c = cfg().with_psi_db(30.0);
        let e = estimate_fixed_delta_sop(&c, GcStrategy::Ccs, 0.5, 2_000, 3, &opts, FixedDeltaCombine::Product).unwrap();
        assert_eq!(e.value, 1.0);
        let e = estimate_sop(&c, GcStrategy::Ccs, 2_000, 3, &opts).unwrap();
        assert_eq!(e.value, 1.0);
    }

    #[test]
    fn unreachable_backscatter_rate_is_outage() {
        let mut c = cfg().with_psi_db(10.0);
        c.rates.rb = 200.0;
        let e = estimate_fixed_delta_sop(&c, GcStrategy::Mcs, 0.3, 2_000, 3, &SimOptions::default(), FixedDeltaCombine::Joint)
            .unwrap();
        assert_eq!(e.value, 1.0);
    }

    #[test]
    fn invalid_fixed_delta() {
        let r = estimate_fixed_delta_sop(&cfg(), GcStrategy::Ccs, 1.5, 10, 0, &SimOptions::default(), FixedDeltaCombine::Product);
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn sweep_axes() {
        assert_eq!("L".parse::<SweepAxis>().unwrap(), SweepAxis::Antennas);
        assert!("omega".parse::<SweepAxis>().is_err());
        assert!(SweepAxis::Antennas.apply(&cfg(), 3.5).is_err());
        assert!(sweep(&cfg(), &[GcStrategy::Ccs], SweepAxis::PsiDb, &[], Estimator::Adaptive, 10, 0, &SimOptions::default()).is_err());
    }

    #[test]
    fn single_point_sweep_matches_estimate() {
        let opts = SimOptions::default();
        let rows = sweep(&cfg(), &[GcStrategy::Scs], SweepAxis::PsiDb, &[15.0], Estimator::Adaptive, 3_000, 9, &opts).unwrap();
        assert_eq!(rows.len(), 1);
        let direct = estimate_sop(&cfg().with_psi_db(15.0), GcStrategy::Scs, 3_000, 9, &opts).unwrap();
        assert_eq!(rows[0].estimate, direct);
    }
}
