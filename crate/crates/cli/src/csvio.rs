//! The sweep CSV format shared by every preset.

use sbrsma_core::montecarlo::{SopEstimate, SweepRow};
use sbrsma_core::ScenarioConfig;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

/// One curve point. Column names are part of the file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub strategy: String,
    #[serde(rename = "L")]
    pub antennas: usize,
    #[serde(rename = "Psi_dB")]
    pub psi_db: f64,
    #[serde(rename = "Rc")]
    pub rc: f64,
    #[serde(rename = "R1")]
    pub r1: f64,
    #[serde(rename = "R2")]
    pub r2: f64,
    #[serde(rename = "Rb")]
    pub rb: f64,
    pub alpha_c: f64,
    pub alpha_1: f64,
    pub alpha_2: f64,
    pub eta: f64,
    pub delta_policy: String,
    pub trials: u64,
    pub seed: u64,
    pub sop: f64,
    pub std_error: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub rejected_blocks: u64,
}

impl Record {
    /// `psi_db` is passed separately so grid values are written exactly as
    /// given rather than round-tripped through the linear SNR.
    pub fn new(strategy: &str, delta_policy: &str, cfg: &ScenarioConfig, psi_db: f64, seed: u64, est: &SopEstimate) -> Self {
        Self {
            strategy: strategy.to_owned(),
            antennas: cfg.antennas,
            psi_db,
            rc: cfg.rates.rc,
            r1: cfg.rates.r1,
            r2: cfg.rates.r2,
            rb: cfg.rates.rb,
            alpha_c: cfg.power.alpha_c,
            alpha_1: cfg.power.alpha_1,
            alpha_2: cfg.power.alpha_2,
            eta: cfg.eta,
            delta_policy: delta_policy.to_owned(),
            trials: est.trials,
            seed,
            sop: est.value,
            std_error: est.std_error,
            ci_lo: est.ci95.0,
            ci_hi: est.ci95.1,
            rejected_blocks: est.rejected_blocks,
        }
    }

    pub fn from_sweep(row: &SweepRow, psi_db: f64) -> Self {
        Self::new(row.strategy.label(), &row.estimator.to_string(), &row.scenario, psi_db, row.seed, &row.estimate)
    }

    /// A deterministic value (closed form) stored with zero trials.
    pub fn exact(strategy: &str, cfg: &ScenarioConfig, psi_db: f64, sop: f64) -> Self {
        let est = SopEstimate { value: sop, trials: 0, std_error: 0.0, ci95: (sop, sop), rejected_blocks: 0 };
        Self::new(strategy, "adaptive", cfg, psi_db, 0, &est)
    }

    /// Every column except the Psi coordinate and the estimate: rows sharing
    /// it belong to one curve.
    pub fn curve_key(&self) -> CurveKey {
        CurveKey {
            strategy: self.strategy.clone(),
            antennas: self.antennas,
            rates: [self.rc, self.r1, self.r2, self.rb].map(f64::to_bits),
            power: [self.alpha_c, self.alpha_1, self.alpha_2].map(f64::to_bits),
            eta: self.eta.to_bits(),
            delta_policy: self.delta_policy.clone(),
            trials: self.trials,
            seed: self.seed,
        }
    }
}

/// Curve identity; floats compare by bit pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CurveKey {
    pub strategy: String,
    pub antennas: usize,
    pub rates: [u64; 4],
    pub power: [u64; 3],
    pub eta: u64,
    pub delta_policy: String,
    pub trials: u64,
    pub seed: u64,
}

impl CurveKey {
    pub fn label(&self) -> String {
        let [rc, r1, r2, rb] = self.rates.map(f64::from_bits);
        let kind = if self.trials == 0 { "exact".to_owned() } else { format!("mc{}", self.trials) };
        format!(
            "{} {} L={} Rc={rc} R1={r1} R2={r2} Rb={rb} {kind}",
            self.strategy, self.delta_policy, self.antennas
        )
    }
}

pub fn write_records<W: Write>(out: W, rows: &[Record]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(input: R) -> csv::Result<Vec<Record>> {
    csv::Reader::from_reader(input).deserialize().collect()
}
