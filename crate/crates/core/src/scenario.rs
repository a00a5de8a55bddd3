use crate::distributions::FadingParams;
use crate::error::{Error, Result};
use crate::linklevel::{PowerSplit, RateTargets};
use serde::{Deserialize, Serialize};

/// Static system parameters of one operating point.
///
/// The default is the reference scenario: `L = 4`,
/// `lambda0 = Omega2 = 0.25`, `lambda1 = Omega1 = 0.5`, `lambda2 = 0.75`,
/// `eta = 0.8`, `alpha = (0.5, 0.3, 0.2)`, `Rc = 0.5`, `R1 = Rb = 1`,
/// `R2 = 1.5` and `Psi = 10 dB`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    /// Base-station antennas `L`.
    pub antennas: usize,
    pub fading: FadingParams,
    pub power: PowerSplit,
    pub rates: RateTargets,
    /// Backscatter efficiency.
    pub eta: f64,
    /// Average transmit SNR `p / sigma^2`, linear.
    pub psi: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            antennas: 4,
            fading: FadingParams::default(),
            power: PowerSplit::default(),
            rates: RateTargets::default(),
            eta: 0.8,
            psi: db_to_linear(10.0),
        }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.antennas < 3 {
            return Err(Error::Config(format!("at least 3 antennas are required, got {}", self.antennas)));
        }
        self.fading.validate()?;
        self.power.validate()?;
        self.rates.validate()?;
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::Config(format!("eta must lie in (0, 1], got {}", self.eta)));
        }
        if !(self.psi > 0.0 && self.psi.is_finite()) {
            return Err(Error::Config(format!("Psi must be positive and finite, got {}", self.psi)));
        }
        Ok(())
    }

    pub fn psi_db(&self) -> f64 {
        linear_to_db(self.psi)
    }

    pub fn with_psi_db(mut self, db: f64) -> Self {
        self.psi = db_to_linear(db);
        self
    }

    pub fn with_antennas(mut self, antennas: usize) -> Self {
        self.antennas = antennas;
        self
    }

    /// The same system with users 1 and 2 relabelled.
    pub fn swap_users(mut self) -> Self {
        let f = self.fading;
        self.fading = FadingParams { lambda1: f.lambda2, lambda2: f.lambda1, omega1: f.omega2, omega2: f.omega1, ..f };
        self.power = PowerSplit { alpha_1: self.power.alpha_2, alpha_2: self.power.alpha_1, ..self.power };
        self.rates = RateTargets { r1: self.rates.r2, r2: self.rates.r1, ..self.rates };
        self
    }
}
