//! Numerical laboratory for the symbiotic backscatter rate-splitting
//! multiple access (RSMA) downlink.
//!
//! A multi-antenna base station serves two single-antenna users with a common
//! stream and two private streams, while a passive backscatter device rides
//! on the same RF signal. The crate covers
//!
//! * Rayleigh block-fading sampling and Erlang distribution functions
//!   ([`distributions`]),
//! * zero-forcing/MRT beamformers with four gain-control strategies
//!   ([`beamforming`]),
//! * per-block SINRs, the reflection-coefficient feasibility interval and the
//!   SIC outage rule ([`linklevel`]),
//! * Monte Carlo estimation of the symbiotic outage probability (SOP)
//!   ([`montecarlo`]),
//! * Mellin–Barnes evaluation of univariate and bivariate Fox-H functions
//!   ([`foxh`]),
//! * the closed-form SOP with an independent quadrature path ([`analysis`]).
//!
//! Trials and grid points run on rayon when the `parallel` feature is on
//! (default) and sequentially otherwise; results are bit-identical either way.

// `!(x > 0.0)` style guards are meant to catch NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod beamforming;
pub mod distributions;
pub mod error;
pub mod exec;
pub mod foxh;
pub mod linklevel;
pub mod montecarlo;
pub mod quadrature;
pub mod scenario;
pub mod special;

pub use error::{Error, Result};
pub use exec::Execution;
pub use scenario::ScenarioConfig;

use serde::{Deserialize, Serialize};

/// One of the two cellular users.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum User {
    One,
    Two,
}

impl User {
    pub const BOTH: [User; 2] = [User::One, User::Two];

    /// The other user (`j` when this one is `k`).
    pub fn other(self) -> User {
        match self {
            User::One => User::Two,
            User::Two => User::One,
        }
    }

    /// 1-based label.
    pub fn number(self) -> usize {
        match self {
            User::One => 1,
            User::Two => 2,
        }
    }

    pub fn index(self) -> usize {
        self.number() - 1
    }
}
