//! Zero-forcing weight matrix, MRT-scaled private beams, the common beam and
//! the gain-control (GC) factor steering power into the backscatter cascade.
//!
//! The stacked channel matrix is the 3 x L matrix whose rows are
//! `h_0^H, h_1^H, h_2^H`; its right pseudo-inverse
//! `W = H^H (H H^H)^{-1}` has columns `w~_0, w~_1, w~_2` with
//! `h_i^H w~_j = delta_ij`.

use crate::distributions::ChannelRealization;
use crate::error::{Error, Result};
use crate::User;
use nalgebra::{DVector, Matrix3, Matrix3xX, MatrixXx3};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Default cap on the condition number of the 3 x 3 Gram matrix.
pub const DEFAULT_CONDITION_CAP: f64 = 1e12;

/// Gain-control strategy picking `theta` from the magnitudes `|h_{0,l}|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GcStrategy {
    /// Random channel selection: a uniformly drawn entry.
    Rcs,
    /// Smallest channel selection.
    Scs,
    /// Maximal channel selection.
    Mcs,
    /// Composite channel selection: the sum of all magnitudes.
    Ccs,
}

impl GcStrategy {
    pub const ALL: [GcStrategy; 4] = [GcStrategy::Rcs, GcStrategy::Scs, GcStrategy::Mcs, GcStrategy::Ccs];

    pub fn label(self) -> &'static str {
        match self {
            GcStrategy::Rcs => "rcs",
            GcStrategy::Scs => "scs",
            GcStrategy::Mcs => "mcs",
            GcStrategy::Ccs => "ccs",
        }
    }
}

impl fmt::Display for GcStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for GcStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rcs" => Ok(GcStrategy::Rcs),
            "scs" => Ok(GcStrategy::Scs),
            "mcs" => Ok(GcStrategy::Mcs),
            "ccs" => Ok(GcStrategy::Ccs),
            other => Err(Error::Config(format!("unknown gain-control strategy '{other}' (expected rcs|scs|mcs|ccs)"))),
        }
    }
}

/// ZF weights, per-user and common beamformers and the GC factor.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformerSet {
    /// Columns `w~_0, w~_1, w~_2`.
    pub wtilde: MatrixXx3<Complex64>,
    pub w1: DVector<Complex64>,
    pub w2: DVector<Complex64>,
    pub wc: DVector<Complex64>,
    pub theta: Complex64,
}

impl BeamformerSet {
    pub fn w(&self, user: User) -> &DVector<Complex64> {
        match user {
            User::One => &self.w1,
            User::Two => &self.w2,
        }
    }
}

/// Largest deviations from the pseudo-inverse identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZfResiduals {
    /// `max_{i != j} |h_i^H w~_j| / (||h_i|| ||w~_j||)`.
    pub max_cross: f64,
    /// `max_i |h_i^H w~_i - 1|`.
    pub max_diag: f64,
}

fn stacked(h0: &DVector<Complex64>, h1: &DVector<Complex64>, h2: &DVector<Complex64>) -> Result<Matrix3xX<Complex64>> {
    let l = h0.len();
    if h1.len() != l || h2.len() != l {
        return Err(Error::Config("channel vectors must share one length".into()));
    }
    if l < 3 {
        return Err(Error::Config(format!("zero forcing needs at least 3 antennas, got {l}")));
    }
    Ok(Matrix3xX::from_fn(l, |r, c| {
        let h = match r {
            0 => h0,
            1 => h1,
            _ => h2,
        };
        h[c].conj()
    }))
}

/// Computes `W = H^H (H H^H)^{-1}` by a Cholesky solve of the Gram system.
///
/// Blocks whose Gram matrix has condition number above `condition_cap` (or is
/// not positive definite) are rejected with [`Error::SingularChannel`].
pub fn zf_weight_matrix(
    h0: &DVector<Complex64>,
    h1: &DVector<Complex64>,
    h2: &DVector<Complex64>,
    condition_cap: f64,
) -> Result<MatrixXx3<Complex64>> {
    let h = stacked(h0, h1, h2)?;
    let gram: Matrix3<Complex64> = &h * h.adjoint();
    let eig = gram.symmetric_eigenvalues();
    let (lo, hi) = (eig.min(), eig.max());
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(condition <= condition_cap) {
        return Err(Error::SingularChannel { condition, cap: condition_cap });
    }
    let chol = gram.cholesky().ok_or(Error::SingularChannel { condition, cap: condition_cap })?;
    // G^{-1} H is 3 x L; its adjoint is H^H G^{-1} because G is Hermitian.
    Ok(chol.solve(&h).adjoint())
}

/// The GC factor `theta` (real, positive) for one strategy.
pub fn gain_control<R: Rng + ?Sized>(h0: &DVector<Complex64>, strategy: GcStrategy, rng: &mut R) -> Result<f64> {
    if h0.is_empty() {
        return Err(Error::DegenerateChannel("h0 has no entries".into()));
    }
    let mags = h0.iter().map(|z| z.norm());
    let theta = match strategy {
        GcStrategy::Rcs => h0[rng.random_range(0..h0.len())].norm(),
        GcStrategy::Scs => mags.fold(f64::INFINITY, f64::min),
        GcStrategy::Mcs => mags.fold(0.0, f64::max),
        GcStrategy::Ccs => mags.sum(),
    };
    if !(theta > 0.0) {
        return Err(Error::DegenerateChannel(format!("{strategy} selected a zero gain from h0")));
    }
    Ok(theta)
}

/// `w_k = w~_k ||h_k||` and `w_c = theta w~_0 + w_1 + w_2`.
pub fn build_weights(
    wtilde: &MatrixXx3<Complex64>,
    h1: &DVector<Complex64>,
    h2: &DVector<Complex64>,
    theta: Complex64,
) -> BeamformerSet {
    let w1: DVector<Complex64> = wtilde.column(1) * Complex64::from(h1.norm());
    let w2: DVector<Complex64> = wtilde.column(2) * Complex64::from(h2.norm());
    let wc: DVector<Complex64> = wtilde.column(0) * theta + &w1 + &w2;
    BeamformerSet { wtilde: wtilde.clone(), w1, w2, wc, theta }
}

/// Beamformers for one realization in a single call.
pub fn design<R: Rng + ?Sized>(
    ch: &ChannelRealization,
    strategy: GcStrategy,
    condition_cap: f64,
    rng: &mut R,
) -> Result<BeamformerSet> {
    let wtilde = zf_weight_matrix(&ch.h0, &ch.h1, &ch.h2, condition_cap)?;
    let theta = gain_control(&ch.h0, strategy, rng)?;
    Ok(build_weights(&wtilde, &ch.h1, &ch.h2, Complex64::from(theta)))
}

/// Pseudo-inverse residuals of a ZF matrix against its channels.
pub fn zf_residuals(ch: &ChannelRealization, wtilde: &MatrixXx3<Complex64>) -> ZfResiduals {
    let hs = [&ch.h0, &ch.h1, &ch.h2];
    let mut max_cross: f64 = 0.0;
    let mut max_diag: f64 = 0.0;
    for (i, h) in hs.iter().enumerate() {
        for j in 0..3 {
            let col = wtilde.column(j);
            let ip = h.dotc(&col);
            if i == j {
                max_diag = max_diag.max((ip - 1.0).norm());
            } else {
                max_cross = max_cross.max(ip.norm() / (h.norm() * col.norm()));
            }
        }
    }
    ZfResiduals { max_cross, max_diag }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{sample_channel, FadingParams};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn real(v: &[f64]) -> DVector<Complex64> {
        DVector::from_iterator(v.len(), v.iter().map(|&x| Complex64::new(x, 0.0)))
    }

    fn basis(l: usize, i: usize) -> DVector<Complex64> {
        let mut v = DVector::from_element(l, Complex64::new(0.0, 0.0));
        v[i] = Complex64::new(1.0, 0.0);
        v
    }

    #[test]
    fn orthonormal_channels_give_identity() {
        let w = zf_weight_matrix(&basis(3, 0), &basis(3, 1), &basis(3, 2), DEFAULT_CONDITION_CAP).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                let want = if r == c { 1.0 } else { 0.0 };
                assert!((w[(r, c)] - want).norm() < 1e-15);
            }
        }
        let bf = build_weights(&w, &basis(3, 1), &basis(3, 2), Complex64::new(1.0, 0.0));
        assert_eq!(bf.wc, real(&[1.0, 1.0, 1.0]));
    }

    #[test]
    fn random_channels_satisfy_pseudo_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ch = sample_channel(&FadingParams::default(), 4, &mut rng).unwrap();
        let w = zf_weight_matrix(&ch.h0, &ch.h1, &ch.h2, DEFAULT_CONDITION_CAP).unwrap();
        let r = zf_residuals(&ch, &w);
        assert!(r.max_cross < 1e-9 && r.max_diag < 1e-9, "{r:?}");
    }

    #[test]
    fn scaling_channels_halves_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let ch = sample_channel(&FadingParams::default(), 5, &mut rng).unwrap();
        let w = zf_weight_matrix(&ch.h0, &ch.h1, &ch.h2, DEFAULT_CONDITION_CAP).unwrap();
        let two = Complex64::new(2.0, 0.0);
        let w2 = zf_weight_matrix(&(&ch.h0 * two), &(&ch.h1 * two), &(&ch.h2 * two), DEFAULT_CONDITION_CAP).unwrap();
        for c in 0..3 {
            let diff = (w.column(c) * Complex64::new(0.5, 0.0) - w2.column(c)).norm();
            assert!(diff < 1e-12 * w.column(c).norm());
        }
    }

    #[test]
    fn rejects_too_few_antennas_and_singular_blocks() {
        let v = real(&[1.0, 2.0]);
        assert!(matches!(zf_weight_matrix(&v, &v, &v, DEFAULT_CONDITION_CAP), Err(Error::Config(_))));
        let a = real(&[1.0, 0.0, 0.0, 0.0]);
        let b = real(&[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(zf_weight_matrix(&a, &b, &a, DEFAULT_CONDITION_CAP), Err(Error::SingularChannel { .. })));
    }

    #[test]
    fn gain_control_strategies() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let h0 = DVector::from_vec(vec![Complex64::new(0.0, 0.5), Complex64::new(-1.0, 0.0), Complex64::new(1.2, 1.6)]);
        assert_relative_eq!(gain_control(&h0, GcStrategy::Scs, &mut rng).unwrap(), 0.5);
        assert_relative_eq!(gain_control(&h0, GcStrategy::Mcs, &mut rng).unwrap(), 2.0);
        assert_relative_eq!(gain_control(&h0, GcStrategy::Ccs, &mut rng).unwrap(), 3.5);
        let single = real(&[0.7]);
        for s in GcStrategy::ALL {
            assert_relative_eq!(gain_control(&single, s, &mut rng).unwrap(), 0.7);
        }
        let zero = real(&[0.0, 0.0]);
        assert!(matches!(gain_control(&zero, GcStrategy::Ccs, &mut rng), Err(Error::DegenerateChannel(_))));
    }

    #[test]
    fn rcs_is_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h0 = real(&[1.0, 2.0, 3.0]);
        let n = 100_000;
        let mean = (0..n).map(|_| gain_control(&h0, GcStrategy::Rcs, &mut rng).unwrap()).sum::<f64>() / n as f64;
        // sd of one draw is sqrt(2/3); 5 sigma band
        assert!((mean - 2.0).abs() < 5.0 * (2.0f64 / 3.0).sqrt() / (n as f64).sqrt());
    }

    #[test]
    fn strategy_parsing() {
        assert_eq!("CCS".parse::<GcStrategy>().unwrap(), GcStrategy::Ccs);
        assert!("xyz".parse::<GcStrategy>().is_err());
    }
}
