//! Rayleigh block-fading model and the Erlang-type distribution functions
//! used by the outage analysis.
//!
//! Every channel entry is circularly-symmetric complex Gaussian with power
//! `|h|^2 ~ Exp(rate)`, i.e. variance `1 / rate`. Sampling always goes
//! through an explicit generator handle so independent streams can be used
//! from independent workers.

use crate::error::{Error, Result};
use crate::special::factorial;
use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Exponential rates of the channel powers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadingParams {
    /// Rate of `|h_{0,l}|^2` (BS to backscatter device).
    pub lambda0: f64,
    /// Rate of `|h_{1,l}|^2` (BS to user 1).
    pub lambda1: f64,
    /// Rate of `|h_{2,l}|^2` (BS to user 2).
    pub lambda2: f64,
    /// Rate of `|g_1|^2` (device to user 1).
    pub omega1: f64,
    /// Rate of `|g_2|^2` (device to user 2).
    pub omega2: f64,
}

impl Default for FadingParams {
    fn default() -> Self {
        Self { lambda0: 0.25, lambda1: 0.5, lambda2: 0.75, omega1: 0.5, omega2: 0.25 }
    }
}

impl FadingParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("lambda0", self.lambda0),
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("omega1", self.omega1),
            ("omega2", self.omega2),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    /// `lambda_k` for user `k` in {1, 2}.
    pub fn lambda(&self, user: crate::User) -> f64 {
        match user {
            crate::User::One => self.lambda1,
            crate::User::Two => self.lambda2,
        }
    }

    /// `Omega_k` for user `k` in {1, 2}.
    pub fn omega(&self, user: crate::User) -> f64 {
        match user {
            crate::User::One => self.omega1,
            crate::User::Two => self.omega2,
        }
    }
}

/// One quasi-static fading block.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h0: DVector<Complex64>,
    pub h1: DVector<Complex64>,
    pub h2: DVector<Complex64>,
    pub g1: Complex64,
    pub g2: Complex64,
}

impl ChannelRealization {
    pub fn new(
        h0: DVector<Complex64>,
        h1: DVector<Complex64>,
        h2: DVector<Complex64>,
        g1: Complex64,
        g2: Complex64,
    ) -> Result<Self> {
        let l = h0.len();
        if l == 0 || h1.len() != l || h2.len() != l {
            return Err(Error::Config(format!(
                "channel vectors must share a nonzero length, got {}, {}, {}",
                h0.len(),
                h1.len(),
                h2.len()
            )));
        }
        let finite = |z: &Complex64| z.re.is_finite() && z.im.is_finite();
        if !(h0.iter().all(finite) && h1.iter().all(finite) && h2.iter().all(finite) && finite(&g1) && finite(&g2)) {
            return Err(Error::Domain("channel entries must be finite".into()));
        }
        Ok(Self { h0, h1, h2, g1, g2 })
    }

    pub fn antennas(&self) -> usize {
        self.h0.len()
    }

    pub fn h(&self, user: crate::User) -> &DVector<Complex64> {
        match user {
            crate::User::One => &self.h1,
            crate::User::Two => &self.h2,
        }
    }

    pub fn g(&self, user: crate::User) -> Complex64 {
        match user {
            crate::User::One => self.g1,
            crate::User::Two => self.g2,
        }
    }

    /// `tau_k = ||h_k||^2`.
    pub fn tau(&self, user: crate::User) -> f64 {
        self.h(user).norm_squared()
    }

    /// `|g_k|^2`.
    pub fn g_sq(&self, user: crate::User) -> f64 {
        self.g(user).norm_sqr()
    }
}

/// Draws `(a + ib) / sqrt(2) * sigma` with `sigma^2 = 1 / rate`, so that the
/// power is `Exp(rate)`.
pub fn complex_gaussian<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> Complex64 {
    let scale = (0.5 / rate).sqrt();
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    Complex64::new(a * scale, b * scale)
}

fn gaussian_vector<R: Rng + ?Sized>(len: usize, rate: f64, rng: &mut R) -> DVector<Complex64> {
    DVector::from_fn(len, |_, _| complex_gaussian(rate, rng))
}

/// Samples one fading block for an `antennas`-element base station.
///
/// Draw order is fixed (h0, h1, h2, g1, g2) so a block is a deterministic
/// function of the generator state.
pub fn sample_channel<R: Rng + ?Sized>(params: &FadingParams, antennas: usize, rng: &mut R) -> Result<ChannelRealization> {
    if antennas == 0 {
        return Err(Error::Config("antenna count must be at least 1".into()));
    }
    params.validate()?;
    let h0 = gaussian_vector(antennas, params.lambda0, rng);
    let h1 = gaussian_vector(antennas, params.lambda1, rng);
    let h2 = gaussian_vector(antennas, params.lambda2, rng);
    let g1 = complex_gaussian(params.omega1, rng);
    let g2 = complex_gaussian(params.omega2, rng);
    Ok(ChannelRealization { h0, h1, h2, g1, g2 })
}

/// Erlang(`shape`, `rate`) draw as a sum of exponentials.
pub fn sample_erlang<R: Rng + ?Sized>(shape: usize, rate: f64, rng: &mut R) -> f64 {
    (0..shape)
        .map(|_| {
            let e: f64 = rng.sample(rand_distr::Exp1);
            e / rate
        })
        .sum()
}

/// Exponential density `omega * exp(-omega z)`.
pub fn exp_pdf(z: f64, omega: f64) -> Result<f64> {
    if !(z >= 0.0) {
        return Err(Error::Domain(format!("exp_pdf needs z >= 0, got {z}")));
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::Domain(format!("exp_pdf needs a positive rate, got {omega}")));
    }
    Ok(omega * (-omega * z).exp())
}

/// Upper incomplete Gamma function for integer shape,
/// `Gamma(L, x) = (L-1)! sum_{m<L} x^m e^{-x} / m!`.
pub fn upper_gamma_int(shape: u32, x: f64) -> Result<f64> {
    if shape == 0 {
        return Err(Error::Domain("upper_gamma_int needs shape >= 1".into()));
    }
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("upper_gamma_int needs x >= 0, got {x}")));
    }
    Ok(factorial(shape - 1) * erlang_series(shape, x))
}

/// `sum_{m<L} x^m e^{-x} / m!`, i.e. `Gamma(L, x) / (L-1)!`.
fn erlang_series(shape: u32, x: f64) -> f64 {
    let mut term = (-x).exp();
    let mut sum = term;
    for m in 1..shape {
        term *= x / m as f64;
        sum += term;
    }
    sum
}

/// Complementary CDF of the Erlang(`shape`, `rate`) law:
/// `Pr[tau > z] = Gamma(L, rate z) / (L-1)!`.
pub fn tau_ccdf(z: f64, shape: u32, rate: f64) -> f64 {
    if z <= 0.0 {
        return 1.0;
    }
    erlang_series(shape.max(1), rate * z).clamp(0.0, 1.0)
}

/// CDF of the Erlang(`shape`, `rate`) law.
pub fn tau_cdf(z: f64, shape: u32, rate: f64) -> f64 {
    1.0 - tau_ccdf(z, shape, rate)
}
