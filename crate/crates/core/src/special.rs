//! Special functions over the reals and the complex plane.
//!
//! `ln_gamma` uses the Stirling series after shifting the argument up by the
//! recurrence until `|z| >= 15`, and the reflection formula for `Re z < 1/2`.
//! Only `exp(ln_gamma(z))` is ever consumed, so the branch of the imaginary
//! part is not normalized.

use num_complex::Complex64;
use std::f64::consts::PI;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const STIRLING_SHIFT: f64 = 15.0;

// B_{2k} / (2k (2k - 1)) for k = 1..8
const STIRLING_COEFFS: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// Logarithm of the Gamma function for complex arguments.
///
/// Returns `+inf` (real part) at the poles `z = 0, -1, -2, ...`.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let s = ln_sin_pi(z);
        if s.re == f64::NEG_INFINITY {
            return Complex64::new(f64::INFINITY, 0.0);
        }
        return Complex64::new(PI.ln(), 0.0) - s - ln_gamma(Complex64::new(1.0, 0.0) - z);
    }

    let mut w = z;
    let mut prod = Complex64::new(1.0, 0.0);
    let mut shifted = false;
    while w.norm() < STIRLING_SHIFT {
        prod *= w;
        w += 1.0;
        shifted = true;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING_COEFFS {
        series += pow * c;
        pow *= inv2;
    }
    let mut out = (w - 0.5) * w.ln() - w + LN_SQRT_2PI + series;
    if shifted {
        out -= prod.ln();
    }
    out
}

/// Natural log of `|Gamma(x)|` for real `x`; `+inf` at the poles.
pub fn ln_gamma_abs(x: f64) -> f64 {
    ln_gamma(Complex64::new(x, 0.0)).re
}

/// Complex Gamma function.
pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

/// `ln(sin(pi z))` without overflow for large `|Im z|`.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    // sin(pi z) has period 2 in Re z; reduce exactly first.
    let x = z.re - 2.0 * (z.re / 2.0).round();
    let y = z.im;
    if y == 0.0 && x == x.round() {
        return Complex64::new(f64::NEG_INFINITY, 0.0);
    }
    if y.abs() < 20.0 {
        let s = (Complex64::new(x, y) * PI).sin();
        if s.norm() == 0.0 {
            return Complex64::new(f64::NEG_INFINITY, 0.0);
        }
        return s.ln();
    }
    if y > 0.0 {
        // sin(pi z) = e^{-i pi z} (e^{2 i pi z} - 1) / (2i)
        let zr = Complex64::new(x, y);
        let i = Complex64::i();
        -i * PI * zr + ((i * 2.0 * PI * zr).exp() - 1.0).ln() - Complex64::new(2.0f64.ln(), PI / 2.0)
    } else {
        ln_sin_pi(Complex64::new(x, -y)).conj()
    }
}

/// `n!` as a float; exact up to `n = 22`.
pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Neumaier compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}
