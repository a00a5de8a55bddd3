//! Fox-H functions by Mellin–Barnes contour quadrature.
//!
//! Convention: for upper pairs `(a_i, A_i)`, lower pairs `(b_j, B_j)` and
//! counts `m, n`,
//!
//! ```text
//! H^{m,n}_{p,q}[z] = 1/(2 pi i) \int_L K(s) z^{-s} ds,
//! K(s) = prod_{j<m} G(b_j + B_j s) prod_{i<n} G(1 - a_i - A_i s)
//!        / ( prod_{j>=m} G(1 - b_j - B_j s) prod_{i>=n} G(a_i + A_i s) )
//! ```
//!
//! and `L` is the vertical line `Re s = c` separating the left pole family
//! of the `b`-Gammas from the right family of the `a`-Gammas. The bivariate
//! form supported here adds one coupled numerator factor
//! `G(1 - a - alpha s - beta u)` between two univariate kernels.
//!
//! Along the line the integrand is analytic in a strip whose half-width is the
//! distance to the nearest pole, so the trapezoidal rule converges
//! geometrically. The abscissa defaults to the real saddle point of
//! `|K(c) z^{-c}|` inside the admissible strip (kept a margin away from the
//! poles), which keeps the integrand comparable to the result and avoids
//! cancellation for extreme arguments. The step comes from the pole distance,
//! the truncation from the kernel decay, and the error estimate from comparing
//! the rule against itself on every other node: with geometric convergence
//! the full rule's error is about the square of that discrepancy.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::special::ln_gamma;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Target `exp(-pi d / h)` for the half-resolution rule; the full rule then
/// sits near `exp(-2 pi d / h)`.
const COARSE_EXPONENT: f64 = 18.0;
/// Half-rule discrepancy above which the rules are not yet in their
/// geometric regime.
const MAX_COARSE_DISCREPANCY: f64 = 1e-4;
/// Log-magnitude drop (relative to the peak) where the line is truncated.
const TRUNCATION_DROP: f64 = 41.0;
const MAX_MARGIN: f64 = 0.25;
const MAX_SHIFT: f64 = 4.0;
const MAX_NODES: usize = 2_000_000;

/// Parameters of a univariate `H^{m,n}_{p,q}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FoxHSpec {
    pub upper: Vec<(f64, f64)>,
    pub lower: Vec<(f64, f64)>,
    pub m: usize,
    pub n: usize,
}

impl FoxHSpec {
    pub fn new(upper: Vec<(f64, f64)>, lower: Vec<(f64, f64)>, m: usize, n: usize) -> Result<Self> {
        if m > lower.len() || n > upper.len() {
            return Err(Error::Config(format!(
                "need m <= q and n <= p, got m={m}, n={n}, p={}, q={}",
                upper.len(),
                lower.len()
            )));
        }
        for &(x, w) in upper.iter().chain(lower.iter()) {
            if !(x.is_finite() && w.is_finite() && w > 0.0) {
                return Err(Error::Config(format!("Fox-H pair ({x}, {w}) needs a finite value and positive weight")));
            }
        }
        Ok(Self { upper, lower, m, n })
    }

    /// `exp(-z) = H^{1,0}_{0,1}[z | -; (0,1)]`.
    pub fn exp_neg() -> Self {
        Self { upper: vec![], lower: vec![(0.0, 1.0)], m: 1, n: 0 }
    }

    /// `exp(-1/z) = H^{0,1}_{1,0}[z | (1,1); -]`.
    pub fn exp_neg_reciprocal() -> Self {
        Self { upper: vec![(1.0, 1.0)], lower: vec![], m: 0, n: 1 }
    }

    /// `Gamma(m) (1 + x)^{-m} = H^{1,1}_{1,1}[x | (1-m,1); (0,1)]`.
    pub fn binomial(power: f64) -> Self {
        Self { upper: vec![(1.0 - power, 1.0)], lower: vec![(0.0, 1.0)], m: 1, n: 1 }
    }

    /// `ln K(s)`.
    pub fn ln_kernel(&self, s: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &(b, bw)) in self.lower.iter().enumerate() {
            if j < self.m {
                acc += ln_gamma(s * bw + b);
            } else {
                acc -= ln_gamma(-(s * bw) + (1.0 - b));
            }
        }
        for (i, &(a, aw)) in self.upper.iter().enumerate() {
            if i < self.n {
                acc += ln_gamma(-(s * aw) + (1.0 - a));
            } else {
                acc -= ln_gamma(s * aw + a);
            }
        }
        acc
    }

    /// Real part of `ln K(x)` for real `x`, ignoring denominator factors at
    /// their zeros.
    fn ln_kernel_real(&self, x: f64) -> f64 {
        let v = self.ln_kernel(Complex64::new(x, 0.0)).re;
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }

    /// Open strip `(left, right)` of admissible abscissas.
    pub fn strip(&self) -> (f64, f64) {
        let left = self.lower[..self.m].iter().map(|&(b, bw)| -b / bw).fold(f64::NEG_INFINITY, f64::max);
        let right = self.upper[..self.n].iter().map(|&(a, aw)| (1.0 - a) / aw).fold(f64::INFINITY, f64::min);
        (left, right)
    }

    /// `a* = sum_{i<n} A_i - sum_{i>=n} A_i + sum_{j<m} B_j - sum_{j>=m} B_j`;
    /// the line integral converges absolutely iff it is positive.
    pub fn aggregate(&self) -> f64 {
        let up: f64 = self.upper.iter().enumerate().map(|(i, &(_, w))| if i < self.n { w } else { -w }).sum();
        let lo: f64 = self.lower.iter().enumerate().map(|(j, &(_, w))| if j < self.m { w } else { -w }).sum();
        up + lo
    }

    fn checked_strip(&self) -> Result<(f64, f64)> {
        if !(self.aggregate() > 0.0) {
            return Err(Error::Contour(format!(
                "aggregate weight {} is not positive; the Mellin-Barnes line integral diverges",
                self.aggregate()
            )));
        }
        let (left, right) = self.strip();
        if !(left < right) {
            return Err(Error::Contour(format!(
                "pole families overlap (left {left} >= right {right}); no straight contour separates them"
            )));
        }
        Ok((left, right))
    }

    /// Whether `x` is a numerator pole.
    fn is_pole(&self, x: f64) -> bool {
        let hit = |v: f64| v <= 0.0 && (v - v.round()).abs() < 1e-12 * v.abs().max(1.0);
        self.lower[..self.m].iter().any(|&(b, bw)| hit(b + bw * x))
            || self.upper[..self.n].iter().any(|&(a, aw)| hit(1.0 - a - aw * x))
    }
}

/// Quadrature settings for the contour(s). `None` fields are chosen
/// automatically per evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSettings {
    /// Real part of the (first) integration line.
    pub abscissa: Option<f64>,
    /// Real part of the second line for bivariate kernels.
    pub second_abscissa: Option<f64>,
    /// Truncation of the imaginary axis, applied to every line.
    pub half_length: Option<f64>,
    /// Nodes per line over `[-half_length, half_length]`.
    pub nodes: Option<usize>,
    /// Relative tolerance on the node-halving error estimate.
    pub tolerance: f64,
    pub execution: Execution,
}

impl Default for ContourSettings {
    fn default() -> Self {
        Self {
            abscissa: None,
            second_abscissa: None,
            half_length: None,
            nodes: None,
            tolerance: 1e-9,
            execution: Execution::Parallel,
        }
    }
}

impl ContourSettings {
    fn validate(&self) -> Result<()> {
        if let Some(t) = self.half_length {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("half_length must be positive, got {t}")));
            }
        }
        if let Some(n) = self.nodes {
            if n < 64 {
                return Err(Error::Config(format!("at least 64 nodes are required, got {n}")));
            }
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Config("tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// A Fox-H value with its quadrature diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoxHValue {
    pub value: f64,
    /// Estimated relative error, `(|I_h - I_{2h}| / |I_h|)^2` above the
    /// rounding floor.
    pub error_estimate: f64,
    pub abscissa: f64,
    pub half_length: f64,
    /// Nodes over the full line.
    pub nodes: usize,
}

/// Node layout on a vertical line: `c + i k h` for `|k| <= count`.
#[derive(Debug, Clone, Copy)]
struct Line {
    h: f64,
    count: usize,
}

/// Minimizes a function that is convex on `(lo, hi)` (either end may be
/// infinite) by bracketing and golden-section search.
fn minimize_1d<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> f64 {
    const CAP: f64 = 1e6;
    let (mut a, mut b) = match (lo.is_finite(), hi.is_finite()) {
        (true, true) => (lo, hi),
        (true, false) => (lo, expand(&f, lo, 1.0, CAP)),
        (false, true) => (expand(&f, hi, -1.0, CAP), hi),
        (false, false) => {
            let r = expand(&f, 0.0, 1.0, CAP);
            let l = expand(&f, 0.0, -1.0, CAP);
            (l, r)
        }
    };
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..120 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
        if (b - a).abs() < 1e-10 * (1.0 + a.abs()) {
            break;
        }
    }
    0.5 * (a + b)
}

/// Walks from `start` in direction `dir` with doubling steps until `f` turns
/// upward; returns the far end of the bracket.
fn expand<F: Fn(f64) -> f64>(f: &F, start: f64, dir: f64, cap: f64) -> f64 {
    let mut prev = f(start + dir * 1e-3);
    let mut step = 1.0;
    loop {
        let x = start + dir * step;
        let v = f(x);
        if v > prev || step > cap {
            return x;
        }
        prev = v;
        step *= 2.0;
    }
}

fn margin(left: f64, right: f64) -> f64 {
    if left.is_finite() && right.is_finite() {
        MAX_MARGIN.min(0.25 * (right - left))
    } else {
        MAX_MARGIN
    }
}

/// Step `h` from the analytic half-width `d` and the growth `growth` of the
/// log-integrand across it.
fn step_from(d: f64, growth: f64) -> f64 {
    let shift = (0.9 * d).min(MAX_SHIFT);
    PI * shift / (COARSE_EXPONENT + growth.max(0.0))
}

/// Smallest `T` beyond which `log_mag(t)` stays below its peak by
/// [`TRUNCATION_DROP`].
fn truncation<F: Fn(f64) -> f64>(log_mag: F) -> Result<f64> {
    let mut peak = log_mag(0.0);
    let mut t = 0.5;
    while t < 1e5 {
        let v = log_mag(t);
        peak = peak.max(v);
        if v < peak - TRUNCATION_DROP && log_mag(1.5 * t) < peak - TRUNCATION_DROP && log_mag(2.0 * t) < peak - TRUNCATION_DROP {
            return Ok(t);
        }
        t *= 1.25;
    }
    Err(Error::Contour("integrand does not decay along the contour".into()))
}

fn user_line(cs: &ContourSettings, auto_h: f64, auto_t: f64) -> Result<Line> {
    let t = cs.half_length.unwrap_or(auto_t);
    let h = match cs.nodes {
        Some(n) => 2.0 * t / (n.max(2) - 1) as f64,
        None => auto_h,
    };
    let count = (t / h).ceil() as usize;
    if 2 * count + 1 > MAX_NODES {
        return Err(Error::Accuracy { estimate: f64::INFINITY, tolerance: cs.tolerance });
    }
    Ok(Line { h, count: count.max(32) })
}

fn check_abscissa(spec: &FoxHSpec, c: f64, left: f64, right: f64) -> Result<()> {
    let suggested = if left.is_finite() && right.is_finite() {
        0.5 * (left + right)
    } else if left.is_finite() {
        left + 0.5
    } else {
        right - 0.5
    };
    if spec.is_pole(c) {
        return Err(Error::ContourOnPole { abscissa: c, suggested });
    }
    if !(c > left && c < right) {
        return Err(Error::Contour(format!("abscissa {c} is outside the admissible strip ({left}, {right}); try {suggested}")));
    }
    Ok(())
}

/// Relative error estimate of the full rule. Trapezoidal errors on analytic
/// strips fall geometrically in `1/h`, so once the half rule agrees to
/// [`MAX_COARSE_DISCREPANCY`] the full rule's error is about the square of the
/// discrepancy. Rounding in the sum sets a floor.
fn accept(fine: f64, coarse: f64, abs_sum: f64, tolerance: f64) -> Result<f64> {
    let scale = fine.abs().max(f64::MIN_POSITIVE);
    let r = (fine - coarse).abs() / scale;
    let floor = 64.0 * f64::EPSILON * abs_sum / scale;
    let estimate = if r <= floor { floor } else { (r * r).max(floor) };
    if !fine.is_finite() || (r > floor && r > MAX_COARSE_DISCREPANCY) || estimate > tolerance.max(floor) {
        return Err(Error::Accuracy { estimate: r.max(estimate), tolerance });
    }
    Ok(estimate)
}

/// Univariate Fox-H function at `z > 0`.
pub fn foxh_uni(spec: &FoxHSpec, z: f64, cs: &ContourSettings) -> Result<FoxHValue> {
    cs.validate()?;
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::Domain(format!("Fox-H argument must be positive, got {z}")));
    }
    let (left, right) = spec.checked_strip()?;
    let lnz = z.ln();
    let phi = |x: f64| spec.ln_kernel_real(x) - x * lnz;

    let c = match cs.abscissa {
        Some(c) => {
            check_abscissa(spec, c, left, right)?;
            c
        }
        None => {
            let mg = margin(left, right);
            minimize_1d(phi, left + mg, right - mg)
        }
    };
    let d = (c - left).min(right - c);
    let shift = (0.9 * d).min(MAX_SHIFT);
    let centre = phi(c);
    let growth = (phi(c - shift) - centre).max(phi(c + shift) - centre);
    let log_mag = |t: f64| spec.ln_kernel(Complex64::new(c, t)).re - c * lnz;
    let line = user_line(cs, step_from(d, growth), truncation(log_mag)?)?;

    // ln f(t_k) for k >= 0; conjugate symmetry covers k < 0.
    let logs: Vec<Complex64> = (0..=line.count)
        .map(|k| {
            let s = Complex64::new(c, k as f64 * line.h);
            spec.ln_kernel(s) - s * lnz
        })
        .collect();
    let peak = logs.iter().map(|l| l.re).filter(|v| v.is_finite()).fold(f64::NEG_INFINITY, f64::max);
    let mut fine = 0.0;
    let mut coarse = 0.0;
    let mut abs_sum = 0.0;
    for (k, l) in logs.iter().enumerate().rev() {
        let term = (l - peak).exp();
        let w = if k == 0 { 1.0 } else { 2.0 };
        fine += w * term.re;
        abs_sum += w * term.norm();
        if k % 2 == 0 {
            coarse += w * term.re;
        }
    }
    let scale = peak.exp() * line.h / (2.0 * PI);
    let (fine, coarse, abs_sum) = (fine * scale, 2.0 * coarse * scale, abs_sum * scale);
    let error_estimate = accept(fine, coarse, abs_sum, cs.tolerance)?;
    Ok(FoxHValue {
        value: fine,
        error_estimate,
        abscissa: c,
        half_length: line.count as f64 * line.h,
        nodes: 2 * line.count + 1,
    })
}

/// Bivariate Fox-H kernel with one coupled numerator factor:
///
/// ```text
/// H[x; y] = 1/(2 pi i)^2 \int\int G(1 - a - alpha s - beta u) K_1(s) K_2(u) x^{-s} y^{-u} ds du
/// ```
///
/// where `K_1`, `K_2` are univariate kernels.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariateFoxHSpec {
    /// `(a; alpha, beta)` of the coupled factor.
    pub outer: (f64, f64, f64),
    pub first: FoxHSpec,
    pub second: FoxHSpec,
}

impl BivariateFoxHSpec {
    pub fn new(outer: (f64, f64, f64), first: FoxHSpec, second: FoxHSpec) -> Result<Self> {
        let (a, al, be) = outer;
        if !(a.is_finite() && al > 0.0 && be > 0.0) {
            return Err(Error::Config(format!("outer pair ({a}; {al}, {be}) needs positive weights")));
        }
        Ok(Self { outer, first, second })
    }

    /// The `H^{0,1;1,1;0,1}_{1,0;1,1;1,0}` kernel with outer pair
    /// `(m-1; 1, 1)`, first block `(q-n, 1); (0, 1)` and second block
    /// `(1, 1); -`, i.e. `G(2-m-s-u) G(s) G(n-q+1-s) G(-u)`.
    pub fn outage_kernel(m: u32, n: u32, q: u32) -> Self {
        let first = FoxHSpec { upper: vec![(q as f64 - n as f64, 1.0)], lower: vec![(0.0, 1.0)], m: 1, n: 1 };
        Self { outer: (m as f64 - 1.0, 1.0, 1.0), first, second: FoxHSpec::exp_neg_reciprocal() }
    }

    fn outer_arg(&self, s: Complex64, u: Complex64) -> Complex64 {
        let (a, al, be) = self.outer;
        -(s * al) - u * be + (1.0 - a)
    }

    fn outer_real(&self, cs: f64, cu: f64) -> f64 {
        let (a, al, be) = self.outer;
        1.0 - a - al * cs - be * cu
    }
}

/// Bivariate value with diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivariateValue {
    pub value: f64,
    pub error_estimate: f64,
    pub abscissa: (f64, f64),
    pub nodes: (usize, usize),
}

/// Bivariate Fox-H function at `x, y > 0` by a product trapezoidal rule on
/// two vertical lines.
pub fn foxh_bivariate(spec: &BivariateFoxHSpec, x: f64, y: f64, cs: &ContourSettings) -> Result<BivariateValue> {
    cs.validate()?;
    if !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()) {
        return Err(Error::Domain(format!("bivariate Fox-H arguments must be positive, got ({x}, {y})")));
    }
    let (l1, r1) = spec.first.checked_strip()?;
    let (l2, r2) = spec.second.checked_strip()?;
    let (_, al, be) = spec.outer;
    let (lnx, lny) = (x.ln(), y.ln());

    let total = |cs_: f64, cu: f64| -> f64 {
        let w = spec.outer_real(cs_, cu);
        if !(w > 0.0) {
            return f64::INFINITY;
        }
        crate::special::ln_gamma_abs(w) + spec.first.ln_kernel_real(cs_) + spec.second.ln_kernel_real(cu) - cs_ * lnx - cu * lny
    };

    let (m1, m2) = (margin(l1, r1), margin(l2, r2));
    let outer_margin = MAX_MARGIN;
    let u_upper = |c_s: f64| r2.min((spec.outer_real(c_s, 0.0) - outer_margin) / be) - m2;
    let inner_min = |c_s: f64| -> (f64, f64) {
        let hi = u_upper(c_s);
        let lo = l2 + m2;
        if !(lo < hi) {
            return (f64::NAN, f64::INFINITY);
        }
        let cu = minimize_1d(|u| total(c_s, u), lo, hi);
        (cu, total(c_s, cu))
    };

    let (c_s, c_u) = match (cs.abscissa, cs.second_abscissa) {
        (Some(a), Some(b)) => {
            check_abscissa(&spec.first, a, l1, r1)?;
            check_abscissa(&spec.second, b, l2, r2)?;
            if !(spec.outer_real(a, b) > 0.0) {
                return Err(Error::Contour(format!("abscissas ({a}, {b}) violate the coupled-factor condition")));
            }
            (a, b)
        }
        (Some(a), None) => {
            check_abscissa(&spec.first, a, l1, r1)?;
            let (b, v) = inner_min(a);
            if !v.is_finite() {
                return Err(Error::Contour(format!("no admissible second abscissa for {a}")));
            }
            (a, b)
        }
        (None, _) => {
            // the first abscissa must leave room for the second line
            let s_hi = if l2.is_finite() { ((1.0 - spec.outer.0 - outer_margin - be * (l2 + m2)) / al).min(r1 - m1) } else { r1 - m1 };
            let s_lo = l1 + m1;
            if !(s_lo < s_hi) {
                return Err(Error::Contour("no admissible pair of abscissas".into()));
            }
            let a = minimize_1d(|s| inner_min(s).1, s_lo, s_hi);
            let b = match cs.second_abscissa {
                Some(b) => b,
                None => inner_min(a).0,
            };
            (a, b)
        }
    };
    let w0 = spec.outer_real(c_s, c_u);
    if !(w0 > 0.0) {
        return Err(Error::Contour(format!("abscissas ({c_s}, {c_u}) violate the coupled-factor condition")));
    }

    let d_s = (c_s - l1).min(r1 - c_s).min(0.5 * w0 / al);
    let d_u = (c_u - l2).min(r2 - c_u).min(0.5 * w0 / be);
    let centre = total(c_s, c_u);
    let (sh_s, sh_u) = ((0.9 * d_s).min(MAX_SHIFT), (0.9 * d_u).min(MAX_SHIFT));
    let g_s = (total(c_s - sh_s, c_u) - centre).max(total(c_s + sh_s, c_u) - centre);
    let g_u = (total(c_s, c_u - sh_u) - centre).max(total(c_s, c_u + sh_u) - centre);
    let ln_gw = crate::special::ln_gamma_abs(w0);

    let mag_s = |t: f64| spec.first.ln_kernel(Complex64::new(c_s, t)).re;
    let mag_u = |t: f64| spec.second.ln_kernel(Complex64::new(c_u, t)).re;
    let ls = user_line(cs, step_from(d_s, g_s), truncation(mag_s)?)?;
    let lu = user_line(cs, step_from(d_u, g_u), truncation(mag_u)?)?;

    // first-line factors for k >= 0, second-line factors for all |k| <= count
    let a_logs: Vec<Complex64> = (0..=ls.count)
        .map(|k| {
            let s = Complex64::new(c_s, k as f64 * ls.h);
            spec.first.ln_kernel(s) - s * lnx
        })
        .collect();
    let nu = lu.count as i64;
    let b_logs: Vec<Complex64> = (-nu..=nu)
        .map(|k| {
            let u = Complex64::new(c_u, k as f64 * lu.h);
            spec.second.ln_kernel(u) - u * lny
        })
        .collect();
    let peak_a = a_logs.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
    let peak_b = b_logs.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
    let bound = peak_a + peak_b + ln_gw;

    // |G(w0 + iy)| decreases in |y|, so a table on a grid no coarser than
    // either step bounds the coupled factor from above.
    let dy = (al * ls.h).min(be * lu.h);
    let y_max = al * ls.h * ls.count as f64 + be * lu.h * lu.count as f64;
    let outer_bound: Vec<f64> =
        (0..=(y_max / dy).ceil() as usize + 1).map(|k| ln_gamma(Complex64::new(w0, k as f64 * dy)).re).collect();

    // f(-t, -tau) = conj f(t, tau) folds t < 0 onto t > 0 and the t = 0 row
    // onto tau >= 0. Each row also accumulates the half-resolution rule.
    let rows = cs.execution.map(a_logs.len(), |i| {
        let la = a_logs[i];
        let s = Complex64::new(c_s, i as f64 * ls.h);
        let mut fine = Complex64::new(0.0, 0.0);
        let mut coarse = Complex64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        for (jj, lb) in b_logs.iter().enumerate() {
            let j = jj as i64 - nu;
            if i == 0 && j < 0 {
                continue;
            }
            let y = (al * i as f64 * ls.h + be * j as f64 * lu.h).abs();
            let k = ((y / dy) as usize).min(outer_bound.len() - 1);
            if la.re + lb.re + outer_bound[k] - bound < -46.0 {
                continue;
            }
            let u = Complex64::new(c_u, j as f64 * lu.h);
            let lc = ln_gamma(spec.outer_arg(s, u));
            let term = (la + lb + lc - bound).exp();
            let w = if i == 0 && j == 0 { 1.0 } else { 2.0 };
            fine += term * w;
            abs_sum += w * term.norm();
            if i % 2 == 0 && j % 2 == 0 {
                coarse += term * w;
            }
        }
        (fine.re, coarse.re, abs_sum)
    });
    let (mut fine, mut coarse, mut abs_sum) = (0.0, 0.0, 0.0);
    for (f, c, a) in rows.into_iter().rev() {
        fine += f;
        coarse += c;
        abs_sum += a;
    }
    let scale = bound.exp() * ls.h * lu.h / (4.0 * PI * PI);
    let (fine, coarse, abs_sum) = (fine * scale, 4.0 * coarse * scale, abs_sum * scale);
    let error_estimate = accept(fine, coarse, abs_sum, cs.tolerance)?;
    Ok(BivariateValue {
        value: fine,
        error_estimate,
        abscissa: (c_s, c_u),
        nodes: (2 * ls.count + 1, 2 * lu.count + 1),
    })
}

/// Largest relative error of one elementary identity over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: String,
    pub max_rel_error: f64,
    pub worst_argument: f64,
}

/// Checks `exp(-z)`, `exp(-1/z)` and `(1 + c z)^{-m}` (for `c = 1` and
/// `c = 2.5`, `m = 1..=5`) against their Fox-H representations on `grid`.
pub fn elementary_identity_errors(grid: &[f64], cs: &ContourSettings) -> Result<Vec<IdentityCheck>> {
    fn worst(name: String, grid: &[f64], f: impl Fn(f64) -> Result<(f64, f64)>) -> Result<IdentityCheck> {
        let mut out = IdentityCheck { name, max_rel_error: 0.0, worst_argument: f64::NAN };
        for &z in grid {
            let (got, want) = f(z)?;
            let err = ((got - want) / want).abs();
            if !(err <= out.max_rel_error) {
                out.max_rel_error = err;
                out.worst_argument = z;
            }
        }
        Ok(out)
    }
    let mut checks = vec![
        worst("exp(-z)".into(), grid, |z| Ok((foxh_uni(&FoxHSpec::exp_neg(), z, cs)?.value, (-z).exp())))?,
        worst("exp(-1/z)".into(), grid, |z| {
            Ok((foxh_uni(&FoxHSpec::exp_neg_reciprocal(), z, cs)?.value, (-1.0 / z).exp()))
        })?,
    ];
    for &c in &[1.0, 2.5] {
        for m in 1..=5u32 {
            let spec = FoxHSpec::binomial(m as f64);
            let gm = crate::special::factorial(m - 1);
            checks.push(worst(format!("(1+{c}z)^-{m}"), grid, |z| {
                Ok((foxh_uni(&spec, c * z, cs)?.value / gm, (1.0 + c * z).powi(-(m as i32))))
            })?);
        }
    }
    Ok(checks)
}

/// Log-spaced grid of `n` points over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1).max(1) as f64).exp()).collect()
}
