//! The infinite Blaschke product attached to the basin of Baker's map
//! `f(z) = exp(α(z − 1/z))`.
//!
//! Lifting the basin to the disk turns `f` into the inner function
//!
//! ```text
//! B(z) = z · ∏_{n≥1} (a_n² − z²) / (1 − a_n² z²),   a_n = (τⁿ − 1)/(τⁿ + 1) = tanh(n s / 2),
//! ```
//!
//! with `s = ln τ` fixed by the multiplier identity `B′(0) = ∏ a_n² = 2α`.
//! `B` is analytic across `∂𝔻 ∖ {±1}` and its singularities `±1` form the
//! limit set of the covering.
//!
//! Factors are handled through their gaps `g_n = 1 − a_n² = sech²(n s / 2)`,
//! which are computed without cancellation, and multiplied in log space.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng;
use crate::stats;

/// Upper limit on the number of factors used by any evaluation.
pub const DEFAULT_TERM_CAP: usize = 10_000;
/// Default exclusion radius around the singular points `±1`.
pub const DEFAULT_EXCLUSION_RADIUS: f64 = 1e-3;
/// Tail of the defining product left unsummed by `solve_tau`.
const PRODUCT_TAIL: f64 = 1e-17;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BlaschkeError {
    #[error("alpha = {0} is outside (0, 1/2)")]
    OutOfRange(f64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{z} is within {distance:e} of a singular point; at least {min_radius:e} is needed")]
    TooCloseToSingularity {
        z: Complex64,
        distance: f64,
        min_radius: f64,
    },
    #[error("|B| deviates from 1 by {deviation:e} on the unit circle")]
    NotInner { deviation: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauSolution {
    pub alpha: f64,
    pub tau: f64,
    pub s: f64,
    pub residual: f64,
    pub product_terms_used: usize,
}

/// `ln tanh x` for `x > 0` without cancellation at either end.
fn ln_tanh(x: f64) -> f64 {
    let q = (-2.0 * x).exp();
    let ln_one_minus_q = if q < 0.5 {
        (-q).ln_1p()
    } else {
        (-(-2.0 * x).exp_m1()).ln()
    };
    ln_one_minus_q - q.ln_1p()
}

/// `ln ∏_{n≥1} tanh²(n s / 2)` with the tail past the returned term count
/// bounded by `PRODUCT_TAIL`.
///
/// With `q_n = e^{−n s}`, `−ln tanh(n s / 2) ≤ 2 q_n / (1 − q_n)`, so the tail
/// after `N` terms is at most `4 e^{−(N+1)s} / (1 − e^{−s})²`.
///
/// Every partial sum over-estimates the total, so summation stops early
/// once it drops below `floor`.
fn log_product(s: f64, floor: f64) -> (f64, usize) {
    let mut sum = 0.0;
    let mut n = 0usize;
    let denom = (-(-s).exp_m1()).powi(2);
    loop {
        n += 1;
        sum += 2.0 * ln_tanh(n as f64 * s / 2.0);
        if sum < floor {
            return (sum, n);
        }
        let tail = 4.0 * (-(n as f64 + 1.0) * s).exp() / denom;
        if tail < PRODUCT_TAIL {
            return (sum, n);
        }
    }
}

/// Solves `∏ tanh²(n s / 2) = 2α` for `s` on the bracket `[1e−6, 50]`.
pub fn solve_tau(alpha: f64, tol: f64) -> Result<TauSolution, BlaschkeError> {
    solve_tau_bracketed(alpha, tol, 1e-6, 50.0)
}

pub fn solve_tau_bracketed(
    alpha: f64,
    tol: f64,
    lo: f64,
    hi: f64,
) -> Result<TauSolution, BlaschkeError> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(BlaschkeError::OutOfRange(alpha));
    }
    if !(tol > 0.0) {
        return Err(BlaschkeError::InvalidInput(format!(
            "tol = {tol} must be positive"
        )));
    }
    if !(lo > 0.0 && lo < hi && hi.is_finite()) {
        return Err(BlaschkeError::InvalidInput(format!(
            "bracket [{lo}, {hi}] must satisfy 0 < lo < hi"
        )));
    }
    let target = (2.0 * alpha).ln();
    let (flo, _) = log_product(lo, target);
    let (fhi, _) = log_product(hi, target);
    if !(flo < target && fhi > target) {
        return Err(BlaschkeError::InvalidInput(format!(
            "bracket [{lo}, {hi}] does not contain the root for alpha = {alpha}"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if log_product(m, target).0 < target {
            a = m;
        } else {
            b = m;
        }
    }
    let s = 0.5 * (a + b);
    let (logp, terms) = log_product(s, f64::NEG_INFINITY);
    let residual = (logp.exp() - 2.0 * alpha).abs();
    if residual > tol {
        return Err(BlaschkeError::InvalidInput(format!(
            "residual {residual:e} exceeds tol = {tol:e} at double precision"
        )));
    }
    Ok(TauSolution {
        alpha,
        tau: s.exp(),
        s,
        residual,
        product_terms_used: terms,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeProduct {
    pub solution: TauSolution,
    /// `a_n` for `n = 1..=truncation_n`.
    pub zeros: Vec<f64>,
    /// `g_n = 1 − a_n²`, same indexing.
    gaps: Vec<f64>,
    /// Largest number of factors any evaluation may use.
    pub truncation_n: usize,
    /// `C` in the geometric tail bound `Σ_{n>N} g_n ≤ C τ^{−N}`.
    pub tail_bound_constant: f64,
    pub exclusion_radius: f64,
}

impl BlaschkeProduct {
    pub fn new(solution: TauSolution) -> Self {
        BlaschkeProduct::with_cap(solution, DEFAULT_TERM_CAP)
    }

    /// Factors whose gap underflows are exactly 1 and are not stored.
    pub fn with_cap(solution: TauSolution, cap: usize) -> Self {
        let s = solution.s;
        let mut zeros = Vec::new();
        let mut gaps = Vec::new();
        for n in 1..=cap.max(1) {
            let x = n as f64 * s / 2.0;
            let g = x.cosh().powi(-2);
            if g == 0.0 {
                break;
            }
            zeros.push(x.tanh());
            gaps.push(g);
        }
        BlaschkeProduct {
            solution,
            truncation_n: zeros.len(),
            zeros,
            gaps,
            tail_bound_constant: 4.0 / (solution.tau - 1.0),
            exclusion_radius: DEFAULT_EXCLUSION_RADIUS,
        }
    }

    pub fn from_alpha(alpha: f64) -> Result<Self, BlaschkeError> {
        Ok(BlaschkeProduct::new(solve_tau(alpha, 1e-12)?))
    }

    pub fn with_exclusion_radius(mut self, r: f64) -> Self {
        self.exclusion_radius = r;
        self
    }

    /// Bound on `Σ_{n>N} |factor_n − 1|` at `z`, using
    /// `factor − 1 = −g_n (1 + z²) / (1 − a_n² z²)` and
    /// `|1 − a_n² z²| ≥ |1 − z²| − g_n`.
    fn tail_bound(&self, n: usize, one_minus_z2: f64, one_plus_z2: f64) -> f64 {
        let tau = self.solution.tau;
        let eps = self.tail_bound_constant * (tau - 1.0) / tau.powi(n as i32 + 1).max(1.0);
        let sum = self.tail_bound_constant * tau.powf(-(n as f64));
        if one_minus_z2 <= 2.0 * eps {
            return f64::INFINITY;
        }
        sum * one_plus_z2 / (one_minus_z2 - eps)
    }

    /// Smallest `N` whose certified truncation error at `z` is at most
    /// `target_err`.
    pub fn required_terms(&self, z: Complex64, target_err: f64) -> Result<usize, BlaschkeError> {
        self.check_point(z)?;
        if !(target_err > 0.0) {
            return Err(BlaschkeError::InvalidInput(format!(
                "target_err = {target_err} must be positive"
            )));
        }
        let z2 = z * z;
        let (m, p) = ((1.0 - z2).norm(), (1.0 + z2).norm());
        let budget = target_err.ln_1p();
        for n in 0..=self.truncation_n {
            if self.tail_bound(n, m, p) <= budget {
                return Ok(n);
            }
        }
        // Past the stored factors every gap is below the smallest normal.
        if self.truncation_n < DEFAULT_TERM_CAP && self.gaps.len() == self.truncation_n {
            let g = self.gaps.last().copied().unwrap_or(1.0);
            if g * self.solution.tau < f64::MIN_POSITIVE && m > 0.0 {
                return Ok(self.truncation_n);
            }
        }
        Err(BlaschkeError::TooCloseToSingularity {
            z,
            distance: singular_distance(z),
            min_radius: self.min_radius(target_err),
        })
    }

    /// Distance from `±1` at which the capped product still meets
    /// `target_err`; `|1 − z²| ≥ dist·(2 − dist)` for `|z| ≤ 1`.
    fn min_radius(&self, target_err: f64) -> f64 {
        let n = self.truncation_n;
        let tau = self.solution.tau;
        let sum = self.tail_bound_constant * tau.powf(-(n as f64));
        let need = 2.0 * sum / target_err.ln_1p() + 2.0 * sum;
        self.exclusion_radius.max(need.min(1.0))
    }

    fn check_point(&self, z: Complex64) -> Result<(), BlaschkeError> {
        if !(z.re.is_finite() && z.im.is_finite()) || z.norm() > 1.0 + 1e-12 {
            return Err(BlaschkeError::InvalidInput(format!("|z| > 1 at z = {z}")));
        }
        let d = singular_distance(z);
        if d <= self.exclusion_radius {
            return Err(BlaschkeError::TooCloseToSingularity {
                z,
                distance: d,
                min_radius: self.exclusion_radius,
            });
        }
        Ok(())
    }

    /// `B(z)` truncated to within `target_err`; returns the value and the
    /// number of factors used.
    pub fn eval_with_terms(
        &self,
        z: Complex64,
        target_err: f64,
    ) -> Result<(Complex64, usize), BlaschkeError> {
        let n = self.required_terms(z, target_err)?;
        let z2 = z * z;
        let one_minus = 1.0 - z2;
        let one_plus = 1.0 + z2;
        let mut log_sum = Complex64::new(0.0, 0.0);
        for &g in &self.gaps[..n] {
            let num = one_minus - g;
            if num == Complex64::new(0.0, 0.0) {
                return Ok((Complex64::new(0.0, 0.0), n));
            }
            let w = -g * one_plus / (one_minus + g * z2);
            log_sum += ln_1p(w);
        }
        Ok((z * log_sum.exp(), n))
    }

    pub fn eval(&self, z: Complex64, target_err: f64) -> Result<Complex64, BlaschkeError> {
        Ok(self.eval_with_terms(z, target_err)?.0)
    }

    /// `B′(0) = ∏ a_n²`, with the same certified tail as `solve_tau`.
    pub fn derivative_at_zero(&self) -> f64 {
        log_product(self.solution.s, f64::NEG_INFINITY).0.exp()
    }

    /// `arg B(e^{iθ})`, checking `|B| = 1` to within `10·target_err` plus
    /// accumulated rounding.
    pub fn circle_eval(&self, theta: f64, target_err: f64) -> Result<f64, BlaschkeError> {
        let (b, n) = self.eval_with_terms(Complex64::from_polar(1.0, theta), target_err)?;
        let deviation = (b.norm() - 1.0).abs();
        if deviation > 10.0 * target_err + 8.0 * f64::EPSILON * (n as f64 + 1.0) {
            return Err(BlaschkeError::NotInner { deviation });
        }
        Ok(b.arg())
    }

    /// KS test of the pushforward of `n` uniform angles under `θ ↦ arg B(e^{iθ})`
    /// against the uniform law. Angles within the exclusion radius of `±1` are
    /// skipped and counted.
    pub fn pushforward_ks(
        &self,
        n: usize,
        seed: u64,
        target_err: f64,
    ) -> Result<KsReport, BlaschkeError> {
        let blocks = n.div_ceil(rng::BLOCK);
        let parts: Vec<Result<(Vec<f64>, usize), BlaschkeError>> = (0..blocks)
            .into_par_iter()
            .map(|b| {
                let mut r = rng::stream(seed, b as u64);
                let len = rng::BLOCK.min(n - b * rng::BLOCK);
                let mut out = Vec::with_capacity(len);
                let mut skipped = 0;
                for _ in 0..len {
                    let theta: f64 = r.gen_range(0.0..std::f64::consts::TAU);
                    if singular_distance(Complex64::from_polar(1.0, theta)) <= self.exclusion_radius
                    {
                        skipped += 1;
                        continue;
                    }
                    out.push(self.circle_eval(theta, target_err)?);
                }
                Ok((out, skipped))
            })
            .collect();
        let mut angles = Vec::with_capacity(n);
        let mut excluded = 0;
        for p in parts {
            let (a, s) = p?;
            angles.extend(a);
            excluded += s;
        }
        let statistic = stats::ks_angles(&angles);
        let critical = stats::ks_critical_1pct(angles.len());
        Ok(KsReport {
            statistic,
            critical,
            n_used: angles.len(),
            n_excluded: excluded,
            pass: statistic < critical,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsReport {
    pub statistic: f64,
    pub critical: f64,
    pub n_used: usize,
    pub n_excluded: usize,
    pub pass: bool,
}

fn singular_distance(z: Complex64) -> f64 {
    (z - 1.0).norm().min((z + 1.0).norm())
}

/// `ln(1 + w)` accurate for small `w`.
fn ln_1p(w: Complex64) -> Complex64 {
    let u = 1.0 + w;
    if u == Complex64::new(1.0, 0.0) {
        w
    } else {
        u.ln() * (w / (u - 1.0))
    }
}
