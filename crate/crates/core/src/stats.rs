//! Small statistics helpers: Kolmogorov–Smirnov distance to the uniform law
//! on the circle, critical values and Pearson's chi-square.

use std::f64::consts::TAU;

/// Two-sided KS distance between the empirical law of `u` (values in
/// `[0, 1)`) and the uniform law. Sorts in place.
pub fn ks_uniform(u: &mut [f64]) -> f64 {
    let n = u.len();
    if n == 0 {
        return 0.0;
    }
    u.sort_by(|a, b| a.total_cmp(b));
    let nf = n as f64;
    u.iter()
        .enumerate()
        .map(|(i, &x)| {
            let hi = (i + 1) as f64 / nf - x;
            let lo = x - i as f64 / nf;
            hi.max(lo)
        })
        .fold(0.0, f64::max)
}

/// KS distance of angles (radians, any representative) from the normalised
/// Lebesgue measure on the circle.
pub fn ks_angles(angles: &[f64]) -> f64 {
    let mut u: Vec<f64> = angles.iter().map(|t| reduce_angle(*t) / TAU).collect();
    ks_uniform(&mut u)
}

/// Asymptotic 1% critical value of the KS statistic, `1.63 / √n`.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

/// Representative of `t` in `[0, 2π)`.
pub fn reduce_angle(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Pearson statistic of observed counts against expected probabilities.
pub fn chi_square(counts: &[u64], probs: &[f64]) -> f64 {
    let n: u64 = counts.iter().sum();
    counts
        .iter()
        .zip(probs)
        .filter(|(_, p)| **p > 0.0)
        .map(|(&c, &p)| {
            let e = p * n as f64;
            (c as f64 - e).powi(2) / e
        })
        .sum()
}

/// Upper `q` quantile of the chi-square law with `dof` degrees of freedom,
/// via the Wilson–Hilferty cube approximation. `z` is the matching standard
/// normal quantile (2.326 for 1%).
pub fn chi_square_quantile(dof: usize, z: f64) -> f64 {
    let k = dof as f64;
    let a = 2.0 / (9.0 * k);
    k * (1.0 - a + z * a.sqrt()).powi(3)
}
