//! Boundary maps of inner functions acting on angles, and the statistics used
//! as finite-sample proxies for their ergodic behaviour.
//!
//! Angles live in `[0, 2π)` and are reduced after every application.

use std::f64::consts::TAU;
use std::io::{self, Write};
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blaschke::{BlaschkeError, BlaschkeProduct};
use crate::map_zoo::{MapKind, MapSpec};
use crate::mobius::Mobius;
use crate::rng;
use crate::stats::{self, reduce_angle};

/// Reference cells used to measure arc covers.
pub const DEFAULT_SPREAD_GRID: usize = 1 << 14;
/// Upper limit on tracked arc points during a spread computation.
const MAX_ARC_POINTS: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircleError {
    #[error("orbit came within the exclusion radius of a singularity at step {step}")]
    SingularityApproach { step: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("map {index} does not fix the origin")]
    OriginNotFixed { index: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum CircleMap {
    Rotation(f64),
    Power(u32),
    /// A Möbius map preserving the unit circle.
    MobiusBoundary(Mobius),
    /// The infinite product, evaluated to the given truncation error.
    BlaschkeBoundary(Arc<BlaschkeProduct>, f64),
    /// A finite Blaschke product from the map zoo.
    FiniteBlaschke(MapSpec),
}

impl CircleMap {
    pub fn mobius(m: Mobius) -> Result<Self, CircleError> {
        for k in 0..5 {
            let z = Complex64::from_polar(1.0, 0.7 + 1.3 * k as f64);
            match m.apply(z) {
                Some(w) if (w.norm() - 1.0).abs() < 1e-12 => {}
                _ => {
                    return Err(CircleError::InvalidInput(
                        "Möbius map does not preserve the unit circle".into(),
                    ))
                }
            }
        }
        Ok(CircleMap::MobiusBoundary(m))
    }

    pub fn finite_blaschke(spec: MapSpec) -> Result<Self, CircleError> {
        match spec.kind() {
            MapKind::FiniteBlaschke { .. } => Ok(CircleMap::FiniteBlaschke(spec)),
            other => Err(CircleError::InvalidInput(format!(
                "{other:?} is not a finite Blaschke product"
            ))),
        }
    }

    /// `z ↦ z (a − z)/(1 − a z)` with real `a ∈ [0, 1)`: fixes 0 with `g′(0) = a`.
    pub fn pommerenke_factor(a: f64) -> Result<Self, CircleError> {
        if !(0.0..1.0).contains(&a) {
            return Err(CircleError::InvalidInput(format!(
                "a = {a} must lie in [0, 1)"
            )));
        }
        let spec = MapSpec::new(MapKind::FiniteBlaschke {
            zeros: vec![Complex64::new(0.0, 0.0), Complex64::new(a, 0.0)],
            rotation: Complex64::new(-1.0, 0.0),
        })
        .map_err(|e| CircleError::InvalidInput(e.to_string()))?;
        Ok(CircleMap::FiniteBlaschke(spec))
    }

    pub fn apply(&self, theta: f64) -> Result<f64, CircleError> {
        let on_circle = |w: Complex64| reduce_angle(w.arg());
        match self {
            CircleMap::Rotation(t) => Ok(reduce_angle(theta + t)),
            CircleMap::Power(d) => Ok(reduce_angle(f64::from(*d) * theta)),
            CircleMap::MobiusBoundary(m) => m
                .apply(Complex64::from_polar(1.0, theta))
                .map(on_circle)
                .ok_or_else(|| CircleError::InvalidInput("pole on the unit circle".into())),
            CircleMap::BlaschkeBoundary(b, err) => match b.circle_eval(theta, *err) {
                Ok(t) => Ok(reduce_angle(t)),
                Err(BlaschkeError::TooCloseToSingularity { .. }) => {
                    Err(CircleError::SingularityApproach { step: 0 })
                }
                Err(e) => Err(CircleError::InvalidInput(e.to_string())),
            },
            CircleMap::FiniteBlaschke(spec) => spec
                .eval(Complex64::from_polar(1.0, theta))
                .map(on_circle)
                .map_err(|e| CircleError::InvalidInput(e.to_string())),
        }
    }

    /// Whether the disk extension fixes 0.
    pub fn fixes_origin(&self) -> bool {
        match self {
            CircleMap::Rotation(_) | CircleMap::Power(_) | CircleMap::BlaschkeBoundary(..) => true,
            CircleMap::MobiusBoundary(m) => m.fixes_origin(),
            CircleMap::FiniteBlaschke(spec) => {
                matches!(spec.eval(Complex64::new(0.0, 0.0)), Ok(w) if w.norm() == 0.0)
            }
        }
    }

    /// `|g′(0)|` for maps fixing the origin.
    pub fn derivative_at_zero_modulus(&self) -> Option<f64> {
        if !self.fixes_origin() {
            return None;
        }
        Some(match self {
            CircleMap::Rotation(_) => 1.0,
            CircleMap::Power(d) => {
                if *d == 1 {
                    1.0
                } else {
                    0.0
                }
            }
            CircleMap::MobiusBoundary(m) => (m.a / m.d).norm(),
            CircleMap::BlaschkeBoundary(b, _) => b.derivative_at_zero().abs(),
            CircleMap::FiniteBlaschke(spec) => {
                spec.derivative(Complex64::new(0.0, 0.0)).ok()?.norm()
            }
        })
    }
}

fn at_step(e: CircleError, step: usize) -> CircleError {
    match e {
        CircleError::SingularityApproach { .. } => CircleError::SingularityApproach { step },
        other => other,
    }
}

/// `[θ_1, …, θ_n]` with `θ_{k+1} = g(θ_k)`.
pub fn iterate(map: &CircleMap, theta0: f64, n: usize) -> Result<Vec<f64>, CircleError> {
    let mut out = Vec::with_capacity(n);
    let mut t = reduce_angle(theta0);
    for k in 0..n {
        t = map.apply(t).map_err(|e| at_step(e, k))?;
        out.push(t);
    }
    Ok(out)
}

/// Star discrepancy of the angles against normalised arc length.
pub fn discrepancy(samples: &[f64]) -> Result<f64, CircleError> {
    if samples.is_empty() {
        return Err(CircleError::EmptyInput);
    }
    Ok(stats::ks_angles(samples))
}

/// Mean of `cos θ` along the orbit `θ_1, …, θ_n`.
pub fn birkhoff_cos(orbit: &[f64]) -> f64 {
    orbit.iter().map(|t| t.cos()).sum::<f64>() / orbit.len() as f64
}

/// A Lebesgue-typical orbit of `θ ↦ dθ`: with random base-`d` digits
/// `x_1 x_2 …`, the `k`-th point is `2π · 0.x_{k+1} x_{k+2} …`. Iterating the
/// map in floating point instead loses one digit per step and collapses
/// (to 0 for `d = 2` after 53 steps).
pub fn typical_power_orbit(d: u32, n: usize, seed: u64) -> Vec<f64> {
    let d = d.max(2);
    let window = (53.0 / f64::from(d).log2()).ceil() as usize + 1;
    let mut r = rng::stream(seed, 0);
    let digits: Vec<u32> = (0..n + window + 1).map(|_| r.gen_range(0..d)).collect();
    (1..=n)
        .map(|k| {
            let x = digits[k..k + window]
                .iter()
                .rev()
                .fold(0.0, |acc, &dig| (acc + f64::from(dig)) / f64::from(d));
            TAU * x
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpreadReport {
    /// `(start angle, length)`.
    pub initial_arc: (f64, f64),
    pub iterations: usize,
    /// Fraction of reference cells met by the image after `k + 1` maps.
    pub covered_fraction: Vec<f64>,
    pub first_full_cover: Option<usize>,
    pub grid: usize,
}

/// Pushes an arc forward under `g` repeatedly.
pub fn arc_spread(
    map: &CircleMap,
    arc: (f64, f64),
    n_max: usize,
    grid: usize,
) -> Result<SpreadReport, CircleError> {
    spread_impl(|_| map, arc, n_max, grid)
}

/// Pushes an arc forward under `g_{n−1} ∘ … ∘ g_0`.
pub fn arc_spread_sequence(
    maps: &[CircleMap],
    arc: (f64, f64),
    grid: usize,
) -> Result<SpreadReport, CircleError> {
    spread_impl(|k| &maps[k], arc, maps.len(), grid)
}

/// The arc is tracked as a polyline of points `(t, image)` with `t` the
/// parameter along the initial arc. After each map, any pair of neighbours
/// whose images are more than one reference cell apart is bisected in `t`,
/// and the new point is pushed through every map applied so far, so every
/// cell crossed by the image contains a tracked point. All our maps are onto
/// the circle, so once the image covers it, it stays covered and the
/// remaining iterations are recorded as 1 without further work.
fn spread_impl<'a, F>(
    map_at: F,
    arc: (f64, f64),
    n_max: usize,
    grid: usize,
) -> Result<SpreadReport, CircleError>
where
    F: Fn(usize) -> &'a CircleMap,
{
    let (start, len) = arc;
    if !(len > 0.0 && len <= TAU && start.is_finite()) {
        return Err(CircleError::InvalidInput(format!(
            "arc length {len} must be in (0, 2π]"
        )));
    }
    if grid < 1 << 10 {
        return Err(CircleError::InvalidInput(format!(
            "grid = {grid} must be at least 2^10"
        )));
    }
    let cell = TAU / grid as f64;
    let push = |t: f64, upto: usize| -> Result<f64, CircleError> {
        let mut x = reduce_angle(start + t * len);
        for k in 0..upto {
            x = map_at(k).apply(x).map_err(|e| at_step(e, k))?;
        }
        Ok(x)
    };
    let n0 = ((len / cell).ceil() as usize * 2).max(2);
    let mut pts: Vec<(f64, f64)> = (0..=n0)
        .map(|i| {
            let t = i as f64 / n0 as f64;
            (t, reduce_angle(start + t * len))
        })
        .collect();
    let mut covered = Vec::with_capacity(n_max);
    let mut first_full = None;
    for k in 0..n_max {
        if first_full.is_some() {
            covered.push(1.0);
            continue;
        }
        let g = map_at(k);
        for p in pts.iter_mut() {
            p.1 = g.apply(p.1).map_err(|e| at_step(e, k))?;
        }
        let mut refined = Vec::with_capacity(pts.len());
        refined.push(pts[0]);
        let mut stack = Vec::new();
        for w in pts.windows(2) {
            stack.push((w[0], w[1]));
            while let Some((a, b)) = stack.pop() {
                if angular_gap(a.1, b.1) <= cell || b.0 - a.0 <= f64::EPSILON {
                    refined.push(b);
                    continue;
                }
                let tm = 0.5 * (a.0 + b.0);
                let m = (tm, push(tm, k + 1)?);
                stack.push((m, b));
                stack.push((a, m));
                if refined.len() + stack.len() > MAX_ARC_POINTS {
                    return Err(CircleError::InvalidInput(format!(
                        "arc image needs more than {MAX_ARC_POINTS} points"
                    )));
                }
            }
        }
        pts = refined;
        let mut hit = vec![false; grid];
        for p in &pts {
            hit[((p.1 / cell) as usize).min(grid - 1)] = true;
        }
        let frac = hit.iter().filter(|&&h| h).count() as f64 / grid as f64;
        if frac == 1.0 {
            first_full = Some(k + 1);
        }
        covered.push(frac);
    }
    Ok(SpreadReport {
        initial_arc: arc,
        iterations: n_max,
        covered_fraction: covered,
        first_full_cover: first_full,
        grid,
    })
}

fn angular_gap(a: f64, b: f64) -> f64 {
    let d = (b - a).rem_euclid(TAU);
    d.min(TAU - d)
}

fn require_origin(maps: &[CircleMap]) -> Result<(), CircleError> {
    match maps.iter().position(|m| !m.fixes_origin()) {
        Some(index) => Err(CircleError::OriginNotFixed { index }),
        None => Ok(()),
    }
}

/// `[G_0(θ0), G_1(θ0), …]` with `G_n = g_n ∘ … ∘ g_0`.
pub fn compose_sequence(maps: &[CircleMap], theta0: f64) -> Result<Vec<f64>, CircleError> {
    require_origin(maps)?;
    let mut t = reduce_angle(theta0);
    maps.iter()
        .enumerate()
        .map(|(k, g)| {
            t = g.apply(t).map_err(|e| at_step(e, k))?;
            Ok(t)
        })
        .collect()
}

/// `Σ (1 − |g_n′(0)|)`.
pub fn pommerenke_sum(maps: &[CircleMap]) -> Result<f64, CircleError> {
    require_origin(maps)?;
    Ok(maps
        .iter()
        .map(|m| 1.0 - m.derivative_at_zero_modulus().unwrap_or(1.0))
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub statistic: f64,
    pub critical_1pct: f64,
    pub n_used: usize,
    /// Samples skipped for lying in a singularity exclusion zone.
    pub n_excluded: usize,
}

/// KS distance between the uniform law and the image of `n` uniform angles
/// under one application of the map.
pub fn invariance_test(
    map: &CircleMap,
    n_samples: usize,
    seed: u64,
) -> Result<InvarianceReport, CircleError> {
    require_origin(std::slice::from_ref(map))?;
    if n_samples == 0 {
        return Err(CircleError::EmptyInput);
    }
    let blocks = n_samples.div_ceil(rng::BLOCK);
    let parts: Vec<Result<(Vec<f64>, usize), CircleError>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut r = rng::stream(seed, b as u64);
            let len = rng::BLOCK.min(n_samples - b * rng::BLOCK);
            let mut out = Vec::with_capacity(len);
            let mut skipped = 0;
            for _ in 0..len {
                let t: f64 = r.gen_range(0.0..TAU);
                match map.apply(t) {
                    Ok(x) => out.push(x),
                    Err(CircleError::SingularityApproach { .. }) => skipped += 1,
                    Err(e) => return Err(e),
                }
            }
            Ok((out, skipped))
        })
        .collect();
    let mut all = Vec::with_capacity(n_samples);
    let mut excluded = 0;
    for p in parts {
        let (v, s) = p?;
        all.extend(v);
        excluded += s;
    }
    Ok(InvarianceReport {
        statistic: stats::ks_angles(&all),
        critical_1pct: stats::ks_critical_1pct(all.len()),
        n_used: all.len(),
        n_excluded: excluded,
    })
}

/// Writes an orbit as `iteration,value`.
pub fn write_orbit_csv<W: Write>(mut out: W, orbit: &[f64]) -> io::Result<()> {
    writeln!(out, "iteration,value")?;
    for (k, t) in orbit.iter().enumerate() {
        writeln!(out, "{},{:.16e}", k + 1, t)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::{lift_map, CoveringModel};
    use std::f64::consts::{E, PI};

    fn hyperbolic() -> CircleMap {
        CircleMap::mobius(Mobius::disk_translation(0.4)).unwrap()
    }

    #[test]
    fn iterate_examples() {
        let th = 0.3;
        let o = iterate(&CircleMap::Rotation(th), 0.0, 3).unwrap();
        for (k, t) in o.iter().enumerate() {
            assert!((t - th * (k + 1) as f64).abs() < 1e-15);
        }
        let o = iterate(&CircleMap::Power(2), TAU / 3.0, 6).unwrap();
        for (k, t) in o.iter().enumerate() {
            let want = if k % 2 == 0 {
                2.0 * TAU / 3.0
            } else {
                TAU / 3.0
            };
            assert!((t - want).abs() < 1e-12, "{k}: {t}");
        }
    }

    #[test]
    fn power_two_iteration_is_exact() {
        for theta0 in [0.1, 1.0, 2.5, 6.0] {
            let o = iterate(&CircleMap::Power(2), theta0, 40).unwrap();
            for (k, t) in o.iter().enumerate() {
                let direct = (theta0 * 2f64.powi(k as i32 + 1)).rem_euclid(TAU);
                assert_eq!(*t, direct);
            }
        }
    }

    #[test]
    fn hyperbolic_mobius_converges_monotonically() {
        let g = hyperbolic();
        let o = iterate(&g, PI / 2.0, 60).unwrap();
        let dist: Vec<f64> = o.iter().map(|t| angular_gap(*t, 0.0)).collect();
        assert!(dist.windows(2).all(|w| w[1] < w[0] || w[0] < 1e-13));
        assert!(dist.last().unwrap() < &1e-9);
        // Multiplier at the attracting point is e^{−2·0.4} < 1.
        let Some(m) = (match &g {
            CircleMap::MobiusBoundary(m) => Some(*m),
            _ => None,
        }) else {
            unreachable!()
        };
        let d = m.derivative(Complex64::new(1.0, 0.0)).unwrap();
        assert!((d.re - (-0.8f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn mobius_must_preserve_circle() {
        let m = Mobius::new(
            Complex64::new(2.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        );
        assert!(CircleMap::mobius(m).is_err());
    }

    #[test]
    fn discrepancy_examples() {
        assert_eq!(discrepancy(&[0.0]).unwrap(), 1.0);
        let n = 100;
        let eq: Vec<f64> = (0..n).map(|k| TAU * k as f64 / n as f64).collect();
        assert!((discrepancy(&eq).unwrap() - 1.0 / n as f64).abs() < 1e-14);
        assert!(matches!(discrepancy(&[]), Err(CircleError::EmptyInput)));
        let golden = TAU * (5f64.sqrt() - 1.0) / 2.0;
        let o = iterate(&CircleMap::Rotation(golden), 0.0, 10_000).unwrap();
        let n = 1e4f64;
        assert!(discrepancy(&o).unwrap() < 10.0 * n.ln() / n);
        let d3 = discrepancy(&iterate(&CircleMap::Rotation(golden), 0.0, 1000).unwrap()).unwrap();
        let d5 =
            discrepancy(&iterate(&CircleMap::Rotation(golden), 0.0, 100_000).unwrap()).unwrap();
        assert!(d5 < 0.5 * d3);
    }

    #[test]
    fn spread_power_two_in_exactly_ten() {
        let arc = (0.3, TAU / 1024.0);
        let r = arc_spread(&CircleMap::Power(2), arc, 20, DEFAULT_SPREAD_GRID).unwrap();
        assert_eq!(r.first_full_cover, Some(10));
        assert!(r.covered_fraction[8] < 1.0);
        assert!(r.covered_fraction.windows(2).all(|w| w[1] >= w[0]));
        for (k, f) in r.covered_fraction.iter().take(9).enumerate() {
            let want = 2f64.powi(k as i32 + 1) / 1024.0;
            assert!((f - want).abs() <= 2.0 / DEFAULT_SPREAD_GRID as f64);
        }
    }

    #[test]
    fn spread_rotation_is_constant() {
        let arc = (1.0, TAU / 1024.0);
        let r = arc_spread(&CircleMap::Rotation(0.77), arc, 1000, DEFAULT_SPREAD_GRID).unwrap();
        assert!(r.first_full_cover.is_none());
        for f in &r.covered_fraction {
            assert!((f - 1.0 / 1024.0).abs() <= 2.0 / DEFAULT_SPREAD_GRID as f64);
        }
    }

    #[test]
    fn spread_hyperbolic_concentrates() {
        // Arc away from the repelling point −1.
        let arc = (0.5, 0.5);
        let r = arc_spread(&hyperbolic(), arc, 1000, DEFAULT_SPREAD_GRID).unwrap();
        assert!(r.first_full_cover.is_none());
        assert!(r.covered_fraction.windows(2).all(|w| w[1] <= w[0]));
        assert!(*r.covered_fraction.last().unwrap() <= 2.0 / DEFAULT_SPREAD_GRID as f64);
    }

    #[test]
    fn spread_validation() {
        assert!(arc_spread(&CircleMap::Power(2), (0.0, 0.0), 1, 1 << 14).is_err());
        assert!(arc_spread(&CircleMap::Power(2), (0.0, 0.1), 1, 512).is_err());
    }

    #[test]
    fn pommerenke_sums_and_spreading() {
        let rot = vec![CircleMap::Rotation(0.5); 10];
        assert_eq!(pommerenke_sum(&rot).unwrap(), 0.0);
        let pw = vec![CircleMap::Power(2); 12];
        assert_eq!(pommerenke_sum(&pw).unwrap(), 12.0);
        let arc = (0.3, TAU / 1024.0);
        assert!(arc_spread_sequence(&pw, arc, DEFAULT_SPREAD_GRID)
            .unwrap()
            .first_full_cover
            .is_some());

        let divergent: Vec<CircleMap> = (0..1000)
            .map(|_| CircleMap::pommerenke_factor(0.5).unwrap())
            .collect();
        let summable: Vec<CircleMap> = (1..=1000)
            .map(|n| CircleMap::pommerenke_factor(1.0 - 1.0 / ((n + 1) as f64).powi(2)).unwrap())
            .collect();
        assert!((pommerenke_sum(&divergent).unwrap() - 500.0).abs() < 1e-9);
        let s = pommerenke_sum(&summable).unwrap();
        assert!(s < PI * PI / 6.0 - 1.0 + 1e-9);
        // The summable factors expand hugely only in a window at z = 1 of
        // width ~1/n²; an arc starting away from it stays small.
        let arc = (2.0, TAU / 1024.0);
        let rd = arc_spread_sequence(&divergent, arc, DEFAULT_SPREAD_GRID).unwrap();
        assert!(rd.first_full_cover.is_some());
        let rs = arc_spread_sequence(&summable, arc, DEFAULT_SPREAD_GRID).unwrap();
        assert!(
            rs.first_full_cover.is_none(),
            "{:?}",
            rs.covered_fraction.last()
        );
    }

    #[test]
    fn origin_requirement() {
        let maps = vec![CircleMap::Rotation(0.1), hyperbolic()];
        assert!(matches!(
            compose_sequence(&maps, 0.0),
            Err(CircleError::OriginNotFixed { index: 1 })
        ));
        assert!(matches!(
            pommerenke_sum(&maps),
            Err(CircleError::OriginNotFixed { index: 1 })
        ));
        let maps = vec![
            CircleMap::Rotation(0.1),
            CircleMap::Power(3),
            CircleMap::Rotation(0.2),
        ];
        let o = compose_sequence(&maps, 0.5).unwrap();
        assert!((o[2] - reduce_angle(3.0 * 0.6 + 0.2)).abs() < 1e-14);
    }

    #[test]
    fn invariance_of_lebesgue_measure() {
        for m in [CircleMap::Rotation(1.234), CircleMap::Power(3)] {
            let r = invariance_test(&m, 100_000, 4).unwrap();
            assert!(r.statistic < r.critical_1pct, "{m:?}: {r:?}");
        }
        let b = Arc::new(BlaschkeProduct::from_alpha(0.4).unwrap());
        let r = invariance_test(&CircleMap::BlaschkeBoundary(b, 1e-12), 20_000, 4).unwrap();
        assert!(r.statistic < r.critical_1pct, "{r:?}");
        assert_eq!(r.n_used + r.n_excluded, 20_000);
        assert!(matches!(
            invariance_test(&hyperbolic(), 10, 1),
            Err(CircleError::OriginNotFixed { .. })
        ));
    }

    #[test]
    fn birkhoff_contrast() {
        let n = 10_000;
        // Doubling: typical orbits see the space average of cos, which is 0.
        let a = birkhoff_cos(&typical_power_orbit(2, n, 1));
        let b = birkhoff_cos(&typical_power_orbit(2, n, 2));
        let bound = 4.0 / (n as f64).sqrt();
        assert!(a.abs() < bound && b.abs() < bound && (a - b).abs() < bound);
        // The same orbits really are orbits of θ ↦ 2θ.
        let o = typical_power_orbit(2, 100, 3);
        for w in o.windows(2) {
            assert!(angular_gap(reduce_angle(2.0 * w[0]), w[1]) < 1e-12);
        }
        // Hyperbolic Möbius: every start off the repelling point ends at the
        // attracting point, so time averages are 1, not the space average 0.
        let g = hyperbolic();
        for theta0 in [0.1, PI / 2.0, PI - 0.1, PI + 0.1, 5.0] {
            let avg = birkhoff_cos(&iterate(&g, theta0, n).unwrap());
            assert!(avg > 0.5, "{theta0}: {avg}");
        }
        let fixed = birkhoff_cos(&iterate(&g, PI, n).unwrap());
        assert!(fixed < -0.99);
    }

    #[test]
    fn lifted_rotation_acts_as_hyperbolic_boundary_map() {
        let m = CoveringModel::annulus(E).unwrap();
        let g = lift_map(&m, &m, &MapSpec::rotation(0.9).unwrap()).unwrap();
        let cm = CircleMap::mobius(g.as_mobius().unwrap()).unwrap();
        let r = arc_spread(&cm, (1.0, TAU / 1024.0), 1000, DEFAULT_SPREAD_GRID).unwrap();
        assert!(r.first_full_cover.is_none());
    }

    #[test]
    fn orbit_csv() {
        let mut buf = Vec::new();
        write_orbit_csv(&mut buf, &[0.5, 1.0]).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().next(), Some("iteration,value"));
        assert_eq!(s.lines().count(), 3);
    }
}
