//! Closed-form universal coverings of model domains.
//!
//! * `Annulus(1/R, R)`: `π(z) = exp(i·c·artanh z)` with `c = 4 ln R / π`. The
//!   strip `|Im artanh z| < π/4` is sent onto the annulus, the real diameter
//!   onto the core circle `|w| = 1`, and the deck group is generated by the
//!   hyperbolic translation `artanh z ↦ artanh z + 2π/c`, fixing `±1`.
//! * `PuncturedDisk`: `π(z) = exp((1 + z)/(z − 1))`, deck group generated by a
//!   parabolic map fixing `1`; the radius to `1` runs into the puncture.
//! * `Disk`: the identity.
//!
//! General annuli `A(r_in, r_out)` are rescaled to the self-dual form first;
//! the rescaling factor `√(r_in·r_out)` is applied on the way out.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::histogram::ArcHistogram;
use crate::map_zoo::{MapKind, MapSpec};
use crate::mobius::Mobius;
use crate::rng;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoveringError {
    #[error("point {0} is not inside the unit disk")]
    OutsideDisk(Complex64),
    #[error("invalid covering model: {0}")]
    InvalidModel(String),
    #[error("unsupported lift: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "domain", rename_all = "snake_case")]
pub enum ModelDomain {
    Annulus { r_in: f64, r_out: f64 },
    PuncturedDisk,
    Disk,
}

/// JSON selection of a model, e.g. `{"domain":"annulus","R":2.718}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "domain", rename_all = "snake_case")]
pub enum ModelConfig {
    Annulus {
        #[serde(rename = "R")]
        r: f64,
    },
    PuncturedDisk,
    Disk,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoveringModel {
    domain: ModelDomain,
    /// `c = 4 ln R / π` for the canonical annulus, unused otherwise.
    scale: f64,
    /// Rescaling from the self-dual annulus to the requested one.
    dilation: f64,
    limit_set: Vec<Complex64>,
    deck: Mobius,
    /// `1 − tanh T` for the annulus deck translation by `T`, kept separately
    /// because `tanh T` itself rounds to within a few ulps of 1.
    deck_gap: f64,
}

/// Component ids: annulus 0 = inner circle, 1 = outer circle; punctured disk
/// 0 = puncture, 1 = unit circle; disk 0 = unit circle.
pub type ComponentId = u32;

impl CoveringModel {
    /// The self-dual annulus `A(1/R, R)`.
    pub fn annulus(r: f64) -> Result<Self, CoveringError> {
        if !(r.is_finite() && r > 1.0) {
            return Err(CoveringError::InvalidModel(format!(
                "annulus modulus R = {r} must be finite and > 1"
            )));
        }
        CoveringModel::annulus_general(1.0 / r, r)
    }

    pub fn annulus_general(r_in: f64, r_out: f64) -> Result<Self, CoveringError> {
        if !(r_in.is_finite() && r_out.is_finite() && 0.0 < r_in && r_in < r_out) {
            return Err(CoveringError::InvalidModel(format!(
                "annulus radii must satisfy 0 < r_in < r_out (got {r_in}, {r_out})"
            )));
        }
        let big_r = (r_out / r_in).sqrt();
        let scale = 4.0 * big_r.ln() / PI;
        Ok(CoveringModel {
            domain: ModelDomain::Annulus { r_in, r_out },
            scale,
            dilation: (r_in * r_out).sqrt(),
            limit_set: vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
            deck: Mobius::disk_translation(TAU / scale),
            deck_gap: 2.0 / ((2.0 * TAU / scale).exp() + 1.0),
        })
    }

    pub fn punctured_disk() -> Self {
        // z ↦ w = i(1 + z)/(1 − z) ∈ ℍ, translate by 2π, map back.
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        let to_h = Mobius::new(i, i, -one, one);
        let from_h = Mobius::new(one, -i, one, i);
        let shift = Mobius::new(one, Complex64::new(TAU, 0.0), Complex64::new(0.0, 0.0), one);
        CoveringModel {
            domain: ModelDomain::PuncturedDisk,
            scale: 0.0,
            dilation: 1.0,
            limit_set: vec![one],
            deck: from_h.compose(&shift).compose(&to_h).normalized(),
            deck_gap: 0.0,
        }
    }

    pub fn disk() -> Self {
        CoveringModel {
            domain: ModelDomain::Disk,
            scale: 0.0,
            dilation: 1.0,
            limit_set: Vec::new(),
            deck: Mobius::identity(),
            deck_gap: 0.0,
        }
    }

    pub fn from_config(cfg: &ModelConfig) -> Result<Self, CoveringError> {
        match cfg {
            ModelConfig::Annulus { r } => CoveringModel::annulus(*r),
            ModelConfig::PuncturedDisk => Ok(CoveringModel::punctured_disk()),
            ModelConfig::Disk => Ok(CoveringModel::disk()),
        }
    }

    pub fn domain(&self) -> ModelDomain {
        self.domain
    }

    /// `R` of the self-dual form, for annuli.
    pub fn modulus_r(&self) -> Option<f64> {
        match self.domain {
            ModelDomain::Annulus { r_in, r_out } => Some((r_out / r_in).sqrt()),
            _ => None,
        }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn limit_set(&self) -> &[Complex64] {
        &self.limit_set
    }

    pub fn deck_generator(&self) -> Mobius {
        self.deck
    }

    pub fn n_components(&self) -> usize {
        match self.domain {
            ModelDomain::Annulus { .. } | ModelDomain::PuncturedDisk => 2,
            ModelDomain::Disk => 1,
        }
    }

    fn check_inside(z: Complex64) -> Result<(), CoveringError> {
        if z.re.is_finite() && z.im.is_finite() && z.norm() < 1.0 {
            Ok(())
        } else {
            Err(CoveringError::OutsideDisk(z))
        }
    }

    /// `π(z)` for `|z| < 1`.
    pub fn cover_eval(&self, z: Complex64) -> Result<Complex64, CoveringError> {
        Self::check_inside(z)?;
        Ok(match self.domain {
            ModelDomain::Annulus { .. } => {
                self.dilation * (Complex64::i() * self.scale * z.atanh()).exp()
            }
            ModelDomain::PuncturedDisk => ((1.0 + z) / (z - 1.0)).exp(),
            ModelDomain::Disk => z,
        })
    }

    pub fn deck_apply(&self, z: Complex64) -> Result<Complex64, CoveringError> {
        Self::check_inside(z)?;
        if let ModelDomain::Annulus { .. } = self.domain {
            // With t = 1 − s: 1 − g(z) = s(1 − z)/den and 1 + g(z) = (2 − s)(1 + z)/den,
            // den = 1 + z − s·z. Offsetting from the nearer fixed point rounds
            // g(z) once where π is ill-conditioned.
            let s = self.deck_gap;
            let den = (1.0 + z) - s * z;
            let from_plus = s * (1.0 - z) / den;
            return Ok(if from_plus.re <= 1.0 {
                1.0 - from_plus
            } else {
                (2.0 - s) * (1.0 + z) / den - 1.0
            });
        }
        self.deck.apply(z).ok_or(CoveringError::OutsideDisk(z))
    }

    /// Distance from `w` to the boundary of the model domain, with the id of
    /// the nearest boundary component.
    pub fn boundary_distance(&self, w: Complex64) -> (f64, ComponentId) {
        let r = w.norm();
        match self.domain {
            ModelDomain::Annulus { r_in, r_out } => {
                let (di, dout) = (r - r_in, r_out - r);
                if di <= dout {
                    (di, 0)
                } else {
                    (dout, 1)
                }
            }
            ModelDomain::PuncturedDisk => {
                if r <= 1.0 - r {
                    (r, 0)
                } else {
                    (1.0 - r, 1)
                }
            }
            ModelDomain::Disk => (1.0 - r, 0),
        }
    }

    /// Closed-form radial limit `π*(ξ)` and the component it lies on, or
    /// `None` on the limit set (where the radius stays inside the annulus or
    /// the limit does not exist).
    pub fn radial_limit(&self, xi: Complex64) -> Option<(Complex64, ComponentId)> {
        match self.domain {
            ModelDomain::Annulus { .. } => {
                let phi = xi.arg();
                let s = xi.im;
                if s == 0.0 {
                    return None;
                }
                // artanh(e^{iφ}) = ½ ln|cot(φ/2)| ± iπ/4.
                let u = 0.5 * (phi / 2.0).tan().recip().abs().ln();
                let theta = self.scale * u;
                let r = self.modulus_r().unwrap_or(1.0);
                if s > 0.0 {
                    Some((self.dilation * Complex64::from_polar(1.0 / r, theta), 0))
                } else {
                    Some((self.dilation * Complex64::from_polar(r, theta), 1))
                }
            }
            ModelDomain::PuncturedDisk => {
                if (xi - 1.0).norm() == 0.0 {
                    return Some((Complex64::new(0.0, 0.0), 0));
                }
                let w = Complex64::i() * (1.0 + xi) / (1.0 - xi);
                Some((Complex64::from_polar(1.0, w.re), 1))
            }
            ModelDomain::Disk => Some((xi / xi.norm(), 0)),
        }
    }

    /// Push-forward of normalised arc length on `∂𝔻` under the radial
    /// extension: the harmonic measure of the model domain seen from `π(0)`.
    pub fn pushforward_measure(
        &self,
        n_samples: usize,
        n_bins: usize,
        seed: u64,
    ) -> Result<Pushforward, CoveringError> {
        if n_samples == 0 || n_bins == 0 {
            return Err(CoveringError::InvalidInput(
                "n_samples and n_bins must be at least 1".into(),
            ));
        }
        let n_comp = self.n_components();
        let blocks = n_samples.div_ceil(rng::BLOCK);
        let empty = || {
            (0..n_comp)
                .map(|c| ArcHistogram::new(c as u32, n_bins))
                .collect::<Vec<_>>()
        };
        let mut hists = (0..blocks)
            .into_par_iter()
            .map(|b| {
                let mut h = empty();
                let mut rng = rng::stream(seed, b as u64);
                let len = rng::BLOCK.min(n_samples - b * rng::BLOCK);
                for _ in 0..len {
                    loop {
                        let phi: f64 = rng.gen_range(0.0..TAU);
                        if let Some((w, comp)) = self.radial_limit(Complex64::from_polar(1.0, phi))
                        {
                            h[comp as usize].record(w.arg());
                            break;
                        }
                    }
                }
                h
            })
            .reduce(empty, |mut a, b| {
                for (x, y) in a.iter_mut().zip(&b) {
                    x.merge(y);
                }
                a
            });
        for h in hists.iter_mut() {
            h.total = n_samples as u64;
        }
        let masses = hists.iter().map(|h| h.component_mass()).collect();
        Ok(Pushforward {
            histograms: hists,
            masses,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pushforward {
    pub histograms: Vec<ArcHistogram>,
    /// Mass carried by each boundary component.
    pub masses: Vec<f64>,
}

/// Harmonic measure of the outer circle of `A(1/R, R)` seen from `|z0| = ρ`:
/// `ln(ρR) / ln(R²)`.
pub fn annulus_outer_mass(r: f64, rho: f64) -> f64 {
    (rho * r).ln() / (r * r).ln()
}

/// Exact per-bin harmonic measure of `A(1/R, R)` seen from the positive real
/// point `ρ`, as `[inner, outer]` bin probabilities over `n_bins` equal arcs.
///
/// `ρ = π(iy)` with `y = tan(−ln ρ / c)`; the Poisson measure from `iy` of
/// each circle arc is pulled back through the radial extension, which wraps
/// the line `u = Re artanh ξ` around each boundary circle with period `2π/c`.
pub fn annulus_arc_law(r: f64, rho: f64, n_bins: usize) -> [Vec<f64>; 2] {
    let c = 4.0 * r.ln() / PI;
    let y = (-(rho.ln()) / c).tan();
    let z0 = Complex64::new(0.0, y);
    // ψ(φ): continuous argument of the disk automorphism moving z0 to 0,
    // so harmonic measure of (φ1, φ2) is (ψ(φ2) − ψ(φ1)) / 2π.
    let psi = |phi: f64| phi + 2.0 * (1.0 - z0 * Complex64::from_polar(1.0, -phi)).arg();
    // Upper semicircle: u = ½ ln cot(φ/2) ⇔ φ = 2 atan(e^{−2u}); lower: φ = −2 atan(e^{−2u}).
    let mass_u = |u_lo: f64, u_hi: f64, upper: bool| -> f64 {
        let p_lo = 2.0 * (-2.0 * u_lo).exp().atan();
        let p_hi = 2.0 * (-2.0 * u_hi).exp().atan();
        if upper {
            (psi(p_lo) - psi(p_hi)) / TAU
        } else {
            (psi(-p_hi) - psi(-p_lo)) / TAU
        }
    };
    let period = TAU / c;
    let width = TAU / n_bins as f64;
    let mut out = [vec![0.0; n_bins], vec![0.0; n_bins]];
    for (comp, upper) in [(0usize, true), (1usize, false)] {
        for (k, slot) in out[comp].iter_mut().enumerate() {
            let (a, b) = (k as f64 * width / c, (k + 1) as f64 * width / c);
            let mut total = mass_u(a, b, upper);
            for dir in [1.0, -1.0] {
                let mut j = 1.0;
                loop {
                    let m = mass_u(a + dir * j * period, b + dir * j * period, upper);
                    total += m;
                    if m.abs() < 1e-18 || j > 1e6 {
                        break;
                    }
                    j += 1.0;
                }
            }
            *slot = total;
        }
    }
    out
}

/// Thresholds of the radial classifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialThresholds {
    pub eps_escape: f64,
    pub delta_bounded: f64,
    /// Number of dyadic samples `t_k = 1 − 2^{−k}`, `k = 1..=samples`.
    pub samples: usize,
    /// First `k` of the window on which escape is asserted.
    pub escape_from: usize,
    /// First `k` of the window on which oscillation is counted.
    pub oscillation_from: usize,
    /// Threshold crossings required for a bungee verdict.
    pub min_crossings: usize,
}

impl Default for RadialThresholds {
    fn default() -> Self {
        RadialThresholds {
            eps_escape: 1e-6,
            delta_bounded: 1e-3,
            samples: 40,
            escape_from: 30,
            oscillation_from: 20,
            min_crossings: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Escaping,
    Bounded,
    Bungee,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialClass {
    pub verdict: Verdict,
    pub min_boundary_distance: f64,
    pub last_boundary_distance: f64,
    pub samples_used: usize,
    pub thresholds: RadialThresholds,
    /// `d_k` for `k = 1..=samples_used`.
    pub distances: Vec<f64>,
}

/// Verdict for a sequence of boundary distances `d_1, d_2, …`.
pub fn classify_distances(d: &[f64], th: &RadialThresholds) -> RadialClass {
    let min = d.iter().copied().fold(f64::INFINITY, f64::min);
    let last = d.last().copied().unwrap_or(f64::NAN);
    let window = |from: usize| &d[from.saturating_sub(1).min(d.len())..];
    let escape_tail = window(th.escape_from);
    let escaping = !escape_tail.is_empty()
        && escape_tail.iter().all(|&x| x < th.eps_escape)
        && escape_tail.windows(2).all(|w| w[1] <= w[0] + 1e-15);
    let verdict = if escaping {
        Verdict::Escaping
    } else if min > th.delta_bounded {
        Verdict::Bounded
    } else {
        // Crossings between the "near boundary" and "deep inside" states,
        // ignoring visits to the band between the thresholds.
        let mut state: Option<bool> = None;
        let mut crossings = 0;
        for &x in window(th.oscillation_from) {
            let s = if x < th.eps_escape {
                Some(true)
            } else if x > th.delta_bounded {
                Some(false)
            } else {
                None
            };
            if let Some(s) = s {
                if state.is_some_and(|p| p != s) {
                    crossings += 1;
                }
                state = Some(s);
            }
        }
        if crossings >= th.min_crossings {
            Verdict::Bungee
        } else {
            Verdict::Undetermined
        }
    };
    RadialClass {
        verdict,
        min_boundary_distance: min,
        last_boundary_distance: last,
        samples_used: d.len(),
        thresholds: *th,
        distances: d.to_vec(),
    }
}

/// Classifies the boundary point `ξ` by following `π(t_k ξ)` along the
/// dyadic schedule `t_k = 1 − 2^{−k}`.
pub fn radial_classify(
    model: &CoveringModel,
    xi: Complex64,
    th: &RadialThresholds,
) -> Result<RadialClass, CoveringError> {
    if !((xi.norm() - 1.0).abs() < 1e-12) {
        return Err(CoveringError::InvalidInput(format!(
            "ξ = {xi} is not on the unit circle"
        )));
    }
    if th.samples == 0 {
        return Err(CoveringError::InvalidInput(
            "at least one radial sample is required".into(),
        ));
    }
    let xi = xi / xi.norm();
    let mut d = Vec::with_capacity(th.samples);
    for k in 1..=th.samples {
        let t = 1.0 - (-(k as f64)).exp2();
        let w = model.cover_eval(t * xi)?;
        d.push(model.boundary_distance(w).0);
    }
    Ok(classify_distances(&d, th))
}

/// Inner function of a supported model map, as a map of the disk.
///
/// * a rotation of an annulus lifts to the hyperbolic disk automorphism
///   `z ↦ tanh(artanh z + θ/c)`, fixing `±1`;
/// * `z ↦ z^d` from `A(1/R, R)` to `A(1/R^d, R^d)` lifts to the identity.
pub fn lift_map(
    src: &CoveringModel,
    dst: &CoveringModel,
    map: &MapSpec,
) -> Result<MapSpec, CoveringError> {
    let into =
        |m: Mobius| MapSpec::mobius(m).map_err(|e| CoveringError::Unsupported(e.to_string()));
    match (src.domain, dst.domain, map.kind()) {
        (
            ModelDomain::Annulus {
                r_in: a0,
                r_out: a1,
            },
            ModelDomain::Annulus {
                r_in: b0,
                r_out: b1,
            },
            MapKind::Rotation { theta },
        ) => {
            if !(close(a0, b0) && close(a1, b1)) {
                return Err(CoveringError::Unsupported(
                    "a rotation lifts only from an annulus to itself".into(),
                ));
            }
            into(Mobius::disk_translation(theta / src.scale))
        }
        (
            ModelDomain::Annulus {
                r_in: a0,
                r_out: a1,
            },
            ModelDomain::Annulus {
                r_in: b0,
                r_out: b1,
            },
            MapKind::PowerMap { degree },
        ) => {
            let d = *degree as i32;
            if !(close(a0.powi(d), b0) && close(a1.powi(d), b1)) {
                return Err(CoveringError::Unsupported(format!(
                    "z^{d} maps A({a0}, {a1}) onto A({}, {}), not A({b0}, {b1})",
                    a0.powi(d),
                    a1.powi(d)
                )));
            }
            into(Mobius::identity())
        }
        _ => Err(CoveringError::Unsupported(format!(
            "no closed-form lift for {:?} between {:?} and {:?}",
            map.kind(),
            src.domain,
            dst.domain
        ))),
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobius::MobiusClass;
    use crate::stats::{chi_square, chi_square_quantile};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::E;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_disk_points(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let z = c(rng.gen_range(-0.95..0.95), rng.gen_range(-0.95..0.95));
            if z.norm() < 0.95 {
                out.push(z);
            }
        }
        out
    }

    #[test]
    fn annulus_cover_examples() {
        let m = CoveringModel::annulus(E).unwrap();
        assert_eq!(m.cover_eval(c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        for t in [-0.99, -0.5, 0.0, 0.3, 0.999] {
            assert!((m.cover_eval(c(t, 0.0)).unwrap().norm() - 1.0).abs() < 1e-15);
        }
        // Independent composition: artanh(z) = ½ ln((1+z)/(1−z)).
        let z = c(0.0, 0.5);
        let strip = 0.5 * ((1.0 + z) / (1.0 - z)).ln();
        let want = (Complex64::i() * (4.0 / PI) * strip).exp();
        let got = m.cover_eval(z).unwrap();
        assert!((got - want).norm() < 1e-15);
        assert!((got.norm() - (-(4.0 / PI) * 0.5f64.atan()).exp()).abs() < 1e-15);
        assert!(matches!(
            m.cover_eval(c(1.0, 0.0)),
            Err(CoveringError::OutsideDisk(_))
        ));
    }

    #[test]
    fn annulus_image_stays_inside() {
        let r = 3.0;
        let m = CoveringModel::annulus(r).unwrap();
        for z in random_disk_points(500, 1) {
            let w = m.cover_eval(z).unwrap();
            assert!(w.norm() > 1.0 / r && w.norm() < r);
        }
    }

    #[test]
    fn general_annulus_is_rescaled() {
        let m = CoveringModel::annulus_general(2.0, 8.0).unwrap();
        assert_eq!(m.modulus_r(), Some(2.0));
        assert!((m.cover_eval(c(0.0, 0.0)).unwrap() - c(4.0, 0.0)).norm() < 1e-15);
        assert!(CoveringModel::annulus_general(2.0, 1.0).is_err());
        assert!(CoveringModel::annulus(1.0).is_err());
    }

    #[test]
    fn deck_examples() {
        for r in [1.5, E, 10.0] {
            let m = CoveringModel::annulus(r).unwrap();
            let g = m.deck_generator();
            for p in [c(1.0, 0.0), c(-1.0, 0.0)] {
                assert!((g.apply(p).unwrap() - p).norm() < 1e-15);
            }
            // Rounding g(0) costs ε/(1 − |g(0)|²) in the strip coordinate.
            let z = m.deck_apply(c(0.0, 0.0)).unwrap();
            let cond = f64::EPSILON / (1.0 - z.norm_sqr());
            let tol = 1e-12f64.max(4.0 * cond * m.scale());
            assert!((z.atanh().re * m.scale() - TAU).abs() < tol);
            let z0 = c(0.3, 0.2);
            let g0 = m.deck_apply(z0).unwrap();
            let lhs = m.cover_eval(g0).unwrap();
            let cond = lhs.norm() * m.scale() / (1.0 - g0 * g0).norm();
            let tol = 1e-12f64.max(8.0 * f64::EPSILON * cond);
            assert!((lhs - m.cover_eval(z0).unwrap()).norm() < tol);
            if r >= E {
                assert!((lhs - m.cover_eval(z0).unwrap()).norm() < 1e-12);
            }
            assert_eq!(g.classify(1e-12), MobiusClass::Hyperbolic);
        }
    }

    /// Points `tanh(x + iy)` of the strip fundamental domain `x ∈ [−T, 0]`,
    /// so that neither `z` nor its deck image lies beyond `g(0)`.
    fn fundamental_domain_points(m: &CoveringModel, n: usize, seed: u64) -> Vec<Complex64> {
        let t = TAU / m.scale();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let x = rng.gen_range(-t..=0.0);
                let y = rng.gen_range(-0.95..0.95) * PI / 4.0;
                c(x, y).tanh()
            })
            .collect()
    }

    #[test]
    fn covering_relation_on_fundamental_domain() {
        for r in [E, 10.0] {
            let m = CoveringModel::annulus(r).unwrap();
            for z in fundamental_domain_points(&m, 1000, 2) {
                let gz = m.deck_apply(z).unwrap();
                let err = (m.cover_eval(gz).unwrap() - m.cover_eval(z).unwrap()).norm();
                assert!(err < 1e-12, "R = {r} at {z}: {err}");
            }
        }
        for m in [CoveringModel::punctured_disk(), CoveringModel::disk()] {
            for z in random_disk_points(1000, 2) {
                let gz = m.deck_apply(z).unwrap();
                let err = (m.cover_eval(gz).unwrap() - m.cover_eval(z).unwrap()).norm();
                assert!(err < 1e-12, "{:?} at {z}: {err}", m.domain());
            }
        }
    }

    #[test]
    fn covering_relation_anywhere_is_rounding_limited() {
        // Far from the fundamental domain the deck image crowds ±1 and the
        // residual is set by one rounding of g(z) amplified by π′.
        for r in [1.5, 2.0, E] {
            let m = CoveringModel::annulus(r).unwrap();
            for z in random_disk_points(1000, 3) {
                let gz = m.deck_apply(z).unwrap();
                let w = m.cover_eval(gz).unwrap();
                let cond = w.norm() * m.scale() * gz.norm() / (1.0 - gz * gz).norm();
                let tol = 1e-12f64.max(8.0 * f64::EPSILON * cond);
                let err = (w - m.cover_eval(z).unwrap()).norm();
                assert!(err < tol, "R = {r} at {z}: {err} > {tol}");
            }
        }
    }

    #[test]
    fn punctured_disk_deck_is_parabolic() {
        let m = CoveringModel::punctured_disk();
        assert_eq!(m.deck_generator().classify(1e-9), MobiusClass::Parabolic);
        let fps = m.deck_generator().fixed_points();
        assert_eq!(fps.len(), 1);
        assert!((fps[0] - c(1.0, 0.0)).norm() < 1e-7);
        assert_eq!(m.limit_set(), &[c(1.0, 0.0)]);
        assert!(CoveringModel::disk().limit_set().is_empty());
    }

    #[test]
    fn limit_set_of_annulus() {
        let m = CoveringModel::annulus(E).unwrap();
        assert_eq!(m.limit_set(), &[c(1.0, 0.0), c(-1.0, 0.0)]);
        assert!(m.radial_limit(c(1.0, 0.0)).is_none());
        assert!(m.radial_limit(c(-1.0, 0.0)).is_none());
    }

    #[test]
    fn radial_limit_matches_interior_limit() {
        let m = CoveringModel::annulus(E).unwrap();
        for phi in [0.3, 1.0, 2.5, -0.4, -2.9] {
            let xi = Complex64::from_polar(1.0, phi);
            let (w, comp) = m.radial_limit(xi).unwrap();
            let near = m.cover_eval((1.0 - 1e-10) * xi).unwrap();
            assert!((w - near).norm() < 1e-8, "φ = {phi}: {w} vs {near}");
            assert_eq!(comp, if phi > 0.0 { 0 } else { 1 });
        }
    }

    #[test]
    fn radial_classification_examples() {
        let th = RadialThresholds::default();
        let m = CoveringModel::annulus(E).unwrap();
        for xi in [c(1.0, 0.0), c(-1.0, 0.0)] {
            let rc = radial_classify(&m, xi, &th).unwrap();
            assert_eq!(rc.verdict, Verdict::Bounded);
            for d in &rc.distances {
                assert!((d - (1.0 - 1.0 / E)).abs() < 1e-14);
            }
        }
        let rc = radial_classify(&m, c(0.0, 1.0), &th).unwrap();
        assert_eq!(rc.verdict, Verdict::Escaping);
        assert!(rc.last_boundary_distance < th.eps_escape);
        let disk = CoveringModel::disk();
        for phi in [0.0, 1.0, 3.0] {
            let rc = radial_classify(&disk, Complex64::from_polar(1.0, phi), &th).unwrap();
            assert_eq!(rc.verdict, Verdict::Escaping);
        }
        assert!(radial_classify(&m, c(0.5, 0.0), &th).is_err());
    }

    #[test]
    fn escaping_distances_match_closed_form() {
        // ξ = i: π(ti) = exp(−c·atan t), distance to the inner circle.
        let m = CoveringModel::annulus(E).unwrap();
        let rc = radial_classify(&m, c(0.0, 1.0), &RadialThresholds::default()).unwrap();
        for (k, d) in rc.distances.iter().enumerate() {
            let t = 1.0 - 2f64.powi(-(k as i32 + 1));
            let want = (-m.scale() * t.atan()).exp() - 1.0 / E;
            assert!((d - want).abs() < 1e-15 + 1e-12 * want);
        }
    }

    #[test]
    fn synthetic_bungee_and_undetermined() {
        let th = RadialThresholds::default();
        let mut d: Vec<f64> = vec![0.5; 40];
        for (k, x) in d.iter_mut().enumerate().skip(19) {
            *x = if (k / 3) % 2 == 0 { 1e-8 } else { 0.4 };
        }
        assert_eq!(classify_distances(&d, &th).verdict, Verdict::Bungee);
        // A single dip below ε is transient, not bungee.
        let mut d = vec![0.5; 40];
        d[25] = 1e-8;
        assert_eq!(classify_distances(&d, &th).verdict, Verdict::Undetermined);
        // Slowly decaying but above ε at the end.
        let d: Vec<f64> = (1..=40).map(|k| 1e-4 / k as f64).collect();
        assert_eq!(classify_distances(&d, &th).verdict, Verdict::Undetermined);
    }

    #[test]
    fn lift_rotation_is_hyperbolic_and_commutes() {
        let src = CoveringModel::annulus(E).unwrap();
        let theta = 0.9;
        let rot = MapSpec::rotation(theta).unwrap();
        let g = lift_map(&src, &src, &rot).unwrap();
        let gm = g.as_mobius().unwrap();
        assert_eq!(gm.classify(1e-12), MobiusClass::Hyperbolic);
        let fps = gm.boundary_fixed_points(1e-12);
        assert_eq!(fps.len(), 2);
        for p in fps {
            let d = gm.derivative(p).unwrap();
            assert!(d.im.abs() < 1e-14 && (d.re - 1.0).abs() > 1e-3);
        }
        // Hyperbolic translation length 2·θ/c.
        let shift = gm.apply(c(0.0, 0.0)).unwrap().atanh().re;
        assert!((2.0 * shift - 2.0 * theta * PI / (4.0 * E.ln())).abs() < 1e-14);
        for z in random_disk_points(1000, 3) {
            let lhs = src.cover_eval(g.eval(z).unwrap()).unwrap();
            let rhs = rot.eval(src.cover_eval(z).unwrap()).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
        }
        let id = lift_map(&src, &src, &MapSpec::rotation(0.0).unwrap()).unwrap();
        assert_eq!(
            id.as_mobius().unwrap().classify(1e-15),
            MobiusClass::Identity
        );
    }

    #[test]
    fn lift_power_chain_is_identity() {
        let r = 1.7;
        let src = CoveringModel::annulus(r).unwrap();
        let dst = CoveringModel::annulus(r * r).unwrap();
        let p = MapSpec::power(2).unwrap();
        let g = lift_map(&src, &dst, &p).unwrap();
        assert_eq!(g.as_mobius().unwrap(), Mobius::identity());
        for z in random_disk_points(1000, 4) {
            let lhs = dst.cover_eval(g.eval(z).unwrap()).unwrap();
            let rhs = p.eval(src.cover_eval(z).unwrap()).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
        }
        assert!(matches!(
            lift_map(&src, &src, &p),
            Err(CoveringError::Unsupported(_))
        ));
        assert!(matches!(
            lift_map(&src, &dst, &MapSpec::exp_baker(0.4).unwrap()),
            Err(CoveringError::Unsupported(_))
        ));
    }

    #[test]
    fn pushforward_totals_and_split() {
        let m = CoveringModel::annulus(E).unwrap();
        let n = 200_000;
        let p = m.pushforward_measure(n, 32, 5).unwrap();
        let total: u64 = p.histograms.iter().map(|h| h.hits()).sum();
        assert_eq!(total, n as u64);
        let sd = (0.25 / n as f64).sqrt();
        assert!((p.masses[0] - 0.5).abs() < 3.0 * sd);
        assert!((p.masses[0] + p.masses[1] - 1.0).abs() < 1e-15);
        let again = m.pushforward_measure(n, 32, 5).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn pushforward_disk_is_uniform() {
        let m = CoveringModel::disk();
        let n = 100_000;
        let p = m.pushforward_measure(n, 64, 6).unwrap();
        assert_eq!(p.histograms.len(), 1);
        assert_eq!(p.histograms[0].hits(), n as u64);
        let stat = chi_square(&p.histograms[0].counts, &vec![1.0 / 64.0; 64]);
        assert!(stat < chi_square_quantile(63, 2.3263), "χ² = {stat}");
    }

    #[test]
    fn pushforward_follows_closed_form_arc_law() {
        let r = E;
        let m = CoveringModel::annulus(r).unwrap();
        let n = 400_000;
        let bins = 32;
        let p = m.pushforward_measure(n, bins, 8).unwrap();
        let law = annulus_arc_law(r, 1.0, bins);
        let mut counts = Vec::new();
        let mut probs = Vec::new();
        for (h, l) in p.histograms.iter().zip(&law) {
            counts.extend_from_slice(&h.counts);
            probs.extend_from_slice(l);
        }
        let stat = chi_square(&counts, &probs);
        assert!(
            stat < chi_square_quantile(2 * bins - 1, 2.3263),
            "χ² = {stat}"
        );
        // The law is far from uniform in angle when seen from the core circle.
        assert!(law[1][0] > 3.0 * law[1][bins / 2]);
    }

    #[test]
    fn arc_law_against_poisson_quadrature() {
        // Independent route: integrate the Poisson kernel at iy over the
        // upper semicircle and bin the radial-limit angle directly.
        let r = 2.0;
        let rho = 0.8;
        let bins = 16;
        let law = annulus_arc_law(r, rho, bins);
        let cc = 4.0 * r.ln() / PI;
        let y = (-rho.ln() / cc).tan();
        let mut quad = [vec![0.0; bins], vec![0.0; bins]];
        let n = 2_000_000;
        for j in 0..n {
            let phi = -PI + TAU * (j as f64 + 0.5) / n as f64;
            let xi = Complex64::from_polar(1.0, phi);
            let z0 = c(0.0, y);
            let kernel = (1.0 - y * y) / (xi - z0).norm_sqr() / n as f64;
            let u = 0.5 * (phi / 2.0).tan().recip().abs().ln();
            let ang = crate::stats::reduce_angle(cc * u);
            let k = ((ang / TAU * bins as f64) as usize).min(bins - 1);
            quad[if phi > 0.0 { 0 } else { 1 }][k] += kernel;
        }
        for comp in 0..2 {
            for k in 0..bins {
                assert!(
                    (law[comp][k] - quad[comp][k]).abs() < 2e-5,
                    "comp {comp} bin {k}: {} vs {}",
                    law[comp][k],
                    quad[comp][k]
                );
            }
        }
        let outer: f64 = law[1].iter().sum();
        assert!((outer - annulus_outer_mass(r, rho)).abs() < 1e-12);
    }

    #[test]
    fn json_selection() {
        let cfg: ModelConfig = serde_json::from_str(r#"{"domain":"annulus","R":2.5}"#).unwrap();
        let m = CoveringModel::from_config(&cfg).unwrap();
        assert_eq!(m.modulus_r(), Some(2.5));
        let cfg: ModelConfig = serde_json::from_str(r#"{"domain":"disk"}"#).unwrap();
        assert_eq!(
            CoveringModel::from_config(&cfg).unwrap().domain(),
            ModelDomain::Disk
        );
    }
}
