//! Harmonic measure by Walk-on-Spheres.
//!
//! A walk started at the base point jumps to a uniform point on the largest
//! circle around its current position that avoids the boundary, and stops
//! once it is within `epsilon_shell` of the boundary. The exit point is
//! attributed to the nearest boundary component and binned by its angle
//! around that component's centre.

use std::f64::consts::TAU;
use std::io::{self, Write};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::covering::{CoveringModel, ModelDomain, Pushforward};
use crate::histogram::{self, ArcHistogram};
use crate::rng;

pub const DEFAULT_STEP_CAP: u64 = 100_000;
/// Stalled fraction at which a run is rejected.
pub const MAX_STALL_RATE: f64 = 1e-3;
/// `C` in the cross-validation threshold `C / √walks`.
pub const CROSS_VALIDATION_C: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarmonicError {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("base point {base} is not in the interior (distance {distance:e})")]
    BasePointOnBoundary { base: Complex64, distance: f64 },
    #[error("{stalled} of {walks} walks hit the step cap")]
    StallRateExceeded { stalled: u64, walks: u64 },
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bubble {
    pub center: Complex64,
    pub radius: f64,
}

/// Domains with a closed-form distance to the boundary.
///
/// Component ids: annulus 0 = inner, 1 = outer; champagne disk 0 = unit
/// circle, `k + 1` = bubble `k`; disk minus disk 0 = unit circle, 1 = the
/// removed disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainOracle {
    Annulus { r_in: f64, r_out: f64 },
    ChampagneDisk { bubbles: Vec<Bubble> },
    DiskMinusDisk { center: Complex64, radius: f64 },
}

impl DomainOracle {
    pub fn annulus(r_in: f64, r_out: f64) -> Result<Self, HarmonicError> {
        if !(r_in.is_finite() && r_out.is_finite() && 0.0 < r_in && r_in < r_out) {
            return Err(HarmonicError::InvalidDomain(format!(
                "annulus radii must satisfy 0 < r_in < r_out (got {r_in}, {r_out})"
            )));
        }
        Ok(DomainOracle::Annulus { r_in, r_out })
    }

    pub fn champagne(bubbles: Vec<Bubble>) -> Result<Self, HarmonicError> {
        for (i, b) in bubbles.iter().enumerate() {
            if !(b.radius > 0.0 && b.center.norm() + b.radius < 1.0) {
                return Err(HarmonicError::InvalidDomain(format!(
                    "bubble {i} must be a disk of positive radius strictly inside the unit disk"
                )));
            }
            for (j, o) in bubbles.iter().enumerate().skip(i + 1) {
                if (b.center - o.center).norm() <= b.radius + o.radius {
                    return Err(HarmonicError::InvalidDomain(format!(
                        "bubbles {i} and {j} intersect"
                    )));
                }
            }
        }
        Ok(DomainOracle::ChampagneDisk { bubbles })
    }

    /// `n` equal bubbles with centres evenly spaced on the circle
    /// `|z| = ring`, the first at angle `phase`.
    pub fn champagne_ring(
        n: usize,
        ring: f64,
        radius: f64,
        phase: f64,
    ) -> Result<Self, HarmonicError> {
        DomainOracle::champagne(
            (0..n)
                .map(|k| Bubble {
                    center: Complex64::from_polar(ring, phase + TAU * k as f64 / n as f64),
                    radius,
                })
                .collect(),
        )
    }

    pub fn disk_minus_disk(center: Complex64, radius: f64) -> Result<Self, HarmonicError> {
        DomainOracle::champagne(vec![Bubble { center, radius }])?;
        Ok(DomainOracle::DiskMinusDisk { center, radius })
    }

    /// Re-checks the invariants of a deserialised oracle.
    pub fn validated(self) -> Result<Self, HarmonicError> {
        match self {
            DomainOracle::Annulus { r_in, r_out } => DomainOracle::annulus(r_in, r_out),
            DomainOracle::ChampagneDisk { bubbles } => DomainOracle::champagne(bubbles),
            DomainOracle::DiskMinusDisk { center, radius } => {
                DomainOracle::disk_minus_disk(center, radius)
            }
        }
    }

    pub fn n_components(&self) -> usize {
        match self {
            DomainOracle::Annulus { .. } | DomainOracle::DiskMinusDisk { .. } => 2,
            DomainOracle::ChampagneDisk { bubbles } => bubbles.len() + 1,
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            DomainOracle::Annulus { r_out, .. } => 2.0 * r_out,
            _ => 2.0,
        }
    }

    /// Centre of each boundary circle, indexed by component id.
    pub fn component_center(&self, id: u32) -> Complex64 {
        match self {
            DomainOracle::Annulus { .. } => Complex64::new(0.0, 0.0),
            DomainOracle::ChampagneDisk { bubbles } => {
                if id == 0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    bubbles[id as usize - 1].center
                }
            }
            DomainOracle::DiskMinusDisk { center, .. } => {
                if id == 0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    *center
                }
            }
        }
    }

    /// Signed distance to the boundary (negative outside the domain) and the
    /// id of the nearest component.
    pub fn distance(&self, z: Complex64) -> (f64, u32) {
        match self {
            DomainOracle::Annulus { r_in, r_out } => {
                let r = z.norm();
                let (di, dout) = (r - r_in, r_out - r);
                if di <= dout {
                    (di, 0)
                } else {
                    (dout, 1)
                }
            }
            DomainOracle::ChampagneDisk { bubbles } => {
                let mut best = (1.0 - z.norm(), 0u32);
                for (k, b) in bubbles.iter().enumerate() {
                    let d = (z - b.center).norm() - b.radius;
                    if d < best.0 {
                        best = (d, k as u32 + 1);
                    }
                }
                best
            }
            DomainOracle::DiskMinusDisk { center, radius } => {
                let outer = 1.0 - z.norm();
                let inner = (z - center).norm() - radius;
                if outer <= inner {
                    (outer, 0)
                } else {
                    (inner, 1)
                }
            }
        }
    }

    /// The same domain rotated about the origin by `angle`.
    pub fn rotated(&self, angle: f64) -> DomainOracle {
        let rot = Complex64::from_polar(1.0, angle);
        match self {
            DomainOracle::Annulus { .. } => self.clone(),
            DomainOracle::ChampagneDisk { bubbles } => DomainOracle::ChampagneDisk {
                bubbles: bubbles
                    .iter()
                    .map(|b| Bubble {
                        center: b.center * rot,
                        radius: b.radius,
                    })
                    .collect(),
            },
            DomainOracle::DiskMinusDisk { center, radius } => DomainOracle::DiskMinusDisk {
                center: center * rot,
                radius: *radius,
            },
        }
    }

    /// Closed-form harmonic measure of the outer circle, where one exists:
    /// annuli, and a single bubble centred at the origin. Both reduce to the
    /// harmonic function `ln(|z|/r_in) / ln(r_out/r_in)`.
    pub fn closed_form_outer_mass(&self, base: Complex64) -> Option<f64> {
        let log_ratio = |r_in: f64, r_out: f64| (base.norm() / r_in).ln() / (r_out / r_in).ln();
        match self {
            DomainOracle::Annulus { r_in, r_out } => Some(log_ratio(*r_in, *r_out)),
            DomainOracle::ChampagneDisk { bubbles }
                if bubbles.len() == 1 && bubbles[0].center.norm() == 0.0 =>
            {
                Some(log_ratio(bubbles[0].radius, 1.0))
            }
            DomainOracle::DiskMinusDisk { center, radius } if center.norm() == 0.0 => {
                Some(log_ratio(*radius, 1.0))
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkParams {
    pub walks: u64,
    /// `None` selects `1e−6 · diameter`.
    pub epsilon_shell: Option<f64>,
    pub step_cap: u64,
    pub seed: u64,
    pub n_bins: usize,
}

impl WalkParams {
    pub fn new(walks: u64, seed: u64, n_bins: usize) -> Self {
        WalkParams {
            walks,
            epsilon_shell: None,
            step_cap: DEFAULT_STEP_CAP,
            seed,
            n_bins,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkResult {
    pub hits: Vec<ArcHistogram>,
    pub walks: u64,
    pub stalled: u64,
    pub seed: u64,
    pub epsilon_shell: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkSummary {
    pub walks: u64,
    pub stalled: u64,
    pub seed: u64,
    pub epsilon_shell: f64,
    pub component_masses: Vec<f64>,
}

impl WalkResult {
    pub fn component_masses(&self) -> Vec<f64> {
        self.hits.iter().map(|h| h.component_mass()).collect()
    }

    pub fn summary(&self) -> WalkSummary {
        WalkSummary {
            walks: self.walks,
            stalled: self.stalled,
            seed: self.seed,
            epsilon_shell: self.epsilon_shell,
            component_masses: self.component_masses(),
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        histogram::write_csv(out, &self.hits)
    }
}

/// Outcome of one walk: exit component and angle, or `None` if it stalled.
fn one_walk<R: Rng>(
    domain: &DomainOracle,
    base: Complex64,
    eps: f64,
    step_cap: u64,
    rng: &mut R,
) -> Option<(u32, f64)> {
    let mut z = base;
    for _ in 0..step_cap {
        let (d, comp) = domain.distance(z);
        if d < eps {
            return Some((comp, (z - domain.component_center(comp)).arg()));
        }
        let (s, c) = (rng.gen::<f64>() * TAU).sin_cos();
        z += Complex64::new(d * c, d * s);
    }
    None
}

pub fn walk_on_spheres(
    domain: &DomainOracle,
    base: Complex64,
    params: &WalkParams,
) -> Result<WalkResult, HarmonicError> {
    if params.walks == 0 || params.n_bins == 0 || params.step_cap == 0 {
        return Err(HarmonicError::InvalidInput(
            "walks, n_bins and step_cap must be at least 1".into(),
        ));
    }
    let eps = params.epsilon_shell.unwrap_or(1e-6 * domain.diameter());
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(HarmonicError::InvalidInput(format!(
            "epsilon_shell = {eps} must be positive"
        )));
    }
    let (d0, _) = domain.distance(base);
    if !(d0 > eps) {
        return Err(HarmonicError::BasePointOnBoundary { base, distance: d0 });
    }
    let n_comp = domain.n_components();
    let empty = || {
        (
            (0..n_comp)
                .map(|c| ArcHistogram::new(c as u32, params.n_bins))
                .collect::<Vec<_>>(),
            0u64,
        )
    };
    let block = rng::BLOCK as u64;
    let blocks = params.walks.div_ceil(block);
    let (mut hits, stalled) = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let (mut h, mut stalled) = empty();
            for i in b * block..((b + 1) * block).min(params.walks) {
                let mut r = rng::stream(params.seed, i);
                match one_walk(domain, base, eps, params.step_cap, &mut r) {
                    Some((comp, angle)) => h[comp as usize].record(angle),
                    None => stalled += 1,
                }
            }
            (h, stalled)
        })
        .reduce(empty, |(mut ha, sa), (hb, sb)| {
            for (x, y) in ha.iter_mut().zip(&hb) {
                x.merge(y);
            }
            (ha, sa + sb)
        });
    for h in hits.iter_mut() {
        h.total = params.walks;
    }
    if stalled as f64 >= MAX_STALL_RATE * params.walks as f64 {
        return Err(HarmonicError::StallRateExceeded {
            stalled,
            walks: params.walks,
        });
    }
    Ok(WalkResult {
        hits,
        walks: params.walks,
        stalled,
        seed: params.seed,
        epsilon_shell: eps,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportReport {
    pub pass: bool,
    pub min_bin_mass: f64,
    pub smallest_mass: f64,
    /// `(component_id, bin_index, mass)` of every bin below the threshold.
    pub failing: Vec<(u32, usize, f64)>,
}

pub fn support_test(result: &WalkResult, min_bin_mass: f64) -> SupportReport {
    let mut failing = Vec::new();
    let mut smallest = f64::INFINITY;
    for h in &result.hits {
        for k in 0..h.n_bins() {
            let m = h.mass(k);
            smallest = smallest.min(m);
            if m <= min_bin_mass {
                failing.push((h.component_id, k, m));
            }
        }
    }
    SupportReport {
        pass: failing.is_empty(),
        min_bin_mass,
        smallest_mass: smallest,
        failing,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValidation {
    pub tv_distance: f64,
    pub threshold: f64,
    pub pass: bool,
    pub wos: WalkResult,
    pub pushforward: Pushforward,
}

/// Compares WoS from `π(0)` with the pushforward of arc length through the
/// covering. Both estimators get independent seeds derived from `seed`.
pub fn cross_validate(
    domain: &DomainOracle,
    model: &CoveringModel,
    walks: u64,
    seed: u64,
    n_bins: usize,
) -> Result<CrossValidation, HarmonicError> {
    let (
        DomainOracle::Annulus { r_in, r_out },
        ModelDomain::Annulus {
            r_in: m_in,
            r_out: m_out,
        },
    ) = (domain, model.domain())
    else {
        return Err(HarmonicError::DomainMismatch(
            "cross-validation needs an annulus oracle and an annulus model".into(),
        ));
    };
    let same = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
    if !(same(*r_in, m_in) && same(*r_out, m_out)) {
        return Err(HarmonicError::DomainMismatch(format!(
            "oracle A({r_in}, {r_out}) vs model A({m_in}, {m_out})"
        )));
    }
    let base = model
        .cover_eval(Complex64::new(0.0, 0.0))
        .map_err(|e| HarmonicError::InvalidInput(e.to_string()))?;
    let wos = walk_on_spheres(
        domain,
        base,
        &WalkParams::new(walks, rng::derive_seed(seed, 1), n_bins),
    )?;
    let pushforward = model
        .pushforward_measure(walks as usize, n_bins, rng::derive_seed(seed, 2))
        .map_err(|e| HarmonicError::InvalidInput(e.to_string()))?;
    let tv_distance = histogram::total_variation(&wos.hits, &pushforward.histograms);
    let threshold = CROSS_VALIDATION_C / (walks as f64).sqrt();
    Ok(CrossValidation {
        tv_distance,
        threshold,
        pass: tv_distance < threshold,
        wos,
        pushforward,
    })
}
