//! Pixel classification of dynamical planes and PPM output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::map_zoo::{trace_orbit, EscapeEnd, MapKind, MapSpec, OrbitEnd};

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("unsupported map for rendering: {0}")]
    Unsupported(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("loop pixel ({i}, {j}) is not in the basin")]
    LoopNotInBasin { i: usize, j: usize },
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn default_tol() -> f64 {
    1e-6
}

fn default_escape() -> f64 {
    1e10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub center: Complex64,
    pub width: f64,
    pub height: f64,
    pub nx: usize,
    pub ny: usize,
    pub max_iter: usize,
    /// `None` selects the map's attracting fixed point, if it has one.
    #[serde(default)]
    pub target: Option<Complex64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_escape")]
    pub escape_radius: f64,
}

impl GridSpec {
    /// A square window `[c − h, c + h]²` sampled at `n × n`.
    pub fn square(center: Complex64, half_width: f64, n: usize, max_iter: usize) -> Self {
        GridSpec {
            center,
            width: 2.0 * half_width,
            height: 2.0 * half_width,
            nx: n,
            ny: n,
            max_iter,
            target: None,
            tol: default_tol(),
            escape_radius: default_escape(),
        }
    }

    pub fn validate(&self) -> Result<(), RenderError> {
        if self.nx == 0 || self.ny == 0 {
            return Err(RenderError::InvalidGrid(
                "nx and ny must be at least 1".into(),
            ));
        }
        if !(self.width > 0.0
            && self.height > 0.0
            && self.width.is_finite()
            && self.height.is_finite())
        {
            return Err(RenderError::InvalidGrid(
                "width and height must be positive".into(),
            ));
        }
        if !(self.tol > 0.0 && self.escape_radius > 1.0) {
            return Err(RenderError::InvalidGrid(
                "tol must be positive and escape_radius above 1".into(),
            ));
        }
        Ok(())
    }

    /// Pixel centres are placed at odd multiples of half a pixel from the
    /// window centre, so a window centred on the real axis is exactly
    /// mirror-symmetric: row `j` and row `ny − 1 − j` have negated imaginary
    /// offsets. Row 0 is the top.
    pub fn pixel_center(&self, i: usize, j: usize) -> Complex64 {
        let dx = (2.0 * i as f64 + 1.0 - self.nx as f64) * self.width / (2.0 * self.nx as f64);
        let dy = (self.ny as f64 - 1.0 - 2.0 * j as f64) * self.height / (2.0 * self.ny as f64);
        Complex64::new(self.center.re + dx, self.center.im + dy)
    }

    /// The pixel containing `z`, if inside the window.
    pub fn nearest_pixel(&self, z: Complex64) -> Option<(usize, usize)> {
        let u = (z.re - self.center.re) / self.width + 0.5;
        let v = 0.5 - (z.im - self.center.im) / self.height;
        if !(0.0..1.0).contains(&u) || !(0.0..1.0).contains(&v) {
            return None;
        }
        Some(((u * self.nx as f64) as usize, (v * self.ny as f64) as usize))
    }

    pub fn pixel_size(&self) -> (f64, f64) {
        (self.width / self.nx as f64, self.height / self.ny as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PixelVerdict {
    Attracted(u32),
    EscapedToZero(u32),
    EscapedToInfinity(u32),
    Singular,
    Undecided,
}

impl PixelVerdict {
    pub fn is_attracted(self) -> bool {
        matches!(self, PixelVerdict::Attracted(_))
    }

    /// The verdict with step counts dropped.
    pub fn category(self) -> u8 {
        match self {
            PixelVerdict::Attracted(_) => 0,
            PixelVerdict::EscapedToZero(_) => 1,
            PixelVerdict::EscapedToInfinity(_) => 2,
            PixelVerdict::Singular => 3,
            PixelVerdict::Undecided => 4,
        }
    }

    /// Category under `z ↦ 1/z`, which exchanges the two ends of ℂ*.
    pub fn inverted_category(self) -> u8 {
        match self {
            PixelVerdict::EscapedToZero(_) => 2,
            PixelVerdict::EscapedToInfinity(_) => 1,
            other => other.category(),
        }
    }

    fn rgb(self) -> [u8; 3] {
        let shade = |base: [u8; 3], steps: u32| {
            // Brightness falls off with the step count, to 30% at 64 steps.
            let s = u32::from(steps.min(64) as u8);
            let f = 100 - (70 * s) / 64;
            base.map(|c| ((u32::from(c) * f) / 100) as u8)
        };
        match self {
            PixelVerdict::Attracted(n) => shade([70, 130, 255], n),
            PixelVerdict::EscapedToZero(n) => shade([255, 150, 40], n),
            PixelVerdict::EscapedToInfinity(n) => shade([255, 240, 120], n),
            PixelVerdict::Singular => [220, 0, 0],
            PixelVerdict::Undecided => [0, 0, 0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedGrid {
    pub spec: GridSpec,
    /// Row-major, row 0 at the top.
    pub verdicts: Vec<PixelVerdict>,
}

impl ClassifiedGrid {
    pub fn get(&self, i: usize, j: usize) -> PixelVerdict {
        self.verdicts[j * self.spec.nx + i]
    }

    /// Pixel counts per category, in `category()` order.
    pub fn counts(&self) -> [u64; 5] {
        let mut c = [0; 5];
        for v in &self.verdicts {
            c[v.category() as usize] += 1;
        }
        c
    }

    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.spec.nx, self.spec.ny).into_bytes();
        out.reserve(3 * self.verdicts.len());
        for v in &self.verdicts {
            out.extend_from_slice(&v.rgb());
        }
        out
    }

    /// Whether all pixels in the 3×3 block around `(i, j)` share a category.
    pub fn uniform_around(&self, i: usize, j: usize) -> bool {
        let c = self.get(i, j).category();
        let (nx, ny) = (self.spec.nx as isize, self.spec.ny as isize);
        for dj in -1..=1isize {
            for di in -1..=1isize {
                let (x, y) = (i as isize + di, j as isize + dj);
                if x < 0 || y < 0 || x >= nx || y >= ny {
                    return false;
                }
                if self.get(x as usize, y as usize).category() != c {
                    return false;
                }
            }
        }
        true
    }
}

fn default_target(map: &MapSpec) -> Result<Option<Complex64>, RenderError> {
    match map.kind() {
        MapKind::ExpBaker { .. } => Ok(Some(Complex64::new(1.0, 0.0))),
        MapKind::SineModel { .. } => Ok(Some(Complex64::new(0.0, 0.0))),
        MapKind::McMullen { .. } => Ok(None),
        other => Err(RenderError::Unsupported(format!("{other:?}"))),
    }
}

pub fn classify_point(
    map: &MapSpec,
    z: Complex64,
    spec: &GridSpec,
    target: Option<Complex64>,
) -> PixelVerdict {
    let t = trace_orbit(
        map,
        z,
        spec.max_iter,
        spec.escape_radius,
        target.map(|t| (t, spec.tol)),
        |_| {},
    );
    let steps = t.steps as u32;
    match t.end {
        OrbitEnd::Converged { .. } => PixelVerdict::Attracted(steps),
        OrbitEnd::Escaped {
            end: EscapeEnd::Zero,
            ..
        } => PixelVerdict::EscapedToZero(steps),
        OrbitEnd::Escaped {
            end: EscapeEnd::Infinity,
            ..
        } => PixelVerdict::EscapedToInfinity(steps),
        OrbitEnd::HitSingularity { .. } => PixelVerdict::Singular,
        OrbitEnd::Completed => PixelVerdict::Undecided,
    }
}

/// Classifies every pixel centre of the grid; rows run in parallel.
pub fn classify_grid(map: &MapSpec, spec: &GridSpec) -> Result<ClassifiedGrid, RenderError> {
    spec.validate()?;
    let target = match spec.target {
        Some(t) => {
            default_target(map)?;
            Some(t)
        }
        None => default_target(map)?,
    };
    let verdicts: Vec<PixelVerdict> = (0..spec.ny)
        .into_par_iter()
        .flat_map_iter(|j| {
            (0..spec.nx).map(move |i| classify_point(map, spec.pixel_center(i, j), spec, target))
        })
        .collect();
    Ok(ClassifiedGrid {
        spec: spec.clone(),
        verdicts,
    })
}

pub fn write_image(grid: &ClassifiedGrid, path: &Path) -> Result<(), RenderError> {
    let io = |source| RenderError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut f = BufWriter::new(File::create(path).map_err(io)?);
    f.write_all(&grid.to_ppm()).map_err(io)?;
    f.flush().map_err(io)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopCertificate {
    pub inside_nonbasin: u64,
    pub outside_nonbasin: u64,
    /// Non-basin pixels on both sides: the loop is not contractible in the
    /// basin at this resolution.
    pub verdict: bool,
}

/// Checks that the circle `|z − center| = radius` runs through basin pixels
/// and counts non-basin pixels strictly inside and strictly outside it
/// (further than one pixel diagonal from the circle).
pub fn loop_probe(
    grid: &ClassifiedGrid,
    center: Complex64,
    radius: f64,
) -> Result<LoopCertificate, RenderError> {
    if !(radius > 0.0) {
        return Err(RenderError::InvalidGrid(
            "loop radius must be positive".into(),
        ));
    }
    let spec = &grid.spec;
    let (px, py) = spec.pixel_size();
    let diag = px.hypot(py);
    let samples = ((std::f64::consts::TAU * radius / px.min(py)) * 4.0).ceil() as usize + 8;
    for k in 0..samples {
        let z = center
            + Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / samples as f64);
        let Some((i, j)) = spec.nearest_pixel(z) else {
            return Err(RenderError::InvalidGrid("loop leaves the window".into()));
        };
        if !grid.get(i, j).is_attracted() {
            return Err(RenderError::LoopNotInBasin { i, j });
        }
    }
    let (mut inside, mut outside) = (0, 0);
    for j in 0..spec.ny {
        for i in 0..spec.nx {
            if grid.get(i, j).is_attracted() {
                continue;
            }
            let d = (spec.pixel_center(i, j) - center).norm();
            if d < radius - diag {
                inside += 1;
            } else if d > radius + diag {
                outside += 1;
            }
        }
    }
    Ok(LoopCertificate {
        inside_nonbasin: inside,
        outside_nonbasin: outside,
        verdict: inside > 0 && outside > 0,
    })
}

/// Mirror check: `verdict(conj z) = verdict(z)` on every pixel pair of a
/// window centred on the real axis. Returns the number of mismatches.
pub fn conjugation_mismatches(grid: &ClassifiedGrid) -> usize {
    let (nx, ny) = (grid.spec.nx, grid.spec.ny);
    let mut bad = 0;
    for j in 0..ny / 2 {
        for i in 0..nx {
            if grid.get(i, j) != grid.get(i, ny - 1 - j) {
                bad += 1;
            }
        }
    }
    bad
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InversionCheck {
    pub pairs_checked: u64,
    pub mismatches: u64,
}

/// `z ↦ 1/z` check: every pixel whose 3×3 neighbourhood has one category
/// is compared with the verdict of the point `1/z` itself, with the two ends
/// swapped. Matching against the pixel that contains `1/z` is unreliable,
/// since inversion stretches thin features near the origin across whole
/// pixels.
pub fn inversion_check(
    map: &MapSpec,
    grid: &ClassifiedGrid,
) -> Result<InversionCheck, RenderError> {
    let spec = &grid.spec;
    let target = match spec.target {
        Some(t) => Some(t),
        None => default_target(map)?,
    };
    let mut checked = 0;
    let mut bad = 0;
    for j in 0..spec.ny {
        for i in 0..spec.nx {
            let z = spec.pixel_center(i, j);
            if z.norm() == 0.0 || !grid.uniform_around(i, j) {
                continue;
            }
            checked += 1;
            let w = classify_point(map, z.inv(), spec, target);
            if grid.get(i, j).inverted_category() != w.category() {
                bad += 1;
            }
        }
    }
    Ok(InversionCheck {
        pairs_checked: checked,
        mismatches: bad,
    })
}
