//! The catalogue of concrete holomorphic maps.
//!
//! Every map is described by a [`MapSpec`]: a validated [`MapKind`] together
//! with its essential singularities and whatever fixed-point data is known in
//! closed form. Evaluation, derivatives and critical data are pure functions of
//! the spec.
//!
//! Baker's map `f(z) = exp(α(z − 1/z))` is semiconjugate to the sine model
//! `F(z) = 2α sin z` through `z ↦ e^{iz}`, fixes `1` with multiplier `2α`, and
//! has critical points `±i` with critical values `e^{±2iα}`. Some sources call
//! `±i` the critical *values*; solving `f′(z) = 0` gives them as critical
//! points, and the values stored here are the images `e^{±2iα}`.

mod critical;
mod dd;
mod orbit;
mod roots;
mod semiconj;

pub use critical::critical_data;
pub use orbit::{orbit, trace_orbit, EscapeEnd, Orbit, OrbitEnd, TraceOutcome};
pub use roots::bisect;
pub use semiconj::{semiconjugacy_check, SemiconjReport};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mobius::Mobius;

/// Largest real part accepted in the exponent of exponential-type maps.
pub const EXPONENT_CAP: f64 = 700.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    #[error("invalid map parameter: {0}")]
    InvalidParameter(String),
    #[error("point {z} coincides with singularity #{index}")]
    SingularityHit { index: usize, z: Complex64 },
    #[error("point {0} is a pole")]
    Pole(Complex64),
    #[error("exponent real part {0} exceeds the cap {EXPONENT_CAP}")]
    Overflow(f64),
    #[error("{0}")]
    Unsupported(String),
    #[error("no sign change on [{a}, {b}]")]
    NoSignChange { a: f64, b: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// A point of the Riemann sphere. Only the rational maps of the zoo consume
/// or produce [`ExtPoint::Infinity`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtPoint {
    Finite(Complex64),
    Infinity,
}

impl ExtPoint {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            ExtPoint::Finite(z) => Some(z),
            ExtPoint::Infinity => None,
        }
    }
}

/// Parameters of one map of the zoo.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum MapKind {
    /// `exp(α(z − 1/z))` on ℂ*.
    ExpBaker { alpha: f64 },
    /// `2α sin z`.
    SineModel { alpha: f64 },
    /// `z^d`.
    PowerMap { degree: u32 },
    /// `e^{iθ} z`.
    Rotation { theta: f64 },
    Mobius {
        a: Complex64,
        b: Complex64,
        c: Complex64,
        d: Complex64,
    },
    /// `λ ∏ (z − a_k) / (1 − conj(a_k) z)`.
    FiniteBlaschke {
        zeros: Vec<Complex64>,
        rotation: Complex64,
    },
    /// Keen's map `z exp(α(z + 1/z) + λ)` on ℂ*.
    Keen { alpha: f64, lambda: Complex64 },
    /// `z^m + c / z^l`.
    #[serde(rename = "mcmullen")]
    McMullen { m: u32, l: u32, c: Complex64 },
}

/// A validated map together with its singular and fixed-point data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MapKind", into = "MapKind")]
pub struct MapSpec {
    kind: MapKind,
    singularities: Vec<Complex64>,
    fixed_points_known: Option<Vec<(Complex64, Complex64)>>,
}

impl TryFrom<MapKind> for MapSpec {
    type Error = MapError;

    fn try_from(kind: MapKind) -> Result<Self, MapError> {
        MapSpec::new(kind)
    }
}

impl From<MapSpec> for MapKind {
    fn from(spec: MapSpec) -> MapKind {
        spec.kind
    }
}

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check_alpha(alpha: f64) -> Result<(), MapError> {
    if alpha.is_finite() && alpha > 0.0 && alpha < 0.5 {
        Ok(())
    } else {
        Err(MapError::InvalidParameter(format!(
            "alpha = {alpha} must lie in the open interval (0, 1/2)"
        )))
    }
}

fn finite(z: Complex64, what: &str) -> Result<(), MapError> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(MapError::InvalidParameter(format!("{what} must be finite")))
    }
}

impl MapSpec {
    pub fn new(kind: MapKind) -> Result<Self, MapError> {
        let mut singularities = Vec::new();
        let mut fixed = None;
        match &kind {
            MapKind::ExpBaker { alpha } => {
                check_alpha(*alpha)?;
                singularities.push(c64(0.0, 0.0));
                fixed = Some(vec![(c64(1.0, 0.0), c64(2.0 * alpha, 0.0))]);
            }
            MapKind::SineModel { alpha } => {
                check_alpha(*alpha)?;
                fixed = Some(vec![(c64(0.0, 0.0), c64(2.0 * alpha, 0.0))]);
            }
            MapKind::PowerMap { degree } => {
                if *degree == 0 {
                    return Err(MapError::InvalidParameter(
                        "power map degree must be at least 1".into(),
                    ));
                }
                if *degree >= 2 {
                    fixed = Some(vec![(c64(0.0, 0.0), c64(0.0, 0.0))]);
                }
            }
            MapKind::Rotation { theta } => {
                if !theta.is_finite() {
                    return Err(MapError::InvalidParameter("theta must be finite".into()));
                }
                fixed = Some(vec![(c64(0.0, 0.0), Complex64::from_polar(1.0, *theta))]);
            }
            MapKind::Mobius { a, b, c, d } => {
                for (v, n) in [(a, "a"), (b, "b"), (c, "c"), (d, "d")] {
                    finite(*v, n)?;
                }
                let det = a * d - b * c;
                if det.norm() == 0.0 {
                    return Err(MapError::InvalidParameter(
                        "Möbius coefficients must satisfy ad − bc ≠ 0".into(),
                    ));
                }
            }
            MapKind::FiniteBlaschke { zeros, rotation } => {
                finite(*rotation, "rotation")?;
                if (rotation.norm() - 1.0).abs() > 1e-12 {
                    return Err(MapError::InvalidParameter(format!(
                        "rotation factor {rotation} must have modulus 1"
                    )));
                }
                for a in zeros {
                    finite(*a, "zero")?;
                    if a.norm() >= 1.0 {
                        return Err(MapError::InvalidParameter(format!(
                            "Blaschke zero {a} must lie in the open unit disk"
                        )));
                    }
                }
            }
            MapKind::Keen { alpha, lambda } => {
                if !alpha.is_finite() {
                    return Err(MapError::InvalidParameter("alpha must be finite".into()));
                }
                finite(*lambda, "lambda")?;
                singularities.push(c64(0.0, 0.0));
            }
            MapKind::McMullen { m, l, c } => {
                if *m < 1 || *l < 1 {
                    return Err(MapError::InvalidParameter(
                        "McMullen exponents m, l must be at least 1".into(),
                    ));
                }
                finite(*c, "c")?;
                if c.norm() == 0.0 {
                    return Err(MapError::InvalidParameter(
                        "McMullen c must be nonzero".into(),
                    ));
                }
            }
        }
        Ok(MapSpec {
            kind,
            singularities,
            fixed_points_known: fixed,
        })
    }

    pub fn exp_baker(alpha: f64) -> Result<Self, MapError> {
        MapSpec::new(MapKind::ExpBaker { alpha })
    }

    pub fn sine_model(alpha: f64) -> Result<Self, MapError> {
        MapSpec::new(MapKind::SineModel { alpha })
    }

    pub fn power(degree: u32) -> Result<Self, MapError> {
        MapSpec::new(MapKind::PowerMap { degree })
    }

    pub fn rotation(theta: f64) -> Result<Self, MapError> {
        MapSpec::new(MapKind::Rotation { theta })
    }

    pub fn mobius(m: Mobius) -> Result<Self, MapError> {
        MapSpec::new(MapKind::Mobius {
            a: m.a,
            b: m.b,
            c: m.c,
            d: m.d,
        })
    }

    pub fn mcmullen(m: u32, l: u32, c: Complex64) -> Result<Self, MapError> {
        MapSpec::new(MapKind::McMullen { m, l, c })
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    /// Essential singularities in the finite plane. Infinity is implicit for
    /// the transcendental kinds.
    pub fn singularities(&self) -> &[Complex64] {
        &self.singularities
    }

    /// Known fixed points paired with their multipliers.
    pub fn fixed_points_known(&self) -> Option<&[(Complex64, Complex64)]> {
        self.fixed_points_known.as_deref()
    }

    /// Self-maps of ℂ* with essential singularities at both 0 and ∞; their
    /// orbits escape towards either end.
    pub fn is_punctured_plane_map(&self) -> bool {
        matches!(self.kind, MapKind::ExpBaker { .. } | MapKind::Keen { .. })
    }

    /// The Möbius form of the kinds that have one.
    pub fn as_mobius(&self) -> Option<Mobius> {
        match &self.kind {
            MapKind::Mobius { a, b, c, d } => Some(Mobius::new(*a, *b, *c, *d)),
            MapKind::Rotation { theta } => Some(Mobius::new(
                Complex64::from_polar(1.0, *theta),
                c64(0.0, 0.0),
                c64(0.0, 0.0),
                c64(1.0, 0.0),
            )),
            MapKind::PowerMap { degree: 1 } => Some(Mobius::identity()),
            _ => None,
        }
    }

    fn check_singular(&self, z: Complex64) -> Result<(), MapError> {
        for (index, s) in self.singularities.iter().enumerate() {
            if (z - s).norm() <= f64::EPSILON * (1.0 + s.norm()) {
                return Err(MapError::SingularityHit { index, z });
            }
        }
        Ok(())
    }

    /// Value of the map at a finite point.
    pub fn eval(&self, z: Complex64) -> Result<Complex64, MapError> {
        self.check_singular(z)?;
        match &self.kind {
            MapKind::ExpBaker { alpha } => {
                dd::exp_baker(*alpha, z, EXPONENT_CAP).map_err(MapError::Overflow)
            }
            MapKind::SineModel { alpha } => {
                if z.im.abs() > EXPONENT_CAP {
                    return Err(MapError::Overflow(z.im.abs()));
                }
                Ok(2.0 * alpha * z.sin())
            }
            MapKind::PowerMap { degree } => Ok(z.powu(*degree)),
            MapKind::Rotation { theta } => Ok(Complex64::from_polar(1.0, *theta) * z),
            MapKind::Mobius { a, b, c, d } => Mobius::new(*a, *b, *c, *d)
                .apply(z)
                .ok_or(MapError::Pole(z)),
            MapKind::FiniteBlaschke { zeros, rotation } => {
                let mut acc = *rotation;
                for a in zeros {
                    let den = c64(1.0, 0.0) - a.conj() * z;
                    if den.norm() == 0.0 {
                        return Err(MapError::Pole(z));
                    }
                    acc *= (z - a) / den;
                }
                Ok(acc)
            }
            MapKind::Keen { alpha, lambda } => {
                let w = *alpha * (z + z.inv()) + lambda;
                Ok(z * capped_exp(w)?)
            }
            MapKind::McMullen { m, l, c } => {
                if z.norm() == 0.0 {
                    return Err(MapError::Pole(z));
                }
                Ok(z.powu(*m) + c / z.powu(*l))
            }
        }
    }

    /// Evaluation on the Riemann sphere for the rational kinds.
    pub fn eval_ext(&self, p: ExtPoint) -> Result<ExtPoint, MapError> {
        match (&self.kind, p) {
            (MapKind::PowerMap { .. } | MapKind::McMullen { .. }, ExtPoint::Infinity) => {
                Ok(ExtPoint::Infinity)
            }
            (MapKind::McMullen { .. }, ExtPoint::Finite(z)) if z.norm() == 0.0 => {
                Ok(ExtPoint::Infinity)
            }
            (_, ExtPoint::Finite(z)) => self.eval(z).map(ExtPoint::Finite),
            (_, ExtPoint::Infinity) => Err(MapError::Unsupported(
                "the point at infinity is only handled by power and McMullen maps".into(),
            )),
        }
    }

    /// Closed-form complex derivative.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64, MapError> {
        self.check_singular(z)?;
        match &self.kind {
            MapKind::ExpBaker { alpha } => {
                let f = self.eval(z)?;
                let zi = z.inv();
                Ok(f * *alpha * (1.0 + zi * zi))
            }
            MapKind::SineModel { alpha } => {
                if z.im.abs() > EXPONENT_CAP {
                    return Err(MapError::Overflow(z.im.abs()));
                }
                Ok(2.0 * alpha * z.cos())
            }
            MapKind::PowerMap { degree } => Ok(f64::from(*degree) * z.powu(degree - 1)),
            MapKind::Rotation { theta } => Ok(Complex64::from_polar(1.0, *theta)),
            MapKind::Mobius { a, b, c, d } => Mobius::new(*a, *b, *c, *d)
                .derivative(z)
                .ok_or(MapError::Pole(z)),
            MapKind::FiniteBlaschke { zeros, rotation } => {
                // Product rule over the Möbius factors.
                let one = c64(1.0, 0.0);
                let mut factors = Vec::with_capacity(zeros.len());
                let mut dfactors = Vec::with_capacity(zeros.len());
                for a in zeros {
                    let den = one - a.conj() * z;
                    if den.norm() == 0.0 {
                        return Err(MapError::Pole(z));
                    }
                    factors.push((z - a) / den);
                    dfactors.push((1.0 - a.norm_sqr()) / (den * den));
                }
                let mut sum = c64(0.0, 0.0);
                for (k, &df) in dfactors.iter().enumerate() {
                    let mut term = df;
                    for (j, f) in factors.iter().enumerate() {
                        if j != k {
                            term *= f;
                        }
                    }
                    sum += term;
                }
                Ok(rotation * sum)
            }
            MapKind::Keen { alpha, .. } => {
                let f = self.eval(z)?;
                let zi = z.inv();
                Ok(f * (zi + *alpha * (1.0 - zi * zi)))
            }
            MapKind::McMullen { m, l, c } => {
                if z.norm() == 0.0 {
                    return Err(MapError::Pole(z));
                }
                Ok(f64::from(*m) * z.powu(m - 1) - f64::from(*l) * c / z.powu(l + 1))
            }
        }
    }
}

fn capped_exp(w: Complex64) -> Result<Complex64, MapError> {
    if w.re > EXPONENT_CAP {
        return Err(MapError::Overflow(w.re));
    }
    Ok(w.exp())
}
