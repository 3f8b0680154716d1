use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{MapError, MapSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EscapeEnd {
    Zero,
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitEnd {
    Completed,
    Escaped { end: EscapeEnd, radius: f64 },
    HitSingularity { index: usize },
    Converged { target: Complex64, tol: f64 },
}

/// Iterates `z0, f(z0), f²(z0), …` together with the reason iteration stopped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Orbit {
    pub points: Vec<Complex64>,
    pub terminal: OrbitEnd,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOutcome {
    pub end: OrbitEnd,
    /// Number of map applications performed.
    pub steps: usize,
    pub last: Complex64,
}

/// Runs the orbit without storing it; `visit` sees every point, `z0` first.
///
/// Stopping tests are applied to each point before the map is applied to it:
/// convergence to `target`, then escape (`|z| > R`, and `|z| < 1/R` for the
/// self-maps of ℂ*). Overflow of the exponent and poles count as escape to
/// infinity; hitting an essential singularity stops the orbit.
pub fn trace_orbit<V>(
    map: &MapSpec,
    z0: Complex64,
    n_max: usize,
    escape_radius: f64,
    target: Option<(Complex64, f64)>,
    mut visit: V,
) -> TraceOutcome
where
    V: FnMut(Complex64),
{
    let punctured = map.is_punctured_plane_map();
    let inner = 1.0 / escape_radius;
    let mut z = z0;
    visit(z);
    let escaped = |end| OrbitEnd::Escaped {
        end,
        radius: escape_radius,
    };
    for step in 0..=n_max {
        let done = |end| TraceOutcome {
            end,
            steps: step,
            last: z,
        };
        if let Some((t, tol)) = target {
            if (z - t).norm() <= tol {
                return done(OrbitEnd::Converged { target: t, tol });
            }
        }
        let r = z.norm();
        if r > escape_radius {
            return done(escaped(EscapeEnd::Infinity));
        }
        if punctured && r < inner {
            return done(escaped(EscapeEnd::Zero));
        }
        if step == n_max {
            return done(OrbitEnd::Completed);
        }
        match map.eval(z) {
            Ok(w) if w.re.is_finite() && w.im.is_finite() => {
                z = w;
                visit(z);
            }
            Ok(_) | Err(MapError::Overflow(_)) | Err(MapError::Pole(_)) => {
                return done(escaped(EscapeEnd::Infinity));
            }
            Err(MapError::SingularityHit { index, .. }) => {
                return done(OrbitEnd::HitSingularity { index });
            }
            Err(_) => return done(OrbitEnd::HitSingularity { index: 0 }),
        }
    }
    unreachable!("loop returns at step == n_max")
}

pub fn orbit(
    map: &MapSpec,
    z0: Complex64,
    n_max: usize,
    escape_radius: f64,
    target: Option<(Complex64, f64)>,
) -> Result<Orbit, MapError> {
    if n_max < 1 {
        return Err(MapError::InvalidInput("n_max must be at least 1".into()));
    }
    if !(escape_radius > 0.0) {
        return Err(MapError::InvalidInput(format!(
            "escape radius {escape_radius} must be positive"
        )));
    }
    if let Some((_, tol)) = target {
        if !(tol >= 0.0) {
            return Err(MapError::InvalidInput(
                "target tolerance must be non-negative".into(),
            ));
        }
    }
    let mut points = Vec::new();
    let out = trace_orbit(map, z0, n_max, escape_radius, target, |z| points.push(z));
    Ok(Orbit {
        points,
        terminal: out.end,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn fixed_point_converges_immediately() {
        let f = MapSpec::exp_baker(0.4).unwrap();
        let o = orbit(&f, c(1.0, 0.0), 50, 1e10, Some((c(1.0, 0.0), 1e-9))).unwrap();
        assert_eq!(o.points, vec![c(1.0, 0.0)]);
        assert!(matches!(o.terminal, OrbitEnd::Converged { .. }));
        let o = orbit(&f, c(1.0, 0.0), 5, 1e10, None).unwrap();
        assert_eq!(o.points, vec![c(1.0, 0.0); 6]);
        assert_eq!(o.terminal, OrbitEnd::Completed);
    }

    #[test]
    fn circle_orbit_follows_real_model() {
        let alpha = 0.4;
        let f = MapSpec::exp_baker(alpha).unwrap();
        let o = orbit(
            &f,
            Complex64::from_polar(1.0, 0.3),
            200,
            1e10,
            Some((c(1.0, 0.0), 1e-9)),
        )
        .unwrap();
        assert!(matches!(o.terminal, OrbitEnd::Converged { .. }));
        // Independent model: θ ↦ 2α sin θ.
        let mut theta: f64 = 0.3;
        for p in &o.points {
            assert!((p.arg() - theta).abs() < 1e-12);
            theta = 2.0 * alpha * theta.sin();
        }
        let mut theta: f64 = 0.3;
        let mut n = 0;
        while (Complex64::from_polar(1.0, theta) - c(1.0, 0.0)).norm() > 1e-9 {
            theta = 2.0 * alpha * theta.sin();
            n += 1;
        }
        assert_eq!(o.points.len(), n + 1);
    }

    #[test]
    fn mcmullen_large_start_escapes() {
        let m = MapSpec::mcmullen(2, 2, c(1e-4, 0.0)).unwrap();
        let o = orbit(&m, c(5.0, 3.0), 100, 1e10, None).unwrap();
        assert!(matches!(
            o.terminal,
            OrbitEnd::Escaped {
                end: EscapeEnd::Infinity,
                ..
            }
        ));
        // Direct iteration oracle.
        let mut z = c(5.0, 3.0);
        let mut n = 0;
        while z.norm() <= 1e10 {
            z = z * z + c(1e-4, 0.0) / (z * z);
            n += 1;
        }
        assert_eq!(o.points.len(), n + 1);
    }

    #[test]
    fn punctured_plane_escapes_to_zero() {
        let f = MapSpec::exp_baker(0.4).unwrap();
        // Negative reals: f(−x) = exp(−α(x − 1/x)); large x is sent near 0.
        let o = orbit(&f, c(-60.0, 0.0), 100, 1e10, Some((c(1.0, 0.0), 1e-9))).unwrap();
        assert!(matches!(
            o.terminal,
            OrbitEnd::Escaped {
                end: EscapeEnd::Zero,
                ..
            }
        ));
    }

    #[test]
    fn successor_consistency() {
        let f = MapSpec::exp_baker(0.3).unwrap();
        let o = orbit(&f, c(0.3, 2.0), 300, 1e10, None).unwrap();
        for w in o.points.windows(2) {
            assert_eq!(f.eval(w[0]).unwrap(), w[1]);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let f = MapSpec::power(2).unwrap();
        assert!(orbit(&f, c(0.5, 0.0), 0, 10.0, None).is_err());
        assert!(orbit(&f, c(0.5, 0.0), 10, 0.0, None).is_err());
    }
}
