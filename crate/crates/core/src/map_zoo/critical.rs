use num_complex::Complex64;

use super::{ExtPoint, MapError, MapKind, MapSpec};

/// Critical points paired with their critical values.
///
/// For the sine model the list is the fundamental pair `±π/2`; every other
/// critical point is a translate by a multiple of `π`. Finite Blaschke
/// products have their critical points computed as the roots of the numerator
/// of `B′`, which includes the reflections of the in-disk points across the
/// unit circle.
pub fn critical_data(map: &MapSpec) -> Result<Vec<(ExtPoint, ExtPoint)>, MapError> {
    let fin = ExtPoint::Finite;
    match map.kind() {
        MapKind::ExpBaker { .. } => [Complex64::i(), -Complex64::i()]
            .into_iter()
            .map(|z| Ok((fin(z), fin(map.eval(z)?))))
            .collect(),
        MapKind::SineModel { alpha } => {
            let h = std::f64::consts::FRAC_PI_2;
            Ok(vec![
                (
                    fin(Complex64::new(h, 0.0)),
                    fin(Complex64::new(2.0 * alpha, 0.0)),
                ),
                (
                    fin(Complex64::new(-h, 0.0)),
                    fin(Complex64::new(-2.0 * alpha, 0.0)),
                ),
            ])
        }
        MapKind::PowerMap { degree } => {
            if *degree >= 2 {
                let zero = fin(Complex64::new(0.0, 0.0));
                Ok(vec![(zero, zero), (ExtPoint::Infinity, ExtPoint::Infinity)])
            } else {
                Ok(Vec::new())
            }
        }
        MapKind::Rotation { .. } | MapKind::Mobius { .. } => Ok(Vec::new()),
        MapKind::McMullen { m, l, c } => {
            // m z^{m+l} = l c, plus the poles of order ≥ 2 at 0 and ∞.
            let n = m + l;
            let base = Complex64::new(f64::from(*l), 0.0) * c / f64::from(*m);
            let r = base.norm().powf(1.0 / f64::from(n));
            let phase = base.arg() / f64::from(n);
            let mut out = Vec::new();
            for k in 0..n {
                let z = Complex64::from_polar(
                    r,
                    phase + std::f64::consts::TAU * f64::from(k) / f64::from(n),
                );
                out.push((fin(z), fin(map.eval(z)?)));
            }
            if *l >= 2 {
                out.push((fin(Complex64::new(0.0, 0.0)), ExtPoint::Infinity));
            }
            if *m >= 2 {
                out.push((ExtPoint::Infinity, ExtPoint::Infinity));
            }
            Ok(out)
        }
        MapKind::FiniteBlaschke { zeros, .. } => {
            let one = Complex64::new(1.0, 0.0);
            let mut p = vec![one];
            let mut q = vec![one];
            for a in zeros {
                p = poly_mul(&p, &[-a, one]);
                q = poly_mul(&q, &[one, -a.conj()]);
            }
            let num = poly_sub(
                &poly_mul(&poly_deriv(&p), &q),
                &poly_mul(&p, &poly_deriv(&q)),
            );
            let num = trim(num);
            let mut out = Vec::new();
            for z in poly_roots(&num) {
                match map.eval(z) {
                    Ok(w) => out.push((fin(z), fin(w))),
                    Err(MapError::Pole(_)) => {}
                    Err(e) => return Err(e),
                }
            }
            Ok(out)
        }
        MapKind::Keen { .. } => Err(MapError::Unsupported(
            "Keen's map has no closed-form critical data".into(),
        )),
    }
}

/// Coefficients are stored lowest degree first.
fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).copied().unwrap_or_default() - b.get(i).copied().unwrap_or_default())
        .collect()
}

fn poly_deriv(a: &[Complex64]) -> Vec<Complex64> {
    if a.len() <= 1 {
        return vec![Complex64::new(0.0, 0.0)];
    }
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * i as f64)
        .collect()
}

fn trim(mut a: Vec<Complex64>) -> Vec<Complex64> {
    let scale = a.iter().map(|c| c.norm()).fold(0.0, f64::max);
    while a.len() > 1 && a.last().is_some_and(|c| c.norm() <= 1e-13 * scale) {
        a.pop();
    }
    a
}

fn horner(a: &[Complex64], z: Complex64) -> Complex64 {
    a.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// All roots by Durand–Kerner iteration followed by Newton polishing.
fn poly_roots(a: &[Complex64]) -> Vec<Complex64> {
    let deg = a.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    let lead = a[deg];
    let monic: Vec<Complex64> = a.iter().map(|c| c / lead).collect();
    let bound = 1.0 + monic[..deg].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut roots: Vec<Complex64> = (0..deg)
        .map(|k| {
            Complex64::from_polar(
                0.5 * bound,
                0.4 + std::f64::consts::TAU * k as f64 / deg as f64,
            )
        })
        .collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..deg {
            let zi = roots[i];
            let mut den = Complex64::new(1.0, 0.0);
            for (j, zj) in roots.iter().enumerate() {
                if j != i {
                    den *= zi - zj;
                }
            }
            if den.norm() == 0.0 {
                continue;
            }
            let step = horner(&monic, zi) / den;
            roots[i] = zi - step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * bound {
            break;
        }
    }
    let dmonic = poly_deriv(&monic);
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let d = horner(&dmonic, *r);
            if d.norm() == 0.0 {
                break;
            }
            *r -= horner(&monic, *r) / d;
        }
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exp_baker_critical_points_are_plus_minus_i() {
        let alpha = 0.4;
        let f = MapSpec::exp_baker(alpha).unwrap();
        let data = critical_data(&f).unwrap();
        assert_eq!(data.len(), 2);
        for (p, v) in data {
            let z = p.finite().unwrap();
            assert!(f.derivative(z).unwrap().norm() < 1e-15);
            let sign = z.im.signum();
            let want = Complex64::from_polar(1.0, sign * 2.0 * alpha);
            assert!((v.finite().unwrap() - want).norm() < 1e-15);
        }
    }

    #[test]
    fn sine_and_power() {
        let s = MapSpec::sine_model(0.4).unwrap();
        for (p, v) in critical_data(&s).unwrap() {
            let z = p.finite().unwrap();
            assert!(s.derivative(z).unwrap().norm() < 1e-15);
            assert!((s.eval(z).unwrap() - v.finite().unwrap()).norm() < 1e-15);
        }
        let p = MapSpec::power(3).unwrap();
        let d = critical_data(&p).unwrap();
        assert!(d.contains(&(ExtPoint::Infinity, ExtPoint::Infinity)));
        assert!(d.contains(&(ExtPoint::Finite(c(0.0, 0.0)), ExtPoint::Finite(c(0.0, 0.0)))));
    }

    #[test]
    fn mcmullen_critical_points() {
        let m = MapSpec::mcmullen(3, 2, c(0.01, 0.005)).unwrap();
        let d = critical_data(&m).unwrap();
        let finite: Vec<_> = d
            .iter()
            .filter_map(|(p, _)| p.finite())
            .filter(|z| z.norm() > 0.0)
            .collect();
        assert_eq!(finite.len(), 5);
        for z in finite {
            assert!(m.derivative(z).unwrap().norm() < 1e-12);
        }
        assert!(d.contains(&(ExtPoint::Finite(c(0.0, 0.0)), ExtPoint::Infinity)));
        assert!(d.contains(&(ExtPoint::Infinity, ExtPoint::Infinity)));
    }

    #[test]
    fn blaschke_critical_points() {
        let b = MapSpec::new(MapKind::FiniteBlaschke {
            zeros: vec![c(0.0, 0.0), c(0.5, 0.2), c(-0.3, -0.4)],
            rotation: c(0.0, 1.0),
        })
        .unwrap();
        let d = critical_data(&b).unwrap();
        // Degree 3 self-map of the sphere: 2·3 − 2 = 4 critical points.
        assert_eq!(d.len(), 4);
        let inside = d
            .iter()
            .filter(|(p, _)| p.finite().unwrap().norm() < 1.0)
            .count();
        assert_eq!(inside, 2);
        for (p, _) in d {
            let z = p.finite().unwrap();
            assert!(b.derivative(z).unwrap().norm() < 1e-9, "{z}");
        }
    }

    #[test]
    fn keen_is_unsupported() {
        let k = MapSpec::new(MapKind::Keen {
            alpha: 0.2,
            lambda: c(0.0, 0.0),
        })
        .unwrap();
        assert!(matches!(critical_data(&k), Err(MapError::Unsupported(_))));
    }
}
