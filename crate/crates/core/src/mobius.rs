//! Möbius transformations `z ↦ (az + b) / (cz + d)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Conjugacy class of a Möbius map, read off from the normalised trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MobiusClass {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
    Loxodromic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mobius {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Mobius {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Mobius { a, b, c, d }
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Mobius::new(one, zero, zero, one)
    }

    /// The disk automorphism `z ↦ tanh(artanh z + shift)`, which fixes ±1.
    /// Positive shifts attract towards +1.
    pub fn disk_translation(shift: f64) -> Self {
        let t = Complex64::new(shift.tanh(), 0.0);
        let one = Complex64::new(1.0, 0.0);
        Mobius::new(one, t, t, one)
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    /// Finite image of `z`, or `None` at the pole.
    pub fn apply(&self, z: Complex64) -> Option<Complex64> {
        let den = self.c * z + self.d;
        if den == Complex64::new(0.0, 0.0) {
            None
        } else {
            Some((self.a * z + self.b) / den)
        }
    }

    pub fn derivative(&self, z: Complex64) -> Option<Complex64> {
        let den = self.c * z + self.d;
        if den == Complex64::new(0.0, 0.0) {
            None
        } else {
            Some(self.det() / (den * den))
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Mobius) -> Mobius {
        Mobius::new(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )
    }

    /// Scale so that `ad − bc = 1`.
    pub fn normalized(&self) -> Mobius {
        let s = self.det().sqrt();
        Mobius::new(self.a / s, self.b / s, self.c / s, self.d / s)
    }

    pub fn classify(&self, tol: f64) -> MobiusClass {
        let m = self.normalized();
        if (m.b.norm() < tol && m.c.norm() < tol && (m.a - m.d).norm() < tol)
            || (m.b.norm() < tol && m.c.norm() < tol && (m.a + m.d).norm() < tol)
        {
            return MobiusClass::Identity;
        }
        let tr = m.a + m.d;
        let tr2 = tr * tr;
        if tr2.im.abs() > tol {
            MobiusClass::Loxodromic
        } else if (tr2.re - 4.0).abs() <= tol {
            MobiusClass::Parabolic
        } else if tr2.re > 4.0 {
            MobiusClass::Hyperbolic
        } else if tr2.re >= 0.0 {
            MobiusClass::Elliptic
        } else {
            MobiusClass::Loxodromic
        }
    }

    /// Finite fixed points: roots of `c z² + (d − a) z − b = 0`.
    pub fn fixed_points(&self) -> Vec<Complex64> {
        let zero = Complex64::new(0.0, 0.0);
        let qa = self.c;
        let qb = self.d - self.a;
        let qc = -self.b;
        if qa == zero {
            if qb == zero {
                return Vec::new();
            }
            return vec![-qc / qb];
        }
        let disc = (qb * qb - 4.0 * qa * qc).sqrt();
        // Pick the numerically stable pairing of the two roots.
        let q = if (qb.conj() * disc).re >= 0.0 {
            -0.5 * (qb + disc)
        } else {
            -0.5 * (qb - disc)
        };
        if q == zero {
            return vec![zero];
        }
        let r1 = q / qa;
        let r2 = qc / q;
        if (r1 - r2).norm() <= 1e-14 * (1.0 + r1.norm()) {
            vec![r1]
        } else {
            vec![r1, r2]
        }
    }

    /// Fixed points lying on the unit circle within `tol`.
    pub fn boundary_fixed_points(&self, tol: f64) -> Vec<Complex64> {
        self.fixed_points()
            .into_iter()
            .filter(|p| (p.norm() - 1.0).abs() <= tol)
            .collect()
    }

    pub fn fixes_origin(&self) -> bool {
        self.b == Complex64::new(0.0, 0.0) && self.d != Complex64::new(0.0, 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn translation_fixes_plus_minus_one() {
        let g = Mobius::disk_translation(0.7);
        for p in [c(1.0, 0.0), c(-1.0, 0.0)] {
            assert!((g.apply(p).unwrap() - p).norm() < 1e-15);
        }
        assert_eq!(g.classify(1e-12), MobiusClass::Hyperbolic);
        let mut fps = g.boundary_fixed_points(1e-12);
        fps.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert_eq!(fps.len(), 2);
        assert!((fps[0] - c(-1.0, 0.0)).norm() < 1e-14);
        assert!((fps[1] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn compose_matches_sequential_application() {
        let f = Mobius::new(c(1.0, 0.5), c(0.2, 0.0), c(0.1, -0.3), c(2.0, 0.0));
        let g = Mobius::disk_translation(0.3);
        let z = c(0.2, 0.4);
        let lhs = f.compose(&g).apply(z).unwrap();
        let rhs = f.apply(g.apply(z).unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn classes() {
        assert_eq!(Mobius::identity().classify(1e-12), MobiusClass::Identity);
        let rot = Mobius::new(c(0.6, 0.8), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        assert_eq!(rot.classify(1e-12), MobiusClass::Elliptic);
        let par = Mobius::new(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        assert_eq!(par.classify(1e-12), MobiusClass::Parabolic);
        let lox = Mobius::new(c(2.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        assert_eq!(lox.classify(1e-12), MobiusClass::Loxodromic);
    }
}
