use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{MapError, MapSpec};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemiconjReport {
    pub alpha: f64,
    pub samples: usize,
    pub max_residual: f64,
    pub worst_z: Complex64,
    /// Largest residual divided by the rounding floor `|f(w)|·α|w + 1/w|·ε`
    /// coming from the input `w = e^{iz}` alone.
    pub max_scaled_residual: f64,
}

/// Largest `|f(e^{iz}) − e^{iF(z)}|` over `samples` points with
/// `Re z ∈ [−π, π)` and `|Im z| ≤ im_bound`.
pub fn semiconjugacy_check(
    alpha: f64,
    samples: usize,
    im_bound: f64,
    seed: u64,
) -> Result<SemiconjReport, MapError> {
    if samples == 0 {
        return Err(MapError::InvalidParameter(
            "samples must be positive".into(),
        ));
    }
    if !(im_bound >= 0.0 && im_bound.is_finite()) {
        return Err(MapError::InvalidParameter(
            "imaginary bound must be finite and ≥ 0".into(),
        ));
    }
    let f = MapSpec::exp_baker(alpha)?;
    let big_f = MapSpec::sine_model(alpha)?;
    let mut r = rng::stream(seed, 0);
    let mut rep = SemiconjReport {
        alpha,
        samples,
        max_residual: 0.0,
        worst_z: Complex64::new(0.0, 0.0),
        max_scaled_residual: 0.0,
    };
    for _ in 0..samples {
        let z = Complex64::new(
            r.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
            r.gen_range(-im_bound..=im_bound),
        );
        let w = (Complex64::i() * z).exp();
        let lhs = f.eval(w)?;
        let rhs = (Complex64::i() * big_f.eval(z)?).exp();
        let res = (lhs - rhs).norm();
        let floor = lhs.norm() * alpha * (w + w.inv()).norm() * f64::EPSILON;
        if res > rep.max_residual {
            rep.max_residual = res;
            rep.worst_z = z;
        }
        rep.max_scaled_residual = rep
            .max_scaled_residual
            .max(res / floor.max(f64::MIN_POSITIVE));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_alpha_meets_absolute_bound() {
        let r = semiconjugacy_check(0.1, 1000, 3.0, 1).unwrap();
        assert!(r.max_residual < 1e-12, "{r:?}");
        assert!(semiconjugacy_check(0.4, 0, 3.0, 1).is_err());
        assert!(semiconjugacy_check(0.7, 10, 3.0, 1).is_err());
    }

    #[test]
    fn residual_stays_at_rounding_floor() {
        for alpha in [0.1, 0.25, 0.4] {
            let r = semiconjugacy_check(alpha, 1000, 3.0, 5).unwrap();
            assert!(r.max_scaled_residual < 8.0, "{r:?}");
        }
    }
}
